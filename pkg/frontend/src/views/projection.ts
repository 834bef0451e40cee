/** Projection panel: 2-D scatter colored by cluster assignment, proline
 * axes with quartile ticks, and the cluster-sorted distance heatmap. */

import { clusterColor, mapHeatmapColor } from "../colors.js";
import type { DistanceMatrixDoc, SolutionDoc } from "../protocol.js";
import { extent, scaleLinear, type Scene, type SceneNode } from "../scene.js";

export interface ProjectionSceneOptions {
  width?: number;
  height?: number;
  pointRadius?: number;
}

export function buildProjectionScene(
  solution: SolutionDoc,
  opts: ProjectionSceneOptions = {},
): Scene {
  const width = opts.width ?? 360;
  const height = opts.height ?? 300;
  const nodes: SceneNode[] = [];
  const proj = solution.projection;
  if (!proj) {
    nodes.push({
      kind: "text",
      x: width / 2,
      y: height / 2,
      text: "no projection yet",
      anchor: "middle",
    });
    return { width, height, nodes };
  }

  const pad = 24;
  const xs = proj.coords.map((c) => c[0]);
  const ys = proj.coords.map((c) => c[1]);
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const sx = scaleLinear(x0, x1, pad, width - pad);
  const sy = scaleLinear(y0, y1, height - pad, pad);

  const labels = solution.clustering?.labels ?? null;
  const selected = new Set(solution.selection);
  proj.coords.forEach((c, i) => {
    const rowId = proj.row_ids[i];
    nodes.push({
      kind: "circle",
      x: sx(c[0]),
      y: sy(c[1]),
      r: opts.pointRadius ?? 3,
      fill: clusterColor(labels ? labels[i] : null),
      stroke: selected.has(rowId) ? "#000000" : undefined,
      id: `pt-${rowId}`,
      data: { rowId, label: labels ? labels[i] : null },
    });
  });

  for (const axis of proj.prolines) {
    if (axis.zero_length) continue;
    const points = axis.polyline.map(
      (p) => [sx(p[0]), sy(p[1])] as [number, number],
    );
    nodes.push({
      kind: "polyline",
      points,
      stroke: "#666666",
      width: 1,
      id: `proline-${axis.feature}`,
    });
    const last = points[points.length - 1];
    nodes.push({
      kind: "text",
      x: last[0],
      y: last[1],
      text: axis.feature,
      size: 9,
      fill: "#444444",
    });
    // quartile tick marks at fractional positions along the polyline
    for (const t of axis.ticks) {
      const lo = Math.floor(t);
      const hi = Math.min(lo + 1, points.length - 1);
      const frac = t - lo;
      const tx = points[lo][0] + (points[hi][0] - points[lo][0]) * frac;
      const ty = points[lo][1] + (points[hi][1] - points[lo][1]) * frac;
      nodes.push({
        kind: "circle",
        x: tx,
        y: ty,
        r: 1.5,
        fill: "#666666",
        id: `tick-${axis.feature}-${t.toFixed(2)}`,
      });
    }
  }
  return { width, height, nodes };
}

/** Distance heatmap cells; the normalization maps the largest distance to
 * the red endpoint so compact clusters show as cool diagonal blocks. */
export function buildDistanceHeatmapScene(
  view: DistanceMatrixDoc,
  size = 256,
): Scene {
  const m = view.values.length;
  const cell = size / Math.max(m, 1);
  let max = 0;
  for (const row of view.values) for (const v of row) max = Math.max(max, v);
  const nodes: SceneNode[] = [];
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      const norm = max > 0 ? view.values[i][j] / max : 0;
      nodes.push({
        kind: "rect",
        x: j * cell,
        y: i * cell,
        w: cell,
        h: cell,
        fill: mapHeatmapColor(norm),
        id: `dm-${i}-${j}`,
        data: { value: view.values[i][j], norm },
      });
    }
  }
  return { width: size, height: size, nodes };
}
