/** Central overview: per-solution thumbnail + profile + score cards inside
 * an outer ring of view segments (one per binding, tinted by solution). */

import { mapHeatmapColor } from "./colors.js";
import type { OverviewDoc } from "./protocol.js";
import { extent, scaleLinear, type Scene, type SceneNode } from "./scene.js";

export function buildOverviewScene(doc: OverviewDoc, size = 420): Scene {
  const nodes: SceneNode[] = [];
  const cx = size / 2;
  const cy = size / 2;
  const outerR = size / 2 - 6;
  const ringW = 22;

  // outer ring: equal segments in ring order, drawn as thick polylines
  const n = doc.ring.length;
  doc.ring.forEach((binding, i) => {
    const a0 = (i / Math.max(n, 1)) * 2 * Math.PI - Math.PI / 2;
    const a1 = ((i + 0.92) / Math.max(n, 1)) * 2 * Math.PI - Math.PI / 2;
    const steps = 14;
    const points: Array<[number, number]> = [];
    for (let s = 0; s <= steps; s++) {
      const a = a0 + ((a1 - a0) * s) / steps;
      points.push([
        cx + (outerR - ringW / 2) * Math.cos(a),
        cy + (outerR - ringW / 2) * Math.sin(a),
      ]);
    }
    nodes.push({
      kind: "polyline",
      points,
      stroke: binding.color ?? "#888888",
      width: ringW,
      id: `ring-${binding.view_id}`,
    });
    const mid = points[Math.floor(points.length / 2)];
    nodes.push({
      kind: "text",
      x: mid[0],
      y: mid[1] + 3,
      text: `${binding.kind}@${binding.slots.join("+")}`,
      size: 8,
      anchor: "middle",
      fill: "#ffffff",
    });
  });

  // solution cards in the middle
  const cards = doc.solutions;
  const cols = Math.ceil(Math.sqrt(Math.max(cards.length, 1)));
  const innerSize = (outerR - ringW) * 1.25;
  const cardW = innerSize / cols;
  const left = cx - innerSize / 2;
  const top = cy - innerSize / 2;
  cards.forEach((entry, i) => {
    const gx = left + (i % cols) * cardW;
    const gy = top + Math.floor(i / cols) * cardW;
    nodes.push({
      kind: "rect",
      x: gx + 2,
      y: gy + 2,
      w: cardW - 4,
      h: cardW - 4,
      fill: "#ffffff",
      stroke: entry.color,
      id: `card-${entry.solution_id}`,
    });
    const label =
      (entry.algorithm ?? "unclustered")
      + (entry.silhouette_mean !== null
        ? ` s=${entry.silhouette_mean.toFixed(2)}`
        : "");
    nodes.push({
      kind: "text",
      x: gx + 6,
      y: gy + 14,
      text: `#${entry.solution_id} ${label}`,
      size: 8,
      fill: "#333333",
    });
    if (entry.thumbnail && entry.thumbnail.length) {
      const xs = entry.thumbnail.map((c) => c[0]);
      const ys = entry.thumbnail.map((c) => c[1]);
      const [x0, x1] = extent(xs);
      const [y0, y1] = extent(ys);
      const sx = scaleLinear(x0, x1, gx + 6, gx + cardW - 10);
      const sy = scaleLinear(y0, y1, gy + cardW - 10, gy + 20);
      // thumbnails decimate to keep the scene light
      const step = Math.max(1, Math.floor(entry.thumbnail.length / 150));
      for (let p = 0; p < entry.thumbnail.length; p += step) {
        nodes.push({
          kind: "circle",
          x: sx(entry.thumbnail[p][0]),
          y: sy(entry.thumbnail[p][1]),
          r: 1,
          fill: entry.color,
        });
      }
    } else if (entry.profile) {
      const prof = entry.profile;
      const ph = (cardW - 26) / prof.features.length;
      const pw = (cardW - 12) / prof.clusters.length;
      prof.features.forEach((_, fi) =>
        prof.clusters.forEach((c, ci) => {
          nodes.push({
            kind: "rect",
            x: gx + 6 + ci * pw,
            y: gy + 20 + fi * ph,
            w: pw,
            h: ph,
            fill: mapHeatmapColor(prof.normalized[fi][ci]),
          });
        }),
      );
    }
  });
  return { width: size, height: size, nodes };
}
