/** Distribution panel: per-feature histogram with box plot; the selection
 * overlay reuses the global bin edges so shapes align. */

import type { Scene, SceneNode } from "../scene.js";
import { scaleLinear } from "../scene.js";

export interface HistogramDoc {
  feature: string;
  edges: number[];
  counts: number[];
  overlay_counts?: number[]; // selection/cluster overlay on the same edges
  q1: number;
  median: number;
  q3: number;
  min: number;
  max: number;
}

export function buildDistributionScene(
  histograms: HistogramDoc[],
  width = 360,
  rowHeight = 70,
): Scene {
  const nodes: SceneNode[] = [];
  histograms.forEach((h, idx) => {
    const top = idx * rowHeight + 6;
    const plotH = rowHeight - 28;
    nodes.push({ kind: "text", x: 6, y: top + 8, text: h.feature, size: 10 });
    const maxCount = Math.max(...h.counts, 1);
    const sx = scaleLinear(h.edges[0], h.edges[h.edges.length - 1], 6, width - 6);
    const sy = scaleLinear(0, maxCount, 0, plotH);
    h.counts.forEach((c, b) => {
      const x0 = sx(h.edges[b]);
      const x1 = sx(h.edges[b + 1]);
      nodes.push({
        kind: "rect",
        x: x0,
        y: top + 12 + (plotH - sy(c)),
        w: Math.max(x1 - x0 - 1, 0.5),
        h: sy(c),
        fill: "#b8c4dd",
        id: `hist-${h.feature}-${b}`,
      });
      const overlay = h.overlay_counts?.[b] ?? 0;
      if (overlay > 0) {
        nodes.push({
          kind: "rect",
          x: x0,
          y: top + 12 + (plotH - sy(overlay)),
          w: Math.max(x1 - x0 - 1, 0.5),
          h: sy(overlay),
          fill: "#e8a13c",
          id: `overlay-${h.feature}-${b}`,
        });
      }
    });
    // box plot under the histogram
    const by = top + 12 + plotH + 5;
    nodes.push({ kind: "line", x1: sx(h.min), y1: by, x2: sx(h.max), y2: by, stroke: "#555555" });
    nodes.push({
      kind: "rect",
      x: sx(h.q1),
      y: by - 4,
      w: Math.max(sx(h.q3) - sx(h.q1), 0.5),
      h: 8,
      fill: "#ffffff",
      stroke: "#555555",
      id: `box-${h.feature}`,
    });
    nodes.push({ kind: "line", x1: sx(h.median), y1: by - 4, x2: sx(h.median), y2: by + 4, stroke: "#222222", width: 1.5 });
  });
  return { width, height: histograms.length * rowHeight + 8, nodes };
}
