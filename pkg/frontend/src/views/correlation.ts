/** Correlation panel: bar chart of the strongest pairs plus the r matrix
 * colored on the diverging scale ((r+1)/2 so -1 is blue and +1 red). */

import { mapHeatmapColor } from "../colors.js";
import type { Scene, SceneNode } from "../scene.js";

export interface CorrelationDoc {
  features: string[];
  matrix: number[][];
  top_pairs: Array<{ a: string; b: string; r: number }>;
}

export function buildCorrelationScene(
  doc: CorrelationDoc,
  width = 360,
  height = 300,
): Scene {
  const nodes: SceneNode[] = [];
  const barTop = 8;
  const barH = 13;
  const shown = doc.top_pairs.slice(0, 8);
  shown.forEach((p, i) => {
    const y = barTop + i * barH;
    nodes.push({
      kind: "rect",
      x: 120,
      y,
      w: Math.abs(p.r) * (width - 130),
      h: barH - 3,
      fill: p.r >= 0 ? "#c44e52" : "#4c72b0",
      id: `pair-${p.a}-${p.b}`,
      data: { r: p.r },
    });
    nodes.push({
      kind: "text",
      x: 116,
      y: y + barH - 5,
      text: `${p.a}~${p.b}`,
      size: 9,
      anchor: "end",
    });
  });

  const gridTop = barTop + shown.length * barH + 10;
  const n = doc.features.length;
  const cell = Math.min((width - 16) / n, (height - gridTop - 8) / n);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      nodes.push({
        kind: "rect",
        x: 8 + j * cell,
        y: gridTop + i * cell,
        w: cell,
        h: cell,
        fill: mapHeatmapColor((doc.matrix[i][j] + 1) / 2),
        id: `corr-${i}-${j}`,
        data: { r: doc.matrix[i][j] },
      });
    }
  }
  return { width, height, nodes };
}
