/** Feature-selection panel: ranked relevance bars, p-values annotated when
 * the supervised methods provide them. */

import type { Scene, SceneNode } from "../scene.js";

export interface RankingDoc {
  method: string;
  top_n: number;
  entries: Array<{ feature: string; score: number; p_value: number | null }>;
  groups: string[][];
}

export function buildFeatureSelectionScene(
  doc: RankingDoc,
  enabled: string[],
  width = 360,
): Scene {
  const nodes: SceneNode[] = [];
  nodes.push({ kind: "text", x: 8, y: 14, text: `ranking: ${doc.method}`, size: 11 });
  const maxScore = Math.max(...doc.entries.map((e) => Math.abs(e.score)), 1e-12);
  const rowH = 16;
  const enabledSet = new Set(enabled);
  doc.entries.forEach((e, i) => {
    const y = 24 + i * rowH;
    nodes.push({
      kind: "text",
      x: 96,
      y: y + 11,
      text: e.feature,
      size: 9,
      anchor: "end",
      fill: enabledSet.has(e.feature) ? "#222222" : "#aaaaaa",
    });
    nodes.push({
      kind: "rect",
      x: 100,
      y: y + 2,
      w: (Math.abs(e.score) / maxScore) * (width - 170),
      h: rowH - 5,
      fill: enabledSet.has(e.feature) ? "#59a14f" : "#cccccc",
      id: `rank-${e.feature}`,
      data: { score: e.score, p: e.p_value },
    });
    if (e.p_value !== null) {
      nodes.push({
        kind: "text",
        x: width - 64,
        y: y + 11,
        text: `p=${e.p_value.toExponential(1)}`,
        size: 8,
        fill: "#666666",
      });
    }
  });
  return { width, height: 28 + doc.entries.length * rowH, nodes };
}
