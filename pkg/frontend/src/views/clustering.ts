/** Clustering panel: the features-by-clusters profile heatmap (red high,
 * blue low), silhouette summary and the silhouette-vs-k curve. */

import { mapHeatmapColor } from "../colors.js";
import type { SolutionDoc } from "../protocol.js";
import { extent, scaleLinear, type Scene, type SceneNode } from "../scene.js";

export function buildClusteringScene(
  solution: SolutionDoc,
  width = 360,
  height = 300,
): Scene {
  const nodes: SceneNode[] = [];
  const clus = solution.clustering;
  if (!clus) {
    nodes.push({
      kind: "text",
      x: width / 2,
      y: height / 2,
      text: "no clustering yet",
      anchor: "middle",
    });
    return { width, height, nodes };
  }

  const headline = `k=${clus.params.k} ${clus.params.algorithm}`
    + (clus.silhouette ? `  silhouette ${clus.silhouette.mean.toFixed(3)}` : "");
  nodes.push({ kind: "text", x: 8, y: 14, text: headline, size: 11 });

  if (clus.profile) {
    const prof = clus.profile;
    const top = 24;
    const labelW = 70;
    const gridW = width - labelW - 8;
    const gridH = Math.min(height - top - 70, prof.features.length * 16);
    const cw = gridW / prof.clusters.length;
    const ch = gridH / prof.features.length;
    prof.features.forEach((feature, fi) => {
      nodes.push({
        kind: "text",
        x: labelW - 4,
        y: top + fi * ch + ch / 2 + 3,
        text: feature,
        size: 9,
        anchor: "end",
      });
      prof.clusters.forEach((c, ci) => {
        nodes.push({
          kind: "rect",
          x: labelW + ci * cw,
          y: top + fi * ch,
          w: cw,
          h: ch,
          fill: mapHeatmapColor(prof.normalized[fi][ci]),
          id: `profile-${feature}-${c}`,
          data: { mean: prof.means[fi][ci], norm: prof.normalized[fi][ci] },
        });
      });
    });
  }

  if (clus.silhouette_by_k.length > 1) {
    const ks = clus.silhouette_by_k.map(([k]) => k);
    const scores = clus.silhouette_by_k.map(([, s]) => s);
    const [k0, k1] = extent(ks);
    const [s0, s1] = extent(scores);
    const y0 = height - 50;
    const sx = scaleLinear(k0, k1, 40, width - 12);
    const sy = scaleLinear(Math.min(s0, 0), Math.max(s1, 1e-9), height - 12, y0);
    nodes.push({
      kind: "polyline",
      points: clus.silhouette_by_k.map(([k, s]) => [sx(k), sy(s)] as [number, number]),
      stroke: "#3366cc",
      width: 1.5,
      id: "silhouette-curve",
    });
  }
  return { width, height, nodes };
}
