/** Data-table panel: raw cells with cluster tint, missing markers and
 * outlier flags from the server's table page. */

import { clusterColor } from "../colors.js";
import type { TablePage } from "../protocol.js";
import type { Scene, SceneNode } from "../scene.js";

export function buildTableScene(
  page: TablePage,
  width = 420,
  rowHeight = 16,
): Scene {
  const nodes: SceneNode[] = [];
  const headerH = 20;
  const idW = 48;
  const colW = (width - idW) / Math.max(page.features.length, 1);
  const selected = new Set(page.selection);

  page.features.forEach((f, j) => {
    nodes.push({
      kind: "text",
      x: idW + j * colW + 2,
      y: 13,
      text: f,
      size: 9,
    });
  });

  page.row_ids.forEach((rowId, i) => {
    const y = headerH + i * rowHeight;
    const label = page.labels[i];
    nodes.push({
      kind: "rect",
      x: 0,
      y,
      w: idW - 2,
      h: rowHeight - 1,
      fill: label === null || label === undefined ? "#eeeeee" : clusterColor(label),
      stroke: selected.has(rowId) ? "#000000" : undefined,
      id: `row-${rowId}`,
      data: { rowId, label, outlierScore: page.outlier_scores[i] },
    });
    nodes.push({
      kind: "text",
      x: 4,
      y: y + rowHeight - 4,
      text: String(rowId),
      size: 9,
    });
    page.cells[i].forEach((cell, j) => {
      const flagged = page.outlier_flags[i]?.[j];
      if (flagged) {
        nodes.push({
          kind: "rect",
          x: idW + j * colW,
          y,
          w: colW - 1,
          h: rowHeight - 1,
          fill: "#ffe0e0",
          id: `outlier-${rowId}-${page.features[j]}`,
        });
      }
      nodes.push({
        kind: "text",
        x: idW + j * colW + 2,
        y: y + rowHeight - 4,
        text: cell === null ? "·" : typeof cell === "number" ? cell.toPrecision(4) : cell,
        size: 9,
        fill: cell === null ? "#999999" : "#222222",
      });
    });
  });

  return {
    width,
    height: headerH + page.row_ids.length * rowHeight,
    nodes,
  };
}
