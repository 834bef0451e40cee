/** Screen-slot grid layout: one panel per view binding, spanning the
 * bounding box of its slots. Slots are numbered 1..slotCount, laid out
 * row-major on a fixed-column grid (5 columns mirrors the 15-screen room). */

import type { BindingDoc } from "./protocol.js";

export interface GridRect {
  row: number;
  col: number;
  rowSpan: number;
  colSpan: number;
}

export interface Panel {
  viewId: number;
  kind: BindingDoc["kind"];
  solutionId: number;
  slots: number[];
  rect: GridRect;
  frameColor: string;
}

export const GRID_COLUMNS = 5;

export function slotPosition(slot: number, columns = GRID_COLUMNS): { row: number; col: number } {
  const idx = slot - 1;
  return { row: Math.floor(idx / columns), col: idx % columns };
}

/** Compute the panel layout for all bindings. Pure; bindings keep their
 * server ordering by view id. */
export function computePanels(
  bindings: BindingDoc[],
  solutionColors: Map<number, string>,
  columns = GRID_COLUMNS,
): Panel[] {
  return [...bindings]
    .sort((a, b) => a.view_id - b.view_id)
    .map((b) => {
      const positions = b.slots.map((s) => slotPosition(s, columns));
      const rows = positions.map((p) => p.row);
      const cols = positions.map((p) => p.col);
      const row = Math.min(...rows);
      const col = Math.min(...cols);
      return {
        viewId: b.view_id,
        kind: b.kind,
        solutionId: b.solution_id,
        slots: b.slots,
        rect: {
          row,
          col,
          rowSpan: Math.max(...rows) - row + 1,
          colSpan: Math.max(...cols) - col + 1,
        },
        frameColor: solutionColors.get(b.solution_id) ?? "#888888",
      };
    });
}

/** Slots not covered by any binding (for the empty-grid placeholders). */
export function freeSlots(bindings: BindingDoc[], slotCount: number): number[] {
  const taken = new Set<number>();
  for (const b of bindings) for (const s of b.slots) taken.add(s);
  const out: number[] = [];
  for (let s = 1; s <= slotCount; s++) if (!taken.has(s)) out.push(s);
  return out;
}
