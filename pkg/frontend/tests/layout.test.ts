import { describe, expect, it } from "vitest";

import { computePanels, freeSlots, slotPosition } from "../src/layout.js";
import type { BindingDoc } from "../src/protocol.js";

const colors = new Map([
  [0, "#4e79a7"],
  [1, "#f28e2b"],
]);

function binding(viewId: number, kind: BindingDoc["kind"], solutionId: number, slots: number[]): BindingDoc {
  return { view_id: viewId, kind, solution_id: solutionId, slots };
}

describe("computePanels", () => {
  it("spans a panel over its slots with the solution frame color", () => {
    const panels = computePanels([binding(0, "projection", 1, [3, 4])], colors);
    expect(panels).toHaveLength(1);
    expect(panels[0].rect).toEqual({ row: 0, col: 2, rowSpan: 1, colSpan: 2 });
    expect(panels[0].frameColor).toBe("#f28e2b");
  });

  it("zero bindings produce an empty grid with every slot free", () => {
    expect(computePanels([], colors)).toEqual([]);
    expect(freeSlots([], 15)).toHaveLength(15);
  });

  it("slots wrap row-major on the 5-column grid", () => {
    expect(slotPosition(1)).toEqual({ row: 0, col: 0 });
    expect(slotPosition(5)).toEqual({ row: 0, col: 4 });
    expect(slotPosition(6)).toEqual({ row: 1, col: 0 });
    expect(slotPosition(15)).toEqual({ row: 2, col: 4 });
  });

  it("a vertical pair spans two rows", () => {
    const panels = computePanels([binding(2, "table", 0, [2, 7])], colors);
    expect(panels[0].rect).toEqual({ row: 0, col: 1, rowSpan: 2, colSpan: 1 });
  });

  it("free slots exclude every bound slot", () => {
    const free = freeSlots([binding(0, "table", 0, [1, 2]), binding(1, "clustering", 1, [9])], 15);
    expect(free).not.toContain(1);
    expect(free).not.toContain(2);
    expect(free).not.toContain(9);
    expect(free).toHaveLength(12);
  });
});
