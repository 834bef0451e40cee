/** Drag-a-point backward projection: build the event from a drop position,
 * animate the server's answer, snap back on rejection. The engine is the
 * only place the inverse problem is solved; this module just choreographs. */

import type { ClientEvent, WhatIfDoc } from "./protocol.js";

export interface DragState {
  solutionId: number;
  rowId: number;
  /** projection-space coords where the point started */
  origin: number[];
  /** live drop position while dragging */
  current: number[];
  frozen: string[];
  seq: number | null;
}

export function startDrag(
  solutionId: number,
  rowId: number,
  origin: number[],
  frozen: string[] = [],
): DragState {
  return { solutionId, rowId, origin: [...origin], current: [...origin], frozen, seq: null };
}

export function moveDrag(state: DragState, coords: number[]): DragState {
  return { ...state, current: [...coords] };
}

/** The wire event asking the engine for the minimal feature change. */
export function buildBackwardEvent(
  state: DragState,
  seq: number,
  expectedRevision: number,
): ClientEvent {
  return {
    v: 1,
    type: "backward_project",
    seq,
    solution_id: state.solutionId,
    expected_revision: expectedRevision,
    payload: {
      row_id: state.rowId,
      target: state.current,
      frozen: state.frozen,
    },
  };
}

export interface DragOutcome {
  kind: "applied" | "infeasible" | "rejected";
  /** coords to render the point at, per animation frame */
  frames: number[][];
  deltas: Array<{ feature: string; delta: number }>;
  residual: number;
  warning?: string;
}

/** Interpret the engine's backward-projection answer. Infeasible answers
 * still animate to the least-squares position but carry a warning. */
export function resolveDrag(state: DragState, whatIf: WhatIfDoc, frames = 10): DragOutcome {
  const deltas = Object.entries(whatIf.delta ?? {})
    .map(([feature, delta]) => ({ feature, delta }))
    .filter((d) => d.delta !== 0)
    .sort((a, b) => Math.abs(b.delta) - Math.abs(a.delta));
  const residual = whatIf.residual ?? 0;
  const feasible = whatIf.feasible ?? true;
  const path: number[][] = [];
  for (let s = 0; s <= frames; s++) {
    const t = s / frames;
    path.push(state.origin.map((o, d) => o + (state.current[d] - o) * t));
  }
  return {
    kind: feasible ? "applied" : "infeasible",
    frames: path,
    deltas,
    residual,
    warning: feasible
      ? undefined
      : `target unreachable with frozen features; residual ${residual.toExponential(2)}`,
  };
}

/** Server rejected the event (stale revision): snap back to the origin. */
export function rejectDrag(state: DragState): DragOutcome {
  return {
    kind: "rejected",
    frames: [state.current, state.origin],
    deltas: [],
    residual: 0,
    warning: "event rejected; point restored to server coordinates",
  };
}

/** Animation frames for a forward-projection trajectory from the engine. */
export function forwardFrames(whatIf: WhatIfDoc): number[][] {
  return whatIf.trajectory ?? [];
}
