/** Client-side session cache: the server is authoritative, the store never
 * runs ahead of the last delta it received, except for the optimistic local
 * selection which is rolled back when the server rejects it. */

import type {
  BindingDoc,
  DeltaPayload,
  OverviewDoc,
  RejectPayload,
  ServerMessage,
  SessionDoc,
  SolutionDoc,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

interface PendingSelection {
  seq: number;
  solutionId: number;
  previous: number[];
}

export interface DirtyReport {
  solutions: number[];
  views: number[];
  ring: boolean;
  whatIf?: DeltaPayload["what_if"];
  rejected?: RejectPayload;
}

export class SessionStore {
  status: ConnectionStatus = "connecting";
  clientId = "";
  slotCount = 15;
  solutions = new Map<number, SolutionDoc>();
  bindings = new Map<number, BindingDoc>();
  ring: BindingDoc[] = [];
  overview: OverviewDoc | null = null;
  focusedView: number | null = null;
  private pendingSelections: PendingSelection[] = [];

  revisionOf(solutionId: number): number {
    const sol = this.solutions.get(solutionId);
    return sol ? sol.revision : 0;
  }

  viewsOf(solutionId: number): BindingDoc[] {
    return [...this.bindings.values()]
      .filter((b) => b.solution_id === solutionId)
      .sort((a, b) => a.view_id - b.view_id);
  }

  /** Optimistic local selection: applied immediately, remembered for
   * rollback until the server confirms or rejects the carrying event. */
  applyLocalSelection(solutionId: number, rows: number[], seq: number): void {
    const sol = this.solutions.get(solutionId);
    if (!sol) return;
    this.pendingSelections.push({
      seq,
      solutionId,
      previous: sol.selection,
    });
    sol.selection = [...rows].sort((a, b) => a - b);
  }

  applyMessage(msg: ServerMessage): DirtyReport {
    if (msg.type === "snapshot") {
      return this.applySnapshot(msg.payload.session, msg.payload);
    }
    if (msg.type === "delta") {
      return this.applyDelta(msg.payload);
    }
    return this.applyReject(msg.payload);
  }

  applySnapshot(
    session: SessionDoc,
    extras?: { overview?: OverviewDoc; client_id?: string },
  ): DirtyReport {
    this.status = "connected";
    this.slotCount = session.slot_count;
    this.solutions = new Map(session.solutions.map((s) => [s.id, s]));
    this.bindings = new Map(session.bindings.map((b) => [b.view_id, b]));
    if (extras?.overview) {
      this.overview = extras.overview;
      this.ring = extras.overview.ring;
    }
    if (extras?.client_id) this.clientId = extras.client_id;
    this.pendingSelections = [];
    return {
      solutions: [...this.solutions.keys()],
      views: [...this.bindings.keys()],
      ring: true,
    };
  }

  private applyDelta(payload: DeltaPayload): DirtyReport {
    const dirty: DirtyReport = { solutions: [], views: [], ring: false };
    if (payload.solution) {
      const sol = payload.solution;
      this.solutions.set(sol.id, sol);
      // the server confirmed up to this revision; drop pending optimistic
      // edits that the confirmed state supersedes
      this.pendingSelections = this.pendingSelections.filter(
        (p) => p.solutionId !== sol.id,
      );
      dirty.solutions.push(sol.id);
    }
    if (payload.event === "create_solution" && payload.solution) {
      dirty.ring = true;
    }
    if (payload.binding) {
      if (payload.event === "clear_view") {
        this.bindings.delete(payload.binding.view_id);
      } else {
        this.bindings.set(payload.binding.view_id, payload.binding);
      }
      dirty.ring = true;
    }
    if (payload.ring) {
      this.ring = payload.ring;
      dirty.ring = true;
    }
    if (payload.affected_views) {
      dirty.views.push(...payload.affected_views);
    }
    if (payload.what_if) {
      dirty.whatIf = payload.what_if;
    }
    return dirty;
  }

  private applyReject(payload: RejectPayload): DirtyReport {
    const dirty: DirtyReport = {
      solutions: [],
      views: [],
      ring: false,
      rejected: payload,
    };
    const pending = this.pendingSelections.find((p) => p.seq === payload.seq);
    if (pending) {
      const sol = this.solutions.get(pending.solutionId);
      if (sol) {
        sol.selection = pending.previous; // roll the optimistic edit back
        dirty.solutions.push(pending.solutionId);
      }
      this.pendingSelections = this.pendingSelections.filter(
        (p) => p.seq !== payload.seq,
      );
    }
    return dirty;
  }
}
