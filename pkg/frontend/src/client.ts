/** Thin session client over a browser-compatible WebSocket. */

import type { ClientEvent, CommandMessage, ServerMessage } from "./protocol.js";
import { SessionStore, type DirtyReport } from "./store.js";

/** Minimal socket surface so tests can plug in `ws` or a fake. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "message", cb: (ev: { data: unknown }) => void): void;
  addEventListener(type: "open" | "close", cb: () => void): void;
}

export class SessionClient {
  readonly store = new SessionStore();
  private seq = 0;
  private listeners: Array<(report: DirtyReport, msg: ServerMessage) => void> = [];

  constructor(private socket: SocketLike) {
    socket.addEventListener("message", (ev) => {
      const msg = JSON.parse(String(ev.data)) as ServerMessage;
      const report = this.store.applyMessage(msg);
      for (const cb of this.listeners) cb(report, msg);
    });
    socket.addEventListener("close", () => {
      this.store.status = "disconnected";
    });
  }

  onUpdate(cb: (report: DirtyReport, msg: ServerMessage) => void): void {
    this.listeners.push(cb);
  }

  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  /** Send a session event; expected_revision defaults to the cached
   * revision of the target solution (optimistic concurrency). */
  sendEvent(
    type: string,
    payload: Record<string, unknown> = {},
    solutionId?: number,
  ): number {
    const seq = this.nextSeq();
    const event: ClientEvent = { v: 1, type, seq, payload };
    if (solutionId !== undefined) {
      event.solution_id = solutionId;
      event.expected_revision = this.store.revisionOf(solutionId);
    }
    this.socket.send(JSON.stringify(event));
    return seq;
  }

  /** Optimistic selection: updates the local cache immediately and rolls
   * back if the server rejects the event. */
  selectPoints(solutionId: number, rows: number[]): number {
    const seq = this.nextSeq();
    const event: ClientEvent = {
      v: 1,
      type: "select_points",
      seq,
      solution_id: solutionId,
      expected_revision: this.store.revisionOf(solutionId),
      payload: { rows },
    };
    this.store.applyLocalSelection(solutionId, rows, seq);
    this.socket.send(JSON.stringify(event));
    return seq;
  }

  sendCommand(text: string): number {
    const seq = this.nextSeq();
    const msg: CommandMessage = { v: 1, type: "command", seq, text };
    const context: CommandMessage["context"] = {};
    if (this.store.focusedView !== null) {
      context.focused_view = this.store.focusedView;
      const binding = this.store.bindings.get(this.store.focusedView);
      const sol = binding
        ? this.store.solutions.get(binding.solution_id)
        : undefined;
      if (sol && sol.selection.length) context.selection = sol.selection;
    } else {
      const sols = [...this.store.solutions.values()];
      if (sols.length === 1 && sols[0].selection.length) {
        context.selection = sols[0].selection;
      }
    }
    if (Object.keys(context).length) msg.context = context;
    this.socket.send(JSON.stringify(msg));
    return seq;
  }

  close(): void {
    this.socket.close();
  }
}
