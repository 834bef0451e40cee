/** Browser bootstrap: connect to the session service, render the panel
 * grid, the overview ring and a command box; wire selection, drag-to-
 * backward-project and the 3-D orbit view. */

import { SessionClient } from "./client.js";
import { paintScene } from "./dom.js";
import { buildDistanceHeatmapScene, buildProjectionScene } from "./views/projection.js";
import { buildClusteringScene } from "./views/clustering.js";
import { buildTableScene } from "./views/table.js";
import { buildDistributionScene, type HistogramDoc } from "./views/distribution.js";
import { buildCorrelationScene, type CorrelationDoc } from "./views/correlation.js";
import { buildFeatureSelectionScene, type RankingDoc } from "./views/featsel.js";
import { buildOverviewScene } from "./overview.js";
import { build3dScene, defaultCamera, orbit, type OrbitCamera } from "./view3d.js";
import { buildBackwardEvent, moveDrag, rejectDrag, resolveDrag, startDrag, type DragState } from "./drag.js";
import { computePanels } from "./layout.js";
import type { ServerMessage, TablePage } from "./protocol.js";

const grid = document.getElementById("grid")!;
const ringBox = document.getElementById("overview")!;
const banner = document.getElementById("banner")!;
const commandBox = document.getElementById("command") as HTMLInputElement;
const commandLog = document.getElementById("command-log")!;

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const socket = new WebSocket(wsUrl);
const client = new SessionClient(socket as never);
let camera: OrbitCamera = defaultCamera();
let drag: DragState | null = null;
const tablePages = new Map<number, TablePage>();
// per-solution caches for the HTTP-served panel data, keyed by revision
const statCache = new Map<string, unknown>();

async function fetchStat<T>(kind: string, solutionId: number, revision: number, query = ""): Promise<T | null> {
  const key = `${kind}:${solutionId}:${revision}:${query}`;
  if (statCache.has(key)) return statCache.get(key) as T;
  const res = await fetch(`/${kind}/${solutionId}${query}`);
  if (!res.ok) return null;
  const body = (await res.json()) as T;
  statCache.set(key, body);
  return body;
}

function note(text: string, isError = false): void {
  const div = document.createElement("div");
  div.textContent = text;
  div.className = isError ? "log-error" : "log-ok";
  commandLog.prepend(div);
}

async function fetchTable(solutionId: number): Promise<void> {
  const res = await fetch(`/table/${solutionId}?limit=30`);
  if (res.ok) {
    tablePages.set(solutionId, (await res.json()) as TablePage);
  }
}

function renderAll(): void {
  banner.textContent =
    client.store.status === "connected"
      ? `connected as ${client.store.clientId}`
      : "disconnected: read-only";
  banner.className = client.store.status === "connected" ? "ok" : "warn";

  const colors = new Map(
    [...client.store.solutions.values()].map((s) => [s.id, s.color]),
  );
  const panels = computePanels([...client.store.bindings.values()], colors);
  grid.innerHTML = "";
  for (const panel of panels) {
    const sol = client.store.solutions.get(panel.solutionId);
    if (!sol) continue;
    const cell = document.createElement("div");
    cell.className = "panel";
    cell.style.gridRow = `${panel.rect.row + 1} / span ${panel.rect.rowSpan}`;
    cell.style.gridColumn = `${panel.rect.col + 1} / span ${panel.rect.colSpan}`;
    cell.style.borderColor = panel.frameColor;
    const title = document.createElement("div");
    title.className = "panel-title";
    title.textContent = `${panel.kind} · solution ${panel.solutionId} · screens ${panel.slots.join(",")}`;
    title.onclick = () => {
      client.store.focusedView = panel.viewId;
    };
    cell.appendChild(title);
    const body = document.createElement("div");
    cell.appendChild(body);

    if (panel.kind === "projection") {
      if (sol.projection?.dims === 3) {
        const svg = paintScene(build3dScene(sol, camera), body);
        let last: [number, number] | null = null;
        svg.onmousedown = (e) => (last = [e.clientX, e.clientY]);
        svg.onmousemove = (e) => {
          if (!last) return;
          camera = orbit(camera, (e.clientX - last[0]) * 0.01, (e.clientY - last[1]) * 0.01);
          last = [e.clientX, e.clientY];
          paintScene(build3dScene(sol, camera), body);
        };
        svg.onmouseup = () => (last = null);
      } else {
        const svg = paintScene(buildProjectionScene(sol), body);
        wireProjectionInteraction(svg, panel.solutionId);
        if (sol.projection?.distance_matrix) {
          paintScene(
            buildDistanceHeatmapScene(sol.projection.distance_matrix, 180),
            body,
          );
        }
      }
    } else if (panel.kind === "clustering") {
      paintScene(buildClusteringScene(sol), body);
    } else if (panel.kind === "table") {
      const page = tablePages.get(panel.solutionId);
      if (page && page.revision === sol.revision) {
        paintScene(buildTableScene(page), body);
      } else {
        void fetchTable(panel.solutionId).then(renderAll);
      }
    } else if (panel.kind === "distribution") {
      void fetchStat<{ features: Array<{ feature: string; global: never; selection: never }> }>(
        "distributions",
        panel.solutionId,
        sol.revision,
      ).then((doc) => {
        if (!doc) return;
        const histograms: HistogramDoc[] = doc.features.map((f) => {
          const g = f.global as {
            histogram: { edges: number[]; counts: number[] };
            q1: number; median: number; q3: number; min: number; max: number;
          };
          const sel = f.selection as { histogram: { counts: number[] } } | null;
          return {
            feature: f.feature,
            edges: g.histogram.edges,
            counts: g.histogram.counts,
            overlay_counts: sel?.histogram.counts,
            q1: g.q1,
            median: g.median,
            q3: g.q3,
            min: g.min,
            max: g.max,
          };
        });
        paintScene(buildDistributionScene(histograms), body);
      });
    } else if (panel.kind === "correlation") {
      void fetchStat<CorrelationDoc>("correlations", panel.solutionId, sol.revision).then(
        (doc) => {
          if (doc) paintScene(buildCorrelationScene(doc), body);
        },
      );
    } else {
      // feature_selection: supervised ranking when clustered, else variance
      const method = sol.clustering ? "anova" : "variance";
      void fetchStat<RankingDoc>(
        "ranking",
        panel.solutionId,
        sol.revision,
        `?method=${method}`,
      ).then((doc) => {
        if (doc) paintScene(buildFeatureSelectionScene(doc, sol.enabled_features), body);
      });
    }
    grid.appendChild(cell);
  }

  if (client.store.overview) {
    client.store.overview.ring = client.store.ring;
    paintScene(buildOverviewScene(client.store.overview), ringBox);
  }
}

function wireProjectionInteraction(svg: SVGSVGElement, solutionId: number): void {
  svg.addEventListener("mousedown", (ev) => {
    const target = ev.target as Element;
    const id = target.getAttribute("data-id");
    if (!id?.startsWith("pt-")) return;
    const sol = client.store.solutions.get(solutionId);
    if (!sol?.projection) return;
    const rowId = Number(id.slice(3));
    const idx = sol.projection.row_ids.indexOf(rowId);
    if (idx < 0) return;
    drag = startDrag(solutionId, rowId, sol.projection.coords[idx]);
    ev.preventDefault();
  });
  svg.addEventListener("mouseup", (ev) => {
    if (!drag) return;
    const sol = client.store.solutions.get(drag.solutionId);
    if (!sol?.projection) return (drag = null);
    // invert the pixel transform roughly: use nearest point's coords as
    // origin reference, offset by pixel delta scaled to data units
    const rect = svg.getBoundingClientRect();
    const xs = sol.projection.coords.map((c) => c[0]);
    const ys = sol.projection.coords.map((c) => c[1]);
    const spanX = Math.max(...xs) - Math.min(...xs) || 1;
    const spanY = Math.max(...ys) - Math.min(...ys) || 1;
    const dataPerPxX = spanX / rect.width;
    const dataPerPxY = spanY / rect.height;
    const origin = drag.origin;
    const moved = [
      origin[0] + (ev.offsetX - rect.width / 2) * dataPerPxX * 0.5,
      origin[1] - (ev.offsetY - rect.height / 2) * dataPerPxY * 0.5,
    ];
    drag = moveDrag(drag, moved);
    const seq = client.nextSeq();
    drag.seq = seq;
    socket.send(
      JSON.stringify(
        buildBackwardEvent(drag, seq, client.store.revisionOf(drag.solutionId)),
      ),
    );
  });
}

client.onUpdate((report, msg: ServerMessage) => {
  if (msg.type === "reject") {
    if (drag && msg.payload.seq === drag.seq) {
      note(rejectDrag(drag).warning ?? "drag rejected", true);
      drag = null;
    } else {
      note(`rejected: ${msg.payload.reason}`, true);
    }
  }
  if (report.whatIf && drag && report.whatIf.row_id === drag.rowId) {
    const outcome = resolveDrag(drag, report.whatIf);
    const top = outcome.deltas
      .slice(0, 4)
      .map((d) => `${d.feature} ${d.delta >= 0 ? "+" : ""}${d.delta.toPrecision(3)}`)
      .join(", ");
    note(
      outcome.kind === "infeasible"
        ? `${outcome.warning}`
        : `feature change: ${top || "none"}`,
      outcome.kind === "infeasible",
    );
    drag = null;
  }
  for (const sid of report.solutions) tablePages.delete(sid);
  renderAll();
});

commandBox.addEventListener("keydown", (ev) => {
  if (ev.key !== "Enter" || !commandBox.value.trim()) return;
  client.sendCommand(commandBox.value.trim());
  note(`> ${commandBox.value.trim()}`);
  commandBox.value = "";
});
