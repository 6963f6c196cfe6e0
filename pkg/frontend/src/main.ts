/** Browser entry point: wires the store, the API client and the canvas.
 *
 * Layout: a scene JSON panel on the left, the floorplan canvas in the
 * middle, overlay list / summary on the right.  Drag the RIS marker to move
 * it (PUT to the service, revision bump, unpinned overlays grey out).
 */
import { Api, ApiError, RisPlacement, SceneDocument } from "./api.js";
import { legendTicks } from "./colormap.js";
import {
  parseClassificationCsv, parseCoverageCsv, CoverageColumn,
} from "./grid.js";
import {
  fitViewport, hitTestRis, movedPlacement, risFootprint, sceneBounds,
  screenToWorld, wallFootprints, worldToScreen, Viewport,
} from "./floorplan.js";
import {
  buildClassificationOverlay, buildCoverageOverlay, cellAt, OverlayModel,
} from "./overlay.js";
import { PlacementSession } from "./state.js";

const api = new Api("");
const session = new PlacementSession();

const canvas = document.getElementById("floorplan") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const summaryPanel = document.getElementById("summary")!;
const overlayList = document.getElementById("overlays")!;
const progressBar = document.getElementById("progress") as HTMLProgressElement;
const sceneInput = document.getElementById("scene-json") as HTMLTextAreaElement;
const columnSelect = document.getElementById("column") as HTMLSelectElement;

let scene: SceneDocument | null = null;
let viewport: Viewport | null = null;
const overlayModels = new Map<string, OverlayModel>();
let dragging = false;
let dragPreview: [number, number] | null = null;

function showError(message: string): void {
  banner.textContent = message;
  banner.classList.remove("hidden");
}

function clearError(): void {
  banner.classList.add("hidden");
}

function fail(err: unknown): void {
  if (err instanceof ApiError) {
    showError(`${err.code}: ${err.message}`);
  } else {
    showError(String(err));
  }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

function draw(): void {
  if (!scene || !viewport) return;
  const vp = viewport;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const snapshot = session.snapshot();
  const selected = snapshot.selectedOverlay;
  if (selected) {
    const model = overlayModels.get(selected);
    if (model) drawOverlay(vp, model, session.isStale(selected));
  }

  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  for (const seg of wallFootprints(scene)) {
    const [x1, y1] = worldToScreen(vp, seg.x1, seg.y1);
    const [x2, y2] = worldToScreen(vp, seg.x2, seg.y2);
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }

  // BS marker
  const bs = scene.bs.reference_position;
  const [bx, by] = worldToScreen(vp, bs[0], bs[1]);
  ctx.fillStyle = "#d33";
  ctx.beginPath();
  ctx.arc(bx, by, 6, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillStyle = "#222";
  ctx.fillText("BS", bx + 8, by + 4);

  // RIS marker (or the "place me" hint)
  if (scene.ris) {
    const ris = dragPreview
      ? movedPlacement(scene.ris, dragPreview[0], dragPreview[1])
      : scene.ris;
    const seg = risFootprint(ris);
    const [x1, y1] = worldToScreen(vp, seg.x1, seg.y1);
    const [x2, y2] = worldToScreen(vp, seg.x2, seg.y2);
    ctx.strokeStyle = dragging ? "#f90" : "#06c";
    ctx.lineWidth = 4;
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
    const [cx, cy] = worldToScreen(
      vp, ris.center_position[0], ris.center_position[1]);
    ctx.fillStyle = "#06c";
    ctx.beginPath();
    ctx.arc(cx, cy, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#222";
    ctx.fillText("RIS", cx + 8, cy - 6);
  } else {
    ctx.fillStyle = "#888";
    ctx.fillText("no RIS placed — add one in the scene JSON", 12, 16);
  }
}

function drawOverlay(vp: Viewport, model: OverlayModel, stale: boolean): void {
  ctx.globalAlpha = stale ? 0.25 : 0.85;
  for (const cell of model.cells) {
    if (!cell.color) continue;
    const [sx, sy] = worldToScreen(
      vp, cell.x_m - cell.size_m / 2, cell.y_m + cell.size_m / 2);
    const sizePx = cell.size_m * vp.scale;
    ctx.fillStyle = cell.color;
    ctx.fillRect(sx, sy, sizePx, sizePx);
  }
  // out-of-coverage hatch
  ctx.strokeStyle = "rgba(0,0,0,0.6)";
  ctx.lineWidth = 1;
  for (const cell of model.cells) {
    if (!cell.hatch) continue;
    const [sx, sy] = worldToScreen(
      vp, cell.x_m - cell.size_m / 2, cell.y_m + cell.size_m / 2);
    const sizePx = cell.size_m * vp.scale;
    ctx.beginPath();
    ctx.moveTo(sx, sy + sizePx);
    ctx.lineTo(sx + sizePx, sy);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  drawLegend(model);
}

function drawLegend(model: OverlayModel): void {
  const legend = document.getElementById("legend")!;
  if (model.legend.kind === "sequential") {
    const { column, min, max } = model.legend;
    const ticks = legendTicks(min, max)
      .map((t) => t.toFixed(1)).join(" / ");
    legend.textContent = `${column}: ${ticks} dB`;
  } else {
    legend.textContent = model.legend.categories.join("  ·  ");
  }
}

function renderOverlayList(): void {
  const snapshot = session.snapshot();
  overlayList.innerHTML = "";
  for (const overlay of snapshot.overlays) {
    const item = document.createElement("li");
    const stale = session.isStale(overlay.id);
    item.textContent = `${overlay.label} (rev ${overlay.revision})`
      + (stale ? " — stale" : "") + (overlay.pinned ? " — pinned" : "");
    item.className = (overlay.id === snapshot.selectedOverlay ? "selected " : "")
      + (stale ? "stale" : "");
    item.onclick = () => session.select(overlay.id);
    const pinButton = document.createElement("button");
    pinButton.textContent = overlay.pinned ? "unpin" : "pin";
    pinButton.onclick = (event) => {
      event.stopPropagation();
      session.pin(overlay.id, !overlay.pinned);
    };
    item.appendChild(pinButton);
    overlayList.appendChild(item);
  }
}

session.subscribe(() => {
  renderOverlayList();
  draw();
});

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

async function loadScene(): Promise<void> {
  clearError();
  try {
    const ref = await api.createScene(sceneInput.value);
    const response = await api.getScene(ref.scene_id);
    scene = response.scene;
    viewport = fitViewport(sceneBounds(scene), canvas.width, canvas.height);
    session.setScene(ref.scene_id, ref.revision);
  } catch (err) {
    fail(err);
  }
}

async function compute(variant: "baseline" | "with_ris"): Promise<void> {
  const sceneId = session.currentSceneId;
  if (!sceneId) return showError("load a scene first");
  clearError();
  try {
    const ref = await api.startCompute(sceneId, variant);
    progressBar.value = 0;
    const job = await api.waitForJob(ref.job_id, (p) => {
      progressBar.value = p;
    });
    session.recordJob({ jobId: job.job_id, revision: job.revision,
                        variant, state: job.state, progress: job.progress });
    if (job.state === "failed") {
      return showError(`computation failed: ${job.error ?? "unknown"}`);
    }
    const grid = parseCoverageCsv(await api.getMapCsv(job.job_id));
    const column = columnSelect.value as CoverageColumn;
    const overlay = session.addOverlay(
      "coverage", job.revision, [job.job_id], `${variant} ${column}`);
    overlayModels.set(overlay.id, buildCoverageOverlay(grid, column));
    summarize(grid);
    session.select(overlay.id);
  } catch (err) {
    fail(err);
  }
}

async function classifyCurrent(): Promise<void> {
  const baseline = session.findJob("baseline");
  const withRis = session.findJob("with_ris");
  if (!baseline || !withRis) {
    return showError("compute baseline and with_ris at this revision first");
  }
  clearError();
  try {
    const csv = await api.getClassificationCsv(baseline.jobId, withRis.jobId);
    const grid = parseClassificationCsv(csv);
    const overlay = session.addOverlay(
      "classification", session.currentRevision,
      [baseline.jobId, withRis.jobId], "classification");
    overlayModels.set(overlay.id, buildClassificationOverlay(grid));
    const body = await api.getClassification(baseline.jobId, withRis.jobId);
    summaryPanel.textContent = JSON.stringify(body.summary, null, 2);
    session.select(overlay.id);
  } catch (err) {
    fail(err);
  }
}

function summarize(grid: { cells: Array<{ status: string }> }): void {
  const counts: Record<string, number> = {};
  for (const cell of grid.cells) {
    counts[cell.status] = (counts[cell.status] ?? 0) + 1;
  }
  summaryPanel.textContent = JSON.stringify(counts, null, 2);
}

// ---------------------------------------------------------------------------
// RIS dragging
// ---------------------------------------------------------------------------

canvas.addEventListener("mousedown", (event) => {
  if (!scene?.ris || !viewport) return;
  if (hitTestRis(viewport, scene.ris, event.offsetX, event.offsetY)) {
    dragging = true;
  }
});

canvas.addEventListener("mousemove", (event) => {
  if (!viewport) return;
  if (dragging) {
    dragPreview = screenToWorld(viewport, event.offsetX, event.offsetY);
    draw();
    return;
  }
  // hover tooltip: the served value under the cursor, verbatim
  const selected = session.snapshot().selectedOverlay;
  const model = selected ? overlayModels.get(selected) : undefined;
  if (!model) {
    canvas.title = "";
    return;
  }
  const [wx, wy] = screenToWorld(viewport, event.offsetX, event.offsetY);
  const cell = cellAt(model, wx, wy);
  canvas.title = cell && cell.value !== null
    ? `(${cell.x_m}, ${cell.y_m}): ${cell.value}`
    : "";
});

canvas.addEventListener("mouseup", async (event) => {
  if (!dragging || !scene?.ris || !viewport) return;
  dragging = false;
  dragPreview = null;
  const [x, y] = screenToWorld(viewport, event.offsetX, event.offsetY);
  const candidate: RisPlacement = movedPlacement(scene.ris, x, y);
  const sceneId = session.currentSceneId!;
  try {
    const ref = await api.updateRis(sceneId, candidate);
    scene.ris = candidate;
    session.setRevision(ref.revision);   // marks unpinned overlays stale
    clearError();
  } catch (err) {
    // rejected placement: marker snaps back to the server's state
    fail(err);
    draw();
  }
});

// ---------------------------------------------------------------------------
// Controls
// ---------------------------------------------------------------------------

document.getElementById("load")!.addEventListener("click", loadScene);
document.getElementById("compute-baseline")!
  .addEventListener("click", () => compute("baseline"));
document.getElementById("compute-ris")!
  .addEventListener("click", () => compute("with_ris"));
document.getElementById("classify")!
  .addEventListener("click", classifyCurrent);
