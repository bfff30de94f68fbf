/** Console wiring: DOM events in, rendered state out.
 *
 * Session selection: `?session=<id>` in the URL, otherwise the first session
 * on the server; a network JSON file upload creates a fresh session.
 */

import { Api } from "./api.js";
import { ConsoleController } from "./controller.js";
import { networkBounds, render } from "./render.js";
import { Viewport } from "./viewport.js";
import type { NetworkJson } from "./types.js";

const api = new Api("");

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const vp = new Viewport(canvas.width, canvas.height);
let fitted = false;

const controller = new ConsoleController(api, (url) => new EventSource(url), redraw);
const model = controller.model;

function $(id: string): HTMLElement {
  return document.getElementById(id)!;
}

function redraw(): void {
  if (model.network && !fitted) {
    vp.fit(networkBounds(model.network));
    fitted = true;
  }
  render(ctx, model, vp);
  $("version-badge").textContent = `plan v${model.planVersion}`;
  $("connection").textContent = model.connection;
  $("connection").className = `status-${model.connection}`;
  $("counts").textContent = model.plan
    ? `${model.plan.routes.length} routes | ${model.assignedCount()} assigned | ` +
      `${model.unservedCount()} unserved | ${model.plan.unreachable.length} unreachable`
    : "no plan yet";
  const error = $("error");
  error.textContent = model.lastError ?? "";
  error.style.display = model.lastError ? "block" : "none";
  ($("replan") as HTMLButtonElement).disabled = model.replanInFlight || !model.sessionId;
  ($("submit-zone") as HTMLButtonElement).disabled = !model.canSubmitZone();
  $("draw-zone").textContent = model.drawing ? "Drawing... (click map)" : "Draw zone";
  const feed = $("feed");
  feed.innerHTML = "";
  for (const entry of [...model.feed].reverse().slice(0, 30)) {
    const li = document.createElement("li");
    li.textContent = entry.text;
    feed.appendChild(li);
  }
}

async function bootstrap(): Promise<void> {
  const fromUrl = new URLSearchParams(window.location.search).get("session");
  if (fromUrl) {
    await controller.open(fromUrl);
    return;
  }
  try {
    const { sessions } = await api.listSessions();
    const first = sessions[0];
    if (first) {
      window.history.replaceState(null, "", `?session=${first}`);
      await controller.open(first);
      return;
    }
    model.lastError = "no sessions on the server; upload a network JSON to create one";
  } catch (err) {
    model.lastError = err instanceof Error ? err.message : String(err);
  }
  redraw();
}

// -- user actions -------------------------------------------------------------

$("draw-zone").addEventListener("click", () => {
  if (model.drawing) {
    model.clearDraft();
  } else {
    model.startDrawing();
  }
  redraw();
});

$("submit-zone").addEventListener("click", () => void controller.submitZone());
$("replan").addEventListener("click", () => void controller.triggerReplan());

($("network-file") as HTMLInputElement).addEventListener("change", async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  try {
    const network = JSON.parse(await file.text()) as NetworkJson;
    const { id } = await api.createSession(network);
    window.history.replaceState(null, "", `?session=${id}`);
    fitted = false;
    await controller.open(id);
  } catch (err) {
    model.lastError = err instanceof Error ? err.message : String(err);
    redraw();
  }
  input.value = "";
});

// -- map interaction ------------------------------------------------------------

let dragging = false;
let lastX = 0;
let lastY = 0;
let moved = false;

canvas.addEventListener("mousedown", (ev) => {
  dragging = true;
  moved = false;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  const dx = ev.offsetX - lastX;
  const dy = ev.offsetY - lastY;
  if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
  vp.panByPixels(dx, dy);
  lastX = ev.offsetX;
  lastY = ev.offsetY;
  redraw();
});

window.addEventListener("mouseup", (ev) => {
  if (!dragging) return;
  dragging = false;
  if (!moved && model.drawing && ev.target === canvas) {
    const [wx, wy] = vp.toWorld(lastX, lastY);
    model.addDraftVertex(wx, wy);
    redraw();
  }
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  vp.zoomAt(ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.2 : 1 / 1.2);
  redraw();
});

void bootstrap();
