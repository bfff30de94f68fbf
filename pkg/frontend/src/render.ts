/** Canvas renderer. Pure drawing: reads the view model, writes pixels. */

import type { ConsoleViewModel } from "./model.js";
import type { Viewport } from "./viewport.js";
import type { NetworkJson } from "./types.js";

const ROUTE_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

export function networkBounds(network: NetworkJson) {
  const xs = network.nodes.map((n) => n.x);
  const ys = network.nodes.map((n) => n.y);
  return {
    minX: Math.min(...xs),
    minY: Math.min(...ys),
    maxX: Math.max(...xs),
    maxY: Math.max(...ys),
  };
}

export function render(ctx: CanvasRenderingContext2D, model: ConsoleViewModel, vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, vp.width, vp.height);
  if (!model.network) return;

  drawNetwork(ctx, model.network, vp);
  if (model.zone) drawZone(ctx, model.zone, vp, false);
  if (model.draftZone.length > 0) drawZone(ctx, model.draftZone, vp, true);
  drawRoutes(ctx, model, vp);
  drawExits(ctx, model, vp);
  drawClients(ctx, model, vp);
}

function drawNetwork(ctx: CanvasRenderingContext2D, network: NetworkJson, vp: Viewport): void {
  const byId = new Map(network.nodes.map((n) => [n.id, n]));
  ctx.strokeStyle = "#c9c9c9";
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (const link of network.links) {
    const a = byId.get(link.from);
    const b = byId.get(link.to);
    if (!a || !b) continue;
    ctx.moveTo(...vp.toScreen(a.x, a.y));
    ctx.lineTo(...vp.toScreen(b.x, b.y));
  }
  ctx.stroke();
}

function drawZone(ctx: CanvasRenderingContext2D, zone: [number, number][], vp: Viewport, draft: boolean): void {
  if (zone.length === 0) return;
  ctx.beginPath();
  const first = zone[0]!;
  ctx.moveTo(...vp.toScreen(first[0], first[1]));
  for (const [x, y] of zone.slice(1)) ctx.lineTo(...vp.toScreen(x, y));
  if (!draft) ctx.closePath();
  if (draft) {
    ctx.strokeStyle = "#d62728";
    ctx.setLineDash([6, 4]);
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.setLineDash([]);
    for (const [x, y] of zone) {
      const [px, py] = vp.toScreen(x, y);
      ctx.fillStyle = "#d62728";
      ctx.fillRect(px - 3, py - 3, 6, 6);
    }
  } else {
    ctx.fillStyle = "rgba(214, 39, 40, 0.10)";
    ctx.fill();
    ctx.strokeStyle = "#d62728";
    ctx.lineWidth = 2;
    ctx.stroke();
  }
}

function drawRoutes(ctx: CanvasRenderingContext2D, model: ConsoleViewModel, vp: Viewport): void {
  if (!model.plan) return;
  model.plan.routes.forEach((route, i) => {
    if (!route.polyline || route.polyline.length < 2) return;
    ctx.strokeStyle = ROUTE_COLORS[i % ROUTE_COLORS.length]!;
    ctx.lineWidth = 2;
    ctx.globalAlpha = 0.8;
    ctx.beginPath();
    const start = route.polyline[0]!;
    ctx.moveTo(...vp.toScreen(start[0], start[1]));
    for (const [x, y] of route.polyline.slice(1)) ctx.lineTo(...vp.toScreen(x, y));
    ctx.stroke();
    ctx.globalAlpha = 1;
  });
  for (const stop of model.planStops()) {
    const [px, py] = vp.toScreen(stop.x, stop.y);
    ctx.strokeStyle = "#333";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(px - 4, py - 4);
    ctx.lineTo(px + 4, py + 4);
    ctx.moveTo(px - 4, py + 4);
    ctx.lineTo(px + 4, py - 4);
    ctx.stroke();
  }
}

function drawExits(ctx: CanvasRenderingContext2D, model: ConsoleViewModel, vp: Viewport): void {
  for (const exit of model.exits) {
    const [px, py] = vp.toScreen(exit.x, exit.y);
    ctx.fillStyle = "#2ca02c";
    ctx.beginPath();
    ctx.arc(px, py, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#145214";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
}

function drawClients(ctx: CanvasRenderingContext2D, model: ConsoleViewModel, vp: Viewport): void {
  for (const seeker of model.seekers.values()) {
    const [px, py] = vp.toScreen(seeker.x, seeker.y);
    ctx.fillStyle = "#ff7f0e";
    ctx.beginPath();
    ctx.arc(px, py, 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.font = "10px sans-serif";
  for (const vol of model.volunteers.values()) {
    const [px, py] = vp.toScreen(vol.x, vol.y);
    ctx.fillStyle = "#1f77b4";
    ctx.fillRect(px - 4, py - 4, 8, 8);
    ctx.fillStyle = "#fff";
    ctx.fillText(String(vol.seats), px - 2.5, py + 3.5);
  }
}
