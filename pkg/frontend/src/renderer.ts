// Canvas drawing. Everything here takes a 2D context argument so it runs
// against a recording stub in tests; only main.ts touches the real DOM.

import { METHOD_COLORS, ViewModel, goalShade } from "./view-model.js";

export interface Ctx2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  ellipse(
    x: number,
    y: number,
    rx: number,
    ry: number,
    rotation: number,
    a0: number,
    a1: number,
  ): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  globalAlpha: number;
}

export interface Layout {
  widthPx: number;
  heightPx: number;
  /** canvas pixels per grid cell */
  scale: number;
}

export function layoutFor(vm: ViewModel, maxWidthPx: number): Layout {
  const map = vm.hello?.scenario.map;
  const w = map?.width ?? 101;
  const h = map?.height ?? 81;
  const scale = Math.max(2, Math.floor(maxWidthPx / w));
  return { widthPx: w * scale, heightPx: h * scale, scale };
}

function drawGrid(ctx: Ctx2D, vm: ViewModel, layout: Layout): void {
  const map = vm.hello!.scenario.map;
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#fcfcfc";
  ctx.beginPath();
  ctx.rect(0, 0, layout.widthPx, layout.heightPx);
  ctx.fill();
  ctx.fillStyle = "#444444";
  for (const [ox, oy] of map.obstacles) {
    ctx.beginPath();
    ctx.rect(ox * layout.scale, oy * layout.scale, layout.scale, layout.scale);
    ctx.fill();
  }
}

function drawTrail(ctx: Ctx2D, vm: ViewModel, layout: Layout): void {
  if (vm.trail.length < 2) return;
  ctx.globalAlpha = 0.9;
  ctx.strokeStyle = "#c06bd4";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  vm.trail.forEach(([x, y], i) => {
    if (i === 0) ctx.moveTo(x * layout.scale, y * layout.scale);
    else ctx.lineTo(x * layout.scale, y * layout.scale);
  });
  ctx.stroke();
}

function drawGoals(ctx: Ctx2D, vm: ViewModel, layout: Layout): void {
  const goals = vm.hello!.scenario.goals;
  // shade by the first visible method's posterior, darkest = most likely
  const state = vm.state;
  let post: number[] | null = null;
  if (state) {
    for (const name of ["P", "G", "A", "B"]) {
      if (vm.visibleMethods.has(name) && state.methods[name]) {
        post = state.methods[name].goal_post;
        break;
      }
    }
  }
  goals.forEach(([gx, gy], i) => {
    ctx.globalAlpha = 1;
    ctx.fillStyle = post ? goalShade(post[i] ?? 0) : goalShade(0);
    ctx.strokeStyle = i === vm.pendingGoal ? "#ff9900" : "#333333";
    ctx.lineWidth = i === vm.pendingGoal ? 3 : 1;
    ctx.beginPath();
    ctx.arc(gx * layout.scale, gy * layout.scale, Math.max(4, layout.scale), 0, Math.PI * 2);
    ctx.fill();
    ctx.stroke();
    if (state && i === state.true_goal) {
      ctx.strokeStyle = "#e03bd1";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.rect(
        gx * layout.scale - layout.scale * 1.6,
        gy * layout.scale - layout.scale * 1.6,
        layout.scale * 3.2,
        layout.scale * 3.2,
      );
      ctx.stroke();
    }
  });
}

function drawForecasts(ctx: Ctx2D, vm: ViewModel, layout: Layout): number {
  const state = vm.state;
  const cellSize = vm.hello!.scenario.map.cell_size;
  if (!state) return 0;
  let drawn = 0;
  for (const [name, ms] of Object.entries(state.methods)) {
    if (!vm.visibleMethods.has(name) || !ms.pred) continue;
    ctx.strokeStyle = METHOD_COLORS[name] ?? "#777777";
    ctx.lineWidth = 1;
    ctx.globalAlpha = 0.55;
    for (const e of ms.pred.ellipses) {
      const cx = (e.center[0] / cellSize) * layout.scale;
      const cy = (e.center[1] / cellSize) * layout.scale;
      const rx = Math.max(0.5, (e.semi_major / cellSize) * layout.scale);
      const ry = Math.max(0.5, (e.semi_minor / cellSize) * layout.scale);
      ctx.beginPath();
      ctx.ellipse(cx, cy, rx, ry, e.angle, 0, Math.PI * 2);
      ctx.stroke();
      drawn += 1;
    }
  }
  return drawn;
}

function drawTarget(ctx: Ctx2D, vm: ViewModel, layout: Layout): void {
  const state = vm.state;
  if (!state) return;
  const [x, y] = state.pos;
  ctx.globalAlpha = 1;
  ctx.strokeStyle = "#e03bd1";
  ctx.lineWidth = 2.5;
  const r = Math.max(5, layout.scale * 1.2);
  ctx.beginPath();
  ctx.moveTo(x * layout.scale - r, y * layout.scale - r);
  ctx.lineTo(x * layout.scale + r, y * layout.scale + r);
  ctx.moveTo(x * layout.scale - r, y * layout.scale + r);
  ctx.lineTo(x * layout.scale + r, y * layout.scale - r);
  ctx.stroke();
}

/** Draw one frame; returns the number of forecast ellipses drawn. */
export function renderFrame(ctx: Ctx2D, vm: ViewModel, layout: Layout): number {
  ctx.clearRect(0, 0, layout.widthPx, layout.heightPx);
  if (!vm.hello) return 0;
  drawGrid(ctx, vm, layout);
  drawTrail(ctx, vm, layout);
  const ellipses = drawForecasts(ctx, vm, layout);
  drawGoals(ctx, vm, layout);
  drawTarget(ctx, vm, layout);
  return ellipses;
}
