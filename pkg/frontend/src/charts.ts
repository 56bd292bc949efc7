// Minimal streaming line charts on canvas (temperature estimate and
// true-goal probability per method, last 600 steps).

import { Ctx2D } from "./renderer.js";
import { METHOD_COLORS, SeriesPoint, ViewModel } from "./view-model.js";

export interface ChartSpec {
  widthPx: number;
  heightPx: number;
  field: "alphaHat" | "trueGoalProb";
  yMax: number | "auto";
}

export function drawChart(ctx: Ctx2D, vm: ViewModel, spec: ChartSpec): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, spec.widthPx, spec.heightPx);
  ctx.fillStyle = "#ffffff";
  ctx.beginPath();
  ctx.rect(0, 0, spec.widthPx, spec.heightPx);
  ctx.fill();
  const names = Object.keys(vm.series).filter((n) => vm.visibleMethods.has(n));
  if (names.length === 0) return;

  let yMax = 1.0;
  if (spec.yMax === "auto") {
    yMax = 1e-9;
    for (const name of names) {
      for (const p of vm.series[name]) yMax = Math.max(yMax, p[spec.field]);
    }
    yMax *= 1.1;
  } else {
    yMax = spec.yMax;
  }

  const ks = names.flatMap((n) => vm.series[n].map((p) => p.k));
  if (ks.length === 0) return;
  const kMin = Math.min(...ks);
  const kMax = Math.max(...ks, kMin + 1);

  for (const name of names) {
    const pts: SeriesPoint[] = vm.series[name];
    if (pts.length === 0) continue;
    ctx.strokeStyle = METHOD_COLORS[name] ?? "#777777";
    ctx.lineWidth = 1.3;
    ctx.beginPath();
    pts.forEach((p, i) => {
      const x = ((p.k - kMin) / (kMax - kMin)) * (spec.widthPx - 8) + 4;
      const y = spec.heightPx - 4 - (p[spec.field] / yMax) * (spec.heightPx - 8);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}
