// Pure UI state: a fold over (hello, state events, pending commands).
// Rendering reads only this structure, so a reconnect that replays the
// hello and the next state event fully restores the view.

import { HelloEvent, StateEvent } from "./protocol.js";

export const METHOD_COLORS: Record<string, string> = {
  B: "#1f6fd6", // blue
  A: "#d62728", // red
  G: "#2ca02c", // green
  P: "#111111", // black
};

export const MAX_SERIES = 600;

export interface SeriesPoint {
  k: number;
  alphaHat: number;
  trueGoalProb: number;
}

export interface ViewModel {
  hello: HelloEvent | null;
  state: StateEvent | null;
  trail: [number, number][];
  series: Record<string, SeriesPoint[]>;
  pendingGoal: number | null;
  visibleMethods: Set<string>;
  connection: "connecting" | "open" | "closed";
  lastError: string | null;
}

export function emptyViewModel(): ViewModel {
  return {
    hello: null,
    state: null,
    trail: [],
    series: {},
    pendingGoal: null,
    visibleMethods: new Set(Object.keys(METHOD_COLORS)),
    connection: "connecting",
    lastError: null,
  };
}

export function applyHello(vm: ViewModel, hello: HelloEvent): ViewModel {
  // fresh geometry: drop any stale trail/series from a previous connection
  return {
    ...emptyViewModel(),
    hello,
    visibleMethods: vm.visibleMethods,
    connection: "open",
  };
}

export function applyState(vm: ViewModel, ev: StateEvent): ViewModel {
  const trail =
    ev.k === 0 ? [ev.pos] : [...vm.trail.slice(-(MAX_SERIES - 1)), ev.pos];
  const series: Record<string, SeriesPoint[]> = { ...vm.series };
  for (const [name, ms] of Object.entries(ev.methods)) {
    const prev = ev.k === 0 ? [] : series[name] ?? [];
    series[name] = [
      ...prev.slice(-(MAX_SERIES - 1)),
      { k: ev.k, alphaHat: ms.alpha_hat, trueGoalProb: ms.goal_post[ev.true_goal] ?? 0 },
    ];
  }
  const pendingGoal = vm.pendingGoal === ev.true_goal ? null : vm.pendingGoal;
  return { ...vm, state: ev, trail, series, pendingGoal, lastError: null };
}

export function applyError(vm: ViewModel, detail: string): ViewModel {
  return { ...vm, lastError: detail };
}

export function markPendingGoal(vm: ViewModel, goal: number): ViewModel {
  return { ...vm, pendingGoal: goal };
}

export function setConnection(
  vm: ViewModel,
  connection: ViewModel["connection"],
): ViewModel {
  return { ...vm, connection };
}

export function toggleMethod(vm: ViewModel, name: string): ViewModel {
  const visible = new Set(vm.visibleMethods);
  if (visible.has(name)) visible.delete(name);
  else visible.add(name);
  return { ...vm, visibleMethods: visible };
}

/** Posterior shade for a goal disc: monotone in probability. */
export function goalShade(probability: number): string {
  const darkness = Math.round(235 * (1 - Math.min(1, Math.max(0, probability))));
  return `rgb(${darkness},${darkness},${darkness})`;
}

/** Hit test a click (canvas px) against goal discs; returns the goal index. */
export function goalAt(
  vm: ViewModel,
  x: number,
  y: number,
  scale: number,
  hitRadiusPx: number,
): number | null {
  if (!vm.hello) return null;
  let best: number | null = null;
  let bestDist = hitRadiusPx;
  vm.hello.scenario.goals.forEach(([gx, gy], i) => {
    const dx = gx * scale - x;
    const dy = gy * scale - y;
    const d = Math.hypot(dx, dy);
    if (d <= bestDist) {
      best = i;
      bestDist = d;
    }
  });
  return best;
}
