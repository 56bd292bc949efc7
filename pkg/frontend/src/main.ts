// DOM bootstrap: fetch the scenario, open the socket, wire controls, and
// repaint on every animation frame that has fresh state.

import { drawChart } from "./charts.js";
import { Command } from "./protocol.js";
import { Ctx2D, layoutFor, renderFrame } from "./renderer.js";
import { SteerSocket } from "./socket.js";
import {
  METHOD_COLORS,
  ViewModel,
  applyError,
  applyHello,
  applyState,
  emptyViewModel,
  goalAt,
  markPendingGoal,
  setConnection,
  toggleMethod,
} from "./view-model.js";

let vm: ViewModel = emptyViewModel();
let dirty = true;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const canvas = byId<HTMLCanvasElement>("arena");
  const alphaChart = byId<HTMLCanvasElement>("alpha-chart");
  const goalChart = byId<HTMLCanvasElement>("goal-chart");
  const status = byId<HTMLSpanElement>("status");
  const stepInfo = byId<HTMLSpanElement>("step-info");
  const methodBoxes = byId<HTMLDivElement>("method-toggles");
  const alphaSlider = byId<HTMLInputElement>("alpha-slider");
  const alphaLabel = byId<HTMLSpanElement>("alpha-label");

  const proto = location.protocol === "https:" ? "wss" : "ws";
  const socket = new SteerSocket({
    url: `${proto}://${location.host}/ws`,
    connect: (url) => new WebSocket(url) as unknown as never,
    onEvent: (ev) => {
      if (ev.type === "hello") vm = applyHello(vm, ev);
      else if (ev.type === "state") vm = applyState(vm, ev);
      else vm = applyError(vm, ev.detail);
      dirty = true;
    },
    onStatus: (s) => {
      vm = setConnection(vm, s);
      dirty = true;
    },
  });
  socket.start();

  const send = (cmd: Command) => {
    socket.send(cmd);
  };

  for (const name of Object.keys(METHOD_COLORS)) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => {
      vm = toggleMethod(vm, name);
      dirty = true;
    });
    label.appendChild(box);
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = METHOD_COLORS[name];
    label.appendChild(swatch);
    label.appendChild(document.createTextNode(name));
    methodBoxes.appendChild(label);
  }

  byId<HTMLButtonElement>("pause").addEventListener("click", () => send({ type: "pause" }));
  byId<HTMLButtonElement>("resume").addEventListener("click", () => send({ type: "resume" }));
  byId<HTMLButtonElement>("step").addEventListener("click", () => send({ type: "step" }));
  byId<HTMLButtonElement>("reset").addEventListener("click", () =>
    send({ type: "reset", scenario: "case1" }),
  );
  alphaSlider.addEventListener("change", () => {
    const value = Number(alphaSlider.value);
    alphaLabel.textContent = value.toFixed(0);
    send({ type: "set_alpha", value });
  });

  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const layout = layoutFor(vm, canvas.width);
    const goal = goalAt(
      vm,
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      layout.scale,
      Math.max(10, layout.scale * 2),
    );
    if (goal !== null) {
      vm = markPendingGoal(vm, goal);
      send({ type: "set_goal", goal });
      dirty = true;
    }
  });

  const paint = () => {
    if (dirty) {
      dirty = false;
      const layout = layoutFor(vm, 820);
      canvas.width = layout.widthPx;
      canvas.height = layout.heightPx;
      const ctx = canvas.getContext("2d") as unknown as Ctx2D;
      renderFrame(ctx, vm, layout);
      drawChart(alphaChart.getContext("2d") as unknown as Ctx2D, vm, {
        widthPx: alphaChart.width,
        heightPx: alphaChart.height,
        field: "alphaHat",
        yMax: "auto",
      });
      drawChart(goalChart.getContext("2d") as unknown as Ctx2D, vm, {
        widthPx: goalChart.width,
        heightPx: goalChart.height,
        field: "trueGoalProb",
        yMax: 1.0,
      });
      status.textContent =
        vm.connection === "open"
          ? vm.lastError
            ? `error: ${vm.lastError}`
            : "live"
          : vm.connection;
      if (vm.state) {
        stepInfo.textContent = `k=${vm.state.k}  goal=${vm.state.true_goal}  alpha*=${vm.state.alpha_star}`;
      }
    }
    requestAnimationFrame(paint);
  };
  requestAnimationFrame(paint);
}

window.addEventListener("load", main);
