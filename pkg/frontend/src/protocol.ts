// Wire protocol shared with the live service. JSON text frames both ways;
// covariances arrive packed as [c00, c01, c11].

export interface MapSpec {
  width: number;
  height: number;
  cell_size: number;
  obstacles: number[][];
}

export interface ScenarioSpec {
  map: MapSpec;
  goals: [number, number][];
  start: [number, number];
  segments: { goal: number; alpha: number; duration: number }[];
  seed: number;
  methods: { variant: string }[];
  prediction: { M: number; T: number; n_sigma: number };
}

export interface HelloEvent {
  type: "hello";
  scenario: ScenarioSpec;
  rate_hz: number;
  true_goal: number;
  alpha_star: number;
}

export interface EllipseSpec {
  center: [number, number];
  semi_major: number;
  semi_minor: number;
  angle: number;
}

export interface MethodState {
  goal_post: number[];
  alpha_hat: number;
  timing_ms: number;
  pred?: {
    means: [number, number][];
    covs: [number, number, number][];
    ellipses: EllipseSpec[];
  };
}

export interface StateEvent {
  type: "state";
  k: number;
  pos: [number, number];
  true_goal: number;
  alpha_star: number;
  methods: Record<string, MethodState>;
}

export interface ErrorEvent {
  type: "error";
  detail: string;
}

export type ServerEvent = HelloEvent | StateEvent | ErrorEvent;

export type Command =
  | { type: "set_goal"; goal: number }
  | { type: "set_alpha"; value: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "step" }
  | { type: "reset"; scenario: string }
  | { type: "set_rate"; hz: number };

function isNumberPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && v.every((x) => typeof x === "number");
}

export function parseServerEvent(raw: string): ServerEvent | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const ev = data as Record<string, unknown>;
  switch (ev.type) {
    case "hello": {
      const scenario = ev.scenario as ScenarioSpec | undefined;
      if (!scenario || typeof scenario.map?.width !== "number") return null;
      if (!Array.isArray(scenario.goals)) return null;
      return ev as unknown as HelloEvent;
    }
    case "state": {
      if (typeof ev.k !== "number" || !isNumberPair(ev.pos)) return null;
      if (typeof ev.methods !== "object" || ev.methods === null) return null;
      return ev as unknown as StateEvent;
    }
    case "error":
      return typeof ev.detail === "string" ? (ev as unknown as ErrorEvent) : null;
    default:
      return null;
  }
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
