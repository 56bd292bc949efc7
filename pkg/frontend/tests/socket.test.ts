import { describe, expect, it } from "vitest";

import { ServerEvent } from "../src/protocol.js";
import { OPEN, SocketLike, SteerSocket } from "../src/socket.js";

class FakeSocket implements SocketLike {
  readyState = 0;
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }
  open(): void {
    this.readyState = OPEN;
    this.onopen?.();
  }
  receive(ev: unknown): void {
    this.onmessage?.({ data: JSON.stringify(ev) });
  }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const events: ServerEvent[] = [];
  const statuses: string[] = [];
  const timers: (() => void)[] = [];
  const steer = new SteerSocket({
    url: "ws://test/ws",
    connect: () => {
      const s = new FakeSocket();
      sockets.push(s);
      return s;
    },
    onEvent: (ev) => events.push(ev),
    onStatus: (s) => statuses.push(s),
    schedule: (fn) => timers.push(fn),
  });
  return { steer, sockets, events, statuses, timers };
}

describe("SteerSocket", () => {
  it("delivers parsed events and ignores garbage frames", () => {
    const { steer, sockets, events } = harness();
    steer.start();
    sockets[0].open();
    sockets[0].receive({ type: "error", detail: "x" });
    sockets[0].onmessage?.({ data: "{broken" });
    expect(events).toEqual([{ type: "error", detail: "x" }]);
  });

  it("sends immediately while open", () => {
    const { steer, sockets } = harness();
    steer.start();
    sockets[0].open();
    expect(steer.send({ type: "set_goal", goal: 3 })).toBe(true);
    expect(JSON.parse(sockets[0].sent[0])).toEqual({ type: "set_goal", goal: 3 });
  });

  it("queues commands while disconnected and flushes on reconnect", () => {
    const { steer, sockets, timers } = harness();
    steer.start();
    sockets[0].open();
    sockets[0].close();
    expect(steer.send({ type: "set_goal", goal: 5 })).toBe(false);
    expect(steer.pendingCount).toBe(1);
    timers.shift()!(); // reconnect timer fires
    sockets[1].open();
    expect(steer.pendingCount).toBe(0);
    expect(JSON.parse(sockets[1].sent[0])).toEqual({ type: "set_goal", goal: 5 });
  });

  it("reports connection status transitions", () => {
    const { steer, sockets, statuses } = harness();
    steer.start();
    sockets[0].open();
    sockets[0].close();
    expect(statuses).toEqual(["connecting", "open", "closed"]);
  });

  it("does not reconnect after an explicit stop", () => {
    const { steer, sockets, timers } = harness();
    steer.start();
    sockets[0].open();
    steer.stop();
    expect(timers.length).toBe(0);
    expect(sockets.length).toBe(1);
  });
});
