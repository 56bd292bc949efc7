// Connection management with a pending-command queue: commands sent while
// disconnected are queued and flushed on reconnect, never silently dropped.

import { Command, ServerEvent, encodeCommand, parseServerEvent } from "./protocol.js";

export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export const OPEN = 1;

export interface SteerSocketOptions {
  url: string;
  connect: (url: string) => SocketLike;
  onEvent: (ev: ServerEvent) => void;
  onStatus: (status: "connecting" | "open" | "closed") => void;
  reconnectDelayMs?: number;
  /** injectable timer for tests */
  schedule?: (fn: () => void, ms: number) => void;
}

export class SteerSocket {
  private sock: SocketLike | null = null;
  private queue: Command[] = [];
  private closedByUser = false;

  constructor(private readonly opts: SteerSocketOptions) {}

  start(): void {
    this.closedByUser = false;
    this.open();
  }

  private open(): void {
    this.opts.onStatus("connecting");
    const sock = this.opts.connect(this.opts.url);
    this.sock = sock;
    sock.onopen = () => {
      this.opts.onStatus("open");
      const pending = this.queue;
      this.queue = [];
      for (const cmd of pending) this.send(cmd);
    };
    sock.onmessage = (ev) => {
      const parsed = parseServerEvent(ev.data);
      if (parsed) this.opts.onEvent(parsed);
    };
    sock.onclose = () => {
      this.opts.onStatus("closed");
      if (!this.closedByUser) {
        const delay = this.opts.reconnectDelayMs ?? 1000;
        (this.opts.schedule ?? ((fn, ms) => setTimeout(fn, ms)))(
          () => this.open(),
          delay,
        );
      }
    };
    sock.onerror = () => {
      /* closing follows; onclose handles reconnect */
    };
  }

  /** Send now when open, otherwise queue for the next connection. */
  send(cmd: Command): boolean {
    if (this.sock && this.sock.readyState === OPEN) {
      this.sock.send(encodeCommand(cmd));
      return true;
    }
    this.queue.push(cmd);
    return false;
  }

  get pendingCount(): number {
    return this.queue.length;
  }

  stop(): void {
    this.closedByUser = true;
    this.sock?.close();
  }
}
