// In-memory server speaking the documented control protocol over fake
// sockets. Replies are delivered synchronously so tests stay deterministic
// under fake timers; socket opening is explicit via server.openLatest().

import type { SocketLike } from "../src/connection.js";
import type { ControlRequest } from "../src/protocol.js";

const LOUDNESS_BY_FREQ = [1.1 / 3.5, 1.0, 2.3 / 3.5, 1.7 / 3.5];
const FREQS = [261.63, 267.713, 328.12, 634.178];

export interface ReceivedMessage {
  socketIndex: number;
  atMs: number;
  message: ControlRequest;
}

export class FakeSocket implements SocketLike {
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;
  closed = false;

  constructor(private readonly server: MockServer, readonly index: number) {}

  send(data: string): void {
    if (this.closed) return;
    this.server.handleRaw(this, data);
  }

  close(): void {
    if (this.closed) return;
    this.closed = true;
    this.onclose?.();
  }

  deliver(payload: unknown): void {
    if (!this.closed) this.onmessage?.({ data: JSON.stringify(payload) });
  }
}

export class MockServer {
  sockets: FakeSocket[] = [];
  received: ReceivedMessage[] = [];
  private selected: string | null = null;
  private gains = [1, 1, 1, 1];
  private loadedSlots = new Set<string>();
  private rejectGains = false;

  readonly factory = (): FakeSocket => {
    const socket = new FakeSocket(this, this.sockets.length);
    this.sockets.push(socket);
    return socket;
  };

  openLatest(): void {
    this.sockets[this.sockets.length - 1]?.onopen?.();
  }

  dropLatest(): void {
    this.sockets[this.sockets.length - 1]?.close();
  }

  /** Make every following set_gain fail, as an out-of-range server would. */
  failGains(fail = true): void {
    this.rejectGains = fail;
  }

  pushLuminosity(values: Record<string, number>): void {
    this.sockets[this.sockets.length - 1]?.deliver({ event: "luminosity", values });
  }

  messagesOn(socketIndex: number): ControlRequest[] {
    return this.received.filter((r) => r.socketIndex === socketIndex).map((r) => r.message);
  }

  private luminosity(): number | null {
    if (this.selected === null) return null;
    const weighted = LOUDNESS_BY_FREQ.reduce((acc, l, i) => acc + l * this.gains[i], 0);
    const total = LOUDNESS_BY_FREQ.reduce((a, b) => a + b, 0);
    return weighted / total;
  }

  handleRaw(socket: FakeSocket, raw: string): void {
    const msg = JSON.parse(raw) as ControlRequest;
    this.received.push({ socketIndex: socket.index, atMs: Date.now(), message: msg });
    socket.deliver(this.reply(msg));
  }

  private reply(msg: ControlRequest): unknown {
    switch (msg.op) {
      case "list_stars":
        return {
          ok: true,
          stars: [{ id: "v465_per", name: "V465 Per", modes: 4 }],
          luminosity: this.luminosity(),
        };
      case "select_star":
        if (msg.id !== "v465_per") return { ok: false, error: `unknown star id '${msg.id}'` };
        this.selected = msg.id;
        this.gains = [1, 1, 1, 1];
        return {
          ok: true,
          star: msg.id,
          gains: [...this.gains],
          partials: FREQS.map((f, i) => ({ frequency_hz: f, loudness: LOUDNESS_BY_FREQ[i] })),
          luminosity: this.luminosity(),
        };
      case "set_gain":
        if (this.rejectGains) return { ok: false, error: "rejected" };
        if (!Number.isInteger(msg.index) || msg.index < 0 || msg.index > 3)
          return { ok: false, error: "index out of range" };
        if (typeof msg.value !== "number" || msg.value < 0 || msg.value > 1)
          return { ok: false, error: `gain value must be in [0, 1], got ${msg.value}` };
        if (this.selected === null) return { ok: false, error: "no star selected" };
        this.gains[msg.index] = msg.value;
        return {
          ok: true,
          index: msg.index,
          value: msg.value,
          gains: [...this.gains],
          luminosity: this.luminosity(),
        };
      case "load_sample":
        this.loadedSlots.add(msg.slot);
        return { ok: true, slot: msg.slot, frames: 4410, luminosity: this.luminosity() };
      case "trigger_sample":
        if (!this.loadedSlots.has(msg.slot))
          return { ok: false, error: `slot '${msg.slot}' has no sample loaded` };
        return { ok: true, slot: msg.slot, playing: true, luminosity: this.luminosity() };
      case "stop_sample":
        if (!this.loadedSlots.has(msg.slot))
          return { ok: false, error: `slot '${msg.slot}' has no sample loaded` };
        return { ok: true, slot: msg.slot, playing: false, luminosity: this.luminosity() };
      case "subscribe_luminosity":
        if (!(msg.rate_hz > 0 && msg.rate_hz <= 60))
          return { ok: false, error: "rate_hz must be in (0, 60]" };
        return { ok: true, rate_hz: msg.rate_hz, luminosity: this.luminosity() };
      case "set_filter_q":
        return { ok: true, q: msg.value, luminosity: this.luminosity() };
      default:
        return { ok: false, error: "unknown op" };
    }
  }
}
