// Live session against the starsong control socket.
//
// Replies arrive strictly in request order on a connection, so an in-flight
// FIFO pairs each reply with the request that caused it; only acknowledged
// pairs reach the state reducer. Slider moves pass through a per-slider
// rate limiter. A dropped connection flips the visible status, clears the
// in-flight queue, and retries with exponential backoff; every (re)open
// resynchronizes by listing stars and re-subscribing to luminosity.

import { parseFrame, type ControlRequest, type Reply } from "./protocol.js";
import { RateLimiter } from "./rateLimiter.js";
import {
  initialState,
  reduceAck,
  reduceConnection,
  reduceTelemetry,
  type ConsoleState,
} from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionOptions {
  socketFactory?: SocketFactory;
  luminosityRateHz?: number;
  maxSliderRatePerSecond?: number;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
}

type AckListener = (sent: ControlRequest, reply: Reply) => void;

export class ConsoleConnection {
  state: ConsoleState = initialState();

  private socket: SocketLike | null = null;
  private inFlight: ControlRequest[] = [];
  private attempts = 0;
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private changeListeners: Array<(state: ConsoleState) => void> = [];
  private snapbackListeners: Array<(index: number, committed: number) => void> = [];
  private ackListeners: AckListener[] = [];
  private readonly sliderLimiter: RateLimiter<number>;
  private readonly opts: Required<ConnectionOptions>;

  constructor(
    private readonly url: string,
    options: ConnectionOptions = {},
  ) {
    this.opts = {
      socketFactory: options.socketFactory ?? ((u) => new WebSocket(u) as unknown as SocketLike),
      luminosityRateHz: options.luminosityRateHz ?? 30,
      maxSliderRatePerSecond: options.maxSliderRatePerSecond ?? 30,
      backoffBaseMs: options.backoffBaseMs ?? 500,
      backoffMaxMs: options.backoffMaxMs ?? 10_000,
    };
    this.sliderLimiter = new RateLimiter<number>(
      (key, value) => this.request({ op: "set_gain", index: Number(key), value }),
      this.opts.maxSliderRatePerSecond,
    );
  }

  onChange(listener: (state: ConsoleState) => void): void {
    this.changeListeners.push(listener);
  }

  /** Fires when a slider's set_gain is refused; carries the committed value. */
  onSnapback(listener: (index: number, committed: number) => void): void {
    this.snapbackListeners.push(listener);
  }

  onAck(listener: AckListener): void {
    this.ackListeners.push(listener);
  }

  connect(): void {
    this.closedByUser = false;
    this.setState(reduceConnection(this.state, "connecting"));
    const socket = this.opts.socketFactory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.setState(reduceConnection(this.state, "connected"));
      this.request({ op: "list_stars" });
      this.request({ op: "subscribe_luminosity", rate_hz: this.opts.luminosityRateHz });
    };
    socket.onmessage = (event) => this.handleFrame(event.data);
    socket.onclose = () => this.handleLoss();
    socket.onerror = () => {
      // the close handler owns retry; some sockets only fire error
      if (this.socket === socket) socket.close();
    };
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.retryTimer = null;
    this.sliderLimiter.clear();
    this.socket?.close();
    this.socket = null;
    this.setState(reduceConnection(this.state, "disconnected"));
  }

  /** Queue one control request on the live socket (no-op when down). */
  request(msg: ControlRequest): void {
    if (this.socket === null || this.state.connection !== "connected") return;
    this.inFlight.push(msg);
    this.socket.send(JSON.stringify(msg));
  }

  /** Rate-limited slider control; index 0..3 = pinky/ring/middle/index. */
  sliderMoved(index: number, value: number): void {
    this.sliderLimiter.push(String(index), value);
  }

  private handleFrame(raw: string): void {
    const frame = parseFrame(raw);
    if (frame === null) return;
    if ("event" in frame) {
      this.setState(reduceTelemetry(this.state, frame));
      return;
    }
    const sent = this.inFlight.shift();
    if (sent === undefined) return;
    if (frame.ok) {
      this.setState(reduceAck(this.state, sent, frame));
    } else if (sent.op === "set_gain") {
      const committed = this.state.gains[sent.index] ?? 1;
      for (const listener of this.snapbackListeners) listener(sent.index, committed);
    }
    for (const listener of this.ackListeners) listener(sent, frame);
  }

  private handleLoss(): void {
    this.socket = null;
    this.inFlight = [];
    this.sliderLimiter.clear();
    if (this.closedByUser) return;
    this.setState(reduceConnection(this.state, "disconnected"));
    const delay = Math.min(
      this.opts.backoffBaseMs * 2 ** this.attempts,
      this.opts.backoffMaxMs,
    );
    this.attempts += 1;
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      this.connect();
    }, delay);
  }

  private setState(next: ConsoleState): void {
    this.state = next;
    for (const listener of this.changeListeners) listener(next);
  }
}
