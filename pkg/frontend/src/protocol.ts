// Wire types for the starsong control protocol: one JSON object per text
// frame. Requests carry an "op"; replies carry "ok"; telemetry carries
// "event".

export type ControlRequest =
  | { op: "list_stars" }
  | { op: "select_star"; id: string }
  | { op: "set_gain"; index: number; value: number }
  | { op: "load_sample"; slot: string; path: string }
  | { op: "trigger_sample"; slot: string }
  | { op: "stop_sample"; slot: string }
  | { op: "subscribe_luminosity"; rate_hz: number }
  | { op: "set_filter_q"; value: number };

export interface StarSummary {
  id: string;
  name: string;
  modes: number;
}

export interface OkReply {
  ok: true;
  luminosity: number | null;
  stars?: StarSummary[];
  star?: string;
  gains?: number[];
  partials?: { frequency_hz: number; loudness: number }[];
  index?: number;
  value?: number;
  slot?: string;
  frames?: number;
  playing?: boolean;
  rate_hz?: number;
  q?: number;
}

export interface ErrorReply {
  ok: false;
  error: string;
}

export type Reply = OkReply | ErrorReply;

export interface LuminosityFrame {
  event: "luminosity";
  values: Record<string, number>;
}

export type ServerFrame = Reply | LuminosityFrame;

export function parseFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const obj = data as Record<string, unknown>;
  if (obj.event === "luminosity" && typeof obj.values === "object" && obj.values !== null) {
    return obj as unknown as LuminosityFrame;
  }
  if (typeof obj.ok === "boolean") {
    return obj as unknown as Reply;
  }
  return null;
}

export function isReply(frame: ServerFrame): frame is Reply {
  return "ok" in frame;
}
