// Console state is a pure fold over the acknowledged message history plus
// telemetry frames: replaying the same log reproduces the same state. The
// UI must only treat values found here as committed.

import type { ControlRequest, LuminosityFrame, Reply, StarSummary } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export type SlotStatus = "empty" | "loaded" | "playing";

export interface ConsoleState {
  connection: ConnectionStatus;
  stars: StarSummary[];
  selectedStar: string | null;
  gains: [number, number, number, number];
  slots: Record<string, SlotStatus>;
  luminosity: Record<string, number>;
}

export const GAIN_LABELS = ["pinky", "ring", "middle", "index"] as const;

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    stars: [],
    selectedStar: null,
    gains: [1, 1, 1, 1],
    slots: {},
    luminosity: {},
  };
}

/** Fold one acknowledged request/reply pair into the state. */
export function reduceAck(state: ConsoleState, sent: ControlRequest, reply: Reply): ConsoleState {
  if (!reply.ok) return state;
  switch (sent.op) {
    case "list_stars":
      return { ...state, stars: reply.stars ?? state.stars };
    case "select_star":
      return {
        ...state,
        selectedStar: reply.star ?? sent.id,
        gains: (reply.gains as ConsoleState["gains"]) ?? [1, 1, 1, 1],
      };
    case "set_gain": {
      const gains = [...state.gains] as ConsoleState["gains"];
      gains[sent.index] = sent.value;
      return { ...state, gains };
    }
    case "load_sample":
      return { ...state, slots: { ...state.slots, [sent.slot]: "loaded" } };
    case "trigger_sample":
      return { ...state, slots: { ...state.slots, [sent.slot]: "playing" } };
    case "stop_sample":
      return { ...state, slots: { ...state.slots, [sent.slot]: "loaded" } };
    default:
      return state;
  }
}

export function reduceTelemetry(state: ConsoleState, frame: LuminosityFrame): ConsoleState {
  return { ...state, luminosity: { ...frame.values } };
}

export function reduceConnection(state: ConsoleState, connection: ConnectionStatus): ConsoleState {
  return { ...state, connection };
}

/** Replay a full acknowledged history from scratch. */
export function replay(
  log: Array<
    | { kind: "ack"; sent: ControlRequest; reply: Reply }
    | { kind: "telemetry"; frame: LuminosityFrame }
    | { kind: "connection"; status: ConnectionStatus }
  >,
): ConsoleState {
  let state = initialState();
  for (const entry of log) {
    if (entry.kind === "ack") state = reduceAck(state, entry.sent, entry.reply);
    else if (entry.kind === "telemetry") state = reduceTelemetry(state, entry.frame);
    else state = reduceConnection(state, entry.status);
  }
  return state;
}
