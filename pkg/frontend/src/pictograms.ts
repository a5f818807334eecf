// Pictogram slot grid: clicking an empty slot starts the load flow, a
// loaded slot triggers its sample, a playing slot stops it.

import type { ControlRequest } from "./protocol.js";
import type { ConsoleState } from "./state.js";

export const DEFAULT_SLOTS = ["bison", "boar", "crocodile", "crane", "fox", "snake"] as const;

export type PictogramAction =
  | { kind: "load" }
  | { kind: "send"; message: ControlRequest };

export function pictogramAction(state: ConsoleState, slot: string): PictogramAction {
  const status = state.slots[slot] ?? "empty";
  if (status === "empty") return { kind: "load" };
  if (status === "loaded") return { kind: "send", message: { op: "trigger_sample", slot } };
  return { kind: "send", message: { op: "stop_sample", slot } };
}

export function loadMessage(slot: string, path: string): ControlRequest {
  return { op: "load_sample", slot, path };
}
