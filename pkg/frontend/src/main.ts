// DOM bootstrap: wires the connection to sliders, the star field canvas,
// and the pictogram grid. All displayed values are server-acknowledged.

import { ConsoleConnection } from "./connection.js";
import { DEFAULT_SLOTS, loadMessage, pictogramAction } from "./pictograms.js";
import { Starfield } from "./starfield.js";
import { GAIN_LABELS } from "./state.js";

function serverUrl(): string {
  const params = new URLSearchParams(location.search);
  const explicit = params.get("server");
  if (explicit) return explicit;
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.hostname}:8765/ws`;
}

function start(): void {
  const statusEl = document.getElementById("status") as HTMLElement;
  const starsEl = document.getElementById("stars") as HTMLElement;
  const slidersEl = document.getElementById("sliders") as HTMLElement;
  const slotsEl = document.getElementById("slots") as HTMLElement;
  const canvas = document.getElementById("field") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;

  const field = new Starfield(ctx, canvas.width, canvas.height);
  const connection = new ConsoleConnection(serverUrl());

  const sliders: HTMLInputElement[] = GAIN_LABELS.map((label, index) => {
    const wrap = document.createElement("label");
    wrap.className = "slider";
    wrap.textContent = label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "1";
    input.step = "0.01";
    input.value = "1";
    input.addEventListener("input", () => connection.sliderMoved(index, Number(input.value)));
    wrap.appendChild(input);
    slidersEl.appendChild(wrap);
    return input;
  });

  connection.onSnapback((index, committed) => {
    sliders[index].value = String(committed);
  });

  const slotButtons = new Map<string, HTMLButtonElement>();
  for (const slot of DEFAULT_SLOTS) {
    const button = document.createElement("button");
    button.textContent = slot;
    button.addEventListener("click", () => {
      const action = pictogramAction(connection.state, slot);
      if (action.kind === "load") {
        const path = prompt(`sample file path for "${slot}"`);
        if (path) connection.request(loadMessage(slot, path));
      } else {
        connection.request(action.message);
      }
    });
    slotButtons.set(slot, button);
    slotsEl.appendChild(button);
  }

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const id = field.hitTest(event.clientX - rect.left, event.clientY - rect.top);
    if (id) connection.request({ op: "select_star", id });
  });

  let laidOutStars = "";
  connection.onChange((state) => {
    statusEl.textContent = state.connection;
    statusEl.dataset.state = state.connection;

    const starKey = state.stars.map((s) => s.id).join(",");
    if (starKey !== laidOutStars) {
      laidOutStars = starKey;
      field.layout(state.stars);
      starsEl.textContent = state.stars.map((s) => `${s.name} (${s.modes} modes)`).join("  ·  ");
    }
    field.draw(state.luminosity, state.selectedStar);

    // sliders mirror acknowledged gains unless the user is mid-drag
    state.gains.forEach((gain, i) => {
      if (document.activeElement !== sliders[i]) sliders[i].value = String(gain);
    });
    for (const [slot, button] of slotButtons) {
      button.dataset.state = state.slots[slot] ?? "empty";
    }
  });

  connection.connect();
}

document.addEventListener("DOMContentLoaded", start);
