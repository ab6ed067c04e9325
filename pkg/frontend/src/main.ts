/**
 * Console bootstrap: load the scenario and flight log, connect, then run
 * the render/refresh loop. All state changes go through the reducers in
 * state.ts; this file only wires DOM events and the WebSocket.
 */

import { SyncConnection } from "./net.js";
import {
  POI_KINDS,
  annotatePixelMessage,
  viewProjectMessage,
  type ServerMessage,
} from "./protocol.js";
import { drawCameraView, drawMap } from "./render.js";
import { parseFlightLog, parseScenario, type FlightLogSummary, type Scenario } from "./scenario.js";
import {
  applyServerMessage,
  clearToast,
  initialState,
  seekTo,
  selectKind,
  setPlaying,
  tickClock,
  type ViewState,
} from "./state.js";
import { markerStyle } from "./overlay.js";

const REFRESH_HZ = 10; // >= 5 Hz while playing
const TICK_MS = 1000 / REFRESH_HZ;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

async function boot(): Promise<void> {
  const scenario: Scenario = parseScenario(
    await (await fetch("./scenario.json")).text());
  const log: FlightLogSummary = parseFlightLog(
    await (await fetch(scenario.flightLogUrl)).text());

  let state: ViewState = initialState(scenario.uavId, log.tMin, log.tMax);
  let overlaysPending = false;

  const cameraCanvas = byId<HTMLCanvasElement>("camera");
  const mapCanvas = byId<HTMLCanvasElement>("map");
  const cameraCtx = cameraCanvas.getContext("2d")!;
  const mapCtx = mapCanvas.getContext("2d")!;
  const clockLabel = byId<HTMLSpanElement>("clock");
  const statusLabel = byId<HTMLSpanElement>("status");
  const toastBox = byId<HTMLDivElement>("toast");
  const playButton = byId<HTMLButtonElement>("play");
  const slider = byId<HTMLInputElement>("seek");
  const noteInput = byId<HTMLInputElement>("note");
  slider.min = String(log.tMin);
  slider.max = String(log.tMax);
  slider.step = "0.1";

  const clientId = `console-${Math.random().toString(36).slice(2, 8)}`;
  const conn = new SyncConnection(scenario.wsUrl, clientId, {
    onMessage(msg: ServerMessage) {
      const result = applyServerMessage(state, msg);
      state = result.state;
      if (msg.type === "view.overlays") overlaysPending = false;
      if (result.refreshOverlays) requestOverlays(); // broadcast -> immediate refresh
      if (msg.type === "error") scheduleToastClear();
      render();
    },
    onProtocolError(raw: string) {
      state = { ...state, toast: `unrecognized frame: ${raw.slice(0, 60)}` };
      scheduleToastClear();
      render();
    },
    onStatus(status) {
      statusLabel.textContent = status;
      statusLabel.className = `status ${status}`;
    },
  });
  conn.connect();

  function requestOverlays(): void {
    if (overlaysPending) return; // one in flight at a time
    if (conn.send(viewProjectMessage(state.uavId, state.clock.t))) {
      overlaysPending = true;
    }
  }

  let toastTimer: number | undefined;
  function scheduleToastClear(): void {
    window.clearTimeout(toastTimer);
    toastTimer = window.setTimeout(() => {
      state = clearToast(state);
      render();
    }, 4000);
  }

  // symbol palette: icons, not labeled buttons
  const palette = byId<HTMLDivElement>("palette");
  for (const kind of POI_KINDS) {
    const btn = document.createElement("button");
    const style = markerStyle(kind);
    btn.textContent = style.glyph;
    btn.title = kind;
    btn.style.color = style.color;
    btn.onclick = () => {
      state = selectKind(state, kind);
      render();
    };
    palette.appendChild(btn);
  }

  playButton.onclick = () => {
    state = setPlaying(state, !state.clock.playing);
    render();
  };
  slider.oninput = () => {
    state = seekTo(state, Number(slider.value));
    requestOverlays();
    render();
  };
  byId<HTMLButtonElement>("rewind").onclick = () => {
    state = seekTo(state, log.tMin);
    requestOverlays();
    render();
  };

  cameraCanvas.onclick = (ev: MouseEvent) => {
    const rect = cameraCanvas.getBoundingClientRect();
    const u = ((ev.clientX - rect.left) / rect.width) * scenario.frameWidth;
    const v = ((ev.clientY - rect.top) / rect.height) * scenario.frameHeight;
    // no optimistic marker: it appears when the broadcast round-trips
    conn.send(annotatePixelMessage(
      state.uavId, state.clock.t, u, v, state.selectedKind,
      noteInput.value || undefined));
    noteInput.value = "";
  };

  window.setInterval(() => {
    const wasPlaying = state.clock.playing;
    state = { ...state, clock: tickClock(state.clock, TICK_MS / 1000) };
    if (wasPlaying) requestOverlays();
    render();
  }, TICK_MS);

  function render(): void {
    drawCameraView(cameraCtx, state.markers, scenario.frameWidth,
                   scenario.frameHeight);
    drawMap(mapCtx, log, state.pois, state.clock.t);
    clockLabel.textContent =
      `t = ${state.clock.t.toFixed(1)}s / ${log.tMax.toFixed(1)}s`;
    playButton.textContent = state.clock.playing ? "pause" : "play";
    slider.value = String(state.clock.t);
    toastBox.textContent = state.toast ?? "";
    toastBox.className = state.toast ? "toast visible" : "toast";
    for (const btn of Array.from(palette.children) as HTMLButtonElement[]) {
      btn.classList.toggle("selected", btn.title === state.selectedKind);
    }
  }

  requestOverlays();
  render();
}

boot().catch((err) => {
  document.body.innerHTML =
    `<pre class="boot-error">console failed to start:\n${err}</pre>`;
});
