/**
 * Console state and its reducer. Pure: rendering and networking live
 * elsewhere, which is what makes the behavior unit-testable.
 *
 * Two hard rules from the protocol contract:
 *  - the marker list is replaced wholesale by each view.overlays reply,
 *    never merged client-side;
 *  - playback (pause/rewind) only changes the local clock that is sent in
 *    view.project / annotate.pixel, it never mutates server state.
 */

import type { MarkerWire, PoiKind, PoiWire, ServerMessage } from "./protocol.js";

export interface PlaybackClock {
  t: number;
  tMin: number;
  tMax: number;
  playing: boolean;
}

export interface ViewState {
  uavId: string;
  clock: PlaybackClock;
  selectedKind: PoiKind;
  markers: MarkerWire[];
  pois: Map<string, PoiWire>;
  lastSeq: number;
  toast: string | null;
}

export interface ReduceResult {
  state: ViewState;
  /** a broadcast landed: re-request overlays right away */
  refreshOverlays: boolean;
}

export function initialState(uavId: string, tMin: number, tMax: number): ViewState {
  return {
    uavId,
    clock: { t: tMin, tMin, tMax, playing: false },
    selectedKind: "victim",
    markers: [],
    pois: new Map(),
    lastSeq: 0,
    toast: null,
  };
}

export function clampClock(clock: PlaybackClock, t: number): PlaybackClock {
  const clamped = Math.min(clock.tMax, Math.max(clock.tMin, t));
  return { ...clock, t: clamped };
}

/** Advance the clock while playing; stops at the end of the log window. */
export function tickClock(clock: PlaybackClock, dtSeconds: number): PlaybackClock {
  if (!clock.playing) return clock;
  const t = clock.t + dtSeconds;
  if (t >= clock.tMax) return { ...clock, t: clock.tMax, playing: false };
  return { ...clock, t };
}

export function applyServerMessage(state: ViewState, msg: ServerMessage): ReduceResult {
  switch (msg.type) {
    case "snapshot": {
      const pois = new Map(msg.pois.map((p) => [p.id, p]));
      return {
        state: { ...state, pois, lastSeq: msg.seq },
        refreshOverlays: true,
      };
    }
    case "poi.create":
    case "poi.update": {
      const pois = new Map(state.pois);
      pois.set(msg.poi.id, msg.poi);
      return {
        state: { ...state, pois, lastSeq: msg.seq },
        refreshOverlays: true,
      };
    }
    case "poi.track": {
      const pois = new Map(state.pois);
      const cur = pois.get(msg.id);
      if (cur) {
        pois.set(msg.id, {
          ...cur,
          lat: msg.point.lat,
          lon: msg.point.lon,
          alt: msg.point.alt,
          updated_ms: msg.point.ts_ms,
          version: cur.version + 1,
          track: [...cur.track, msg.point],
        });
      }
      return {
        state: { ...state, pois, lastSeq: msg.seq },
        refreshOverlays: true,
      };
    }
    case "poi.delete": {
      const pois = new Map(state.pois);
      pois.delete(msg.id);
      return {
        state: { ...state, pois, lastSeq: msg.seq },
        refreshOverlays: true,
      };
    }
    case "view.overlays":
      // wholesale replacement, never a merge
      return {
        state: { ...state, markers: msg.markers },
        refreshOverlays: false,
      };
    case "ack":
      return { state, refreshOverlays: false };
    case "error":
      return {
        state: { ...state, toast: `${msg.code}: ${msg.msg}` },
        refreshOverlays: false,
      };
  }
}

export function selectKind(state: ViewState, kind: PoiKind): ViewState {
  return { ...state, selectedKind: kind };
}

export function setPlaying(state: ViewState, playing: boolean): ViewState {
  return { ...state, clock: { ...state.clock, playing } };
}

export function seekTo(state: ViewState, t: number): ViewState {
  return { ...state, clock: clampClock(state.clock, t) };
}

export function clearToast(state: ViewState): ViewState {
  return state.toast === null ? state : { ...state, toast: null };
}
