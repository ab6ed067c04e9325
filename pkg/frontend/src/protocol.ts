/**
 * Wire protocol: one JSON object per WebSocket text frame, dispatched on
 * the `type` field. Mirrors the sync server's schemas exactly; the console
 * never invents fields and rejects frames it does not recognize.
 */

export const POI_KINDS = [
  "victim", "suspect", "weapon", "vehicle",
  "hazard", "evidence", "responder", "landmark",
] as const;

export type PoiKind = (typeof POI_KINDS)[number];

export interface TrackPointWire {
  ts_ms: number;
  lat: number;
  lon: number;
  alt: number;
}

export interface PoiWire {
  id: string;
  kind: PoiKind;
  lat: number;
  lon: number;
  alt: number;
  unc_m: number;
  source: string;
  text: string | null;
  version: number;
  created_ms: number;
  updated_ms: number;
  track: TrackPointWire[];
}

export interface MarkerWire {
  id: string;
  kind: PoiKind;
  u: number;
  v: number;
  visible: boolean;
  radius_px: number;
}

export type ServerMessage =
  | { type: "snapshot"; seq: number; pois: PoiWire[] }
  | { type: "poi.create"; seq: number; poi: PoiWire }
  | { type: "poi.update"; seq: number; poi: PoiWire }
  | { type: "poi.delete"; seq: number; id: string }
  | { type: "poi.track"; seq: number; id: string; point: TrackPointWire }
  | { type: "view.overlays"; markers: MarkerWire[] }
  | { type: "ack"; seq: number }
  | { type: "error"; code: string; msg: string };

const SERVER_TYPES = new Set([
  "snapshot", "poi.create", "poi.update", "poi.delete", "poi.track",
  "view.overlays", "ack", "error",
]);

export function isPoiKind(value: unknown): value is PoiKind {
  return typeof value === "string" && (POI_KINDS as readonly string[]).includes(value);
}

/** Parse a raw frame; returns null for frames that are not valid server
 * messages (the caller surfaces those as protocol errors, never ignores
 * them silently into state). */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) return null;
  switch (msg.type) {
    case "snapshot":
      return typeof msg.seq === "number" && Array.isArray(msg.pois)
        ? (msg as ServerMessage) : null;
    case "poi.create":
    case "poi.update":
      return typeof msg.seq === "number" && typeof msg.poi === "object"
        ? (msg as ServerMessage) : null;
    case "poi.delete":
      return typeof msg.seq === "number" && typeof msg.id === "string"
        ? (msg as ServerMessage) : null;
    case "poi.track":
      return typeof msg.seq === "number" && typeof msg.id === "string" &&
        typeof msg.point === "object"
        ? (msg as ServerMessage) : null;
    case "view.overlays":
      return Array.isArray(msg.markers) ? (msg as ServerMessage) : null;
    case "ack":
      return typeof msg.seq === "number" ? (msg as ServerMessage) : null;
    case "error":
      return typeof msg.code === "string" ? (msg as ServerMessage) : null;
    default:
      return null;
  }
}

export function helloMessage(clientId: string): string {
  return JSON.stringify({ type: "hello", client_id: clientId });
}

export function annotatePixelMessage(
  uavId: string, t: number, u: number, v: number,
  kind: PoiKind, text?: string,
): string {
  const msg: Record<string, unknown> = { type: "annotate.pixel", uav_id: uavId, t, u, v, kind };
  if (text !== undefined && text !== "") msg.text = text;
  return JSON.stringify(msg);
}

export function viewProjectMessage(uavId: string, t: number): string {
  return JSON.stringify({ type: "view.project", uav_id: uavId, t });
}
