/**
 * Scenario file and flight-log parsing. The console reads the flight log
 * only for the playback window and the map path; all camera-view geometry
 * comes from the server.
 */

export interface Scenario {
  wsUrl: string;
  uavId: string;
  flightLogUrl: string;
  frameWidth: number;
  frameHeight: number;
}

export interface FlightLogRow {
  t: number;
  lat: number;
  lon: number;
  yaw: number;
}

export interface FlightLogSummary {
  tMin: number;
  tMax: number;
  rows: FlightLogRow[];
}

export function parseScenario(raw: string): Scenario {
  const doc = JSON.parse(raw) as Record<string, unknown>;
  const camera = (doc.camera ?? {}) as Record<string, unknown>;
  const wsUrl = doc.ws_url;
  const uavId = doc.uav_id;
  const flightLogUrl = doc.flight_log;
  if (typeof wsUrl !== "string" || typeof uavId !== "string" ||
      typeof flightLogUrl !== "string") {
    throw new Error("scenario needs ws_url, uav_id, flight_log");
  }
  return {
    wsUrl,
    uavId,
    flightLogUrl,
    frameWidth: typeof camera.width === "number" ? camera.width : 1920,
    frameHeight: typeof camera.height === "number" ? camera.height : 1080,
  };
}

/** Parse JSON-lines flight log text into the playback summary. */
export function parseFlightLog(text: string): FlightLogSummary {
  const rows: FlightLogRow[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const rec = JSON.parse(trimmed) as Record<string, unknown>;
    if (typeof rec.t !== "number" || typeof rec.lat !== "number" ||
        typeof rec.lon !== "number") {
      throw new Error(`bad flight log record: ${trimmed.slice(0, 80)}`);
    }
    rows.push({
      t: rec.t,
      lat: rec.lat,
      lon: rec.lon,
      yaw: typeof rec.yaw === "number" ? rec.yaw : 0,
    });
  }
  if (rows.length === 0) throw new Error("flight log is empty");
  rows.sort((a, b) => a.t - b.t);
  return { tMin: rows[0].t, tMax: rows[rows.length - 1].t, rows };
}

/** Row at time t: nearest record, ties to the earlier one (matches the
 * server's pose lookup so the map cursor tracks what the server renders). */
export function rowAt(log: FlightLogSummary, t: number): FlightLogRow {
  let best = log.rows[0];
  let bestDist = Math.abs(t - best.t);
  for (const row of log.rows) {
    const d = Math.abs(t - row.t);
    if (d < bestDist || (d === bestDist && row.t < best.t)) {
      best = row;
      bestDist = d;
    }
  }
  return best;
}
