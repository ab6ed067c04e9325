import { describe, expect, it } from "vitest";

import { parseFlightLog, parseScenario, rowAt } from "../src/scenario.js";

const LOG_TEXT = [
  '{"t": 0.0, "lat": 41.7, "lon": -86.2, "alt": 120, "agl": 100, "roll": 0, "pitch": 0, "yaw": 0, "g_roll": 0, "g_pitch": -90, "g_yaw": 0, "sats": 15}',
  '{"t": 1.0, "lat": 41.7001, "lon": -86.2, "alt": 120, "agl": 100, "roll": 0, "pitch": 0, "yaw": 10, "g_roll": 0, "g_pitch": -90, "g_yaw": 0, "sats": 15}',
  '{"t": 2.0, "lat": 41.7002, "lon": -86.2, "alt": 120, "agl": 100, "roll": 0, "pitch": 0, "yaw": 20, "g_roll": 0, "g_pitch": -90, "g_yaw": 0, "sats": 13}',
].join("\n");

describe("parseScenario", () => {
  it("reads urls, uav id, and camera size", () => {
    const s = parseScenario(JSON.stringify({
      ws_url: "ws://localhost:8750",
      uav_id: "hover",
      flight_log: "./data/hover.jsonl",
      camera: { width: 1920, height: 1080 },
    }));
    expect(s.uavId).toBe("hover");
    expect(s.frameWidth).toBe(1920);
  });

  it("defaults the camera size", () => {
    const s = parseScenario(JSON.stringify({
      ws_url: "ws://x", uav_id: "u", flight_log: "f",
    }));
    expect(s.frameWidth).toBe(1920);
    expect(s.frameHeight).toBe(1080);
  });

  it("rejects missing fields", () => {
    expect(() => parseScenario('{"uav_id": "u"}')).toThrow();
  });
});

describe("parseFlightLog", () => {
  it("reads the playback window and rows", () => {
    const log = parseFlightLog(LOG_TEXT);
    expect(log.tMin).toBe(0);
    expect(log.tMax).toBe(2);
    expect(log.rows).toHaveLength(3);
  });

  it("skips blank lines", () => {
    const log = parseFlightLog(LOG_TEXT + "\n\n");
    expect(log.rows).toHaveLength(3);
  });

  it("rejects empty and malformed logs", () => {
    expect(() => parseFlightLog("")).toThrow();
    expect(() => parseFlightLog('{"t": "zero"}')).toThrow();
  });
});

describe("rowAt", () => {
  it("returns the nearest record, ties to the earlier", () => {
    const log = parseFlightLog(LOG_TEXT);
    expect(rowAt(log, 0.2).t).toBe(0);
    expect(rowAt(log, 0.8).t).toBe(1);
    expect(rowAt(log, 0.5).t).toBe(0);
    expect(rowAt(log, 99).t).toBe(2);
  });
});
