/**
 * Canvas drawing for the camera view and the map panel.
 *
 * The camera view is a synthetic rendering: a fixed perspective ground
 * grid for orientation plus the markers the server projected. Marker
 * positions come exclusively from view.overlays; nothing here computes
 * geometry from poses.
 */

import { edgeArrow, markerStyle, toCanvas } from "./overlay.js";
import type { MarkerWire, PoiWire } from "./protocol.js";
import type { FlightLogRow, FlightLogSummary } from "./scenario.js";
import { rowAt } from "./scenario.js";

export function drawCameraView(
  ctx: CanvasRenderingContext2D,
  markers: MarkerWire[],
  frameWidth: number,
  frameHeight: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);

  ctx.fillStyle = "#20261f";
  ctx.fillRect(0, 0, width, height);
  drawGroundGrid(ctx, width, height);

  for (const marker of markers) {
    if (marker.visible) {
      drawVisibleMarker(ctx, marker, frameWidth, frameHeight);
    } else {
      drawEdgeArrow(ctx, marker, frameWidth, frameHeight);
    }
  }
}

function drawGroundGrid(ctx: CanvasRenderingContext2D,
                        width: number, height: number): void {
  ctx.strokeStyle = "rgba(180, 200, 170, 0.25)";
  ctx.lineWidth = 1;
  const n = 10;
  for (let i = 0; i <= n; i++) {
    const x = (i / n) * width;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, height);
    ctx.stroke();
    const y = (i / n) * height;
    ctx.beginPath();
    ctx.moveTo(0, y);
    ctx.lineTo(width, y);
    ctx.stroke();
  }
  ctx.strokeStyle = "rgba(220, 230, 210, 0.5)";
  ctx.beginPath();
  ctx.moveTo(width / 2 - 12, height / 2);
  ctx.lineTo(width / 2 + 12, height / 2);
  ctx.moveTo(width / 2, height / 2 - 12);
  ctx.lineTo(width / 2, height / 2 + 12);
  ctx.stroke();
}

function drawVisibleMarker(ctx: CanvasRenderingContext2D, marker: MarkerWire,
                           frameWidth: number, frameHeight: number): void {
  const { width, height } = ctx.canvas;
  const pos = toCanvas(marker, frameWidth, frameHeight, width, height);
  const style = markerStyle(marker.kind);

  if (pos.r > 0) {
    ctx.beginPath();
    ctx.arc(pos.x, pos.y, pos.r, 0, 2 * Math.PI);
    ctx.strokeStyle = style.color;
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.fillStyle = style.color + "22";
    ctx.fill();
  }
  ctx.fillStyle = style.color;
  ctx.font = "20px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(style.glyph, pos.x, pos.y);
  ctx.font = "11px sans-serif";
  ctx.fillText(marker.kind, pos.x, pos.y + 16);
}

function drawEdgeArrow(ctx: CanvasRenderingContext2D, marker: MarkerWire,
                       frameWidth: number, frameHeight: number): void {
  const { width, height } = ctx.canvas;
  const pos = toCanvas(marker, frameWidth, frameHeight, width, height);
  const arrow = edgeArrow({ u: pos.x, v: pos.y }, width, height);
  const style = markerStyle(marker.kind);

  ctx.save();
  ctx.translate(arrow.x, arrow.y);
  ctx.rotate(arrow.angle);
  ctx.fillStyle = style.color;
  ctx.beginPath();
  ctx.moveTo(10, 0);
  ctx.lineTo(-6, -7);
  ctx.lineTo(-6, 7);
  ctx.closePath();
  ctx.fill();
  ctx.restore();

  ctx.fillStyle = style.color;
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(marker.kind, arrow.x, arrow.y + 18);
}

export function drawMap(
  ctx: CanvasRenderingContext2D,
  log: FlightLogSummary,
  pois: Map<string, PoiWire>,
  t: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, width, height);

  // viewport over everything we plot, with padding
  const lats = log.rows.map((r) => r.lat);
  const lons = log.rows.map((r) => r.lon);
  for (const poi of pois.values()) {
    lats.push(poi.lat);
    lons.push(poi.lon);
  }
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const latPad = Math.max(1e-4, (latMax - latMin) * 0.2);
  const lonPad = Math.max(1e-4, (lonMax - lonMin) * 0.2);
  const toXY = (lat: number, lon: number) => ({
    x: ((lon - (lonMin - lonPad)) / ((lonMax + lonPad) - (lonMin - lonPad))) * width,
    y: height - ((lat - (latMin - latPad)) / ((latMax + latPad) - (latMin - latPad))) * height,
  });

  ctx.strokeStyle = "rgba(120, 140, 160, 0.25)";
  ctx.lineWidth = 1;
  for (let i = 1; i < 8; i++) {
    ctx.beginPath();
    ctx.moveTo((i / 8) * width, 0);
    ctx.lineTo((i / 8) * width, height);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(0, (i / 8) * height);
    ctx.lineTo(width, (i / 8) * height);
    ctx.stroke();
  }

  // UAV path and current position
  ctx.strokeStyle = "#4cc9f0";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  log.rows.forEach((row, i) => {
    const p = toXY(row.lat, row.lon);
    if (i === 0) ctx.moveTo(p.x, p.y);
    else ctx.lineTo(p.x, p.y);
  });
  ctx.stroke();
  drawUav(ctx, toXY, rowAt(log, t));

  for (const poi of pois.values()) {
    const p = toXY(poi.lat, poi.lon);
    const style = markerStyle(poi.kind);
    ctx.fillStyle = style.color;
    ctx.font = "14px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(style.glyph, p.x, p.y);
    if (poi.track.length > 1) {
      ctx.strokeStyle = style.color + "88";
      ctx.beginPath();
      poi.track.forEach((tp, i) => {
        const q = toXY(tp.lat, tp.lon);
        if (i === 0) ctx.moveTo(q.x, q.y);
        else ctx.lineTo(q.x, q.y);
      });
      ctx.stroke();
    }
  }
}

function drawUav(ctx: CanvasRenderingContext2D,
                 toXY: (lat: number, lon: number) => { x: number; y: number },
                 row: FlightLogRow): void {
  const p = toXY(row.lat, row.lon);
  ctx.save();
  ctx.translate(p.x, p.y);
  ctx.rotate((row.yaw * Math.PI) / 180);
  ctx.fillStyle = "#4cc9f0";
  ctx.beginPath();
  ctx.moveTo(0, -8);
  ctx.lineTo(5, 6);
  ctx.lineTo(-5, 6);
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}
