/**
 * Pure overlay geometry and styling: where to draw markers, uncertainty
 * circles, and the edge arrows for out-of-view POIs. No canvas calls here.
 */

import type { MarkerWire, PoiKind } from "./protocol.js";

export interface MarkerStyle {
  glyph: string;
  color: string;
}

const STYLES: Record<PoiKind, MarkerStyle> = {
  victim: { glyph: "♥", color: "#e63946" },      // heart
  suspect: { glyph: "▲", color: "#ff8800" },     // triangle
  weapon: { glyph: "✹", color: "#d00000" },      // burst
  vehicle: { glyph: "■", color: "#457b9d" },     // square
  hazard: { glyph: "⚠", color: "#f4a261" },      // warning
  evidence: { glyph: "●", color: "#9d4edd" },    // dot
  responder: { glyph: "✚", color: "#2a9d8f" },   // cross
  landmark: { glyph: "⌂", color: "#8d99ae" },    // house
};

export function markerStyle(kind: PoiKind): MarkerStyle {
  return STYLES[kind];
}

export interface EdgeArrow {
  /** anchor for the arrow glyph, nudged inside the frame */
  x: number;
  y: number;
  /** rotation pointing from frame center toward the POI, radians */
  angle: number;
}

/**
 * Arrow placement for an invisible marker. The server already clamps the
 * projection to the frame edge; the arrow sits just inside that point and
 * points outward along the center-to-pixel direction.
 */
export function edgeArrow(
  marker: Pick<MarkerWire, "u" | "v">,
  width: number,
  height: number,
  inset = 18,
): EdgeArrow {
  const cx = width / 2;
  const cy = height / 2;
  let dx = marker.u - cx;
  let dy = marker.v - cy;
  if (dx === 0 && dy === 0) dy = 1;
  const angle = Math.atan2(dy, dx);
  const x = Math.min(width - inset, Math.max(inset, marker.u));
  const y = Math.min(height - inset, Math.max(inset, marker.v));
  return { x, y, angle };
}

/** Scale the canvas coordinate system of markers: the server projects in
 * camera pixels, the canvas may be displayed smaller. */
export function toCanvas(
  marker: Pick<MarkerWire, "u" | "v" | "radius_px">,
  frameWidth: number,
  frameHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): { x: number; y: number; r: number } {
  const sx = canvasWidth / frameWidth;
  const sy = canvasHeight / frameHeight;
  return {
    x: marker.u * sx,
    y: marker.v * sy,
    r: Math.max(0, marker.radius_px * sx),
  };
}
