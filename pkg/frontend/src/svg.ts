/** Deterministic SVG assembly: fixed styling, no timestamps or randomness. */

import { Scale, formatTick } from "./scales.js";

export const PALETTE = ["#1f6fb4", "#d9541e", "#7e2f8e", "#2d8a4c", "#a21636", "#6b6b6b"];

const AXIS_COLOR = "#333333";
const GRID_COLOR = "#dddddd";

export interface PanelGeometry {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Inner plotting box with standard margins inside a panel cell. */
export function plotBox(panel: PanelGeometry) {
  return {
    left: panel.x + 64,
    right: panel.x + panel.width - 14,
    top: panel.y + 28,
    bottom: panel.y + panel.height - 44,
  };
}

const fmt = (value: number) => value.toFixed(2);

export function axes(
  box: { left: number; right: number; top: number; bottom: number },
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): string {
  const parts: string[] = [];
  for (const tick of yScale.ticks) {
    const y = fmt(yScale(tick));
    parts.push(
      `<line x1="${fmt(box.left)}" y1="${y}" x2="${fmt(box.right)}" y2="${y}" stroke="${GRID_COLOR}" stroke-width="1"/>`,
      `<text x="${fmt(box.left - 6)}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="11">${formatTick(tick, yScale.kind)}</text>`,
    );
  }
  for (const tick of xScale.ticks) {
    const x = fmt(xScale(tick));
    parts.push(
      `<line x1="${x}" y1="${fmt(box.bottom)}" x2="${x}" y2="${fmt(box.bottom + 4)}" stroke="${AXIS_COLOR}" stroke-width="1"/>`,
      `<text x="${x}" y="${fmt(box.bottom + 17)}" text-anchor="middle" font-size="11">${formatTick(tick, xScale.kind)}</text>`,
    );
  }
  parts.push(
    `<rect x="${fmt(box.left)}" y="${fmt(box.top)}" width="${fmt(box.right - box.left)}" height="${fmt(box.bottom - box.top)}" fill="none" stroke="${AXIS_COLOR}" stroke-width="1"/>`,
    `<text x="${fmt((box.left + box.right) / 2)}" y="${fmt(box.bottom + 34)}" text-anchor="middle" font-size="12">${xLabel}</text>`,
    `<text x="${fmt(box.left - 48)}" y="${fmt((box.top + box.bottom) / 2)}" text-anchor="middle" font-size="12" transform="rotate(-90 ${fmt(box.left - 48)} ${fmt((box.top + box.bottom) / 2)})">${yLabel}</text>`,
    `<text x="${fmt((box.left + box.right) / 2)}" y="${fmt(box.top - 10)}" text-anchor="middle" font-size="13" font-weight="bold">${title}</text>`,
  );
  return parts.join("\n");
}

export interface SeriesPoint {
  x: number;
  y: number;
  /** Exact source strings, embedded as data attributes. */
  rawX: string;
  rawY: string;
}

export function polylineSeries(
  points: SeriesPoint[],
  xScale: Scale,
  yScale: Scale,
  color: string,
  seriesName: string,
  dash = "",
): string {
  const coords = points
    .map((p) => `${fmt(xScale(p.x))},${fmt(yScale(p.y))}`)
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  const markers = points
    .map(
      (p) =>
        `<circle cx="${fmt(xScale(p.x))}" cy="${fmt(yScale(p.y))}" r="3" fill="${color}" data-x="${p.rawX}" data-y="${p.rawY}"/>`,
    )
    .join("\n");
  return (
    `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.5"${dashAttr} data-series="${seriesName}"/>\n` +
    markers
  );
}

export function legend(
  box: { left: number; top: number },
  entries: { label: string; color: string; dash?: string }[],
): string {
  const parts = [
    `<rect x="${fmt(box.left + 8)}" y="${fmt(box.top + 8)}" width="116" height="${fmt(entries.length * 16 + 8)}" fill="#ffffff" stroke="${GRID_COLOR}"/>`,
  ];
  entries.forEach((entry, i) => {
    const y = box.top + 20 + i * 16;
    const dashAttr = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
    parts.push(
      `<line x1="${fmt(box.left + 14)}" y1="${fmt(y)}" x2="${fmt(box.left + 34)}" y2="${fmt(y)}" stroke="${entry.color}" stroke-width="1.5"${dashAttr}/>`,
      `<text x="${fmt(box.left + 39)}" y="${fmt(y + 4)}" font-size="11">${entry.label}</text>`,
    );
  });
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}
