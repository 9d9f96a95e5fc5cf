/** Figure assembly from sweep CSVs: groups rows into series and renders
 * panels with a logarithmic NMSE axis. Data values pass through untouched;
 * every marker carries its source strings as data attributes. */

import { writeFileSync } from "node:fs";

import { SweepTable, numeric, readCsv, requireColumns } from "./csv.js";
import { Scale, linearScale, logScale } from "./scales.js";
import {
  PALETTE,
  PanelGeometry,
  SeriesPoint,
  axes,
  document as svgDocument,
  legend,
  plotBox,
  polylineSeries,
} from "./svg.js";

export type FigureKind = "nmse-vs-snr" | "nmse-vs-k" | "nmse-and-iters-vs-epsilon";

export interface FigureSpec {
  inputs: string[];
  kind: FigureKind;
  groupBy: "n" | "k";
  output: string;
}

const PANEL: Omit<PanelGeometry, "x"> = { y: 0, width: 430, height: 330 };

interface Series {
  label: string;
  color: string;
  dash: string;
  points: SeriesPoint[];
}

const DASHES = ["", "6 3", "2 2", "8 3 2 3"];

function collectSeries(
  tables: SweepTable[],
  xColumn: string,
  yColumn: string,
  groupBy: string,
): Series[] {
  // When the size axis that is neither x nor the grouping key also varies,
  // it splits each group into sub-series (distinguished by dash pattern)
  // instead of folding unrelated sweeps into one polyline.
  const secondary = ["n", "k"].find((c) => c !== groupBy && c !== xColumn);
  const groups = new Map<string, Map<string, SeriesPoint[]>>();
  for (const table of tables) {
    for (const row of table.rows) {
      const key = row[groupBy];
      const subKey = secondary ? row[secondary] : "";
      if (!groups.has(key)) {
        groups.set(key, new Map());
      }
      const subs = groups.get(key)!;
      if (!subs.has(subKey)) {
        subs.set(subKey, []);
      }
      subs.get(subKey)!.push({
        x: numeric(row, xColumn),
        y: numeric(row, yColumn),
        rawX: row[xColumn],
        rawY: row[yColumn],
      });
    }
  }
  const keys = [...groups.keys()].sort((a, b) => Number(a) - Number(b));
  const out: Series[] = [];
  for (const [i, key] of keys.entries()) {
    const subs = groups.get(key)!;
    const subKeys = [...subs.keys()].sort((a, b) => Number(a) - Number(b));
    for (const [j, subKey] of subKeys.entries()) {
      const points = subs.get(subKey)!.slice().sort((p, q) => p.x - q.x);
      const label =
        subKeys.length > 1 && secondary
          ? `${groupBy.toUpperCase()}=${key} ${secondary.toUpperCase()}=${subKey}`
          : `${groupBy.toUpperCase()}=${key}`;
      out.push({
        label,
        color: PALETTE[i % PALETTE.length],
        dash: DASHES[j % DASHES.length],
        points,
      });
    }
  }
  return out;
}

function panelExtent(series: Series[]): {
  x: [number, number];
  y: [number, number];
  xs: number[];
} {
  const xs = [...new Set(series.flatMap((s) => s.points.map((p) => p.x)))].sort(
    (a, b) => a - b,
  );
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  return {
    x: [Math.min(...xs), Math.max(...xs)],
    y: [Math.min(...ys), Math.max(...ys)],
    xs,
  };
}

function renderPanel(
  geometry: PanelGeometry,
  series: Series[],
  xLabel: string,
  yLabel: string,
  title: string,
  logY: boolean,
): string {
  const box = plotBox(geometry);
  const extent = panelExtent(series);
  const xScale = linearScale(extent.x, [box.left, box.right], extent.xs);
  const yScale: Scale = logY
    ? logScale([extent.y[0] / 1.5, extent.y[1] * 1.5], [box.bottom, box.top])
    : linearScale(
        [extent.y[0] - 0.05 * (extent.y[1] - extent.y[0] || 1),
         extent.y[1] + 0.05 * (extent.y[1] - extent.y[0] || 1)],
        [box.bottom, box.top],
      );
  const body = [
    axes(box, xScale, yScale, xLabel, yLabel, title),
    ...series.map((s) =>
      polylineSeries(s.points, xScale, yScale, s.color, s.label, s.dash),
    ),
    legend({ left: box.right - 128, top: box.top }, series),
  ];
  return body.join("\n");
}

export function renderToString(spec: FigureSpec): string {
  if (spec.inputs.length === 0) {
    throw new Error("no input CSV files given");
  }
  const tables = spec.inputs.map(readCsv);
  for (const table of tables) {
    requireColumns(table, ["snr_db", "n", "k", "epsilon", spec.groupBy]);
  }

  let panels: string[];
  if (spec.kind === "nmse-vs-snr") {
    tables.forEach((t) => requireColumns(t, ["nmse_r", "nmse_theta"]));
    panels = [
      renderPanel(
        { ...PANEL, x: 0 },
        collectSeries(tables, "snr_db", "nmse_r", spec.groupBy),
        "transmit power over noise (dB)",
        "NMSE of range",
        "Range",
        true,
      ),
      renderPanel(
        { ...PANEL, x: PANEL.width },
        collectSeries(tables, "snr_db", "nmse_theta", spec.groupBy),
        "transmit power over noise (dB)",
        "NMSE of azimuth",
        "Azimuth",
        true,
      ),
    ];
  } else if (spec.kind === "nmse-vs-k") {
    tables.forEach((t) => requireColumns(t, ["nmse_r", "nmse_theta"]));
    panels = [
      renderPanel(
        { ...PANEL, x: 0 },
        collectSeries(tables, "k", "nmse_r", spec.groupBy),
        "UE antenna count",
        "NMSE of range",
        "Range",
        true,
      ),
      renderPanel(
        { ...PANEL, x: PANEL.width },
        collectSeries(tables, "k", "nmse_theta", spec.groupBy),
        "UE antenna count",
        "NMSE of azimuth",
        "Azimuth",
        true,
      ),
    ];
  } else if (spec.kind === "nmse-and-iters-vs-epsilon") {
    tables.forEach((t) => requireColumns(t, ["nmse_r", "mean_iters"]));
    panels = [
      renderPanel(
        { ...PANEL, x: 0 },
        collectSeries(tables, "epsilon", "nmse_r", spec.groupBy),
        "grid resolution (m)",
        "NMSE of range",
        "Range",
        true,
      ),
      renderPanel(
        { ...PANEL, x: PANEL.width },
        collectSeries(tables, "epsilon", "mean_iters", spec.groupBy),
        "grid resolution (m)",
        "mean iterations",
        "Refinement iterations",
        false,
      ),
    ];
  } else {
    throw new Error(`unknown figure kind "${spec.kind}"`);
  }

  return svgDocument(PANEL.width * 2, PANEL.height, panels.join("\n"));
}

export function render(spec: FigureSpec): void {
  writeFileSync(spec.output, renderToString(spec), "utf8");
}
