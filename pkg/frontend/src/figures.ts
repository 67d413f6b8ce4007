/**
 * Figure renderers for the benchmark output directory.
 *
 * Every renderer is a pure function of the CSV contents: values are read,
 * filtered and drawn, never recomputed. Anything that looks like a metric
 * (MCP, Q2, MMD, CCP, embedding coordinates) comes straight out of a file.
 */

import { join } from "path";
import { num, readTable, requireColumns, SchemaError, Table } from "./csv.js";
import { fmt, fmtTick, linearScale, logScale, Scale, SvgDoc } from "./svg.js";

export interface FigureOptions {
  dir: string;
  task: string;
  /** target credible level for reference lines and level-indexed lookups */
  level: number;
  /** discrepancy metric: mmd_weight, mmd_function or ksd */
  metric: string;
  /** mds embedding space: weight or function */
  space: string;
  /** cell selectors for the levels/histogram figures */
  algorithm?: string;
  hpIndex?: number;
}

export const FIGURE_KINDS = ["coverage", "levels", "discrepancy", "mds", "histograms"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export function defaultOptions(dir: string, task: string): FigureOptions {
  return { dir, task, level: 0.95, metric: "mmd_weight", space: "weight" };
}

export function renderFigure(kind: string, opts: FigureOptions): string {
  switch (kind) {
    case "coverage":
      return renderCoverage(opts);
    case "levels":
      return renderLevels(opts);
    case "discrepancy":
      return renderDiscrepancy(opts);
    case "mds":
      return renderMds(opts);
    case "histograms":
      return renderHistograms(opts);
    default:
      throw new SchemaError(`unknown figure kind "${kind}" (choose from: ${FIGURE_KINDS.join(", ")})`);
  }
}

// ---------------------------------------------------------------------------
// shared drawing pieces

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

function algoColors(names: string[]): Map<string, string> {
  const colors = new Map<string, string>();
  let k = 0;
  for (const name of names) {
    if (colors.has(name)) continue;
    colors.set(name, name === "hmc" ? "#000000" : PALETTE[k++ % PALETTE.length]);
  }
  return colors;
}

interface Panel {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

function drawAxes(
  doc: SvgDoc,
  p: Panel,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string
): void {
  doc.rect(p.x0, p.y0, p.w, p.h, { fill: "none", stroke: "#333333", "stroke-width": 1 });
  for (const t of xs.ticks) {
    const x = xs(t);
    doc.line(x, p.y0 + p.h, x, p.y0 + p.h + 4, { stroke: "#333333", "stroke-width": 1 });
    doc.line(x, p.y0, x, p.y0 + p.h, { stroke: "#dddddd", "stroke-width": 0.5 });
    doc.text(x, p.y0 + p.h + 16, fmtTick(t), {
      "text-anchor": "middle",
      "font-size": 11,
      fill: "#333333",
    });
  }
  for (const t of ys.ticks) {
    const y = ys(t);
    doc.line(p.x0 - 4, y, p.x0, y, { stroke: "#333333", "stroke-width": 1 });
    doc.line(p.x0, y, p.x0 + p.w, y, { stroke: "#dddddd", "stroke-width": 0.5 });
    doc.text(p.x0 - 7, y + 4, fmtTick(t), {
      "text-anchor": "end",
      "font-size": 11,
      fill: "#333333",
    });
  }
  doc.text(p.x0 + p.w / 2, p.y0 + p.h + 34, xLabel, {
    "text-anchor": "middle",
    "font-size": 12,
    fill: "#111111",
  });
  doc.text(0, 0, yLabel, {
    "text-anchor": "middle",
    "font-size": 12,
    fill: "#111111",
    transform: `rotate(-90 0 0) translate(${fmt(-(p.y0 + p.h / 2))} ${fmt(p.x0 - 40)})`,
  });
}

function drawLegend(
  doc: SvgDoc,
  x: number,
  y: number,
  entries: Array<[string, string]>,
  notes: string[]
): void {
  let row = 0;
  for (const [name, color] of entries) {
    const yy = y + row * 16;
    doc.line(x, yy - 4, x + 18, yy - 4, { stroke: color, "stroke-width": 2 });
    doc.text(x + 24, yy, name, { "font-size": 11, fill: "#111111" });
    row++;
  }
  for (const note of notes) {
    doc.text(x, y + row * 16, note, { "font-size": 10, fill: "#777777", class: "legend-note" });
    row++;
  }
}

function targetLine(doc: SvgDoc, p: Panel, y: number, label: string): void {
  doc.line(p.x0, y, p.x0 + p.w, y, {
    stroke: "#999999",
    "stroke-width": 1,
    "stroke-dasharray": "5,3",
    class: "target-level",
  });
  doc.text(p.x0 + p.w - 4, y - 4, label, {
    "text-anchor": "end",
    "font-size": 10,
    fill: "#777777",
  });
}

/** Inverse of the harness hp field: "a=1;b=2.5e-06" -> {a: 1, b: 2.5e-6}. */
export function parseHp(s: string): Record<string, number> {
  const out: Record<string, number> = {};
  if (s === "") return out;
  for (const part of s.split(";")) {
    const eq = part.indexOf("=");
    if (eq < 0) continue;
    out[part.slice(0, eq)] = Number(part.slice(eq + 1));
  }
  return out;
}

function omittedNote(count: number): string[] {
  if (count === 0) return [];
  return [`${count} cell${count > 1 ? "s" : ""} omitted (no finished replicates)`];
}

// ---------------------------------------------------------------------------
// coverage / Q2 vs step size

interface CellPoint {
  algorithm: string;
  step: number;
  value: number;
}

function aggregateCells(opts: FigureOptions, valueCol: string): { points: CellPoint[]; omitted: number } {
  const table = readTable(join(opts.dir, "aggregates.csv"));
  const col = requireColumns(table, ["task", "algorithm", "hp", valueCol]);
  const points: CellPoint[] = [];
  let omitted = 0;
  for (const row of table.rows) {
    if (row[col.task] !== opts.task) continue;
    const step = parseHp(row[col.hp])["step_size"];
    if (step === undefined || !Number.isFinite(step)) continue;
    const value = num(row, col[valueCol]);
    if (!Number.isFinite(value)) {
      omitted++;
      continue;
    }
    points.push({ algorithm: row[col.algorithm], step, value });
  }
  if (points.length === 0 && omitted === 0) {
    throw new SchemaError(`aggregates.csv: no rows for task "${opts.task}"`);
  }
  return { points, omitted };
}

function groupCurves(points: CellPoint[]): Map<string, Array<[number, number]>> {
  const curves = new Map<string, Array<[number, number]>>();
  for (const pt of points) {
    let curve = curves.get(pt.algorithm);
    if (!curve) {
      curve = [];
      curves.set(pt.algorithm, curve);
    }
    curve.push([pt.step, pt.value]);
  }
  for (const curve of curves.values()) {
    curve.sort((a, b) => a[0] - b[0]);
  }
  return curves;
}

function drawStepPanel(
  doc: SvgDoc,
  p: Panel,
  points: CellPoint[],
  colors: Map<string, string>,
  yLabel: string,
  yLo: number,
  yHi: number,
  xLabel: string
): Scale {
  const steps = points.map((pt) => pt.step);
  const xs =
    steps.length > 0
      ? logScale(Math.min(...steps), Math.max(...steps), p.x0 + 10, p.x0 + p.w - 10)
      : logScale(1e-6, 1e-2, p.x0 + 10, p.x0 + p.w - 10);
  const ys = linearScale(yLo, yHi, p.y0 + p.h, p.y0);
  drawAxes(doc, p, xs, ys, xLabel, yLabel);
  for (const [name, curve] of groupCurves(points)) {
    const color = colors.get(name) ?? "#555555";
    const clipped = curve.map(([s, v]) => [s, Math.max(yLo, Math.min(yHi, v))] as [number, number]);
    doc.polyline(
      clipped.map(([s, v]) => [xs(s), ys(v)]),
      { stroke: color, "stroke-width": 1.5 }
    );
    for (const [s, v] of clipped) {
      doc.circle(xs(s), ys(v), 3, { fill: color, stroke: "none" });
    }
  }
  return ys;
}

export function renderCoverage(opts: FigureOptions): string {
  const mcp = aggregateCells(opts, "mcp");
  const q2 = aggregateCells(opts, "q2_mean");
  if (mcp.points.length === 0 && q2.points.length === 0) {
    throw new SchemaError(`aggregates.csv: every ${opts.task} cell is empty`);
  }
  const doc = new SvgDoc(760, 720);
  const top: Panel = { x0: 70, y0: 40, w: 560, h: 280 };
  const bottom: Panel = { x0: 70, y0: 395, w: 560, h: 280 };

  const names = [...new Set([...mcp.points, ...q2.points].map((p) => p.algorithm))].sort();
  const colors = algoColors(names);

  doc.text(top.x0, 22, `${opts.task}: calibration and fit across step sizes`, {
    "font-size": 14,
    fill: "#111111",
    "font-weight": "bold",
  });

  const ysTop = drawStepPanel(doc, top, mcp.points, colors, "MCP", 0, 1, "");
  targetLine(doc, top, ysTop(opts.level), `target ${fmt(opts.level)}`);

  // Q2 of a diverging cell can be a huge negative number; the axis is
  // pinned at -1 and anything below draws on the boundary
  const q2Low = Math.max(-1, Math.min(0, ...q2.points.map((p) => p.value)));
  const clippedBelow = q2.points.filter((p) => p.value < q2Low).length;
  drawStepPanel(
    doc,
    bottom,
    q2.points,
    colors,
    clippedBelow > 0 ? `Q2 (clipped at ${fmt(q2Low)})` : "Q2",
    q2Low,
    1,
    "step size"
  );

  drawLegend(
    doc,
    top.x0 + top.w + 12,
    top.y0 + 12,
    names.map((n) => [n, colors.get(n) ?? "#555555"]),
    omittedNote(Math.max(mcp.omitted, q2.omitted))
  );
  return doc.toString();
}

// ---------------------------------------------------------------------------
// MCP vs target level

export function renderLevels(opts: FigureOptions): string {
  const table = readTable(join(opts.dir, `coverage_curves_${opts.task}.csv`));
  const col = requireColumns(table, ["algorithm", "hp_index", "hp", "level", "mcp"]);

  // one curve per algorithm; default cell is the one whose MCP at the
  // requested level is closest to that level, i.e. the best-calibrated cell
  const byAlgo = new Map<string, Map<number, Array<[number, number]>>>();
  for (const row of table.rows) {
    const algo = row[col.algorithm];
    if (opts.algorithm !== undefined && algo !== opts.algorithm) continue;
    const hp = Number(row[col.hp_index]);
    if (opts.hpIndex !== undefined && hp !== opts.hpIndex) continue;
    const level = num(row, col.level);
    const mcp = num(row, col.mcp);
    if (!Number.isFinite(level) || !Number.isFinite(mcp)) continue;
    let cells = byAlgo.get(algo);
    if (!cells) {
      cells = new Map();
      byAlgo.set(algo, cells);
    }
    let curve = cells.get(hp);
    if (!curve) {
      curve = [];
      cells.set(hp, curve);
    }
    curve.push([level, mcp]);
  }
  if (byAlgo.size === 0) {
    const detail =
      opts.algorithm !== undefined
        ? `algorithm "${opts.algorithm}"`
        : `task "${opts.task}"`;
    throw new SchemaError(`coverage_curves_${opts.task}.csv: no usable rows for ${detail}`);
  }

  const chosen = new Map<string, Array<[number, number]>>();
  for (const [algo, cells] of [...byAlgo.entries()].sort()) {
    let best: Array<[number, number]> | undefined;
    let bestGap = Infinity;
    let bestHp = Infinity;
    for (const [hp, curve] of cells) {
      curve.sort((a, b) => a[0] - b[0]);
      const at = curve.reduce((acc, [lv, mc]) =>
        Math.abs(lv - opts.level) < Math.abs(acc[0] - opts.level) ? [lv, mc] : acc
      );
      const gap = Math.abs(at[1] - opts.level);
      if (gap < bestGap - 1e-12 || (Math.abs(gap - bestGap) <= 1e-12 && hp < bestHp)) {
        bestGap = gap;
        best = curve;
        bestHp = hp;
      }
    }
    if (best) chosen.set(`${algo}#${bestHp}`, best);
  }

  const doc = new SvgDoc(760, 480);
  const p: Panel = { x0: 70, y0: 40, w: 560, h: 360 };
  const xs = linearScale(0, 1, p.x0, p.x0 + p.w);
  const ys = linearScale(0, 1, p.y0 + p.h, p.y0);
  doc.text(p.x0, 22, `${opts.task}: mean coverage vs target level`, {
    "font-size": 14,
    fill: "#111111",
    "font-weight": "bold",
  });
  drawAxes(doc, p, xs, ys, "target level", "MCP");

  // perfectly calibrated bands sit on the diagonal
  doc.line(xs(0), ys(0), xs(1), ys(1), {
    stroke: "#999999",
    "stroke-width": 1,
    "stroke-dasharray": "2,3",
    class: "diagonal",
  });
  doc.line(xs(opts.level), p.y0, xs(opts.level), p.y0 + p.h, {
    stroke: "#999999",
    "stroke-width": 1,
    "stroke-dasharray": "5,3",
    class: "target-level",
  });

  const names = [...chosen.keys()];
  const colors = algoColors(names.map((n) => n.split("#")[0]));
  for (const [name, curve] of chosen) {
    const color = colors.get(name.split("#")[0]) ?? "#555555";
    doc.polyline(
      curve.map(([lv, mc]) => [xs(lv), ys(Math.max(0, Math.min(1, mc)))]),
      { stroke: color, "stroke-width": 1.5 }
    );
    for (const [lv, mc] of curve) {
      doc.circle(xs(lv), ys(Math.max(0, Math.min(1, mc))), 2.5, { fill: color, stroke: "none" });
    }
  }
  drawLegend(
    doc,
    p.x0 + p.w + 12,
    p.y0 + 12,
    names.map((n) => [n, colors.get(n.split("#")[0]) ?? "#555555"]),
    []
  );
  return doc.toString();
}

// ---------------------------------------------------------------------------
// MMD / KSD vs step size

const METRIC_COLUMNS: Record<string, string> = {
  mmd_weight: "mmd_weight_mean",
  mmd_function: "mmd_function_mean",
  ksd: "ksd_mean",
};

const METRIC_LABELS: Record<string, string> = {
  mmd_weight: "MMD to HMC (weight space)",
  mmd_function: "MMD to HMC (function space)",
  ksd: "KSD",
};

export function renderDiscrepancy(opts: FigureOptions): string {
  const valueCol = METRIC_COLUMNS[opts.metric];
  if (!valueCol) {
    throw new SchemaError(
      `unknown metric "${opts.metric}" (choose from: ${Object.keys(METRIC_COLUMNS).join(", ")})`
    );
  }
  const { points, omitted } = aggregateCells(opts, valueCol);
  if (points.length === 0) {
    throw new SchemaError(`aggregates.csv: every ${opts.task} cell is empty for ${valueCol}`);
  }

  const doc = new SvgDoc(760, 480);
  const p: Panel = { x0: 70, y0: 40, w: 560, h: 360 };
  doc.text(p.x0, 22, `${opts.task}: ${METRIC_LABELS[opts.metric]} across step sizes`, {
    "font-size": 14,
    fill: "#111111",
    "font-weight": "bold",
  });
  const hi = Math.max(...points.map((pt) => pt.value));
  const names = [...new Set(points.map((pt) => pt.algorithm))].sort();
  const colors = algoColors(names);
  drawStepPanel(doc, p, points, colors, METRIC_LABELS[opts.metric], 0, hi * 1.05, "step size");
  drawLegend(
    doc,
    p.x0 + p.w + 12,
    p.y0 + 12,
    names.map((n) => [n, colors.get(n) ?? "#555555"]),
    omittedNote(omitted)
  );
  return doc.toString();
}

// ---------------------------------------------------------------------------
// MDS embedding scatter

export function renderMds(opts: FigureOptions): string {
  if (opts.space !== "weight" && opts.space !== "function") {
    throw new SchemaError(`unknown space "${opts.space}" (choose from: weight, function)`);
  }
  const suffix = opts.space === "function" ? "function_" : "";
  const name = `mds_${suffix}${opts.task}.csv`;
  const table = readTable(join(opts.dir, name));
  const col = requireColumns(table, ["label", "algorithm", "hp_index", "step_size", "x", "y"]);
  if (table.rows.length === 0) {
    throw new SchemaError(`${name}: no embedded cells`);
  }

  interface MdsPoint {
    label: string;
    algorithm: string;
    step: number;
    x: number;
    y: number;
  }
  const points: MdsPoint[] = table.rows.map((row) => ({
    label: row[col.label],
    algorithm: row[col.algorithm],
    step: num(row, col.step_size),
    x: num(row, col.x),
    y: num(row, col.y),
  }));

  const doc = new SvgDoc(760, 560);
  const p: Panel = { x0: 70, y0: 40, w: 560, h: 440 };
  doc.text(p.x0, 22, `${opts.task}: MDS embedding of pairwise MMD (${opts.space} space)`, {
    "font-size": 14,
    fill: "#111111",
    "font-weight": "bold",
  });

  const xv = points.map((pt) => pt.x);
  const yv = points.map((pt) => pt.y);
  const padX = (Math.max(...xv) - Math.min(...xv) || 1) * 0.08;
  const padY = (Math.max(...yv) - Math.min(...yv) || 1) * 0.08;
  const xs = linearScale(Math.min(...xv) - padX, Math.max(...xv) + padX, p.x0, p.x0 + p.w);
  const ys = linearScale(Math.min(...yv) - padY, Math.max(...yv) + padY, p.y0 + p.h, p.y0);
  drawAxes(doc, p, xs, ys, "mds-1", "mds-2");

  const names = [...new Set(points.map((pt) => pt.algorithm))].sort();
  const colors = algoColors(names);

  // marker size carries the step size: radius proportional to the value,
  // with a fixed center dot so the tiniest steps stay visible
  const maxStep = Math.max(...points.map((pt) => (Number.isFinite(pt.step) ? pt.step : 0)));
  const R_MAX = 16;
  for (const pt of points) {
    const color = colors.get(pt.algorithm) ?? "#555555";
    const r = Number.isFinite(pt.step) && maxStep > 0 ? (R_MAX * pt.step) / maxStep : 0;
    if (r > 0) {
      doc.circle(xs(pt.x), ys(pt.y), r, {
        fill: color,
        "fill-opacity": 0.35,
        stroke: color,
        "stroke-width": 1,
        class: "mds-marker",
        "data-step": fmt(pt.step),
      });
    }
    doc.circle(xs(pt.x), ys(pt.y), 1.5, { fill: color, stroke: "none" });
    if (pt.algorithm === "hmc") {
      doc.text(xs(pt.x) + 5, ys(pt.y) - 5, pt.label, { "font-size": 10, fill: "#000000" });
    }
  }
  drawLegend(
    doc,
    p.x0 + p.w + 12,
    p.y0 + 12,
    names.map((n) => [n, colors.get(n) ?? "#555555"]),
    ["marker radius scales with step size"]
  );
  return doc.toString();
}

// ---------------------------------------------------------------------------
// PICP / CCP histograms around the MCP scalar

function histogram(values: number[], bins: number): number[] {
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    let b = Math.floor(v * bins);
    if (b >= bins) b = bins - 1;
    if (b < 0) b = 0;
    counts[b]++;
  }
  return counts;
}

function drawHistogramPanel(
  doc: SvgDoc,
  p: Panel,
  values: number[],
  color: string,
  xLabel: string,
  marks: Array<[number, string, string]>
): void {
  const BINS = 20;
  const counts = histogram(values, BINS);
  const xs = linearScale(0, 1, p.x0, p.x0 + p.w);
  const ys = linearScale(0, Math.max(1, ...counts) * 1.1, p.y0 + p.h, p.y0);
  drawAxes(doc, p, xs, ys, xLabel, "count");
  for (let b = 0; b < BINS; b++) {
    if (counts[b] === 0) continue;
    const x = xs(b / BINS);
    const w = xs((b + 1) / BINS) - x;
    doc.rect(x, ys(counts[b]), w, ys(0) - ys(counts[b]), {
      fill: color,
      "fill-opacity": 0.6,
      stroke: color,
      "stroke-width": 0.5,
    });
  }
  for (const [v, markColor, cls] of marks) {
    doc.line(xs(v), p.y0, xs(v), p.y0 + p.h, {
      stroke: markColor,
      "stroke-width": 1.5,
      "stroke-dasharray": "5,3",
      class: cls,
    });
  }
}

export function renderHistograms(opts: FigureOptions): string {
  const algorithm = opts.algorithm ?? "sgld";

  const curves = readTable(join(opts.dir, `coverage_curves_${opts.task}.csv`));
  const cc = requireColumns(curves, ["algorithm", "hp_index", "level", "mcp"]);
  const cellLevels = curves.rows.filter(
    (row) => row[cc.algorithm] === algorithm && Math.abs(num(row, cc.level) - opts.level) < 1e-9
  );
  if (cellLevels.length === 0) {
    const algos = [...new Set(curves.rows.map((row) => row[cc.algorithm]))].sort();
    throw new SchemaError(
      `coverage_curves_${opts.task}.csv: no rows for algorithm "${algorithm}" at level ${fmt(opts.level)} ` +
        `(algorithms present: ${algos.join(", ")})`
    );
  }

  // default cell: best calibrated at the requested level
  let hpIndex = opts.hpIndex;
  if (hpIndex === undefined) {
    let bestGap = Infinity;
    for (const row of cellLevels) {
      const mcp = num(row, cc.mcp);
      if (!Number.isFinite(mcp)) continue;
      const gap = Math.abs(mcp - opts.level);
      const hp = Number(row[cc.hp_index]);
      if (gap < bestGap - 1e-12 || (Math.abs(gap - bestGap) <= 1e-12 && hp < (hpIndex ?? Infinity))) {
        bestGap = gap;
        hpIndex = hp;
      }
    }
    if (hpIndex === undefined) {
      throw new SchemaError(
        `coverage_curves_${opts.task}.csv: algorithm "${algorithm}" has no finished cells at level ${fmt(opts.level)}`
      );
    }
  }
  const mcpRow = cellLevels.find((row) => Number(row[cc.hp_index]) === hpIndex);
  if (!mcpRow) {
    const cells = [...new Set(cellLevels.map((row) => row[cc.hp_index]))].sort();
    throw new SchemaError(
      `coverage_curves_${opts.task}.csv: algorithm "${algorithm}" has no hp_index ${hpIndex} ` +
        `(cells present: ${cells.join(", ")})`
    );
  }
  const mcp = num(mcpRow, cc.mcp);

  const results = readTable(join(opts.dir, "results.csv"));
  const rc = requireColumns(results, ["task", "algorithm", "hp_index", "status", "picp"]);
  const picps: number[] = [];
  for (const row of results.rows) {
    if (row[rc.task] !== opts.task) continue;
    if (row[rc.algorithm] !== algorithm) continue;
    if (Number(row[rc.hp_index]) !== hpIndex) continue;
    if (row[rc.status] !== "ok") continue;
    const v = num(row, rc.picp);
    if (Number.isFinite(v)) picps.push(v);
  }

  const ccpTable = readTable(join(opts.dir, `ccp_points_${opts.task}.csv`));
  const pc = requireColumns(ccpTable, ["algorithm", "hp_index", "level", "ccp"]);
  const ccps: number[] = [];
  for (const row of ccpTable.rows) {
    if (row[pc.algorithm] !== algorithm) continue;
    if (Number(row[pc.hp_index]) !== hpIndex) continue;
    if (Math.abs(num(row, pc.level) - opts.level) >= 1e-9) continue;
    const v = num(row, pc.ccp);
    if (Number.isFinite(v)) ccps.push(v);
  }

  const doc = new SvgDoc(760, 420);
  const left: Panel = { x0: 70, y0: 60, w: 290, h: 270 };
  const right: Panel = { x0: 430, y0: 60, w: 290, h: 270 };
  doc.text(70, 22, `${opts.task} ${algorithm}#${hpIndex}: coverage spread behind the MCP scalar`, {
    "font-size": 14,
    fill: "#111111",
    "font-weight": "bold",
  });
  doc.text(70, 40, `MCP ${Number.isFinite(mcp) ? fmt(mcp) : "n/a"} at level ${fmt(opts.level)}`, {
    "font-size": 11,
    fill: "#555555",
  });

  const marks: Array<[number, string, string]> = [[opts.level, "#999999", "target-level"]];
  if (Number.isFinite(mcp)) marks.push([mcp, "#d62728", "mcp-line"]);
  drawHistogramPanel(doc, left, picps, "#1f77b4", "PICP per replicate", marks);
  drawHistogramPanel(doc, right, ccps, "#2ca02c", "CCP per test input", marks);
  return doc.toString();
}
