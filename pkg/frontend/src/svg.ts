/**
 * Minimal deterministic SVG building blocks.
 *
 * Everything is assembled from plain strings with one fixed number format,
 * so a figure is a pure function of its inputs: no timestamps, no locale,
 * no float formatting that varies between runs.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  if (v === 0) return "0";
  const s = v.toPrecision(6);
  // trim trailing zeros without touching exponent notation
  if (s.includes("e")) {
    const [mant, exp] = s.split("e");
    return trimZeros(mant) + "e" + exp;
  }
  return trimZeros(s);
}

function trimZeros(s: string): string {
  if (!s.includes(".")) return s;
  return s.replace(/0+$/, "").replace(/\.$/, "");
}

/** Tick label: powers of ten render as 1e-6 style, everything else plain. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a) + 0.5);
    if (Math.abs(a / Math.pow(10, e) - 1) < 1e-9) {
      return (v < 0 ? "-" : "") + "1e" + e;
    }
    return v.toExponential(1);
  }
  return fmt(v);
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number
  ) {}

  raw(s: string): void {
    this.parts.push(s);
  }

  el(tag: string, attrs: Record<string, string | number>, text?: string): void {
    const rendered = Object.entries(attrs)
      .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
      .join(" ");
    if (text === undefined) {
      this.parts.push(`<${tag} ${rendered}/>`);
    } else {
      this.parts.push(`<${tag} ${rendered}>${escapeText(text)}</${tag}>`);
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Record<string, string | number>): void {
    this.el("line", { x1, y1, x2, y2, ...attrs });
  }

  circle(cx: number, cy: number, r: number, attrs: Record<string, string | number>): void {
    this.el("circle", { cx, cy, r, ...attrs });
  }

  rect(x: number, y: number, w: number, h: number, attrs: Record<string, string | number>): void {
    this.el("rect", { x, y, width: w, height: h, ...attrs });
  }

  text(x: number, y: number, s: string, attrs: Record<string, string | number>): void {
    this.el("text", { x, y, ...attrs }, s);
  }

  polyline(points: Array<[number, number]>, attrs: Record<string, string | number>): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.el("polyline", { points: pts, fill: "none", ...attrs });
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  domain: [number, number];
}

export function linearScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((v: number) => rlo + ((v - lo) / (hi - lo)) * (rhi - rlo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  f.domain = [lo, hi];
  return f;
}

export function logScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale needs positive domain, got [${lo}, ${hi}]`);
  }
  if (hi === lo) {
    hi = lo * 10;
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = ((v: number) => rlo + ((Math.log10(v) - llo) / (lhi - llo)) * (rhi - rlo)) as Scale;
  f.ticks = logTicks(lo, hi);
  f.domain = [lo, hi];
  return f;
}

/** Classic 1-2-5 ticks covering [lo, hi] with around 5 divisions. */
export function linearTicks(lo: number, hi: number): number[] {
  const span = hi - lo;
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step) * step;
  while (t <= hi + 1e-9 * span) {
    // snap near-zero accumulation noise
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
    t += step;
  }
  return ticks;
}

/** Powers of ten inside [lo, hi]; thinned when the span is very wide. */
export function logTicks(lo: number, hi: number): number[] {
  const e0 = Math.ceil(Math.log10(lo) - 1e-9);
  const e1 = Math.floor(Math.log10(hi) + 1e-9);
  const every = e1 - e0 > 8 ? 2 : 1;
  const ticks: number[] = [];
  for (let e = e0; e <= e1; e += every) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}
