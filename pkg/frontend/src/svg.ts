/** Minimal hand-rolled SVG chart scaffolding: axes, series, reference lines. */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
  color: string;
  /** draw a connecting line in addition to the markers */
  line?: boolean;
  /** dashed reference styling */
  dashed?: boolean;
  /** skip circle markers (reference lines) */
  noMarkers?: boolean;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  series: Series[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 42, right: 24, bottom: 48, left: 64 };

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-12; t += s) {
    ticks.push(Number(t.toPrecision(10)));
  }
  return ticks;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const inner = {
    w: width - MARGIN.left - MARGIN.right,
    h: height - MARGIN.top - MARGIN.bottom,
  };
  const pts = spec.series.flatMap((s) => s.points);
  if (pts.length === 0) {
    throw new Error("nothing to plot: no data points");
  }
  const tx = (x: number) => (spec.xLog ? Math.log10(x) : x);
  const xs = pts.map((p) => tx(p.x));
  const ys = pts.map((p) => p.y);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yLo === yHi) {
    yLo -= Math.abs(yLo) * 0.1 + 0.1;
    yHi += Math.abs(yHi) * 0.1 + 0.1;
  }
  const yPad = (yHi - yLo) * 0.08;
  yLo -= yPad;
  yHi += yPad;
  const px = (x: number) => MARGIN.left + ((tx(x) - xLo) / (xHi - xLo)) * inner.w;
  const py = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * inner.h;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15" font-weight="bold">${esc(spec.title)}</text>`,
  );

  // axes + ticks
  const axisColor = "#333";
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + inner.h;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0 + inner.w}" y2="${y0}" stroke="${axisColor}"/>`,
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="${axisColor}"/>`,
  );
  const xTicks = spec.xLog
    ? niceTicks(xLo, xHi, 5).map((t) => Math.pow(10, t))
    : niceTicks(xLo, xHi, 6);
  for (const t of xTicks) {
    const X = px(t);
    if (X < x0 - 1 || X > x0 + inner.w + 1) continue;
    parts.push(
      `<line x1="${X}" y1="${y0}" x2="${X}" y2="${y0 + 5}" stroke="${axisColor}"/>`,
      `<text x="${X}" y="${y0 + 20}" text-anchor="middle" font-family="sans-serif" font-size="11">${formatTick(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi, 5)) {
    const Y = py(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${Y}" x2="${x0}" y2="${Y}" stroke="${axisColor}"/>`,
      `<line x1="${x0}" y1="${Y}" x2="${x0 + inner.w}" y2="${Y}" stroke="#eee"/>`,
      `<text x="${x0 - 8}" y="${Y + 4}" text-anchor="end" font-family="sans-serif" font-size="11">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + inner.w / 2}" y="${height - 10}" text-anchor="middle" font-family="sans-serif" font-size="13">${esc(spec.xLabel)}</text>`,
    `<text x="18" y="${MARGIN.top + inner.h / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${MARGIN.top + inner.h / 2})">${esc(spec.yLabel)}</text>`,
  );

  // series
  for (const s of spec.series) {
    const sorted = [...s.points].sort((a, b) => a.x - b.x);
    if (s.line !== false && sorted.length > 1) {
      const d = sorted.map((p, i) => `${i === 0 ? "M" : "L"}${px(p.x).toFixed(2)},${py(p.y).toFixed(2)}`).join(" ");
      const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
      parts.push(`<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
    }
    if (!s.noMarkers) {
      for (const p of sorted) {
        parts.push(`<circle cx="${px(p.x).toFixed(2)}" cy="${py(p.y).toFixed(2)}" r="3.5" fill="${s.color}"/>`);
      }
    }
  }

  // legend
  let ly = MARGIN.top + 6;
  for (const s of spec.series) {
    const lx = x0 + inner.w - 170;
    const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${s.color}" stroke-width="2"${dash}/>`,
      `<text x="${lx + 28}" y="${ly + 4}" font-family="sans-serif" font-size="12">${esc(s.label)}</text>`,
    );
    ly += 18;
  }
  parts.push("</svg>");
  return parts.join("\n");
}

function formatTick(t: number): string {
  if (Math.abs(t) >= 1000 || (t !== 0 && Math.abs(t) < 0.01)) {
    return t.toExponential(0);
  }
  return String(Number(t.toPrecision(6)));
}
