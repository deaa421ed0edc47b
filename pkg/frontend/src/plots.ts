/**
 * Figure builders: one per experiment kind.
 *
 * Reference lines come exclusively from the instance parameters and targets
 * embedded in each row's `extra` column — the harness is the single source
 * of truth for theory values.
 */

import { extraNumber, Row, SchemaError } from "./schema.js";
import { ChartSpec, renderChart, Series } from "./svg.js";

const COLORS = ["#1f6fb2", "#d1495b", "#3a9444", "#8a5bbf", "#c07b21"];

function requireKind(rows: Row[], kind: string): Row[] {
  const matching = rows.filter((r) => r.kind === kind);
  if (matching.length === 0) {
    throw new SchemaError(`no ${kind} rows in the input CSV`);
  }
  return matching;
}

/** D_K / ln n against n, with the dim/2 reference level. */
export function klRateChart(rows: Row[]): ChartSpec {
  const data = requireKind(rows, "kl_rate");
  const points = data
    .filter((r) => r.n > 1)
    .map((r) => ({ x: r.n, y: r.value / Math.log(r.n) }));
  const target = extraNumber(data[0], "target_slope");
  const ns = points.map((p) => p.x);
  const ref: Series = {
    label: `reference ${target}`,
    color: "#555",
    dashed: true,
    noMarkers: true,
    points: [
      { x: Math.min(...ns), y: target },
      { x: Math.max(...ns), y: target },
    ],
  };
  return {
    title: "Environment divergence rate",
    xLabel: "tasks n (log scale)",
    yLabel: "divergence / ln n",
    xLog: true,
    series: [{ label: "estimate", color: COLORS[0], points }, ref],
  };
}

/** Risk curves: instantaneous m*risk vs n, or cumulative risk vs ln m. */
export function riskCurveChart(rows: Row[]): ChartSpec {
  const data = requireKind(rows, "risk_curve");
  const cumulative = data[0].extra["risk_type"] === "cumulative";
  if (cumulative) {
    const byN = new Map<number, Row[]>();
    for (const r of data) {
      byN.set(r.n, [...(byN.get(r.n) ?? []), r]);
    }
    const series: Series[] = [];
    let i = 0;
    for (const [n, group] of [...byN.entries()].sort((a, b) => a[0] - b[0])) {
      series.push({
        label: `n=${n} (slope target ${extraNumber(group[0], "target")})`,
        color: COLORS[i++ % COLORS.length],
        points: group.map((r) => ({ x: r.m, y: r.value })),
      });
    }
    return {
      title: "Cumulative risk per task",
      xLabel: "observations per task m (log scale)",
      yLabel: "cumulative risk / n",
      xLog: true,
      series,
    };
  }
  const points = data.map((r) => ({ x: r.n, y: r.m * r.value }));
  const refPoints = data.map((r) => ({ x: r.n, y: r.m * extraNumber(r, "target") }));
  return {
    title: "Scaled instantaneous risk",
    xLabel: "tasks n",
    yLabel: "m x risk",
    series: [
      { label: "estimate", color: COLORS[0], points },
      {
        label: "theory (a + b/n)/2",
        color: "#555",
        dashed: true,
        noMarkers: true,
        points: refPoints,
      },
    ],
  };
}

/** Hierarchical vs independent risk, plus the ratio against its target. */
export function compareChart(rows: Row[]): ChartSpec {
  const data = requireKind(rows, "compare");
  const pick = (method: string) =>
    data.filter((r) => r.method === method).map((r) => ({ x: r.n, y: r.value }));
  const ratioRows = data.filter((r) => r.method === "ratio");
  if (ratioRows.length === 0) {
    throw new SchemaError("compare CSV has no ratio rows");
  }
  const ratioRef = ratioRows.map((r) => ({
    x: r.n,
    y: extraNumber(r, "target_ratio"),
  }));
  return {
    title: "Hierarchical vs independent learners",
    xLabel: "tasks n",
    yLabel: "risk (curves) / ratio (dashed pair)",
    series: [
      { label: "hierarchical", color: COLORS[0], points: pick("evidence_mc_hierarchical") },
      { label: "independent", color: COLORS[1], points: pick("evidence_mc_independent") },
      { label: "ratio", color: COLORS[2], points: pick("ratio") },
      {
        label: "ratio target",
        color: "#555",
        dashed: true,
        noMarkers: true,
        points: ratioRef,
      },
    ],
  };
}

/** Ball-count diagnostics: -log measure vs log(1/eps) with the target slope. */
export function dimensionChart(rows: Row[]): ChartSpec {
  const data = requireKind(rows, "dimension");
  const points = data.map((r) => ({
    x: Math.log(1 / extraNumber(r, "epsilon")),
    y: r.value,
  }));
  const target = extraNumber(data[0], "target_dim");
  const xLo = Math.min(...points.map((p) => p.x));
  const xHi = Math.max(...points.map((p) => p.x));
  const yLo = Math.min(...points.map((p) => p.y));
  return {
    title: "Local dimension fit",
    xLabel: "log(1/eps)",
    yLabel: "-log ball measure",
    series: [
      { label: "ball counts", color: COLORS[0], points },
      {
        label: `slope ${target} reference`,
        color: "#555",
        dashed: true,
        noMarkers: true,
        points: [
          { x: xLo, y: yLo },
          { x: xHi, y: yLo + target * (xHi - xLo) },
        ],
      },
    ],
  };
}

/** Sandwich: Monte Carlo lower/upper bounds around the closed-form middle. */
export function boundsChart(rows: Row[]): ChartSpec {
  const data = requireKind(rows, "bounds");
  const pick = (method: string) =>
    data.filter((r) => r.method === method).map((r) => ({ x: r.n, y: r.value }));
  return {
    title: "Information sandwich bounds",
    xLabel: "tasks n (log scale)",
    yLabel: "nats",
    xLog: true,
    series: [
      { label: "upper (KL)", color: COLORS[1], points: pick("mc_upper") },
      { label: "information", color: COLORS[0], points: pick("closed_middle") },
      { label: "lower (Hellinger)", color: COLORS[2], points: pick("mc_lower") },
    ],
  };
}

export const BUILDERS: Record<string, (rows: Row[]) => ChartSpec> = {
  kl_rate: klRateChart,
  risk_curve: riskCurveChart,
  compare: compareChart,
  dimension: dimensionChart,
  bounds: boundsChart,
};

export function renderFigure(kind: string, rows: Row[]): string {
  const builder = BUILDERS[kind];
  if (!builder) {
    throw new SchemaError(
      `unknown plot kind ${kind} (expected one of ${Object.keys(BUILDERS).join(", ")})`,
    );
  }
  return renderChart(builder(rows));
}
