/** Per-figure data transforms from the runner CSV to a chart spec. */

import { ChartSpec, Series } from "./svg.js";
import { CsvError, ResultRow, medians, requireRows } from "./csv.js";

export const FIGURE_KINDS = ["fig2", "fig3", "fig4", "fig5", "fig6"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export const BASELINE_DESIGN = "fullyassoc";

function params(row: ResultRow): Record<string, unknown> {
  try {
    const v = JSON.parse(row.params || "{}");
    return typeof v === "object" && v !== null ? (v as Record<string, unknown>) : {};
  } catch {
    return {};
  }
}

function uniqueSorted<T>(xs: T[]): T[] {
  return [...new Set(xs)].sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));
}

/** REE vs cache size, one line per design. */
function fig2(rows: ResultRow[]): ChartSpec {
  const data = requireRows(medians(rows, "ree"), "metric ree_median");
  const sizes = uniqueSorted(data.map((r) => r.lines));
  const designs = uniqueSorted(data.map((r) => r.design));
  const series: Series[] = designs.map((d) => ({
    name: d,
    points: sizes.map((sz) => {
      const hit = data.find((r) => r.design === d && r.lines === sz);
      return { label: `${sz} lines`, value: hit ? hit.value : NaN };
    }).filter((p) => Number.isFinite(p.value)),
  }));
  return { title: "Relative eviction entropy vs cache size", yLabel: "REE (bits)", kind: "line", logY: false, series };
}

/** REE over the partitions grid, one line per way count. */
function fig3(rows: ResultRow[]): ChartSpec {
  const data = requireRows(medians(rows, "ree"), "metric ree_median");
  const part = (r: ResultRow): number => Number(params(r)["partitions"] ?? 1);
  const parts = uniqueSorted(data.map(part));
  const wayCounts = uniqueSorted(data.map((r) => r.ways));
  const series: Series[] = wayCounts.map((w) => ({
    name: `${w} ways`,
    points: parts.map((p) => {
      const hit = data.find((r) => r.ways === w && part(r) === p);
      return { label: `${p} partitions`, value: hit ? hit.value : NaN };
    }).filter((pt) => Number.isFinite(pt.value)),
  }));
  return { title: "REE vs ways and partitions", yLabel: "REE (bits)", kind: "line", logY: false, series };
}

/** Eviction-set construction cost per design, one bar group per builder. */
function fig4(rows: ResultRow[]): ChartSpec {
  const data = requireRows(medians(rows, "accesses"), "metric accesses_median");
  const builder = (r: ResultRow): string => String(params(r)["builder"] ?? "?");
  const designs = uniqueSorted(data.map((r) => r.design));
  const builders = uniqueSorted(data.map(builder));
  const series: Series[] = builders.map((b) => ({
    name: b,
    points: designs.map((d) => {
      const hit = data.find((r) => r.design === d && builder(r) === b);
      return { label: d, value: hit ? hit.value : NaN };
    }).filter((p) => Number.isFinite(p.value)),
  }));
  return { title: "Eviction set construction cost", yLabel: "memory accesses", kind: "bar", logY: true, series };
}

/** Eviction-set quality: conflict and success rates per design. */
function fig5(rows: ResultRow[]): ChartSpec {
  const tcr = medians(rows, "trueConflictRate");
  const sr = medians(rows, "successRate");
  requireRows([...tcr, ...sr], "metrics trueConflictRate_median/successRate_median");
  const designs = uniqueSorted([...tcr, ...sr].map((r) => r.design));
  const pick = (src: ResultRow[], name: string): Series => ({
    name,
    points: designs.map((d) => {
      const hit = src.find((r) => r.design === d);
      return { label: d, value: hit ? hit.value : NaN };
    }).filter((p) => Number.isFinite(p.value)),
  });
  return {
    title: "Eviction set quality",
    yLabel: "rate",
    kind: "bar",
    logY: false,
    series: [pick(tcr, "trueConflictRate"), pick(sr, "successRate")],
  };
}

/** Attack cost per design, normalized to the fully-associative baseline. */
function fig6(rows: ResultRow[]): ChartSpec {
  const data = requireRows(medians(rows, "encryptions"), "metric encryptions_median");
  const group = (r: ResultRow): string => {
    const p = params(r);
    return `${String(p["attack"] ?? "attack")}/${String(p["victim"] ?? "victim")}`;
  };
  const groups = uniqueSorted(data.map(group));
  const designs = uniqueSorted(data.map((r) => r.design));
  const series: Series[] = groups.map((g) => {
    const base = data.find((r) => group(r) === g && r.design === BASELINE_DESIGN);
    if (!base) {
      throw new CsvError(
        `normalized figure needs a ${BASELINE_DESIGN} baseline row for ${g}`,
      );
    }
    return {
      name: g,
      points: designs.map((d) => {
        const hit = data.find((r) => group(r) === g && r.design === d);
        const value = hit ? (hit.design === BASELINE_DESIGN ? 1.0 : hit.value / base.value) : NaN;
        return { label: d, value };
      }).filter((p) => Number.isFinite(p.value)),
    };
  });
  return { title: "Attack cost relative to fully-associative", yLabel: "normalized encryptions", kind: "bar", logY: true, series };
}

export function buildFigure(kind: string, rows: ResultRow[]): ChartSpec {
  switch (kind) {
    case "fig2": return fig2(rows);
    case "fig3": return fig3(rows);
    case "fig4": return fig4(rows);
    case "fig5": return fig5(rows);
    case "fig6": return fig6(rows);
    default:
      throw new CsvError(
        `unknown figure kind "${kind}"; expected one of ${FIGURE_KINDS.join(", ")}`,
      );
  }
}
