import { describe, expect, it } from "vitest";
import { parseResults } from "../src/csv.js";
import { buildFigure } from "../src/figures.js";
import { renderChart } from "../src/svg.js";

const HEADER =
  "experiment,design,lines,ways,policy,params,metric,value,seed,repetition";

function csv(...rows: string[]): string {
  return [HEADER, ...rows].join("\n") + "\n";
}

const REE_ROWS = csv(
  'ree,assoc,1024,16,random,"{}",ree_median,6.0,1,-1',
  'ree,assoc,2048,16,random,"{}",ree_median,7.0,1,-1',
  'ree,scatter,1024,16,random,"{}",ree_median,2.5,1,-1',
  'ree,scatter,2048,16,random,"{}",ree_median,2.8,1,-1',
);

describe("fig2", () => {
  it("builds one line per design over sizes", () => {
    const spec = buildFigure("fig2", parseResults(REE_ROWS));
    expect(spec.kind).toBe("line");
    expect(spec.series.map((s) => s.name)).toEqual(["assoc", "scatter"]);
    expect(spec.series[0].points.map((p) => p.value)).toEqual([6.0, 7.0]);
  });
});

describe("fig3", () => {
  it("groups by ways and partitions", () => {
    const rows = parseResults(
      csv(
        'ree,ceaser-s,2048,16,random,"{""partitions"": 2}",ree_median,5.0,1,-1',
        'ree,ceaser-s,2048,16,random,"{""partitions"": 4}",ree_median,3.0,1,-1',
      ),
    );
    const spec = buildFigure("fig3", rows);
    expect(spec.series).toHaveLength(1);
    expect(spec.series[0].points.map((p) => p.value)).toEqual([5.0, 3.0]);
  });
});

describe("fig4", () => {
  it("uses a log axis and one series per builder", () => {
    const rows = parseResults(
      csv(
        'evset,assoc,2048,16,random,"{""builder"": ""shm""}",accesses_median,100000,1,-1',
        'evset,assoc,2048,16,random,"{""builder"": ""ppp""}",accesses_median,9000,1,-1',
      ),
    );
    const spec = buildFigure("fig4", rows);
    expect(spec.logY).toBe(true);
    expect(spec.series.map((s) => s.name)).toEqual(["ppp", "shm"]);
  });
});

describe("fig5", () => {
  it("pairs conflict and success rates", () => {
    const rows = parseResults(
      csv(
        'evset,assoc,2048,16,random,"{}",trueConflictRate_median,1.0,1,-1',
        'evset,assoc,2048,16,random,"{}",successRate_median,0.9,1,-1',
      ),
    );
    const spec = buildFigure("fig5", rows);
    expect(spec.series.map((s) => s.name)).toEqual([
      "trueConflictRate",
      "successRate",
    ]);
  });
});

describe("fig6", () => {
  const ATTACK_ROWS = csv(
    'attack,fullyassoc,256,256,random,"{""attack"": ""evset"", ""victim"": ""aes""}",encryptions_median,10590,1,-1',
    'attack,scatter,256,16,random,"{""attack"": ""evset"", ""victim"": ""aes""}",encryptions_median,21180,1,-1',
  );

  it("normalizes the baseline to exactly 1.0", () => {
    const spec = buildFigure("fig6", parseResults(ATTACK_ROWS));
    const base = spec.series[0].points.find((p) => p.label === "fullyassoc");
    expect(base!.value).toBe(1.0);
    const other = spec.series[0].points.find((p) => p.label === "scatter");
    expect(other!.value).toBeCloseTo(2.0);
  });

  it("fails loudly without a baseline row", () => {
    const rows = parseResults(
      csv(
        'attack,scatter,256,16,random,"{""attack"": ""evset"", ""victim"": ""aes""}",encryptions_median,21180,1,-1',
      ),
    );
    expect(() => buildFigure("fig6", rows)).toThrow(/baseline/);
  });
});

describe("rendering", () => {
  it("is deterministic and emits SVG", () => {
    const spec = buildFigure("fig2", parseResults(REE_ROWS));
    const a = renderChart(spec);
    const b = renderChart(spec);
    expect(a).toBe(b);
    expect(a.startsWith("<svg ")).toBe(true);
    expect(a).toContain("REE (bits)");
  });

  it("rejects unknown figure kinds", () => {
    expect(() => buildFigure("fig99", parseResults(REE_ROWS))).toThrow(
      /unknown figure kind/,
    );
  });
});
