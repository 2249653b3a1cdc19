/** Minimal deterministic SVG chart rendering: bars and lines, linear or
 * log-10 y-axis, labeled axes. No timestamps or randomness, so identical
 * inputs produce byte-identical output. */

export interface Series {
  name: string;
  points: { label: string; value: number }[];
}

export interface ChartSpec {
  title: string;
  yLabel: string;
  kind: "bar" | "line";
  logY: boolean;
  series: Series[];
}

const W = 860;
const H = 520;
const M = { top: 50, right: 170, bottom: 90, left: 80 };
const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
  "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e",
];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

function yTicks(lo: number, hi: number, logY: boolean): number[] {
  if (logY) {
    const ticks: number[] = [];
    for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
      ticks.push(10 ** e);
    }
    return ticks;
  }
  const span = hi - lo || 1;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-12; t += s) ticks.push(t);
  return ticks;
}

export function renderChart(spec: ChartSpec): string {
  const labels = spec.series[0]?.points.map((p) => p.label) ?? [];
  const values = spec.series.flatMap((s) => s.points.map((p) => p.value));
  if (values.length === 0) throw new Error("chart has no data points");

  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (spec.logY) {
    const pos = values.filter((v) => v > 0);
    if (pos.length === 0) throw new Error("log-scale chart needs positive values");
    lo = Math.min(...pos);
    if (hi <= lo) hi = lo * 10;
  } else {
    lo = Math.min(0, lo);
    if (hi <= lo) hi = lo + 1;
  }

  const plotW = W - M.left - M.right;
  const plotH = H - M.top - M.bottom;
  const yPos = (v: number): number => {
    const f = spec.logY
      ? (Math.log10(v) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))
      : (v - lo) / (hi - lo);
    return M.top + plotH * (1 - f);
  };
  const slotW = plotW / Math.max(labels.length, 1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif" font-size="13">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="24" text-anchor="middle" font-size="17">${esc(spec.title)}</text>`,
  );

  for (const t of yTicks(lo, hi, spec.logY)) {
    if (t < lo - 1e-12 || t > hi * (spec.logY ? 1.0001 : 1) + 1e-12) continue;
    const y = yPos(Math.max(t, lo));
    parts.push(
      `<line x1="${M.left}" y1="${fmt(y)}" x2="${W - M.right}" y2="${fmt(y)}" stroke="#ddd"/>`,
      `<text x="${M.left - 8}" y="${fmt(y + 4)}" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text transform="rotate(-90 20 ${H / 2})" x="20" y="${H / 2}" text-anchor="middle">${esc(spec.yLabel)}</text>`,
    `<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${H - M.bottom}" stroke="#333"/>`,
    `<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - M.right}" y2="${H - M.bottom}" stroke="#333"/>`,
  );

  labels.forEach((label, i) => {
    const x = M.left + slotW * (i + 0.5);
    parts.push(
      `<text x="${fmt(x)}" y="${H - M.bottom + 18}" text-anchor="end" transform="rotate(-35 ${fmt(x)} ${H - M.bottom + 18})">${esc(label)}</text>`,
    );
  });

  spec.series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    if (spec.kind === "bar") {
      const groupW = slotW * 0.8;
      const barW = groupW / spec.series.length;
      s.points.forEach((p, i) => {
        const x = M.left + slotW * i + slotW * 0.1 + barW * si;
        const clamped = spec.logY ? Math.max(p.value, lo) : p.value;
        const y = yPos(clamped);
        const y0 = H - M.bottom;
        parts.push(
          `<rect x="${fmt(x)}" y="${fmt(Math.min(y, y0))}" width="${fmt(barW)}" height="${fmt(Math.abs(y0 - y))}" fill="${color}"><title>${esc(`${s.name} ${p.label}: ${p.value}`)}</title></rect>`,
        );
      });
    } else {
      const pts = s.points
        .map((p, i) => `${fmt(M.left + slotW * (i + 0.5))},${fmt(yPos(spec.logY ? Math.max(p.value, lo) : p.value))}`)
        .join(" ");
      parts.push(
        `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2"/>`,
      );
      s.points.forEach((p, i) => {
        parts.push(
          `<circle cx="${fmt(M.left + slotW * (i + 0.5))}" cy="${fmt(yPos(spec.logY ? Math.max(p.value, lo) : p.value))}" r="3.5" fill="${color}"><title>${esc(`${s.name} ${p.label}: ${p.value}`)}</title></circle>`,
        );
      });
    }
    const ly = M.top + 18 * si;
    parts.push(
      `<rect x="${W - M.right + 12}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`,
      `<text x="${W - M.right + 30}" y="${ly + 2}">${esc(s.name)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
