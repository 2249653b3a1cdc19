/** Parsing and validation of the runner's result CSV. */

export const EXPECTED_HEADER = [
  "experiment",
  "design",
  "lines",
  "ways",
  "policy",
  "params",
  "metric",
  "value",
  "seed",
  "repetition",
] as const;

export interface ResultRow {
  experiment: string;
  design: string;
  lines: number;
  ways: number;
  policy: string;
  params: string;
  metric: string;
  value: number;
  seed: number;
  repetition: number;
}

export class CsvError extends Error {}

/** Split one CSV line honouring double-quoted fields (params holds JSON). */
export function splitLine(line: string): string[] {
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const c = line[i];
    if (quoted) {
      if (c === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c === '"') {
      quoted = true;
    } else if (c === ",") {
      out.push(field);
      field = "";
    } else {
      field += c;
    }
  }
  if (quoted) throw new CsvError("unterminated quoted field");
  out.push(field);
  return out;
}

export function parseResults(text: string): ResultRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new CsvError("empty CSV: no header row");
  const header = splitLine(lines[0]);
  if (header.join(",") !== EXPECTED_HEADER.join(",")) {
    throw new CsvError(
      `unexpected header: got "${lines[0]}", want "${EXPECTED_HEADER.join(",")}"`,
    );
  }
  if (lines.length === 1) throw new CsvError("empty CSV: header but no rows");
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = splitLine(lines[i]);
    if (parts.length !== EXPECTED_HEADER.length) {
      throw new CsvError(
        `row ${i + 1}: expected ${EXPECTED_HEADER.length} fields, got ${parts.length}`,
      );
    }
    const num = (name: string, v: string): number => {
      const x = Number(v);
      if (!Number.isFinite(x)) {
        throw new CsvError(`row ${i + 1}: field "${name}" is not a number: "${v}"`);
      }
      return x;
    };
    rows.push({
      experiment: parts[0],
      design: parts[1],
      lines: num("lines", parts[2]),
      ways: num("ways", parts[3]),
      policy: parts[4],
      params: parts[5],
      metric: parts[6],
      value: num("value", parts[7]),
      seed: num("seed", parts[8]),
      repetition: num("repetition", parts[9]),
    });
  }
  return rows;
}

/** Aggregate rows carry repetition = -1; figures plot medians. */
export function medians(rows: ResultRow[], metric: string): ResultRow[] {
  return rows.filter((r) => r.repetition === -1 && r.metric === `${metric}_median`);
}

export function requireRows(rows: ResultRow[], what: string): ResultRow[] {
  if (rows.length === 0) throw new CsvError(`CSV has no rows for ${what}`);
  return rows;
}
