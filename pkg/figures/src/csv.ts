/** Parsers for the spinbattery CSV artifacts (documented public schemas). */

export interface Trajectory {
  /** times in units 1/J */
  times: number[];
  /** z[t][site], L columns */
  z: number[][];
  /** q[t][bond], L-1 columns */
  q: number[][];
  maxD: number[];
  errBudget: number[];
  sites: number;
}

export interface FidelitySeries {
  times: number[];
  fidelity: number[];
}

function splitRows(text: string): string[][] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function parseNumber(cell: string, where: string): number {
  const v = Number(cell);
  if (!isFinite(v)) {
    throw new Error(`${where}: not a finite number: ${JSON.stringify(cell)}`);
  }
  return v;
}

/**
 * Parse a trajectory CSV: t, z_1..z_L, q_1..q_{L-1}, max_D, err_budget.
 * Throws a descriptive error on any schema mismatch.
 */
export function parseTrajectory(text: string): Trajectory {
  const rows = splitRows(text);
  if (rows.length < 2) {
    throw new Error("trajectory CSV: need a header and at least one data row");
  }
  const header = rows[0];
  const zCount = header.filter((c) => c.startsWith("z_")).length;
  const qCount = header.filter((c) => c.startsWith("q_")).length;
  if (header[0] !== "t" || header[header.length - 1] !== "err_budget" ||
      header[header.length - 2] !== "max_D" || qCount !== zCount - 1 ||
      header.length !== 3 + zCount + qCount) {
    throw new Error(
      `trajectory CSV: unexpected header (${zCount} z columns, ${qCount} q columns)`);
  }
  const out: Trajectory = { times: [], z: [], q: [], maxD: [], errBudget: [], sites: zCount };
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    if (row.length !== header.length) {
      throw new Error(`trajectory CSV row ${r}: ${row.length} cells, expected ${header.length}`);
    }
    const where = `trajectory CSV row ${r}`;
    out.times.push(parseNumber(row[0], where));
    out.z.push(row.slice(1, 1 + zCount).map((c) => parseNumber(c, where)));
    out.q.push(row.slice(1 + zCount, 1 + zCount + qCount).map((c) => parseNumber(c, where)));
    out.maxD.push(parseNumber(row[1 + zCount + qCount], where));
    out.errBudget.push(parseNumber(row[2 + zCount + qCount], where));
  }
  return out;
}

/** Parse a fidelity CSV: t, fidelity. */
export function parseFidelity(text: string): FidelitySeries {
  const rows = splitRows(text);
  if (rows.length < 2 || rows[0][0] !== "t" || rows[0][1] !== "fidelity") {
    throw new Error("fidelity CSV: expected header `t,fidelity`");
  }
  const times: number[] = [];
  const fidelity: number[] = [];
  for (let r = 1; r < rows.length; r++) {
    times.push(parseNumber(rows[r][0], `fidelity CSV row ${r}`));
    fidelity.push(parseNumber(rows[r][1], `fidelity CSV row ${r}`));
  }
  return { times, fidelity };
}
