export interface AliasTable {
  threshold: Float64Array;
  alias: Int32Array;
}

/**
 * Vose alias construction with the producer's exact stack discipline (LIFO
 * over index order) and update expression `(scaled[g] + scaled[l]) - 1`.
 */
export function buildAliasTable(probs: Float64Array): AliasTable {
  const n = probs.length;
  const scaled = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    scaled[i] = probs[i] * n;
  }
  const threshold = new Float64Array(n).fill(1);
  const alias = new Int32Array(n);
  for (let i = 0; i < n; i++) alias[i] = i;
  const small: number[] = [];
  const large: number[] = [];
  for (let i = 0; i < n; i++) {
    if (scaled[i] < 1) {
      small.push(i);
    } else {
      large.push(i);
    }
  }
  while (small.length > 0 && large.length > 0) {
    const l = small.pop()!;
    const g = large.pop()!;
    threshold[l] = scaled[l];
    alias[l] = g;
    scaled[g] = scaled[g] + scaled[l] - 1;
    if (scaled[g] < 1) {
      small.push(g);
    } else {
      large.push(g);
    }
  }
  return { threshold, alias };
}

/** Exact per-index selection mass of a table (uniform slot, uniform accept). */
export function aliasMass(table: AliasTable): Float64Array {
  const n = table.threshold.length;
  const mass = new Float64Array(n);
  const invN = 1 / n;
  for (let slot = 0; slot < n; slot++) {
    mass[slot] += invN * table.threshold[slot];
    mass[table.alias[slot]] += invN * (1 - table.threshold[slot]);
  }
  return mass;
}
