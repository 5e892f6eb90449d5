/**
 * Readers for the pipeline's persisted artifacts. All binary blocks are
 * little-endian with an 8-byte ASCII magic; 64-bit seeds arrive in JSON as
 * decimal strings because plain JSON numbers cannot carry them exactly.
 */

import * as fs from "node:fs";

export class ArtifactError extends Error {
  constructor(file: string, field: string, detail: string) {
    super(`${file}: ${field}: ${detail}`);
    this.name = "ArtifactError";
  }
}

export interface ScoresFile {
  nSamples: number;
  normalized: Float32Array;
  raw: Float32Array;
  clusterOf: Uint32Array;
}

export interface ScheduleEntry {
  epoch: number;
  tau: number;
  effectiveFraction: number;
  epochSeed: bigint;
}

export interface ScheduleFile {
  mode: string;
  totalEpochs: number;
  masterSeed: bigint;
  nDraws: number;
  start: number;
  end: number;
  entries: ScheduleEntry[];
}

const SCORES_MAGIC = "PROTOSCR";
const INDEX_MAGIC = "PROTOIDX";
const SCORES_HEADER = 8 + 4 + 8;
const SCORES_RECORD = 12;
const INDEX_HEADER = 8 + 4 + 8;

function readMagic(view: DataView, file: string): string {
  let magic = "";
  for (let i = 0; i < 8; i++) {
    magic += String.fromCharCode(view.getUint8(i));
  }
  return magic;
}

function readU64AsNumber(view: DataView, offset: number, file: string, field: string): number {
  const value = view.getBigUint64(offset, true);
  if (value > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new ArtifactError(file, field, `value ${value} exceeds 2^53`);
  }
  return Number(value);
}

export function readScores(path: string): ScoresFile {
  let buf: Buffer;
  try {
    buf = fs.readFileSync(path);
  } catch (err) {
    throw new ArtifactError(path, "file", `cannot read: ${err}`);
  }
  if (buf.length < SCORES_HEADER) {
    throw new ArtifactError(path, "header", `truncated (${buf.length} bytes)`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const magic = readMagic(view, path);
  if (magic !== SCORES_MAGIC) {
    throw new ArtifactError(path, "magic", `got ${JSON.stringify(magic)}, expected ${SCORES_MAGIC}`);
  }
  const version = view.getUint32(8, true);
  if (version !== 1) {
    throw new ArtifactError(path, "version", `unsupported version ${version}`);
  }
  const n = readU64AsNumber(view, 12, path, "n_samples");
  if (buf.length !== SCORES_HEADER + n * SCORES_RECORD) {
    throw new ArtifactError(
      path,
      "payload",
      `length mismatch: header claims ${n} records, file holds ${buf.length - SCORES_HEADER} bytes`
    );
  }
  const normalized = new Float32Array(n);
  const raw = new Float32Array(n);
  const clusterOf = new Uint32Array(n);
  for (let i = 0; i < n; i++) {
    const base = SCORES_HEADER + i * SCORES_RECORD;
    normalized[i] = view.getFloat32(base, true);
    raw[i] = view.getFloat32(base + 4, true);
    clusterOf[i] = view.getUint32(base + 8, true);
  }
  return { nSamples: n, normalized, raw, clusterOf };
}

function asSeed(value: unknown, file: string, field: string): bigint {
  if (typeof value === "string" && /^[0-9]+$/.test(value)) {
    return BigInt(value);
  }
  if (typeof value === "number" && Number.isSafeInteger(value) && value >= 0) {
    return BigInt(value);
  }
  throw new ArtifactError(file, field, `expected a u64 decimal string, got ${JSON.stringify(value)}`);
}

export function readSchedule(path: string): ScheduleFile {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new ArtifactError(path, "file", `cannot read: ${err}`);
  }
  let doc: any;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ArtifactError(path, "json", `${err}`);
  }
  const totalEpochs = doc.total_epochs;
  if (!Number.isInteger(totalEpochs) || totalEpochs < 1) {
    throw new ArtifactError(path, "total_epochs", `got ${JSON.stringify(totalEpochs)}`);
  }
  if (!Array.isArray(doc.entries) || doc.entries.length !== totalEpochs) {
    throw new ArtifactError(
      path,
      "entries",
      `expected ${totalEpochs} entries, got ${Array.isArray(doc.entries) ? doc.entries.length : "none"}`
    );
  }
  if (!Number.isInteger(doc.n_draws) || doc.n_draws < 1) {
    throw new ArtifactError(path, "n_draws", `got ${JSON.stringify(doc.n_draws)}`);
  }
  const entries: ScheduleEntry[] = doc.entries.map((e: any, i: number) => {
    if (e.epoch !== i) {
      throw new ArtifactError(path, `entries[${i}].epoch`, `got ${JSON.stringify(e.epoch)}`);
    }
    const tau = e.tau;
    if (typeof tau !== "number" || !(tau > 0)) {
      throw new ArtifactError(path, `entries[${i}].tau`, `got ${JSON.stringify(tau)}`);
    }
    return {
      epoch: i,
      tau,
      effectiveFraction: Number(e.effective_fraction),
      epochSeed: asSeed(e.epoch_seed, path, `entries[${i}].epoch_seed`),
    };
  });
  return {
    mode: String(doc.mode),
    totalEpochs,
    masterSeed: asSeed(doc.master_seed, path, "master_seed"),
    nDraws: doc.n_draws,
    start: Number(doc.params?.start),
    end: Number(doc.params?.end),
    entries,
  };
}

/** Reads a PROTOIDX epoch file; used by the equivalence tests. */
export function readIndexFile(path: string): Float64Array {
  const buf = fs.readFileSync(path);
  if (buf.length < INDEX_HEADER) {
    throw new ArtifactError(path, "header", `truncated (${buf.length} bytes)`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const magic = readMagic(view, path);
  if (magic !== INDEX_MAGIC) {
    throw new ArtifactError(path, "magic", `got ${JSON.stringify(magic)}, expected ${INDEX_MAGIC}`);
  }
  const version = view.getUint32(8, true);
  if (version !== 1) {
    throw new ArtifactError(path, "version", `unsupported version ${version}`);
  }
  const count = readU64AsNumber(view, 12, path, "count");
  if (buf.length !== INDEX_HEADER + count * 8) {
    throw new ArtifactError(path, "payload", "length mismatch");
  }
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = readU64AsNumber(view, INDEX_HEADER + i * 8, path, `index[${i}]`);
  }
  return out;
}
