/**
 * Epoch-index iterator over a pipeline output directory.
 *
 * `open` eagerly loads the persisted scores and schedule (the handle keeps
 * working if the files vanish afterwards) and `epochIndices` reproduces the
 * producer's index stream for any epoch, bit for bit: same softmax, same
 * alias table, same counter-based randomness.
 */

import * as path from "node:path";

import { AliasTable, buildAliasTable } from "./alias";
import { ArtifactError, ScheduleFile, ScoresFile, readSchedule, readScores } from "./formats";
import { streamU64, u64ToUnit } from "./rng";
import { softmaxProbs } from "./softmax";

export interface SamplerInfo {
  nSamples: number;
  totalEpochs: number;
  mode: string;
  tauRange: [number, number];
  nDraws: number;
}

export class BoundSampler {
  private readonly scores: ScoresFile;
  private readonly schedule: ScheduleFile;
  private cachedTau: number | null = null;
  private cachedTable: AliasTable | null = null;

  private constructor(scores: ScoresFile, schedule: ScheduleFile) {
    this.scores = scores;
    this.schedule = schedule;
  }

  /** Loads scores.bin + schedule.json from a pipeline output directory. */
  static open(outputDir: string): BoundSampler {
    const scores = readScores(path.join(outputDir, "scores.bin"));
    const schedule = readSchedule(path.join(outputDir, "schedule.json"));
    if (scores.nSamples < 1) {
      throw new ArtifactError(path.join(outputDir, "scores.bin"), "n_samples", "empty");
    }
    if (scores.nSamples >= 2 ** 32) {
      throw new ArtifactError(
        path.join(outputDir, "scores.bin"),
        "n_samples",
        "more than 2^32 samples unsupported"
      );
    }
    return new BoundSampler(scores, schedule);
  }

  info(): SamplerInfo {
    return {
      nSamples: this.scores.nSamples,
      totalEpochs: this.schedule.totalEpochs,
      mode: this.schedule.mode,
      tauRange: [this.schedule.start, this.schedule.end],
      nDraws: this.schedule.nDraws,
    };
  }

  /** The scheduled (tau, effectiveFraction, epochSeed) record for an epoch. */
  entry(epoch: number) {
    if (!Number.isInteger(epoch) || epoch < 0 || epoch >= this.schedule.totalEpochs) {
      throw new RangeError(
        `epoch ${epoch} out of range [0, ${this.schedule.totalEpochs})`
      );
    }
    return this.schedule.entries[epoch];
  }

  private tableFor(tau: number): AliasTable {
    if (this.cachedTau === tau && this.cachedTable !== null) {
      return this.cachedTable;
    }
    const probs = softmaxProbs(this.scores.normalized, tau);
    const table = buildAliasTable(probs);
    this.cachedTau = tau;
    this.cachedTable = table;
    return table;
  }

  /** The full index stream of one epoch (nDraws entries, with replacement). */
  epochIndices(epoch: number): Uint32Array {
    const entry = this.entry(epoch);
    const table = this.tableFor(entry.tau);
    const n = this.scores.nSamples;
    const nDraws = this.schedule.nDraws;
    const out = new Uint32Array(nDraws);
    const seed = entry.epochSeed;
    for (let t = 0; t < nDraws; t++) {
      const uSlot = u64ToUnit(streamU64(seed, BigInt(2 * t)));
      const uAccept = u64ToUnit(streamU64(seed, BigInt(2 * t + 1)));
      let slot = Math.floor(uSlot * n);
      if (slot > n - 1) slot = n - 1;
      out[t] = uAccept < table.threshold[slot] ? slot : table.alias[slot];
    }
    return out;
  }
}

/** Functional aliases mirroring the producer's operation names. */
export function open(outputDir: string): BoundSampler {
  return BoundSampler.open(outputDir);
}

export function epochIndices(sampler: BoundSampler, epoch: number): Uint32Array {
  return sampler.epochIndices(epoch);
}

export function info(sampler: BoundSampler): SamplerInfo {
  return sampler.info();
}
