import { pairwiseSumPow2, portableExp } from "./math";

/**
 * Sampling probabilities for one temperature, replicating the producer's
 * operation order exactly: widen float32 scores, subtract the minimum,
 * divide by tau, exponentiate portably, normalize by the pairwise sum.
 * tau = Infinity marks the uniform distribution (exactly 1/N each).
 */
export function softmaxProbs(scores: Float32Array, tau: number): Float64Array {
  const n = scores.length;
  if (n === 0) {
    throw new Error("scores must be nonempty");
  }
  const probs = new Float64Array(n);
  if (tau === Infinity) {
    probs.fill(1 / n);
    return probs;
  }
  if (!(tau > 0)) {
    throw new Error(`tau must be positive or Infinity, got ${tau}`);
  }
  let min = scores[0];
  for (let i = 1; i < n; i++) {
    if (scores[i] < min) min = scores[i];
  }
  const weights = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const shifted = scores[i] - min;
    weights[i] = portableExp(-(shifted / tau));
  }
  const total = pairwiseSumPow2(weights);
  for (let i = 0; i < n; i++) {
    probs[i] = weights[i] / total;
  }
  return probs;
}
