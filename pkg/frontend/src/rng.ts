/**
 * Counter-based splitmix64 streams, mirroring the producer: every value is a
 * pure function of (epoch_seed, counter), computed in 64-bit wrapping
 * integer arithmetic via BigInt.
 */

const MASK = 0xffffffffffffffffn;
const GAMMA = 0x9e3779b97f4a7c15n;
const MULT_A = 0xbf58476d1ce4e5b9n;
const MULT_B = 0x94d049bb133111ebn;

/** splitmix64 finalizer: avalanching bijection on 64-bit integers. */
export function mix64(z: bigint): bigint {
  z &= MASK;
  z ^= z >> 30n;
  z = (z * MULT_A) & MASK;
  z ^= z >> 27n;
  z = (z * MULT_B) & MASK;
  z ^= z >> 31n;
  return z;
}

/** One 64-bit word of the epoch stream at the given counter. */
export function streamU64(epochSeed: bigint, counter: bigint): bigint {
  return mix64((epochSeed + ((counter + 1n) * GAMMA & MASK)) & MASK);
}

/** Top 53 bits mapped to [0, 1); exact double conversion. */
export function u64ToUnit(value: bigint): number {
  return Number(value >> 11n) * 2 ** -53;
}
