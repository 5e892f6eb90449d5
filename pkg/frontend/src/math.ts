/**
 * Reproducible float64 kernels, mirrored operation-for-operation from the
 * producing pipeline. Every function here uses only arithmetic IEEE 754 pins
 * down exactly (+, -, *, /, comparisons, trunc, exact power-of-two scaling),
 * so results are bit-identical to the Python side.
 */

const LN2_HI = 6.93147180369123816490e-1;
const LN2_LO = 1.90821492927058770002e-10;
const INV_LN2 = 1.44269504088896338700e0;
const P1 = 1.66666666666666019037e-1;
const P2 = -2.77777777770155933842e-3;
const P3 = 6.61375632143793436117e-5;
const P4 = -1.65339022054652515390e-6;
const P5 = 4.13813679705723846039e-8;
const OVERFLOW_X = 7.09782712893383973096e2;
const UNDERFLOW_X = -7.45133219101941108420e2;
const HALF_LN2 = 0.34657359027997264;
const TINY_X = 2 ** -28;

const pow2View = new DataView(new ArrayBuffer(8));

/** Exact 2^k as a double for -1074 <= k <= 1023 (bit-assembled, no Math.pow). */
export function pow2(k: number): number {
  if (k > 1023) return Infinity;
  if (k < -1074) return 0;
  if (k >= -1022) {
    pow2View.setBigUint64(0, BigInt(k + 1023) << 52n, false);
  } else {
    pow2View.setBigUint64(0, 1n << BigInt(k + 1074), false);
  }
  return pow2View.getFloat64(0, false);
}

/**
 * y * 2^k with a single rounding, like C ldexp. For deeply negative k the
 * scaling happens in two steps whose first product is exact, so the one
 * rounding lands in the final (possibly subnormal) multiply.
 */
export function ldexp(y: number, k: number): number {
  if (k > 1023) {
    return y * pow2(1000) * pow2(k - 1000);
  }
  if (k >= -1021) {
    return y * pow2(k);
  }
  return y * pow2(k + 1000) * pow2(-1000);
}

/** exp(x) via Cody-Waite reduction + the fdlibm rational polynomial (<1 ulp). */
export function portableExp(x: number): number {
  if (Number.isNaN(x)) return x;
  if (x > OVERFLOW_X) return Infinity;
  if (x < UNDERFLOW_X) return 0;
  const ax = x < 0 ? -x : x;
  let k: number;
  let hi: number;
  let lo: number;
  let r: number;
  if (ax > HALF_LN2) {
    k = Math.trunc(INV_LN2 * x + (x > 0 ? 0.5 : -0.5));
    const kf = k;
    hi = x - kf * LN2_HI;
    lo = kf * LN2_LO;
    r = hi - lo;
  } else if (ax < TINY_X) {
    return 1 + x;
  } else {
    k = 0;
    hi = x;
    lo = 0;
    r = x;
  }
  const t = r * r;
  const c = r - t * (P1 + t * (P2 + t * (P3 + t * (P4 + t * P5))));
  if (k === 0) {
    return 1 - ((r * c) / (c - 2) - r);
  }
  const y = 1 - ((lo - (r * c) / (2 - c)) - hi);
  return ldexp(y, k);
}

/**
 * Sum by halving a zero-padded power-of-two array: the addition tree is a
 * function of length alone, matching the producer's normalization constant.
 */
export function pairwiseSumPow2(values: Float64Array): number {
  const n = values.length;
  if (n === 0) return 0;
  let width = 1;
  while (width < n) width *= 2;
  let a = new Float64Array(width);
  a.set(values);
  while (a.length > 1) {
    const half = new Float64Array(a.length / 2);
    for (let i = 0; i < half.length; i++) {
      half[i] = a[2 * i] + a[2 * i + 1];
    }
    a = half;
  }
  return a[0];
}
