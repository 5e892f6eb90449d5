"""Reproducible float64 kernels used on the sampling path.

Everything here is restricted to operations that IEEE 754 pins down exactly
(+, -, *, /, comparisons, trunc, ldexp), so a faithful re-implementation in
another language produces bit-identical results. That property is what makes
epoch index streams reproducible outside this package; libm-backed np.exp and
pairwise np.sum have no such guarantee and are deliberately avoided here.
"""

from __future__ import annotations

import math

import numpy as np

# fdlibm exp constants (decimal forms round to the intended doubles).
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10
_INV_LN2 = 1.44269504088896338700e+00
_P1 = 1.66666666666666019037e-01
_P2 = -2.77777777770155933842e-03
_P3 = 6.61375632143793436117e-05
_P4 = -1.65339022054652515390e-06
_P5 = 4.13813679705723846039e-08
_OVERFLOW_X = 7.09782712893383973096e+02
_UNDERFLOW_X = -7.45133219101941108420e+02
_HALF_LN2 = 0.34657359027997264
_TINY_X = 2.0 ** -28


def portable_exp(x: float) -> float:
    """exp(x) via Cody-Waite reduction and the fdlibm rational polynomial.

    Accurate to <1 ulp and bit-for-bit reproducible anywhere IEEE doubles
    behave as specified (the reduction multiply k*LN2_HI is exact because
    LN2_HI carries 20 trailing zero bits and |k| < 2**20).
    """
    if x != x:
        return x
    if x > _OVERFLOW_X:
        return math.inf
    if x < _UNDERFLOW_X:
        return 0.0
    ax = -x if x < 0.0 else x
    if ax > _HALF_LN2:
        k = int(_INV_LN2 * x + (0.5 if x > 0.0 else -0.5))
        kf = float(k)
        hi = x - kf * _LN2_HI
        lo = kf * _LN2_LO
        r = hi - lo
    elif ax < _TINY_X:
        return 1.0 + x
    else:
        k = 0
        hi = x
        lo = 0.0
        r = x
    t = r * r
    c = r - t * (_P1 + t * (_P2 + t * (_P3 + t * (_P4 + t * _P5))))
    if k == 0:
        return 1.0 - ((r * c / (c - 2.0)) - r)
    y = 1.0 - ((lo - (r * c) / (2.0 - c)) - hi)
    return math.ldexp(y, k)


def portable_exp_array(x: np.ndarray) -> np.ndarray:
    """Vectorized portable_exp; bit-identical to the scalar version per element."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        ax = np.abs(x)
        reduce_mask = ax > _HALF_LN2
        kf = np.where(
            reduce_mask,
            np.trunc(_INV_LN2 * x + np.where(x > 0.0, 0.5, -0.5)),
            0.0,
        )
        hi = x - kf * _LN2_HI
        lo = kf * _LN2_LO
        r = hi - lo
        t = r * r
        c = r - t * (_P1 + t * (_P2 + t * (_P3 + t * (_P4 + t * _P5))))
        plain = 1.0 - ((r * c / (c - 2.0)) - r)
        scaled = np.ldexp(
            1.0 - ((lo - (r * c) / (2.0 - c)) - hi),
            kf.astype(np.int64),
        )
        out = np.where(kf == 0.0, plain, scaled)
        out = np.where(ax < _TINY_X, 1.0 + x, out)
        out = np.where(x > _OVERFLOW_X, np.inf, out)
        out = np.where(x < _UNDERFLOW_X, 0.0, out)
        out = np.where(np.isnan(x), x, out)
    return out


def pairwise_sum_pow2(values: np.ndarray) -> float:
    """Sum float64 values by halving a zero-padded power-of-two array.

    The addition tree is fixed by the input length alone, so the result is
    reproducible across implementations; error grows only with log2(n).
    """
    a = np.ascontiguousarray(values, dtype=np.float64)
    n = a.size
    if n == 0:
        return 0.0
    width = 1 << (n - 1).bit_length()
    if width != n:
        a = np.concatenate([a, np.zeros(width - n, dtype=np.float64)])
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])
