"""Integer-order Bessel functions of the first kind.

Evaluation strategy:

* ascending power series for small arguments (x <= 2, where the terms are
  strictly decreasing and no cancellation occurs),
* backward (Miller) recurrence for everything else, normalized with the
  identity ``J_0(x)^2 + 2 * sum_{k>=1} J_k(x)^2 = 1``.

Forward recurrence is unstable for n > x and is never used.  The
stationary-phase approximation :func:`bessel_j_asymptotic` is meant as an
independent test oracle, not as an evaluator.

All functions are pure; negative orders are reduced through
``J_{-n}(x) = (-1)^n J_n(x)``.
"""

from __future__ import annotations

import math

import numpy as np

#: |J_n(x)| < LANDAU_ORDER_BOUND * n^{-1/3} for every n >= 1 and x > 0.
LANDAU_ORDER_BOUND = 0.6749

#: |J_n(x)| < LANDAU_ARGUMENT_BOUND * x^{-1/3} for every integer n and x > 0
#: (the constant is sup_x x^{1/3} J_0(x) = 0.785746...).
LANDAU_ARGUMENT_BOUND = 0.78575

#: r * J_n(r)^2 <= this constant for |n| < M + N and r > 2(M + N + 1), M, N >= 1.
KRASIKOV_BOUND = 0.7595

_SERIES_CUTOFF = 2.0
_RESCALE = 1e140
_SEED = 1e-30


def _normalization_pad(x: float) -> int:
    """Orders kept above max(n, x) in the backward sweep.

    The minimal-solution contamination decays Airy-fast past the turning
    point, so 8 x^(1/3) extra orders push it below machine epsilon; the
    normalization identity itself already converges with 1.5 x^(1/3).
    """
    return max(40, math.ceil(8.0 * x ** (1.0 / 3.0)))


def _underflow_order(x: float) -> int:
    """Smallest order beyond which J_n(x) underflows to zero in doubles.

    Uses J_n(x) <= (x/2)^n / n! with Stirling; anything past the returned
    order is exactly 0.0 to double precision.
    """
    if x <= 0.0:
        return 1

    def log_bound(n: int) -> float:
        return n * math.log(0.5 * x) - math.lgamma(n + 1)

    lo = max(1, math.ceil(x))
    hi = max(2 * lo, 16)
    while log_bound(hi) > -745.0:
        hi *= 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if log_bound(mid) > -745.0:
            lo = mid
        else:
            hi = mid
    return hi


def _series(n: int, x: float) -> float:
    # J_n(x) = sum_m (-1)^m (x/2)^(n+2m) / (m! (n+m)!), safe for x <= 2
    half = 0.5 * x
    if half == 0.0:  # subnormal x can underflow on halving
        return 1.0 if n == 0 else 0.0
    log_t0 = n * math.log(half) - math.lgamma(n + 1)
    if log_t0 < -745.0:
        return 0.0
    t = math.exp(log_t0)
    q = half * half
    terms = [t]
    m = 0
    while abs(t) > 1e-20 * abs(terms[0]) and m < 60:
        t *= -q / ((m + 1) * (n + m + 1))
        terms.append(t)
        m += 1
    return math.fsum(terms)


def bessel_j_sequence(n_max: int, x: float) -> np.ndarray:
    """Return ``[J_0(x), ..., J_{n_max}(x)]`` from a single backward sweep."""
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x <= _SERIES_CUTOFF:
        for n in range(n_max + 1):
            out[n] = _series(n, x)
        return out

    n_cut = min(n_max, _underflow_order(x))
    pad = _normalization_pad(x)
    start = max(n_cut, math.ceil(x)) + pad

    fp = 0.0  # f_{k+1}
    fc = _SEED  # f_k
    tail = 0.0  # sum_{k>=1} f_k^2
    stored = 0  # number of rescales applied after a row was stored
    scales = np.zeros(n_cut + 1)
    rescales = 0
    for k in range(start, 0, -1):
        if k <= n_cut:
            out[k] = fc
            scales[k] = rescales
        tail += fc * fc
        fm = (2.0 * k / x) * fc - fp
        fp, fc = fc, fm
        if abs(fc) > _RESCALE:
            inv = 1.0 / _RESCALE
            fc *= inv
            fp *= inv
            tail *= inv * inv
            rescales += 1
    out[0] = fc
    scales[0] = rescales
    norm = math.sqrt(fc * fc + 2.0 * tail)
    with np.errstate(under="ignore"):
        out[: n_cut + 1] *= _RESCALE ** (scales - rescales) / norm
    return out


def bessel_j_grid(n_max: int, x: np.ndarray) -> np.ndarray:
    """Vectorized variant: J_n(x_j) for n = 0..n_max over an argument array.

    Returns an array of shape ``(n_max + 1, len(x))``.  Meant for dense
    parameter sweeps (bound verification, spectra over many radii).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("arguments must be nonnegative")
    nx = x.size
    out = np.zeros((n_max + 1, nx))
    zero = x == 0.0
    if np.all(zero):
        out[0] = 1.0
        return out
    small = (~zero) & (x <= _SERIES_CUTOFF)
    for j in np.nonzero(small)[0]:
        out[:, j] = bessel_j_sequence(n_max, float(x[j]))
    out[0, zero] = 1.0

    big = ~(zero | small)
    if not np.any(big):
        return out
    xb = x[big]
    xmax = float(xb.max())
    start = max(n_max, math.ceil(xmax)) + _normalization_pad(xmax)

    fp = np.zeros(xb.size)
    fc = np.full(xb.size, _SEED)
    tail = np.zeros(xb.size)
    sub = np.zeros((n_max + 1, xb.size))
    with np.errstate(under="ignore"):
        for k in range(start, 0, -1):
            if k <= n_max:
                sub[k] = fc
            tail += fc * fc
            fm = (2.0 * k / xb) * fc - fp
            fp, fc = fc, fm
            mask = np.abs(fc) > _RESCALE
            if mask.any():
                inv = 1.0 / _RESCALE
                fc[mask] *= inv
                fp[mask] *= inv
                tail[mask] *= inv * inv
                sub[:, mask] *= inv
        sub[0] = fc
        sub /= np.sqrt(fc * fc + 2.0 * tail)
    out[:, big] = sub
    return out


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer n, with absolute error near machine precision.

    Raises ValueError for negative arguments; |values| <= 1 by construction.
    """
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    n = int(n)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -1.0
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_CUTOFF:
        return sign * _series(n, x)
    if n > x and n >= _underflow_order(x):
        return 0.0
    return sign * float(bessel_j_sequence(n, x)[n])


def bessel_j_prime(n: int, x: float) -> float:
    """dJ_n/dx via the recurrence J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2."""
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def bessel_j_asymptotic(n: int, big_r: float) -> tuple[float, float]:
    """Stationary-phase approximations of (J_n(R), J_n'(R)) for 0 <= n < R.

    With a = arccos(n / R) the approximations are

        J_n(R)  ~  sqrt(2 / (pi R sin a)) cos(R (sin a - a cos a) - pi/4)
        J_n'(R) ~ -sqrt(2 / (pi R sin a)) sin a sin(R (sin a - a cos a) - pi/4)

    and the error is O(1/R) as long as n / R stays away from 1.  Test oracle
    only; the evaluator never calls this.
    """
    if not 0 <= n < big_r:
        raise ValueError(f"need 0 <= n < R, got n={n}, R={big_r}")
    a = math.acos(n / big_r)
    amp = math.sqrt(2.0 / (math.pi * big_r * math.sin(a)))
    phase = big_r * (math.sin(a) - a * math.cos(a)) - 0.25 * math.pi
    return amp * math.cos(phase), -amp * math.sin(a) * math.sin(phase)
