"""Spectrum of the restricted source-to-far-field map on a ball of radius R.

The squared singular values

    s_n^2(R) = 2 pi int_0^R J_n(r)^2 r dr
             = pi ((R J_n'(R))^2 + (R^2 - n^2) J_n(R)^2)

are evaluated through the closed form on the right.  They sum to pi R^2,
decay super-exponentially once |n| >= R, and cluster near the asymptote
2 sqrt(R^2 - n^2) for |n| < R.  A receiver with power threshold p listening
to a source of power at most P only sees the Fourier modes up to the index
returned by :func:`picard_threshold`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_sequence

_GAMMA_TWO_THIRDS = math.gamma(2.0 / 3.0)


@dataclass(frozen=True)
class PowerBudget:
    """Source power bound P and receiver power threshold p (both squared norms)."""

    P: float
    p: float

    def __post_init__(self) -> None:
        if self.P <= 0.0 or self.p <= 0.0:
            raise ValueError("power budget requires P > 0 and p > 0")

    @property
    def ratio(self) -> float:
        return self.p / self.P


@dataclass(frozen=True)
class PicardSpectrum:
    """Table of s_n^2(R) for n = 0..n_max; negative orders by symmetry."""

    R: float
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> float:
        return float(self.values[abs(n)])

    def partial_sum(self) -> float:
        """2 sum_{n>=1} s_n^2 + s_0^2, which tends to pi R^2."""
        return float(self.values[0] + 2.0 * self.values[1:].sum())

    def tail_bound(self) -> float:
        """Upper bound on sum_{n > n_max} s_n^2 from the decay estimate.

        Only valid when the table extends past the radius; the decay is
        super-exponential, so 120 explicit terms exhaust it to double
        precision.
        """
        start = max(self.n_max + 1, math.ceil(self.R))
        return sum(decay_bound(n, self.R) for n in range(start, start + 120))


def _sn2_from_bessel(n: np.ndarray, R: float, jn: np.ndarray,
                     jm: np.ndarray, jp: np.ndarray) -> np.ndarray:
    dj = 0.5 * (jm - jp)
    return math.pi * ((R * dj) ** 2 + (R * R - n * n) * jn**2)


def _sn2_values(R: float, n_max: int) -> np.ndarray:
    seq = bessel_j_sequence(n_max + 1, R)
    n = np.arange(n_max + 1)
    jn = seq[:-1]
    jp = seq[1:]
    jm = np.empty_like(jn)
    jm[0] = -seq[1]  # J_{-1} = -J_1
    jm[1:] = seq[:-2]
    return _sn2_from_bessel(n, R, jn, jm, jp)


def squared_singular_value(n: int, R: float) -> float:
    """s_n^2(R) = pi ((R J_n'(R))^2 + (R^2 - n^2) J_n(R)^2)."""
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    n = abs(int(n))
    seq = bessel_j_sequence(n + 1, R)
    jn = seq[n]
    jp = seq[n + 1]
    jm = seq[n - 1] if n >= 1 else -seq[1]
    dj = 0.5 * (jm - jp)
    return math.pi * ((R * dj) ** 2 + (R * R - n * n) * jn * jn)


def default_n_max(R: float) -> int:
    """Truncation order past which the omitted spectral tail is < 1e-12 of pi R^2."""
    return math.ceil(3.0 * R) + 50


def spectrum(R: float, n_max: int | None = None) -> PicardSpectrum:
    """Table of s_n^2(R) for n = 0..n_max (default n_max = ceil(3R) + 50)."""
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    if n_max is None:
        n_max = default_n_max(R)
    if n_max < math.ceil(R):
        raise ValueError(f"n_max must be at least ceil(R) = {math.ceil(R)}")
    values = _sn2_values(R, n_max)
    values.flags.writeable = False
    return PicardSpectrum(R=R, values=values)


def decay_bound(n: int, R: float) -> float:
    """Upper bound on s_n^2(R), valid for |n| >= R:

        pi 2^(2/3) n^(2/3) / (3^(4/3) Gamma(2/3)^2)
            * ((n + 1/2)/n)^(n+1) * (R^2/n^2 e^(1 - R^2/n^2))^n * R^2/n^2
    """
    n = abs(int(n))
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    if n < R:
        raise ValueError(f"decay bound requires |n| >= R, got n={n}, R={R}")
    front = math.pi * 2.0 ** (2.0 / 3.0) * n ** (2.0 / 3.0) / (
        3.0 ** (4.0 / 3.0) * _GAMMA_TWO_THIRDS**2
    )
    rho = (R / n) ** 2
    log_mid = (n + 1) * math.log1p(0.5 / n)
    log_main = n * (math.log(rho) + 1.0 - rho)
    log_total = log_mid + log_main + math.log(rho)
    if log_total < -745.0:
        return 0.0
    return front * math.exp(log_total)


def asymptote(nu: float) -> float:
    """Large-R limit of s_{ceil(nu R)}^2(R) / (2R): sqrt(1 - nu^2) for nu <= 1, else 0."""
    if nu < 0.0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    return math.sqrt(1.0 - nu * nu) if nu <= 1.0 else 0.0


def picard_threshold(R: float, budget: PowerBudget) -> int | None:
    """Largest n >= 0 with s_n^2(R) >= 2 pi p / P, or None if no mode qualifies.

    The even- and odd-indexed subsequences of s_n^2(R) are each non-increasing
    in n >= 0, so the scan stops once both parities have dropped below the
    threshold.  None means no detectable mode, not a fault.
    """
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    thr = 2.0 * math.pi * budget.ratio
    best: int | None = None
    even_dead = odd_dead = False
    limit = default_n_max(R) + 200
    values = _sn2_values(R, min(limit, 256))
    n = 0
    while not (even_dead and odd_dead):
        if n > limit:
            break
        if n >= len(values):
            values = _sn2_values(R, min(limit, 2 * len(values)))
        s = values[n]
        if s >= thr:
            best = n
        elif n % 2 == 0:
            even_dead = True
        else:
            odd_dead = True
        n += 1
    return best


def default_truncation_order(radius: float, k: float = 1.0) -> int:
    """Default non-evanescent order for a ball of the given radius: ceil((e/2) k R)."""
    if radius < 0.0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if radius == 0.0:
        return 0
    return math.ceil(0.5 * math.e * k * radius)
