"""Far fields on the unit circle with dual sample / Fourier representations.

Conventions (fixed once, used everywhere):

* grid points t_j = 2 pi j / M, direction theta_j = (cos t_j, sin t_j);
* analysis   a_n = (1/sqrt(2 pi)) int a(t) e^{-i n t} dt,
  synthesis   a(t) = sum_n a_n e^{+i n t} / sqrt(2 pi),
  so that sum |a_n|^2 equals the squared L2(S^1) norm (Parseval, exact on the
  grid with trapezoid quadrature);
* coefficients live on the symmetric window n in (-M/2, M/2], stored in FFT
  bin order internally;
* the translation operator is multiplication in sample space,
  (T_c a)(theta) = e^{i k c . theta} a(theta).  On coefficients it acts as
  convolution with i^n J_n(k|c|) e^{-i n phi_c}; the sample-space form is the
  ground truth and the convolution kernel is calibrated against it.

FarField values are immutable; every operation returns a new value.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .bessel import bessel_j_sequence

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AngularGrid:
    """Equispaced grid of M points on the unit circle, M even and >= 4."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 4 or self.size % 2:
            raise ValueError(f"grid size must be even and >= 4, got {self.size}")

    @cached_property
    def angles(self) -> np.ndarray:
        t = 2.0 * math.pi * np.arange(self.size) / self.size
        t.flags.writeable = False
        return t

    @cached_property
    def fft_orders(self) -> np.ndarray:
        """Fourier order of each FFT bin; the Nyquist bin is labelled +M/2."""
        m = self.size
        n = np.arange(m)
        n = np.where(n <= m // 2, n, n - m)
        n.flags.writeable = False
        return n

    def quadrature_weight(self) -> float:
        return 2.0 * math.pi / self.size


@dataclass(frozen=True)
class CoeffWindow:
    """Fourier coefficients on the symmetric window n = -N..N."""

    order: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (2 * self.order + 1,):
            raise ValueError(
                f"window of order {self.order} needs {2 * self.order + 1} values, "
                f"got shape {values.shape}"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def coeffs_from_samples(samples: np.ndarray, grid: AngularGrid) -> np.ndarray:
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} samples, got shape {samples.shape}")
    return np.fft.fft(samples) * (_SQRT_2PI / grid.size)


def samples_from_coeffs(coeffs: np.ndarray, grid: AngularGrid) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} coefficients, got shape {coeffs.shape}")
    return np.fft.ifft(coeffs) * (grid.size / _SQRT_2PI)


class FarField:
    """Immutable far field holding consistent samples and Fourier coefficients.

    Samples are authoritative; coefficients are always the deterministic FFT
    of the samples, so equal samples imply bit-equal coefficients.
    """

    __slots__ = ("grid", "samples", "coeffs")

    def __init__(self, grid: AngularGrid, samples: np.ndarray):
        samples = np.asarray(samples, dtype=complex).copy()
        if samples.shape != (grid.size,):
            raise ValueError(f"expected {grid.size} samples, got shape {samples.shape}")
        coeffs = coeffs_from_samples(samples, grid)
        samples.flags.writeable = False
        coeffs.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("FarField is immutable")

    @classmethod
    def from_samples(cls, grid: AngularGrid, samples: np.ndarray) -> "FarField":
        return cls(grid, samples)

    @classmethod
    def from_coeffs(cls, grid: AngularGrid, coeffs: np.ndarray) -> "FarField":
        return cls(grid, samples_from_coeffs(np.asarray(coeffs, complex), grid))

    @classmethod
    def from_window(cls, grid: AngularGrid, window: CoeffWindow | np.ndarray,
                    order: int | None = None) -> "FarField":
        if not isinstance(window, CoeffWindow):
            if order is None:
                order = (len(window) - 1) // 2
            window = CoeffWindow(order, np.asarray(window))
        if 2 * window.order >= grid.size:
            raise ValueError("window does not fit on the grid")
        coeffs = np.zeros(grid.size, dtype=complex)
        coeffs[window.orders % grid.size] = window.values
        return cls.from_coeffs(grid, coeffs)

    @classmethod
    def zero(cls, grid: AngularGrid) -> "FarField":
        return cls(grid, np.zeros(grid.size, dtype=complex))

    def coeff(self, n: int) -> complex:
        m = self.grid.size
        if not -m // 2 < n <= m // 2:
            raise ValueError(f"order {n} outside the grid window")
        return complex(self.coeffs[n % m])

    def coeff_window(self, order: int) -> CoeffWindow:
        m = self.grid.size
        if 2 * order >= m:
            raise ValueError("window does not fit on the grid")
        idx = np.arange(-order, order + 1) % m
        return CoeffWindow(order, self.coeffs[idx])

    def norm(self) -> float:
        """L2(S^1) norm, equal to the l2 norm of the coefficients."""
        w = self.grid.quadrature_weight()
        return math.sqrt(w * float(np.sum(np.abs(self.samples) ** 2)))

    def __add__(self, other: "FarField") -> "FarField":
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        return FarField(self.grid, self.samples + other.samples)

    def __sub__(self, other: "FarField") -> "FarField":
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        return FarField(self.grid, self.samples - other.samples)

    def __mul__(self, scalar: complex) -> "FarField":
        return FarField(self.grid, self.samples * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FarField(M={self.grid.size}, norm={self.norm():.6g})"


def inner(alpha: FarField, beta: FarField) -> complex:
    """L2(S^1) inner product <alpha, beta> by trapezoid quadrature."""
    if alpha.grid != beta.grid:
        raise ValueError("grid mismatch")
    w = alpha.grid.quadrature_weight()
    return complex(w * np.sum(alpha.samples * np.conj(beta.samples)))


def translation_kernel(c: Sequence[float], k: float = 1.0,
                       tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray]:
    """Convolution kernel of T_c on Fourier coefficients.

    Returns (orders, values) with values[n] = i^n J_n(k|c|) e^{-i n phi_c},
    truncated where |J_n(k|c|)| drops below tol.
    """
    cx, cy = float(c[0]), float(c[1])
    r = k * math.hypot(cx, cy)
    phi = math.atan2(cy, cx)
    if r == 0.0:
        return np.array([0]), np.array([1.0 + 0.0j])
    kmax = max(8, math.ceil(r) + max(40, math.ceil(1.5 * r ** (1.0 / 3.0))))
    j = bessel_j_sequence(kmax, r)
    for _ in range(4):
        if abs(j[-1]) < tol:
            break
        kmax *= 2
        j = bessel_j_sequence(kmax, r)
    keep = kmax
    while keep > 1 and abs(j[keep]) < tol:
        keep -= 1
    orders = np.arange(-keep, keep + 1)
    jn = np.concatenate([j[keep:0:-1] * (-1.0) ** np.arange(keep, 0, -1), j[: keep + 1]])
    values = (1j**orders) * jn * np.exp(-1j * orders * phi)
    return orders, values


def translate(alpha: FarField, c: Sequence[float], k: float = 1.0) -> FarField:
    """T_c alpha: multiply the samples by e^{i k c . theta}.  Unitary."""
    t = alpha.grid.angles
    phase = np.exp(1j * k * (c[0] * np.cos(t) + c[1] * np.sin(t)))
    return FarField(alpha.grid, alpha.samples * phase)


def translate_via_coefficients(alpha: FarField, c: Sequence[float],
                               k: float = 1.0) -> FarField:
    """T_c alpha through the coefficient convolution (oracle route).

    Must agree with :func:`translate` whenever the coefficient content of
    alpha plus the kernel width fits inside the grid window.
    """
    orders, kernel = translation_kernel(c, k)
    m = alpha.grid.size
    out = np.zeros(m, dtype=complex)
    shifted = np.empty(m, dtype=complex)
    idx = np.arange(m)
    for n, w in zip(orders, kernel):
        shifted[:] = alpha.coeffs[(idx - n) % m]
        out += w * shifted
    return FarField.from_coeffs(alpha.grid, out)


def lp_norm(alpha: FarField, p: float, representation: str = "coeffs",
            tol: float = 1e-8) -> float:
    """Norms of the two representations of the same function.

    representation="coeffs" gives the sequence norms l^p (p = 0 counts the
    support); representation="samples" gives the L^p(S^1) quadrature norms
    (p = 0 returns the measure of the support in radians).
    """
    if representation == "coeffs":
        a = np.abs(alpha.coeffs)
        if p == 0:
            peak = a.max()
            return 0.0 if peak == 0.0 else float(np.count_nonzero(a > tol * peak))
        if p == math.inf:
            return float(a.max())
        if p < 1:
            raise ValueError(f"unsupported exponent {p}")
        return float(np.sum(a**p) ** (1.0 / p))
    if representation == "samples":
        a = np.abs(alpha.samples)
        w = alpha.grid.quadrature_weight()
        if p == 0:
            peak = a.max()
            return 0.0 if peak == 0.0 else w * float(np.count_nonzero(a > tol * peak))
        if p == math.inf:
            return float(a.max())
        if p < 1:
            raise ValueError(f"unsupported exponent {p}")
        return float((w * np.sum(a**p)) ** (1.0 / p))
    raise ValueError(f"unknown representation {representation!r}")


def l0_support(alpha: FarField, tol: float = 1e-8) -> np.ndarray:
    """Fourier orders whose coefficient magnitude exceeds tol * max magnitude."""
    a = np.abs(alpha.coeffs)
    peak = a.max()
    if peak == 0.0:
        return np.array([], dtype=int)
    orders = alpha.grid.fft_orders[a > tol * peak]
    return np.sort(orders)


@dataclass(frozen=True)
class ArcMask:
    """Finite union of half-open arcs [start, end) on [0, 2 pi).

    Arcs are normalized on construction: endpoints wrapped into [0, 2 pi),
    wrap-around arcs split, overlaps merged.  A full circle is represented
    as the single arc (0, 2 pi).
    """

    arcs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", _normalize_arcs(self.arcs))

    @classmethod
    def empty(cls) -> "ArcMask":
        return cls(())

    @classmethod
    def full_circle(cls) -> "ArcMask":
        return cls(((0.0, 2.0 * math.pi),))

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.arcs)

    def contains(self, t: np.ndarray | float) -> np.ndarray | bool:
        t = np.mod(t, 2.0 * math.pi)
        out = np.zeros(np.shape(t), dtype=bool)
        for a, b in self.arcs:
            out |= (t >= a) & (t < b)
        return out if out.shape else bool(out)

    def indicator(self, grid: AngularGrid) -> np.ndarray:
        return np.asarray(self.contains(grid.angles))

    def grid_indices(self, grid: AngularGrid) -> np.ndarray:
        return np.nonzero(self.indicator(grid))[0]

    def grid_measure(self, grid: AngularGrid) -> float:
        """Quadrature measure of the masked grid points, (2 pi / M) * count."""
        return grid.quadrature_weight() * int(self.indicator(grid).sum())


def _normalize_arcs(arcs: Iterable[Sequence[float]]) -> tuple[tuple[float, float], ...]:
    two_pi = 2.0 * math.pi
    pieces: list[tuple[float, float]] = []
    for arc in arcs:
        a, b = float(arc[0]), float(arc[1])
        if b - a >= two_pi:
            return ((0.0, two_pi),)
        if b <= a:
            continue
        a_mod = a % two_pi
        b_mod = a_mod + (b - a)
        if b_mod <= two_pi:
            pieces.append((a_mod, b_mod))
        else:
            pieces.append((a_mod, two_pi))
            pieces.append((0.0, b_mod - two_pi))
    pieces.sort()
    merged: list[tuple[float, float]] = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return tuple(merged)


def restrict(alpha: FarField, omega: ArcMask, keep: str = "inside") -> FarField:
    """Zero the samples outside (keep="inside") or inside (keep="outside") Omega."""
    ind = omega.indicator(alpha.grid)
    if keep == "inside":
        sel = ind
    elif keep == "outside":
        sel = ~ind
    else:
        raise ValueError(f"keep must be 'inside' or 'outside', got {keep!r}")
    return FarField(alpha.grid, np.where(sel, alpha.samples, 0.0))


# ---------------------------------------------------------------------------
# serialization: CSV (t, Re, Im) and a JSON document.  Samples are the
# authoritative representation on read; coefficients are recomputed with the
# same deterministic FFT, so round trips are bit-identical for finite values.
# ---------------------------------------------------------------------------

def field_to_csv(alpha: FarField, path) -> None:
    with open(path, "w", newline="") as fh:
        _write_csv(alpha, fh)


def _write_csv(alpha: FarField, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "Re", "Im"])
    for t, v in zip(alpha.grid.angles, alpha.samples):
        writer.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def field_to_csv_string(alpha: FarField) -> str:
    buf = io.StringIO()
    _write_csv(alpha, buf)
    return buf.getvalue()


def field_from_csv(path) -> FarField:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["t", "Re", "Im"]:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [(float(r[1]), float(r[2])) for r in reader]
    grid = AngularGrid(len(rows))
    samples = np.array([re + 1j * im for re, im in rows])
    return FarField(grid, samples)


def field_to_json_dict(alpha: FarField, k: float | None = None) -> dict:
    doc = {
        "grid_size": alpha.grid.size,
        "k": k,
        "samples": {
            "re": [float(v) for v in alpha.samples.real],
            "im": [float(v) for v in alpha.samples.imag],
        },
        "coefficients": {
            "orders": [int(n) for n in alpha.grid.fft_orders],
            "re": [float(v) for v in alpha.coeffs.real],
            "im": [float(v) for v in alpha.coeffs.imag],
        },
    }
    return doc


def field_to_json(alpha: FarField, path, k: float | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(field_to_json_dict(alpha, k), fh, indent=1)
        fh.write("\n")


def field_from_json_dict(doc: dict) -> FarField:
    grid = AngularGrid(int(doc["grid_size"]))
    re = np.asarray(doc["samples"]["re"], dtype=float)
    im = np.asarray(doc["samples"]["im"], dtype=float)
    return FarField(grid, re + 1j * im)


def field_from_json(path) -> FarField:
    with open(path) as fh:
        return field_from_json_dict(json.load(fh))
