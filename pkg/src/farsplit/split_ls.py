"""Least-squares far-field splitting and data completion.

Unknowns are a grid function supported on the unobserved arc Omega plus one
coefficient window per component.  The Galerkin conditions

    <beta + sum_i T*_{c_i} alpha_i, phi> = <gamma, phi>,
    phi in V_Omega + V_1 + ... + V_I,

turn into the Gram system of the concatenated orthonormal bases:

* V_Omega: indicator pulses at the grid points inside Omega, scaled to unit
  quadrature norm;
* V_i: translated Fourier modes e^{-i k c_i . theta} e^{i n t} / sqrt(2 pi),
  n = -N_i..N_i.

Diagonal blocks are identities, off-diagonal blocks are cross projections,
and the matrix is Hermitian positive semidefinite.  It is assembled densely
and solved directly; its 2-norm condition number is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .farfield import AngularGrid, ArcMask, CoeffWindow, FarField

_SQRT_2PI = math.sqrt(2.0 * math.pi)

#: systems with 2-norm condition number above this are refused
CONDITION_LIMIT = 1e12


class SingularSystemError(RuntimeError):
    """Raised when the assembled system is numerically singular."""

    def __init__(self, condition_number: float):
        super().__init__(
            f"system condition number {condition_number:.3e} exceeds "
            f"{CONDITION_LIMIT:.0e}"
        )
        self.condition_number = condition_number


@dataclass(frozen=True)
class SplitGeometry:
    """Centers, truncation orders, unobserved arc, grid, and wavenumber."""

    centers: tuple[tuple[float, float], ...]
    orders: tuple[int, ...] | None
    grid: AngularGrid
    k: float = 1.0
    omega: ArcMask | None = None

    def __post_init__(self) -> None:
        centers = tuple((float(x), float(y)) for x, y in self.centers)
        object.__setattr__(self, "centers", centers)
        if len(set(centers)) != len(centers):
            raise ValueError("degenerate geometry: duplicate centers")
        if self.orders is not None:
            orders = tuple(int(n) for n in self.orders)
            if len(orders) != len(centers):
                raise ValueError("orders and centers length mismatch")
            if any(n < 0 for n in orders):
                raise ValueError("orders must be nonnegative")
            object.__setattr__(self, "orders", orders)
        if self.k <= 0.0:
            raise ValueError("wavenumber must be positive")


@dataclass
class Diagnostics:
    method: str
    condition_number: float | None = None
    iterations: int | None = None
    objective: float | None = None
    trace: list[tuple[int, float, float]] | None = None


@dataclass
class SplitSolution:
    """Recovered per-component windows, the Omega part, and diagnostics.

    For the least-squares method `beta` is the Galerkin unknown, which
    approximates -(true field)|_Omega; for the l1 method `beta` is
    sum_i (T*_{c_i} alpha_i)|_Omega, approximating +(true field)|_Omega.
    """

    alphas: list[CoeffWindow]
    beta: FarField
    residual: float
    diagnostics: Diagnostics


def project_component(alpha: FarField, center, order: int, k: float = 1.0) -> FarField:
    """Orthogonal projection onto V = T*_c(span of modes |n| <= order)."""
    t = alpha.grid.angles
    cx, cy = float(center[0]), float(center[1])
    phase = np.exp(-1j * k * (cx * np.cos(t) + cy * np.sin(t)))
    shifted = FarField(alpha.grid, alpha.samples * np.conj(phase))
    m = alpha.grid.size
    idx = np.arange(-order, order + 1) % m
    coeffs = np.zeros(m, dtype=complex)
    coeffs[idx] = shifted.coeffs[idx]
    truncated = FarField.from_coeffs(alpha.grid, coeffs)
    return FarField(alpha.grid, truncated.samples * phase)


def project_mask(alpha: FarField, omega: ArcMask) -> FarField:
    """Orthogonal projection onto L2(Omega): zero the samples off Omega."""
    ind = omega.indicator(alpha.grid)
    return FarField(alpha.grid, np.where(ind, alpha.samples, 0.0))


class GalerkinSystem:
    """Assembled Gram matrix with the basis bookkeeping needed to solve."""

    def __init__(self, geometry: SplitGeometry, matrix: np.ndarray,
                 basis: np.ndarray, omega_indices: np.ndarray,
                 slices: list[slice]):
        self.geometry = geometry
        self.matrix = matrix
        self._basis = basis
        self.omega_indices = omega_indices
        self.slices = slices
        self._cond: float | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def condition_number(self) -> float:
        """2-norm condition number from the full SVD of the matrix."""
        if self._cond is None:
            s = np.linalg.svd(self.matrix, compute_uv=False)
            self._cond = float(s[0] / s[-1]) if s[-1] > 0.0 else math.inf
        return self._cond


def _component_rows(grid: AngularGrid, center, order: int, k: float) -> np.ndarray:
    t = grid.angles
    cx, cy = center
    phase = np.exp(-1j * k * (cx * np.cos(t) + cy * np.sin(t)))
    n = np.arange(-order, order + 1)
    return phase[None, :] * np.exp(1j * np.outer(n, t)) / _SQRT_2PI


def assemble(geometry: SplitGeometry) -> GalerkinSystem:
    """Build the Gram matrix of the joint basis for the given geometry."""
    if geometry.orders is None:
        raise ValueError("least-squares assembly requires truncation orders")
    grid = geometry.grid
    m = grid.size
    for n in geometry.orders:
        if n > m // 8:
            raise ValueError(f"order {n} too large for grid size {m} (max {m // 8})")

    if geometry.omega is not None:
        omega_idx = geometry.omega.grid_indices(grid)
        if geometry.omega.measure > 0.0 and omega_idx.size == 0:
            raise ValueError("omega contains no grid points")
    else:
        omega_idx = np.array([], dtype=int)

    rows: list[np.ndarray] = []
    slices: list[slice] = []
    pulses = np.zeros((omega_idx.size, m), dtype=complex)
    pulses[np.arange(omega_idx.size), omega_idx] = math.sqrt(m / (2.0 * math.pi))
    rows.append(pulses)
    pos = omega_idx.size
    for center, order in zip(geometry.centers, geometry.orders):
        block = _component_rows(grid, center, order, geometry.k)
        slices.append(slice(pos, pos + block.shape[0]))
        pos += block.shape[0]
        rows.append(block)
    basis = np.vstack(rows)
    w = grid.quadrature_weight()
    gram = w * (basis.conj() @ basis.T)
    return GalerkinSystem(geometry, gram, basis, omega_idx, slices)


def solve(system: GalerkinSystem, gamma: FarField) -> SplitSolution:
    """Galerkin solution (beta, alpha_1, ..., alpha_I) for the observed gamma.

    beta + sum_i T*_{c_i} alpha_i equals the orthogonal projection of gamma
    onto V_Omega + V_1 + ... + V_I; the reported residual is the L2 norm of
    gamma minus that projection.
    """
    geometry = system.geometry
    if gamma.grid != geometry.grid:
        raise ValueError("gamma lives on a different grid")
    cond = system.condition_number
    if not cond < CONDITION_LIMIT:
        raise SingularSystemError(cond)

    w = geometry.grid.quadrature_weight()
    rhs = w * (system._basis.conj() @ gamma.samples)
    x = np.linalg.solve(system.matrix, rhs)

    n_pulse = system.omega_indices.size
    beta_samples = np.zeros(geometry.grid.size, dtype=complex)
    beta_samples[system.omega_indices] = x[:n_pulse] * math.sqrt(
        geometry.grid.size / (2.0 * math.pi)
    )
    beta = FarField(geometry.grid, beta_samples)

    alphas = [
        CoeffWindow(order, x[sl])
        for order, sl in zip(geometry.orders, system.slices)
    ]
    model = system._basis.T @ x
    residual = math.sqrt(w * float(np.sum(np.abs(gamma.samples - model) ** 2)))
    return SplitSolution(
        alphas=alphas,
        beta=beta,
        residual=residual,
        diagnostics=Diagnostics(method="ls", condition_number=cond),
    )


@dataclass(frozen=True)
class ConditioningReport:
    cos_angle: float
    csc_angle: float
    bound_csc: float | None

    @property
    def bound_feasible(self) -> bool:
        return self.bound_csc is not None


def subspace_conditioning(c1, n1: int, c2, n2: int, k: float,
                          grid: AngularGrid) -> ConditioningReport:
    """Angle between the translated coefficient subspaces of two components.

    cos theta is the largest singular value of the cross Gram block between
    the orthonormal bases of V_1 and V_2; csc theta is the absolute condition
    number of the splitting map.  bound_csc is
    (1 - (2N1+1)(2N2+1) / (k |c1-c2|))^(-1/2), or None when the smallness
    condition fails.
    """
    c1 = (float(c1[0]), float(c1[1]))
    c2 = (float(c2[0]), float(c2[1]))
    if c1 == c2:
        raise ValueError("centers must differ")
    b1 = _component_rows(grid, c1, n1, k)
    b2 = _component_rows(grid, c2, n2, k)
    cross = grid.quadrature_weight() * (b1.conj() @ b2.T)
    cos_angle = float(np.linalg.svd(cross, compute_uv=False)[0])
    cos_angle = min(cos_angle, 1.0)
    csc_angle = 1.0 / math.sqrt(1.0 - cos_angle**2) if cos_angle < 1.0 else math.inf
    dist = k * math.hypot(c1[0] - c2[0], c1[1] - c2[1])
    q = (2 * n1 + 1) * (2 * n2 + 1) / dist
    bound = 1.0 / math.sqrt(1.0 - q) if q < 1.0 else None
    return ConditioningReport(cos_angle=cos_angle, csc_angle=csc_angle, bound_csc=bound)


def completed_farfield(solution: SplitSolution, gamma: FarField,
                       omega: ArcMask) -> FarField:
    """Merge the observed data with the restored missing segment.

    On the complement of Omega the completed field is gamma itself; on Omega
    it is -beta for the least-squares solution (whose beta approximates the
    negated missing segment) and +beta for the l1 solution.
    """
    ind = omega.indicator(gamma.grid)
    sign = -1.0 if solution.diagnostics.method == "ls" else 1.0
    merged = np.where(ind, sign * solution.beta.samples, gamma.samples)
    return FarField(gamma.grid, merged)
