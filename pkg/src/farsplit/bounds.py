"""Closed-form stability constants and uncertainty-inequality verification.

Every supported estimate is identified by a :class:`TheoremId`.  Given the
geometry (centers, truncation orders or support counts, missing-arc measure,
wavenumber), :func:`evaluate_bound` checks the estimate's smallness
hypotheses and evaluates its stability constant directly from the closed
form; nothing is clamped silently.  Distances always enter in
wavelength-scaled form k |c_i - c_j|, so evaluating at (k, c) and at
(1, k c) gives identical reports.

The three uncertainty inequalities behind the estimates can be stress-tested
on randomized instances with :func:`verify_uncertainty`, and the Bessel
amplitude bound r J_n(r)^2 <= 0.7595 underlying the band-limited inequality
with :func:`krasikov_check`.

Two estimates carry deliberately asymmetric forms, flagged in the report
notes:

* the multi-component completion estimate sums sqrt((2 N_i + 1) / |c_i-c_j|)
  with the *target* order N_i inside the sum, and
* the weighted completion estimate adds (instead of subtracting) its
  missing-arc term in the denominator, which can push the "constant" below
  one.  Set ``conservative=True`` to subtract both deductions instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .bessel import bessel_j_grid
from .farfield import AngularGrid, ArcMask, FarField, inner, translate
from .split_l1 import component_weights

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class TheoremId(Enum):
    U_L0 = "U_l0"
    U_BAND = "U_band"
    U_MIXED = "U_mixed"
    LS_TWO = "LS_two"
    LS_COMPLETE = "LS_complete"
    LS_MULTI = "LS_multi"
    LS_COMPLETE_MULTI = "LS_complete_multi"
    L1_TWO = "L1_two"
    L1_TWO_BAND = "L1_two_band"
    L1_TWO_BAND_APRIORI = "L1_two_band_apriori"
    L1_COMPLETE = "L1_complete"
    L1_COMPLETE_UNKNOWN_OMEGA = "L1_complete_unknown_omega"
    L1_MULTI = "L1_multi"
    L1_MULTI_BAND = "L1_multi_band"
    L1_MULTI_WEIGHTED = "L1_multi_weighted"
    L1_MULTI_WEIGHTED_BAND = "L1_multi_weighted_band"
    L1_COMPLETE_MULTI_WEIGHTED = "L1_complete_multi_weighted"
    L1_COMPLETE_MULTI_WEIGHTED_BAND = "L1_complete_multi_weighted_band"
    COND_TWO = "COND_two"
    COND_POINT = "COND_point"
    COND_MUSIC = "COND_music"


#: theorems whose right-hand side multiplies 4 delta^2
_L1_FAMILY = {
    TheoremId.L1_TWO,
    TheoremId.L1_TWO_BAND,
    TheoremId.L1_TWO_BAND_APRIORI,
    TheoremId.L1_COMPLETE,
    TheoremId.L1_COMPLETE_UNKNOWN_OMEGA,
    TheoremId.L1_MULTI,
    TheoremId.L1_MULTI_BAND,
    TheoremId.L1_MULTI_WEIGHTED,
    TheoremId.L1_MULTI_WEIGHTED_BAND,
    TheoremId.L1_COMPLETE_MULTI_WEIGHTED,
    TheoremId.L1_COMPLETE_MULTI_WEIGHTED_BAND,
}

#: theorems whose right-hand side multiplies ||gamma^1 - gamma^0||^2
_LS_FAMILY = {
    TheoremId.LS_TWO,
    TheoremId.LS_COMPLETE,
    TheoremId.LS_MULTI,
    TheoremId.LS_COMPLETE_MULTI,
}


@dataclass(frozen=True)
class BoundGeometry:
    """Problem geometry; only the fields a given theorem needs are required."""

    k: float = 1.0
    centers: tuple[tuple[float, float], ...] = ()
    orders: tuple[int, ...] | None = None
    sparsities: tuple[int, ...] | None = None
    omega_measure: float | None = None

    def __post_init__(self) -> None:
        if self.k <= 0.0:
            raise ValueError("wavenumber must be positive")
        object.__setattr__(
            self, "centers", tuple((float(x), float(y)) for x, y in self.centers)
        )
        if self.orders is not None:
            object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if self.sparsities is not None:
            object.__setattr__(
                self, "sparsities", tuple(int(s) for s in self.sparsities)
            )


@dataclass(frozen=True)
class BoundData:
    delta: float | None = None
    gamma_diff: float | None = None
    tau: float | None = None


@dataclass
class BoundReport:
    theorem: TheoremId
    hypotheses_ok: bool
    hypotheses: dict[str, bool]
    constant: float
    rhs: float
    per_component: tuple[float, ...] | None = None
    beta_constant: float | None = None
    notes: str = ""
    inputs: dict = field(default_factory=dict)


def _distances(geometry: BoundGeometry) -> np.ndarray:
    c = np.asarray(geometry.centers, dtype=float)
    if c.size == 0:
        return np.zeros((0, 0))
    diff = c[:, None, :] - c[None, :, :]
    return geometry.k * np.sqrt((diff**2).sum(axis=2))


def _need(cond: bool, what: str) -> None:
    if not cond:
        raise ValueError(f"selected theorem requires {what}")


def _separations_ok(dist: np.ndarray, orders: Sequence[int]) -> bool:
    n = len(orders)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= 2.0 * (orders[i] + orders[j] + 1):
                return False
    return True


def evaluate_bound(theorem: TheoremId, geometry: BoundGeometry,
                   data: BoundData | None = None, *,
                   weight_variant: str = "pairwise",
                   conservative: bool = False) -> BoundReport:
    """Evaluate a theorem's hypotheses and stability constant.

    Infeasible hypotheses are reported with the violated condition named and
    constant/right-hand side set to infinity.  For the weighted completion
    estimates, `conservative=True` subtracts both denominator deductions
    instead of following the printed sign.
    """
    data = data or BoundData()
    dist = _distances(geometry)
    orders = geometry.orders
    spars = geometry.sparsities
    omega = geometry.omega_measure
    hyp: dict[str, bool] = {}
    per: tuple[float, ...] | None = None
    beta_constant: float | None = None
    notes = ""

    def inv(q: float) -> float:
        return 1.0 / (1.0 - q) if q < 1.0 else math.inf

    if theorem is TheoremId.U_L0:
        _need(spars is not None and len(spars) >= 2, "two support counts")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        hyp["positive_distance"] = d > 0.0
        constant = (
            math.sqrt(spars[0] * spars[1]) / d ** (1.0 / 3.0)
            if d > 0.0 else math.inf
        )

    elif theorem is TheoremId.U_BAND:
        _need(orders is not None and len(orders) >= 2, "two band limits")
        _need(len(geometry.centers) >= 2, "two centers")
        m_ord, n_ord = orders[0], orders[1]
        d = dist[0, 1]
        hyp["band_limits_at_least_one"] = m_ord >= 1 and n_ord >= 1
        hyp["separation"] = d > 2.0 * (m_ord + n_ord + 1)
        constant = (
            math.sqrt((2 * m_ord + 1) * (2 * n_ord + 1)) / math.sqrt(d)
            if d > 0.0 else math.inf
        )

    elif theorem is TheoremId.U_MIXED:
        _need(spars is not None and len(spars) >= 1, "a support count")
        _need(omega is not None, "an arc measure")
        constant = math.sqrt(spars[0] * omega / (2.0 * math.pi))

    elif theorem is TheoremId.LS_TWO:
        _need(orders is not None and len(orders) >= 2, "two truncation orders")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        q = (2 * orders[0] + 1) * (2 * orders[1] + 1) / d if d > 0 else math.inf
        hyp["separation"] = d > 2.0 * (orders[0] + orders[1] + 1)
        hyp["smallness"] = q < 1.0
        constant = inv(q)

    elif theorem is TheoremId.LS_COMPLETE:
        _need(orders is not None and len(orders) >= 1, "a truncation order")
        _need(omega is not None, "an arc measure")
        q = (2 * orders[0] + 1) * omega / (2.0 * math.pi)
        hyp["smallness"] = q < 1.0
        constant = inv(q)

    elif theorem is TheoremId.LS_MULTI:
        _need(orders is not None and len(orders) == len(geometry.centers),
              "one order per center")
        _need(len(geometry.centers) >= 2, "at least two centers")
        hyp["separation"] = _separations_ok(dist, orders)
        qs = []
        for i in range(len(orders)):
            q = math.sqrt(2 * orders[i] + 1) * sum(
                math.sqrt((2 * orders[j] + 1) / dist[i, j])
                for j in range(len(orders)) if j != i
            )
            qs.append(q)
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        per = tuple(inv(q) for q in qs)
        constant = max(per)

    elif theorem is TheoremId.LS_COMPLETE_MULTI:
        _need(orders is not None and len(orders) == len(geometry.centers),
              "one order per center")
        _need(omega is not None, "an arc measure")
        _need(len(geometry.centers) >= 1, "at least one center")
        root_omega = math.sqrt(omega / (2.0 * math.pi))
        hyp["separation"] = _separations_ok(dist, orders)
        q_beta = root_omega * sum(math.sqrt(2 * n + 1) for n in orders)
        qs = []
        for i, n in enumerate(orders):
            # non-symmetric form: the inner sum carries the target order
            cross = sum(
                math.sqrt((2 * n + 1) / dist[i, j])
                for j in range(len(orders)) if j != i
            )
            qs.append(math.sqrt(2 * n + 1) * (root_omega + cross))
        hyp["smallness_beta"] = q_beta < 1.0
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        beta_constant = inv(q_beta)
        per = tuple(inv(q) for q in qs)
        constant = max((*per, beta_constant))
        notes = "inner sum uses the target order (non-symmetric form)"

    elif theorem is TheoremId.L1_TWO:
        _need(spars is not None and len(spars) >= 2, "two support counts")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        qs = [4.0 * s / d ** (1.0 / 3.0) if d > 0 else math.inf for s in spars[:2]]
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        per = tuple(inv(q) for q in qs)
        constant = max(per)

    elif theorem is TheoremId.L1_TWO_BAND:
        _need(spars is not None and len(spars) >= 2, "two support counts")
        _need(orders is not None and len(orders) >= 2, "two band limits")
        d = dist[0, 1]
        hyp["separation"] = d > 2.0 * (orders[0] + orders[1] + 1)
        qs = [4.0 * s / math.sqrt(d) if d > 0 else math.inf for s in spars[:2]]
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        per = tuple(inv(q) for q in qs)
        constant = max(per)

    elif theorem is TheoremId.L1_TWO_BAND_APRIORI:
        _need(orders is not None and len(orders) >= 2, "two truncation orders")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        hyp["separation"] = d > 2.0 * (orders[0] + orders[1] + 1)
        q = (2 * orders[0] + 1) * (2 * orders[1] + 1) / d if d > 0 else math.inf
        hyp["smallness"] = q < 1.0
        constant = inv(q)

    elif theorem is TheoremId.L1_COMPLETE:
        _need(spars is not None and len(spars) >= 1, "a support count")
        _need(omega is not None, "an arc measure")
        q = 2.0 * spars[0] * omega / math.pi
        hyp["smallness"] = q < 1.0
        constant = inv(q)

    elif theorem is TheoremId.L1_COMPLETE_UNKNOWN_OMEGA:
        _need(spars is not None and len(spars) >= 1, "a support count")
        _need(omega is not None, "an arc measure")
        _need(data.tau is not None and data.tau > 0.0, "a positive tau")
        tau = data.tau
        q_alpha = 4.0 / _SQRT_2PI * spars[0] / tau**2
        q_beta = 4.0 / _SQRT_2PI * tau**2 * omega
        hyp["smallness_alpha"] = q_alpha < 1.0
        hyp["smallness_beta"] = q_beta < 1.0
        beta_constant = inv(q_beta)
        per = (inv(q_alpha),)
        constant = max(per[0], beta_constant)

    elif theorem in (TheoremId.L1_MULTI, TheoremId.L1_MULTI_BAND):
        _need(spars is not None and len(spars) == len(geometry.centers),
              "one support count per center")
        _need(len(geometry.centers) >= 2, "at least two centers")
        count = len(geometry.centers)
        expo = 1.0 / 3.0 if theorem is TheoremId.L1_MULTI else 0.5
        if theorem is TheoremId.L1_MULTI_BAND:
            _need(orders is not None and len(orders) == count,
                  "one band limit per center")
            hyp["separation"] = _separations_ok(dist, orders)
        off = dist[~np.eye(count, dtype=bool)]
        worst = float((1.0 / off**expo).max()) if off.size else 0.0
        qs = [4.0 * (count - 1) * s * worst for s in spars]
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        per = tuple(inv(q) for q in qs)
        constant = max(per)

    elif theorem in (TheoremId.L1_MULTI_WEIGHTED, TheoremId.L1_MULTI_WEIGHTED_BAND):
        _need(spars is not None and len(spars) == len(geometry.centers),
              "one support count per center")
        _need(len(geometry.centers) >= 2, "at least two centers")
        count = len(geometry.centers)
        expo = 1.0 / 3.0 if theorem is TheoremId.L1_MULTI_WEIGHTED else 0.5
        if theorem is TheoremId.L1_MULTI_WEIGHTED_BAND:
            _need(orders is not None and len(orders) == count,
                  "one band limit per center")
            hyp["separation"] = _separations_ok(dist, orders)
        a = component_weights(geometry.centers, geometry.k, weight_variant, expo)
        qs = [4.0 * (count - 1) * a[i] ** 2 * spars[i] for i in range(count)]
        hyp["smallness_each"] = all(q < 1.0 for q in qs)
        per = tuple(inv(q) for q in qs)
        constant = max(per)
        notes = f"weights variant: {weight_variant}"

    elif theorem in (TheoremId.L1_COMPLETE_MULTI_WEIGHTED,
                     TheoremId.L1_COMPLETE_MULTI_WEIGHTED_BAND):
        _need(spars is not None and len(spars) == len(geometry.centers),
              "one support count per center")
        _need(omega is not None, "an arc measure")
        _need(len(geometry.centers) >= 2, "at least two centers")
        count = len(geometry.centers)
        expo = (1.0 / 3.0 if theorem is TheoremId.L1_COMPLETE_MULTI_WEIGHTED
                else 0.5)
        if theorem is TheoremId.L1_COMPLETE_MULTI_WEIGHTED_BAND:
            _need(orders is not None and len(orders) == count,
                  "one band limit per center")
            hyp["separation"] = _separations_ok(dist, orders)
        a = component_weights(geometry.centers, geometry.k, weight_variant, expo)
        inv_a_max = float((1.0 / a).max())
        arc_terms = [
            2.0 / _SQRT_2PI * inv_a_max * a[i] * math.sqrt(omega * spars[i])
            for i in range(count)
        ]
        cross_terms = [4.0 * (count - 1) * a[i] ** 2 * spars[i] for i in range(count)]
        q_beta = sum(arc_terms)
        hyp["smallness_beta"] = q_beta < 1.0
        hyp["smallness_each"] = all(
            c + b < 1.0 for c, b in zip(cross_terms, arc_terms)
        )
        beta_constant = inv(q_beta)
        if conservative:
            per = tuple(inv(c + b) for c, b in zip(cross_terms, arc_terms))
            notes = f"conservative variant (both deductions); weights: {weight_variant}"
        else:
            # non-conservative form: the arc term is added back in the
            # denominator
            per = tuple(
                1.0 / (1.0 - c + b) if (1.0 - c + b) > 0.0 else math.inf
                for c, b in zip(cross_terms, arc_terms)
            )
            notes = ("arc term added in denominator (non-conservative "
                     f"form); weights: {weight_variant}")
        constant = max((*per, beta_constant))

    elif theorem is TheoremId.COND_TWO:
        _need(orders is not None and len(orders) >= 2, "two truncation orders")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        q = (2 * orders[0] + 1) * (2 * orders[1] + 1) / d if d > 0 else math.inf
        hyp["smallness"] = q < 1.0
        constant = 1.0 / math.sqrt(1.0 - q) if q < 1.0 else math.inf

    elif theorem is TheoremId.COND_POINT:
        _need(orders is not None and len(orders) >= 1, "the extended order")
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        n2 = orders[-1]
        q = (2 * n2 + 1) / d if d > 0 else math.inf
        hyp["smallness"] = q < 1.0
        constant = 1.0 / math.sqrt(1.0 - q) if q < 1.0 else math.inf

    elif theorem is TheoremId.COND_MUSIC:
        _need(len(geometry.centers) >= 2, "two centers")
        d = dist[0, 1]
        q = 1.0 / d if d > 0 else math.inf
        hyp["smallness"] = q < 1.0
        constant = 1.0 / math.sqrt(1.0 - q) if q < 1.0 else math.inf

    else:
        raise ValueError(f"unknown theorem {theorem!r}")

    ok = all(hyp.values())
    if theorem in _LS_FAMILY:
        data_term = (
            data.gamma_diff**2 if data.gamma_diff is not None else math.nan
        )
    elif theorem in _L1_FAMILY:
        data_term = 4.0 * data.delta**2 if data.delta is not None else math.nan
    else:
        data_term = 1.0
    # the plug-in constant is reported even for infeasible geometry; the
    # right-hand side is only meaningful when every hypothesis holds
    rhs = constant * data_term if ok else math.inf

    return BoundReport(
        theorem=theorem,
        hypotheses_ok=ok,
        hypotheses={name: bool(value) for name, value in hyp.items()},
        constant=float(constant),
        rhs=float(rhs),
        per_component=tuple(float(v) for v in per) if per is not None else None,
        beta_constant=float(beta_constant) if beta_constant is not None else None,
        notes=notes,
        inputs={
            "k": geometry.k,
            "centers": geometry.centers,
            "orders": orders,
            "sparsities": spars,
            "omega_measure": omega,
            "delta": data.delta,
            "gamma_diff": data.gamma_diff,
            "tau": data.tau,
            "weight_variant": weight_variant,
            "conservative": conservative,
        },
    )


def evaluate_all(geometry: BoundGeometry, data: BoundData | None = None,
                 **kwargs) -> list[BoundReport]:
    """Evaluate every theorem whose required fields are present."""
    reports = []
    for theorem in TheoremId:
        try:
            reports.append(evaluate_bound(theorem, geometry, data, **kwargs))
        except ValueError:
            continue
    return reports


# ---------------------------------------------------------------------------
# randomized verification of the uncertainty inequalities
# ---------------------------------------------------------------------------

@dataclass
class UncertaintyStats:
    theorem: TheoremId
    trials: int
    violations: int
    max_ratio: float


_REL_SLACK = 1e-9


def _sparse_field(rng: np.random.Generator, grid: AngularGrid,
                  max_support: int = 12, band: int = 40) -> tuple[FarField, int]:
    s = int(rng.integers(1, max_support + 1))
    positions = rng.choice(2 * band + 1, size=s, replace=False) - band
    coeffs = np.zeros(grid.size, dtype=complex)
    coeffs[positions % grid.size] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    return FarField.from_coeffs(grid, coeffs), s


def _window_field(rng: np.random.Generator, grid: AngularGrid,
                  order: int) -> FarField:
    vals = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
    return FarField.from_window(grid, vals, order=order)


def _random_direction(rng: np.random.Generator, radius: float) -> tuple[float, float]:
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return radius * math.cos(phi), radius * math.sin(phi)


def verify_uncertainty(theorem: TheoremId, trials: int,
                       seed: int = 0) -> UncertaintyStats:
    """Randomized stress test of one uncertainty inequality.

    Instances are drawn per the theorem's hypotheses; per-trial seeds are
    spawned from the given seed so trials could run in any order.  Returns
    the max observed lhs/rhs ratio and the violation count (expected 0).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if theorem not in (TheoremId.U_L0, TheoremId.U_BAND, TheoremId.U_MIXED):
        raise ValueError(f"{theorem} is not an uncertainty inequality")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    violations = 0
    max_ratio = 0.0
    grid = AngularGrid(1024 if theorem is TheoremId.U_BAND else 512)

    for trial_seed in seeds:
        rng = np.random.default_rng(trial_seed)
        if theorem is TheoremId.U_L0:
            alpha, s1 = _sparse_field(rng, grid)
            beta, s2 = _sparse_field(rng, grid)
            c = _random_direction(rng, rng.uniform(1.0, 60.0))
            lhs = abs(inner(alpha, translate(beta, c)))
            rhs = (
                math.sqrt(s1 * s2) / math.hypot(*c) ** (1.0 / 3.0)
                * alpha.norm() * beta.norm()
            )
        elif theorem is TheoremId.U_BAND:
            m_ord = int(rng.integers(1, 9))
            n_ord = int(rng.integers(1, 9))
            alpha = _window_field(rng, grid, m_ord)
            beta = _window_field(rng, grid, n_ord)
            sep = 2.0 * (m_ord + n_ord + 1)
            c = _random_direction(rng, sep * rng.uniform(1.01, 5.0))
            lhs = abs(inner(alpha, translate(beta, c)))
            rhs = (
                math.sqrt((2 * m_ord + 1) * (2 * n_ord + 1))
                / math.sqrt(math.hypot(*c)) * alpha.norm() * beta.norm()
            )
        else:  # U_MIXED
            alpha, s = _sparse_field(rng, grid)
            n_arcs = int(rng.integers(1, 3))
            starts = rng.uniform(0.0, 2.0 * math.pi, n_arcs)
            lengths = rng.uniform(0.05, 0.9 * 2.0 * math.pi / n_arcs, n_arcs)
            omega = ArcMask(tuple(zip(starts, starts + lengths)))
            ind = omega.indicator(grid)
            vals = np.where(
                ind,
                rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size),
                0.0,
            )
            beta = FarField(grid, vals)
            support = omega.grid_measure(grid)
            if support == 0.0:
                continue
            c = _random_direction(rng, rng.uniform(0.0, 50.0))
            lhs = abs(inner(translate(alpha, c), beta))
            rhs = (
                math.sqrt(s * support / (2.0 * math.pi))
                * alpha.norm() * beta.norm()
            )
        if rhs == 0.0:
            ratio = 0.0
        else:
            ratio = lhs / rhs
        max_ratio = max(max_ratio, ratio)
        if ratio > 1.0 + _REL_SLACK:
            violations += 1
    return UncertaintyStats(
        theorem=theorem, trials=trials, violations=violations, max_ratio=max_ratio
    )


def krasikov_check(m_ord: int, n_ord: int, r_samples: np.ndarray) -> float:
    """max of r J_n(r)^2 over |n| < M + N and the given r > 2(M + N + 1).

    The returned value must not exceed :data:`farsplit.bessel.KRASIKOV_BOUND`.
    """
    if m_ord < 1 or n_ord < 1:
        raise ValueError("band limits must be at least 1")
    r = np.asarray(r_samples, dtype=float)
    floor = 2.0 * (m_ord + n_ord + 1)
    if np.any(r <= floor):
        raise ValueError(f"all samples must exceed 2(M+N+1) = {floor}")
    j = bessel_j_grid(m_ord + n_ord - 1, r)
    return float((r * j**2).max())
