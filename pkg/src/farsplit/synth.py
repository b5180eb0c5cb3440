"""Analytic forward models: synthetic far fields for known source layouts.

A scene is a superposition of components, each radiating from a ball
B_R(c).  Component far fields are generated in the component's own frame
(center at the origin) and placed at the center c by the adjoint translation,
multiplication by e^{-i k c . theta}.

Modal components expand the source in the normalized free-source basis
(1/sqrt(2 pi)) i^n J_n(|x|) e^{i n phi_x}; a coefficient vector (a_n) then
radiates the far field with Fourier coefficients a_n s_n^2(kR), and the
smallest source able to radiate a far field alpha from B_R(0) has squared
norm (1/2 pi) sum |alpha_n|^2 / s_n^2(kR).

A single-layer strip of half-width W radiates
2 sin(W cos t) / (sqrt(W) cos t), times e^{-i d sin t} when shifted
vertically by d.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import picard
from .farfield import AngularGrid, ArcMask, CoeffWindow, FarField, translate

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ModalGenerator:
    """Coefficients a_n, n = -N..N, in the normalized free-source basis."""

    coefficients: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) % 2 == 0:
            raise ValueError("modal coefficient vector must have odd length 2N+1")
        object.__setattr__(
            self, "coefficients", tuple(complex(c) for c in self.coefficients)
        )

    @property
    def order(self) -> int:
        return (len(self.coefficients) - 1) // 2


@dataclass(frozen=True)
class PointGenerator:
    """Point source; radiates the constant far field equal to its amplitude."""

    amplitude: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class StripGenerator:
    """Single-layer source on a segment of half-width `width`.

    orientation is the angle of the segment direction; 0 means horizontal.
    """

    width: float
    orientation: float = 0.0

    def __post_init__(self) -> None:
        if self.width <= 0.0:
            raise ValueError("strip width must be positive")


Generator = ModalGenerator | PointGenerator | StripGenerator


@dataclass(frozen=True)
class SourceComponent:
    center: tuple[float, float]
    radius: float
    generator: Generator
    order: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.radius < 0.0:
            raise ValueError("radius must be nonnegative")
        if isinstance(self.generator, PointGenerator) and self.radius != 0.0:
            raise ValueError("point sources have radius 0")
        if self.radius == 0.0 and not isinstance(self.generator, PointGenerator):
            raise ValueError("radius 0 is reserved for point sources")

    def effective_order(self, k: float = 1.0) -> int:
        """Truncation order: explicit if given, else ceil((e/2) k R)."""
        if self.order is not None:
            return self.order
        if isinstance(self.generator, ModalGenerator):
            return self.generator.order
        return picard.default_truncation_order(self.radius, k)


@dataclass(frozen=True)
class Scene:
    """A full synthetic problem instance."""

    k: float
    components: tuple[SourceComponent, ...]
    grid: AngularGrid
    omega: ArcMask | None = None
    noise_level: float = 0.0
    noise_seed: int = 0

    def __post_init__(self) -> None:
        if self.k <= 0.0:
            raise ValueError("wavenumber must be positive")
        if self.noise_level < 0.0:
            raise ValueError("noise level must be nonnegative")
        centers = [c.center for c in self.components]
        if len(set(centers)) != len(centers):
            raise ValueError("component centers must be pairwise distinct")
        object.__setattr__(self, "components", tuple(self.components))


@dataclass
class SceneData:
    """Output of scene_farfield: observed data plus ground truth."""

    gamma: FarField
    truth: list[CoeffWindow]
    beta_truth: FarField


def own_frame_farfield(component: SourceComponent, k: float,
                       grid: AngularGrid) -> FarField:
    """Far field radiated by the component placed at the origin."""
    gen = component.generator
    if isinstance(gen, ModalGenerator):
        n = gen.order
        s = picard._sn2_values(k * component.radius, n)
        s_sym = np.concatenate([s[:0:-1], s])  # s_{-n} = s_n
        window = np.asarray(gen.coefficients) * s_sym
        return FarField.from_window(grid, window, order=n)
    if isinstance(gen, PointGenerator):
        return FarField.from_window(grid, [gen.amplitude * _SQRT_2PI], order=0)
    if isinstance(gen, StripGenerator):
        return strip_farfield(gen.width, 0.0, grid, orientation=gen.orientation)
    raise TypeError(f"unknown generator {gen!r}")


def placed_farfield(component: SourceComponent, k: float,
                    grid: AngularGrid) -> FarField:
    """Own-frame far field moved to the component center (adjoint translation)."""
    own = own_frame_farfield(component, k, grid)
    cx, cy = component.center
    if cx == 0.0 and cy == 0.0:
        return own
    return translate(own, (-cx, -cy), k)


def modal_farfield(component: SourceComponent, k: float,
                   grid: AngularGrid) -> FarField:
    """Far field of a modal (or point) component, translated to its center."""
    if isinstance(component.generator, StripGenerator):
        raise ValueError("modal_farfield expects a modal or point generator")
    return placed_farfield(component, k, grid)


def minimal_power(alpha: FarField, radius: float, k: float = 1.0,
                  tol: float = 1e-8) -> float:
    """Power of the smallest source supported in B_R(0) radiating alpha.

    Returns (1/2 pi) sum_n |alpha_n|^2 / s_n^2(kR) over the coefficients
    above tol * max (relative; transform roundoff at far orders would
    otherwise meet vanishing s_n^2), or inf when a retained mode would
    require effectively infinite power (term above 1e16 times the squared
    far-field norm).
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    coeffs = alpha.coeffs
    orders = alpha.grid.fft_orders
    peak = float(np.abs(coeffs).max())
    nz = np.abs(coeffs) > tol * peak if peak > 0.0 else np.zeros(len(coeffs), bool)
    if not nz.any():
        return 0.0
    n_needed = int(np.abs(orders[nz]).max())
    s = picard._sn2_values(k * radius, n_needed)
    norm2 = float(np.sum(np.abs(coeffs) ** 2))
    total = 0.0
    for n, c in zip(orders[nz], coeffs[nz]):
        sn2 = s[abs(n)]
        mag2 = abs(c) ** 2
        if sn2 == 0.0 or mag2 / sn2 > 1e16 * norm2:
            return math.inf
        total += mag2 / sn2
    return total / (2.0 * math.pi)


def strip_farfield(width: float, offset: float, grid: AngularGrid,
                   orientation: float = 0.0) -> FarField:
    """Far field of a strip source: 2 sin(W cos t) / (sqrt(W) cos t).

    `offset` shifts the strip vertically by d, multiplying by e^{-i d sin t};
    the removable singularity at cos t = 0 is evaluated by its limit
    2 sqrt(W).  orientation rotates the pattern.
    """
    if width <= 0.0:
        raise ValueError("strip width must be positive")
    t = grid.angles - orientation
    u = width * np.cos(t)
    small = np.abs(u) < 1e-7
    denom = np.where(small, 1.0, np.cos(t))
    samples = np.where(
        small,
        2.0 * math.sqrt(width) * (1.0 - u * u / 6.0),
        2.0 * np.sin(u) / (math.sqrt(width) * denom),
    ).astype(complex)
    if offset != 0.0:
        samples = samples * np.exp(-1j * offset * np.sin(grid.angles))
    return FarField(grid, samples)


def scene_farfield(scene: Scene) -> SceneData:
    """Superpose the scene's components, add noise, apply the mask.

    Ground truth is recorded per component as the coefficient window in the
    component's own frame (before translation).  Noise is complex Gaussian on
    the samples, rescaled so the relative l2 level is exactly noise_level.
    The observed field gamma vanishes on Omega; beta_truth = -(total)|_Omega.
    """
    grid = scene.grid
    total = np.zeros(grid.size, dtype=complex)
    truth: list[CoeffWindow] = []
    for comp in scene.components:
        own = own_frame_farfield(comp, scene.k, grid)
        truth.append(own.coeff_window(comp.effective_order(scene.k)))
        cx, cy = comp.center
        placed = translate(own, (-cx, -cy), scene.k) if (cx, cy) != (0.0, 0.0) else own
        total = total + placed.samples

    if scene.noise_level > 0.0:
        rng = np.random.default_rng(scene.noise_seed)
        e = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
        e_norm = np.linalg.norm(e)
        t_norm = np.linalg.norm(total)
        if e_norm > 0.0 and t_norm > 0.0:
            total = total + e * (scene.noise_level * t_norm / e_norm)

    if scene.omega is None:
        gamma = FarField(grid, total)
        beta_truth = FarField.zero(grid)
    else:
        ind = scene.omega.indicator(grid)
        gamma = FarField(grid, np.where(ind, 0.0, total))
        beta_truth = FarField(grid, np.where(ind, -total, 0.0))
    return SceneData(gamma=gamma, truth=truth, beta_truth=beta_truth)


def random_modal_component(rng: np.random.Generator, center: Sequence[float],
                           radius: float, order: int | None = None,
                           k: float = 1.0) -> SourceComponent:
    """Modal component with i.i.d. Gaussian coefficients, unit far-field power."""
    n = picard.default_truncation_order(radius, k) if order is None else order
    a = (rng.standard_normal(2 * n + 1) + 1j * rng.standard_normal(2 * n + 1))
    s = picard._sn2_values(k * radius, n)
    s_sym = np.concatenate([s[:0:-1], s])
    power = np.linalg.norm(a * s_sym)
    if power > 0.0:
        a = a / power
    return SourceComponent(
        center=(float(center[0]), float(center[1])),
        radius=radius,
        generator=ModalGenerator(tuple(a)),
        order=n,
    )


# ---------------------------------------------------------------------------
# scene files
# ---------------------------------------------------------------------------

SCENE_SCHEMA_VERSION = 1


def _complex_pairs(values: Sequence[complex]) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in values]


def scene_to_json_dict(scene: Scene) -> dict:
    comps = []
    for c in scene.components:
        entry: dict = {"center": [c.center[0], c.center[1]], "radius": c.radius}
        if c.order is not None:
            entry["N"] = c.order
        gen = c.generator
        if isinstance(gen, ModalGenerator):
            entry["generator"] = {
                "type": "modal",
                "coefficients": _complex_pairs(gen.coefficients),
            }
        elif isinstance(gen, PointGenerator):
            entry["generator"] = {
                "type": "point",
                "amplitude": [gen.amplitude.real, gen.amplitude.imag],
            }
        else:
            entry["generator"] = {
                "type": "strip",
                "width": gen.width,
                "orientation": gen.orientation,
            }
        comps.append(entry)
    doc = {
        "version": SCENE_SCHEMA_VERSION,
        "k": scene.k,
        "grid_size": scene.grid.size,
        "components": comps,
        "omega": [[a, b] for a, b in scene.omega.arcs] if scene.omega else [],
        "noise": {"level": scene.noise_level, "seed": scene.noise_seed},
    }
    return doc


def scene_from_json_dict(doc: dict) -> Scene:
    if doc.get("version") != SCENE_SCHEMA_VERSION:
        raise ValueError(f"unsupported scene schema version {doc.get('version')!r}")
    comps = []
    for entry in doc["components"]:
        gen_doc = entry["generator"]
        kind = gen_doc["type"]
        if kind == "modal":
            gen: Generator = ModalGenerator(
                tuple(complex(re, im) for re, im in gen_doc["coefficients"])
            )
            radius = float(entry["radius"])
        elif kind == "point":
            re, im = gen_doc.get("amplitude", [1.0, 0.0])
            gen = PointGenerator(complex(re, im))
            radius = 0.0
        elif kind == "strip":
            gen = StripGenerator(
                width=float(gen_doc["width"]),
                orientation=float(gen_doc.get("orientation", 0.0)),
            )
            radius = float(entry.get("radius", gen_doc["width"])) or float(gen_doc["width"])
        else:
            raise ValueError(f"unknown generator type {kind!r}")
        comps.append(
            SourceComponent(
                center=tuple(entry["center"]),
                radius=radius,
                generator=gen,
                order=entry.get("N"),
            )
        )
    arcs = doc.get("omega") or []
    omega = ArcMask(tuple((float(a), float(b)) for a, b in arcs)) if arcs else None
    noise = doc.get("noise", {})
    return Scene(
        k=float(doc["k"]),
        components=tuple(comps),
        grid=AngularGrid(int(doc["grid_size"])),
        omega=omega,
        noise_level=float(noise.get("level", 0.0)),
        noise_seed=int(noise.get("seed", 0)),
    )


def save_scene(scene: Scene, path) -> None:
    with open(path, "w") as fh:
        json.dump(scene_to_json_dict(scene), fh, indent=1)
        fh.write("\n")


def load_scene(path) -> Scene:
    with open(path) as fh:
        return scene_from_json_dict(json.load(fh))
