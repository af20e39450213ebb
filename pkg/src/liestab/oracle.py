"""Ground-truth numerics on concrete group realizations.

Energies are integrated by deterministic quadrature and differentiated in the
variation parameter only; nothing is ever finite-differenced on the group
itself.  Variations take the form f_t(g) = f(g) exp(t W(g)), whose
left-trivialized frame images are Ad_{exp(-tW)}(phi E_j) + t dW(E_j); such
variations realize every velocity field at t = 0, and for bi-invariant targets
they are geodesic variations, so their second derivative is exactly the index
form (no correction terms from the variation family itself).  The adjoint
action is evaluated as the matrix exponential of ad, which is exact for any
connected group with the given algebra and is computed to machine precision.

For targets with noncommuting brackets and position-dependent W the
trivialized formula above is the defining contract (it drops a term of order
t^2 [W, dW]); all asserted cases have either an abelian target or dW = 0,
where the formula is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import energy_deviation, mix64, pairwise_sum, uniforms
from .lie_core import (
    LieAlgebra,
    Metric,
    StructureError,
    direct_sum,
    orthonormal_frame,
)
from .morphism import Homomorphism

_EPS_MATCH = 1e-9


class GroupRealization:
    """A concrete compact group carrying a metrized algebra.

    Subclasses fix the point representation and provide exp/log, Haar
    sampling, and the exact Riemannian volume in the algebra's metric
    normalization.
    """

    algebra: LieAlgebra
    metric: Metric
    volume: float
    point_dim: int

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def exp(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def samples(self, count: int, seed: int) -> np.ndarray:
        raise NotImplementedError

    def ensure_matches(self, algebra: LieAlgebra, metric: Metric) -> None:
        """Raise unless this realization carries the given metrized algebra."""
        if (
            algebra.dim != self.algebra.dim
            or not np.allclose(algebra.c, self.algebra.c, atol=_EPS_MATCH)
            or not np.allclose(metric.g, self.metric.g, atol=_EPS_MATCH)
        ):
            raise StructureError(
                "realization is incompatible with the requested metrized algebra"
            )


def _korobov_generator(count: int, dim: int) -> np.ndarray:
    """Rank-1 lattice generator (1, a, a^2, ...) mod count with gcd(a, count) = 1."""
    if dim == 1 or count == 1:
        return np.ones(dim, dtype=np.int64)
    a = max(1, round(count * 0.6180339887498949)) % count
    if a == 0:
        a = 1
    while math.gcd(a, count) != 1:
        a = a % count + 1
    return np.array([pow(a, k, count) for k in range(dim)], dtype=np.int64)


def _lattice01(count: int, dim: int) -> np.ndarray:
    gen = _korobov_generator(count, dim)
    idx = np.arange(count, dtype=np.int64)
    return ((idx[:, None] * gen[None, :]) % count) / float(count)


class TorusRealization(GroupRealization):
    """Flat torus R^m / (L_1 Z x ... x L_m Z); points are coordinates in [0, L_i).

    Sampling uses a deterministic rank-1 lattice, which is a low-discrepancy
    point set; the seed argument is accepted for interface uniformity but does
    not alter the lattice.
    """

    def __init__(self, algebra: LieAlgebra, metric: Metric, side_lengths=None):
        if float(np.max(np.abs(algebra.c))) > algebra.tolerance():
            raise StructureError("torus realization requires an abelian algebra")
        if metric.dim != algebra.dim:
            raise StructureError("metric dimension does not match the algebra")
        if side_lengths is None:
            side_lengths = np.full(algebra.dim, 2.0 * np.pi)
        sides = np.asarray(side_lengths, dtype=float)
        if sides.shape != (algebra.dim,) or np.any(sides <= 0.0):
            raise StructureError("side lengths must be positive, one per dimension")
        self.algebra = algebra
        self.metric = metric
        self.sides = sides
        self.point_dim = algebra.dim
        self.volume = float(np.prod(sides) * np.sqrt(np.linalg.det(metric.g)))

    def exp(self, x: np.ndarray) -> np.ndarray:
        return np.mod(np.asarray(x, dtype=float), self.sides)

    def log(self, points: np.ndarray) -> np.ndarray:
        y = np.mod(np.asarray(points, dtype=float), self.sides)
        return np.where(y > 0.5 * self.sides, y - self.sides, y)

    def samples(self, count: int, seed: int) -> np.ndarray:
        return _lattice01(count, self.dim) * self.sides


_SU2_EPS = np.zeros((3, 3, 3))
for _i, _j, _k, _s in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
                       (1, 0, 2, -1.0), (2, 1, 0, -1.0), (0, 2, 1, -1.0)]:
    _SU2_EPS[_i, _j, _k] = _s


class SU2Realization(GroupRealization):
    """Unit quaternions [w, x, y, z]; algebra basis mapped to (i/2, j/2, k/2).

    That calibration turns the epsilon structure constants into quaternion
    commutators exactly, and a metric s * identity into the round metric of a
    3-sphere of radius 2 sqrt(s): volume 16 pi^2 s^(3/2).  exp is injective
    for |x| < 2 pi.
    """

    def __init__(self, algebra: LieAlgebra, metric: Metric):
        if algebra.dim != 3 or not np.allclose(algebra.c, _SU2_EPS, atol=_EPS_MATCH):
            raise StructureError(
                "su2 realization requires the 3-dimensional epsilon structure constants"
            )
        g = metric.g
        s = float(g[0, 0])
        if s <= 0.0 or not np.allclose(g, s * np.eye(3), atol=_EPS_MATCH * max(1.0, abs(s))):
            raise StructureError("su2 realization requires a metric s * identity, s > 0")
        self.algebra = algebra
        self.metric = metric
        self.scale = s
        self.point_dim = 4
        self.volume = float(16.0 * np.pi**2 * s**1.5)

    def exp(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        theta = np.linalg.norm(x, axis=-1)
        half = 0.5 * theta
        w = np.cos(half)
        # sin(theta/2)/theta, smooth through theta = 0
        factor = 0.5 * np.sinc(half / np.pi)
        vec = x * factor[..., None]
        return np.concatenate([w[..., None], vec], axis=-1)

    def log(self, points: np.ndarray) -> np.ndarray:
        q = np.asarray(points, dtype=float)
        w = q[..., 0]
        vec = q[..., 1:]
        vnorm = np.linalg.norm(vec, axis=-1)
        theta = 2.0 * np.arctan2(vnorm, w)
        safe = np.where(vnorm > 0.0, vnorm, 1.0)
        factor = np.where(vnorm > 0.0, theta / safe, 0.0)
        return vec * factor[..., None]

    def samples(self, count: int, seed: int) -> np.ndarray:
        u = uniforms(seed, count, 3)
        r1 = np.sqrt(1.0 - u[:, 0])
        r2 = np.sqrt(u[:, 0])
        a1 = 2.0 * np.pi * u[:, 1]
        a2 = 2.0 * np.pi * u[:, 2]
        return np.stack(
            [r1 * np.sin(a1), r1 * np.cos(a1), r2 * np.sin(a2), r2 * np.cos(a2)],
            axis=1,
        )

    @staticmethod
    def rotation_matrices(points: np.ndarray) -> np.ndarray:
        """Adjoint action of unit quaternions on the algebra: SO(3) matrices."""
        q = np.asarray(points, dtype=float)
        w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
        out = np.empty(q.shape[:-1] + (3, 3))
        out[..., 0, 0] = 1 - 2 * (y * y + z * z)
        out[..., 0, 1] = 2 * (x * y - z * w)
        out[..., 0, 2] = 2 * (x * z + y * w)
        out[..., 1, 0] = 2 * (x * y + z * w)
        out[..., 1, 1] = 1 - 2 * (x * x + z * z)
        out[..., 1, 2] = 2 * (y * z - x * w)
        out[..., 2, 0] = 2 * (x * z - y * w)
        out[..., 2, 1] = 2 * (y * z + x * w)
        out[..., 2, 2] = 1 - 2 * (x * x + y * y)
        return out


class ProductRealization(GroupRealization):
    """Direct product of realizations; points are concatenated part points.

    Torus coordinates across all parts share one joint rank-1 lattice, so
    products of tori remain low-discrepancy; each su2 part draws an
    independent counter-based stream derived from (seed, part index).
    """

    def __init__(self, parts: list[GroupRealization]):
        if not parts:
            raise StructureError("product realization needs at least one part")
        self.parts = list(parts)
        alg, met = parts[0].algebra, parts[0].metric
        for part in parts[1:]:
            alg, met = direct_sum(alg, met, part.algebra, part.metric)
        self.algebra = alg
        self.metric = met
        self.point_dim = sum(p.point_dim for p in parts)
        self.volume = float(np.prod([p.volume for p in parts]))

    def exp(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        pieces = []
        offset = 0
        for part in self.parts:
            pieces.append(part.exp(x[..., offset : offset + part.dim]))
            offset += part.dim
        return np.concatenate(pieces, axis=-1)

    def log(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        pieces = []
        offset = 0
        for part in self.parts:
            pieces.append(part.log(points[..., offset : offset + part.point_dim]))
            offset += part.point_dim
        return np.concatenate(pieces, axis=-1)

    def samples(self, count: int, seed: int) -> np.ndarray:
        torus_dims = [p.dim for p in self.parts if isinstance(p, TorusRealization)]
        joint = _lattice01(count, sum(torus_dims)) if torus_dims else None
        torus_col = 0
        pieces = []
        for index, part in enumerate(self.parts):
            if isinstance(part, TorusRealization):
                block = joint[:, torus_col : torus_col + part.dim] * part.sides
                torus_col += part.dim
                pieces.append(block)
            else:
                pieces.append(part.samples(count, mix64(seed + (index + 1) * 0x9E3779B9)))
        return np.concatenate(pieces, axis=1)


def haar_samples(realization: GroupRealization, count: int, seed: int) -> tuple[np.ndarray, float]:
    """Quadrature points with weight volume/count each; deterministic in (count, seed)."""
    if count < 1:
        raise StructureError(f"sample count must be at least 1, got {count}")
    points = realization.samples(count, seed)
    return points, realization.volume / count


@dataclass(frozen=True)
class SampledField:
    """A field W(g) in the codomain algebra along the map, with derivatives.

    Either a constant (left-invariant) vector, or a callable returning W at
    sample points together with a callable returning the directional
    derivatives dW(E_j) along the domain orthonormal frame.  Derivatives of
    non-invariant fields must be supplied by the caller; they are never
    approximated on the group.
    """

    constant: np.ndarray | None = None
    values_fn: Callable[[np.ndarray], np.ndarray] | None = None
    derivs_fn: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def invariant(cls, coords) -> "SampledField":
        vec = np.asarray(coords, dtype=float)
        if not np.all(np.isfinite(vec)):
            raise StructureError("field coordinates must be finite")
        return cls(constant=vec)

    @classmethod
    def from_functions(cls, values_fn, derivs_fn=None) -> "SampledField":
        return cls(values_fn=values_fn, derivs_fn=derivs_fn)

    @property
    def is_invariant(self) -> bool:
        return self.constant is not None

    def values(self, points: np.ndarray, n2: int) -> np.ndarray:
        count = points.shape[0]
        if self.constant is not None:
            if self.constant.shape != (n2,):
                raise StructureError(
                    f"invariant field has {self.constant.shape[0]} coordinates, expected {n2}"
                )
            return np.broadcast_to(self.constant, (count, n2)).copy()
        vals = np.asarray(self.values_fn(points), dtype=float)
        if vals.shape != (count, n2) or not np.all(np.isfinite(vals)):
            raise StructureError(f"field values must be finite with shape ({count}, {n2})")
        return vals

    def frame_derivs(self, points: np.ndarray, n1: int, n2: int) -> np.ndarray:
        count = points.shape[0]
        if self.constant is not None:
            return np.zeros((count, n1, n2))
        if self.derivs_fn is None:
            raise StructureError(
                "non-invariant field requires caller-supplied directional derivatives"
            )
        der = np.asarray(self.derivs_fn(points), dtype=float)
        if der.shape != (count, n1, n2) or not np.all(np.isfinite(der)):
            raise StructureError(
                f"field derivatives must be finite with shape ({count}, {n1}, {n2})"
            )
        return der


def builtin_field(name: str, h: Homomorphism, realization: GroupRealization) -> SampledField:
    """Named non-invariant test fields.

    'sin1': W(g) = sin(g_1) e_last on a torus domain, with exact frame
    derivatives cos(g_1) F[0, j] e_last.
    """
    if name != "sin1":
        raise StructureError(f"unknown builtin field {name!r}")
    if not isinstance(realization, TorusRealization):
        raise StructureError("builtin field 'sin1' needs a torus domain realization")
    n1, n2 = h.n1, h.n2
    frame = orthonormal_frame(h.domain_algebra, h.domain_metric)
    first_row = frame.matrix[0, :].copy()
    e_last = np.zeros(n2)
    e_last[-1] = 1.0

    def values_fn(points):
        return np.sin(points[:, 0])[:, None] * e_last[None, :]

    def derivs_fn(points):
        return (
            np.cos(points[:, 0])[:, None, None]
            * first_row[None, :, None]
            * e_last[None, None, :]
        )

    return SampledField.from_functions(values_fn, derivs_fn)


def energy_density(h: Homomorphism) -> float:
    """Constant energy density (1/2) sum_j |phi E_j|^2 in the codomain metric.

    Equals n1/2 for isometric immersions.
    """
    images = h.frame_images()
    return float(0.5 * np.einsum("jk,kl,jl->", images, h.codomain_metric.g, images))


def _prepare(h: Homomorphism, realization: GroupRealization):
    realization.ensure_matches(h.domain_algebra, h.domain_metric)
    images = h.frame_images()
    return images, h.codomain_metric.g, h.codomain_algebra.c


def energy_quadrature(h: Homomorphism, realization: GroupRealization, count: int, seed: int) -> float:
    """Energy by Haar quadrature; the integrand is constant for left-invariant
    data, so this agrees with energy_density * volume at floating-point level."""
    images, g2, c2 = _prepare(h, realization)
    _points, weight = haar_samples(realization, count, seed)
    dens0 = energy_density(h)
    zeros_w = np.zeros((count, h.n2))
    zeros_dw = np.zeros((count, h.n1, h.n2))
    deviations = energy_deviation(images, g2, c2, zeros_w, zeros_dw, 0.0)
    return weight * pairwise_sum(dens0 + deviations)


def variation_energy(
    h: Homomorphism,
    realization: GroupRealization,
    field: SampledField,
    t: float,
    count: int,
    seed: int,
) -> float:
    """Energy of the varied map f_t(g) = f(g) exp(t W(g)).

    Computed from the left-trivialized frame images
    Ad_{exp(-t W(g))}(phi E_j) + t dW(E_j)(g); the adjoint action is an
    isometry of the codomain metric, so for left-invariant W the result
    equals the energy at t = 0 for every t.
    """
    images, g2, c2 = _prepare(h, realization)
    points, weight = haar_samples(realization, count, seed)
    w_values = field.values(points, h.n2)
    dw_values = field.frame_derivs(points, h.n1, h.n2)
    dens0 = energy_density(h)
    deviations = energy_deviation(images, g2, c2, w_values, dw_values, float(t))
    return weight * pairwise_sum(dens0 + deviations)


def second_variation_fd(
    h: Homomorphism,
    realization: GroupRealization,
    field: SampledField,
    step: float,
    count: int,
    seed: int,
) -> tuple[float, float]:
    """Central-difference (dE/dt, d2E/dt2) at t = 0 over one shared sample set.

    Evaluated through per-sample deviations from the t = 0 density, so the
    common term cancels exactly instead of in floating point; with W = 0 both
    outputs are exactly zero.
    """
    if not 0.0 < step <= 0.1:
        raise StructureError(f"step must lie in (0, 0.1], got {step}")
    images, g2, c2 = _prepare(h, realization)
    points, weight = haar_samples(realization, count, seed)
    w_values = field.values(points, h.n2)
    dw_values = field.frame_derivs(points, h.n1, h.n2)
    plus = weight * pairwise_sum(energy_deviation(images, g2, c2, w_values, dw_values, step))
    minus = weight * pairwise_sum(energy_deviation(images, g2, c2, w_values, dw_values, -step))
    first = (plus - minus) / (2.0 * step)
    second = (plus + minus) / (step * step)
    return first, second


def mean_deriv_norm_squared(
    h: Homomorphism, realization: GroupRealization, field: SampledField, count: int, seed: int
) -> float:
    """Quadrature of sum_j |dW(E_j)|^2, the exact d2E/dt2 for flat targets."""
    images, g2, c2 = _prepare(h, realization)
    points, weight = haar_samples(realization, count, seed)
    dw_values = field.frame_derivs(points, h.n1, h.n2)
    per_sample = np.einsum("ijk,kl,ijl->i", dw_values, g2, dw_values)
    return weight * pairwise_sum(per_sample)


__all__ = [
    "GroupRealization",
    "TorusRealization",
    "SU2Realization",
    "ProductRealization",
    "haar_samples",
    "SampledField",
    "builtin_field",
    "energy_density",
    "energy_quadrature",
    "variation_energy",
    "second_variation_fd",
    "mean_deriv_norm_squared",
]
