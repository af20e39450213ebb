"""Connection, curvature, Ricci, and flatness for bi-invariant metrics.

Every quantity here is evaluated at the algebra level: the connection is
half the bracket and the curvature tensor is (sign/4)[[x,y],z], where the
sign is an explicit convention tag.  The two tags are not interchangeable:
PLUS-sign curvature pairs with <R(x,y)z, .> one way, MINUS-sign the other,
and the module always computes under an explicit choice instead of picking
one silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .lie_core import (
    DEFAULT_TOL,
    DegeneratePlaneError,
    LieAlgebra,
    Metric,
    bracket,
    orthonormal_frame,
)


class CurvatureConvention(Enum):
    """Sign convention for the curvature tensor.

    PAPER:    R(x, y)z = +1/4 [[x, y], z]
    STANDARD: R(x, y)z = -1/4 [[x, y], z], the sign under which
              K(x, y) = <R(x, y)y, x> is the nonnegative sectional curvature.
    """

    PAPER = "paper"
    STANDARD = "standard"

    @property
    def sign(self) -> float:
        return 1.0 if self is CurvatureConvention.PAPER else -1.0

    @classmethod
    def parse(cls, text: str) -> "CurvatureConvention":
        for member in cls:
            if member.value == text.lower():
                return member
        raise ValueError(f"unknown curvature convention {text!r}")


@dataclass(frozen=True)
class RicciData:
    """Nonnegative Ricci operator (defining basis) and scalar curvature."""

    op: np.ndarray
    scalar: float

    def __post_init__(self):
        arr = np.array(self.op, dtype=float) + 0.0  # normalizes -0.0 entries
        arr.setflags(write=False)
        object.__setattr__(self, "op", arr)

    def quadratic_form(self, m: Metric, x) -> float:
        """Ric(x, x) = <Ric x, x> in the metric m."""
        x = np.asarray(x, dtype=float)
        return float(x @ m.g @ (self.op @ x))


def levi_civita(alg: LieAlgebra, m: Metric, x, y) -> np.ndarray:
    """Covariant derivative of left-invariant fields: nabla_x y = [x, y]/2."""
    return 0.5 * bracket(alg, x, y)


def curvature_tensor(
    alg: LieAlgebra, m: Metric, conv: CurvatureConvention, x, y, z
) -> np.ndarray:
    """R(x, y)z = (sign/4) [[x, y], z] under the chosen convention."""
    return conv.sign * 0.25 * bracket(alg, bracket(alg, x, y), z)


def sectional(alg: LieAlgebra, m: Metric, x, y) -> float:
    """K(x, y) = |[x,y]|^2 / (4 (|x|^2 |y|^2 - <x,y>^2)).

    The denominator normalizes the plane, so x, y need not be orthonormal;
    a (numerically) dependent pair raises DegeneratePlaneError.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx = m.inner(x, x)
    yy = m.inner(y, y)
    xy = m.inner(x, y)
    denom = xx * yy - xy * xy
    if denom <= DEFAULT_TOL * xx * yy:
        raise DegeneratePlaneError("x and y do not span a plane")
    b = bracket(alg, x, y)
    return float(0.25 * m.inner(b, b) / denom)


def ricci(alg: LieAlgebra, m: Metric) -> RicciData:
    """Nonnegative Ricci operator: Ric = -1/4 sum_j ad_{E_j}^2 over a frame.

    The associated quadratic form is Ric(x, x) = 1/4 sum_j |[x, E_j]|^2, which
    is frame-independent and vanishes exactly on the center.
    """
    frame = orthonormal_frame(alg, m)
    n = alg.dim
    acc = np.zeros((n, n))
    for j in range(n):
        a = alg.ad(frame.column(j))
        acc += a @ a
    op = -0.25 * acc
    return RicciData(op=op, scalar=float(np.trace(op)))


def ricci_via_trace(
    alg: LieAlgebra, m: Metric, conv: CurvatureConvention
) -> np.ndarray:
    """Matrix of x -> sum_j R_conv(x, E_j) E_j, the signed curvature trace.

    Computed literally through the curvature tensor (not through ad squares),
    so comparing it against ricci() audits the sign convention: it equals
    +Ric for STANDARD and -Ric for PAPER.
    """
    frame = orthonormal_frame(alg, m)
    n = alg.dim
    out = np.zeros((n, n))
    basis = np.eye(n)
    for i in range(n):
        col = np.zeros(n)
        for j in range(n):
            ej = frame.column(j)
            col += curvature_tensor(alg, m, conv, basis[i], ej, ej)
        out[:, i] = col
    return out + 0.0


def is_flat(alg: LieAlgebra, m: Metric) -> bool:
    """True iff all structure constants vanish within tolerance.

    For a bi-invariant metric this is equivalent to K = 0 on every plane and
    to a vanishing Ricci operator.
    """
    return bool(np.max(np.abs(alg.c)) <= alg.tolerance())


def sectional_on_frame(alg: LieAlgebra, m: Metric) -> list[tuple[int, int, float]]:
    """K on every frame-pair plane (E_i, E_j), i < j, as (i, j, K) triples."""
    frame = orthonormal_frame(alg, m)
    out = []
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            out.append((i, j, sectional(alg, m, frame.column(i), frame.column(j))))
    return out


__all__ = [
    "CurvatureConvention",
    "RicciData",
    "levi_civita",
    "curvature_tensor",
    "sectional",
    "sectional_on_frame",
    "ricci",
    "ricci_via_trace",
    "is_flat",
]
