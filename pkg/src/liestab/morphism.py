"""Homomorphisms of metrized Lie algebras: validation, second fundamental form, tension.

A map is stored as its differential at the identity, an n2 x n1 matrix phi.
Bracket preservation plus an isometric pullback metric make the induced group
map a harmonic (indeed totally geodesic) isometric immersion, which is what
validate_hom certifies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lie_core import (
    LieAlgebra,
    Metric,
    StructureError,
    ValidationFailure,
    bracket,
    load_algebra,
    orthonormal_frame,
    validate_algebra,
    validate_metric,
)


@dataclass(frozen=True)
class Homomorphism:
    """A linear map phi between metrized algebras (columns: domain basis images)."""

    domain_algebra: LieAlgebra
    domain_metric: Metric
    codomain_algebra: LieAlgebra
    codomain_metric: Metric
    phi: np.ndarray

    def __post_init__(self):
        arr = np.array(self.phi, dtype=float)
        if arr.shape != (self.codomain_algebra.dim, self.domain_algebra.dim):
            raise StructureError(
                f"phi shape {arr.shape} does not match "
                f"({self.codomain_algebra.dim}, {self.domain_algebra.dim})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    @property
    def n1(self) -> int:
        return self.domain_algebra.dim

    @property
    def n2(self) -> int:
        return self.codomain_algebra.dim

    def apply(self, x) -> np.ndarray:
        return self.phi @ np.asarray(x, dtype=float)

    def tolerance(self) -> float:
        return max(self.domain_algebra.tolerance(), self.codomain_algebra.tolerance())

    def frame_images(self) -> np.ndarray:
        """Rows are phi(E_j) for the domain orthonormal frame E_j."""
        frame = orthonormal_frame(self.domain_algebra, self.domain_metric)
        return (self.phi @ frame.matrix).T


@dataclass(frozen=True)
class HomValidation:
    hom_residual: float
    isometry_residual: float
    rank: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "hom_residual": self.hom_residual,
            "isometry_residual": self.isometry_residual,
            "rank": self.rank,
            "passed": self.passed,
        }


def validate_hom(h: Homomorphism, tol: float | None = None) -> HomValidation:
    """Check bracket preservation, isometric pullback, and full rank.

    hom residual: max |phi[e_i,e_j] - [phi e_i, phi e_j]| over basis pairs;
    isometry residual: max |phi^T g2 phi - g1|.
    """
    tol = h.tolerance() if tol is None else tol
    c1 = h.domain_algebra.c
    c2 = h.codomain_algebra.c
    phi = h.phi
    pushed = np.einsum("ijl,kl->ijk", c1, phi)
    imaged = np.einsum("ai,bj,abk->ijk", phi, phi, c2)
    hom_res = float(np.max(np.abs(pushed - imaged)))
    iso_res = float(np.max(np.abs(phi.T @ h.codomain_metric.g @ phi - h.domain_metric.g)))
    rank = int(np.linalg.matrix_rank(phi))
    passed = bool(hom_res <= tol and iso_res <= tol and rank == h.n1)
    return HomValidation(hom_res, iso_res, rank, passed)


def require_valid(h: Homomorphism) -> None:
    """Raise ValidationFailure naming the failing residual if h does not validate."""
    rep_a = validate_algebra(h.domain_algebra)
    if not rep_a.passed:
        raise ValidationFailure(
            "domain algebra invalid: antisymmetry residual "
            f"{rep_a.antisymmetry_residual}, jacobi residual {rep_a.jacobi_residual}"
        )
    rep_a2 = validate_algebra(h.codomain_algebra)
    if not rep_a2.passed:
        raise ValidationFailure(
            "codomain algebra invalid: antisymmetry residual "
            f"{rep_a2.antisymmetry_residual}, jacobi residual {rep_a2.jacobi_residual}"
        )
    rep_m = validate_metric(h.domain_algebra, h.domain_metric)
    if not rep_m.passed:
        raise ValidationFailure(
            f"domain metric invalid: spd={rep_m.spd}, "
            f"ad-invariance residual {rep_m.ad_invariance_residual}"
        )
    rep_m2 = validate_metric(h.codomain_algebra, h.codomain_metric)
    if not rep_m2.passed:
        raise ValidationFailure(
            f"codomain metric invalid: spd={rep_m2.spd}, "
            f"ad-invariance residual {rep_m2.ad_invariance_residual}"
        )
    rep_h = validate_hom(h)
    if not rep_h.passed:
        raise ValidationFailure(
            f"homomorphism invalid: hom residual {rep_h.hom_residual}, "
            f"isometry residual {rep_h.isometry_residual}, rank {rep_h.rank}"
        )


def second_fundamental_form(h: Homomorphism, x, y) -> np.ndarray:
    """B(x, y) = ([phi x, phi y] - phi [x, y]) / 2, a codomain vector.

    Symmetric in (x, y) and identically zero when phi preserves brackets;
    nonzero values quantify how far a candidate map is from totally geodesic.
    """
    px = h.apply(x)
    py = h.apply(y)
    return 0.5 * (bracket(h.codomain_algebra, px, py) - h.apply(bracket(h.domain_algebra, x, y)))


def tension(h: Homomorphism) -> np.ndarray:
    """Trace of the second fundamental form over the domain frame."""
    frame = orthonormal_frame(h.domain_algebra, h.domain_metric)
    out = np.zeros(h.n2)
    for j in range(h.n1):
        ej = frame.column(j)
        out += second_fundamental_form(h, ej, ej)
    return out


def is_totally_geodesic(h: Homomorphism, tol: float | None = None) -> tuple[bool, float]:
    """(flag, max |B(E_i, E_j)| over frame pairs), norms in the codomain metric."""
    tol = h.tolerance() if tol is None else tol
    frame = orthonormal_frame(h.domain_algebra, h.domain_metric)
    worst = 0.0
    for i in range(h.n1):
        for j in range(h.n1):
            b = second_fundamental_form(h, frame.column(i), frame.column(j))
            worst = max(worst, h.codomain_metric.norm(b))
    return worst <= tol, worst


def _hom_from_dict(data: dict, base_dir: Path | None) -> Homomorphism:
    for key in ("domain", "codomain", "phi"):
        if key not in data:
            raise StructureError(f"homomorphism file missing field {key!r}")
    dom_alg, dom_m = load_algebra(data["domain"], base_dir=base_dir)
    cod_alg, cod_m = load_algebra(data["codomain"], base_dir=base_dir)
    phi = np.asarray(data["phi"], dtype=float)
    if phi.ndim != 2:
        raise StructureError("phi must be a matrix (n2 rows, n1 columns)")
    return Homomorphism(dom_alg, dom_m, cod_alg, cod_m, phi)


def load_homomorphism(source, base_dir: Path | None = None) -> Homomorphism:
    """Load a homomorphism from a dict or a JSON file path."""
    if isinstance(source, dict):
        return _hom_from_dict(source, base_dir)
    path = Path(source)
    if not path.exists():
        raise StructureError(f"homomorphism file {path} does not exist")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise StructureError(f"homomorphism file {path} must contain a JSON object")
    return _hom_from_dict(data, base_dir if base_dir is not None else path.parent)
