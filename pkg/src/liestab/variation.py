"""Second-variation analysis of homomorphisms: index densities and the verdict.

Left-invariant data makes every integrand constant, so second-variation
integrals reduce to volume times a density; all functions here return
densities (per unit volume) and the report attaches a total index only when
the caller supplies a volume.

Two inequivalent evaluation routes are computed side by side on purpose:
the direct trace-Laplacian of a pushed-forward field, and the curvature
chain that rewrites it through the Weitzenboeck operator.  Their mismatch
in sign is a finding this module reports (discrepancy_flag), not a bug it
resolves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .curvature import CurvatureConvention, ricci
from .lie_core import DEFAULT_TOL, ValidationFailure, bracket, orthonormal_frame
from .morphism import Homomorphism, require_valid


class Verdict(Enum):
    UNSTABLE = "UNSTABLE"
    FLAT_TORUS = "FLAT_TORUS"


@dataclass(frozen=True)
class StabilityReport:
    """Dichotomy verdict plus the index-form values behind it.

    index_theorem_density is -2 Ric(w, w) at the unit witness w (energy per
    time^2 per unit volume); the two smith densities evaluate the
    second-variation integrand at v = phi(w) under each curvature sign.
    discrepancy_flag records that the index density is negative while the
    PLUS-sign integrand vanishes, which happens for every nonabelian domain.
    """

    verdict: Verdict
    witness: np.ndarray | None
    index_theorem_density: float
    smith_density_paper: float
    smith_density_standard: float
    ricci_max_eigenvalue: float
    discrepancy_flag: bool
    volume: float | None = None
    total_index: float | None = None

    def __post_init__(self):
        if self.witness is not None:
            arr = np.array(self.witness, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, "witness", arr)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "index_theorem_density": self.index_theorem_density,
            "smith_density_paper": self.smith_density_paper,
            "smith_density_standard": self.smith_density_standard,
            "ricci_max_eigenvalue": self.ricci_max_eigenvalue,
            "discrepancy_flag": self.discrepancy_flag,
            "volume": self.volume,
            "total_index": self.total_index,
        }


def _codomain_curvature_trace(h: Homomorphism, conv: CurvatureConvention, v) -> np.ndarray:
    """sum_j R_conv(A_j, v) A_j over the pushed frame A_j = phi(E_j)."""
    c2 = h.codomain_algebra
    images = h.frame_images()
    out = np.zeros(h.n2)
    for j in range(h.n1):
        aj = images[j]
        out += conv.sign * 0.25 * bracket(c2, bracket(c2, aj, v), aj)
    return out


def _codomain_laplacian(h: Homomorphism, v) -> np.ndarray:
    """(1/4) sum_j [A_j, [A_j, v]] over the pushed frame."""
    c2 = h.codomain_algebra
    images = h.frame_images()
    out = np.zeros(h.n2)
    for j in range(h.n1):
        aj = images[j]
        out += 0.25 * bracket(c2, aj, bracket(c2, aj, v))
    return out


def weitzenboeck_S(h: Homomorphism, conv: CurvatureConvention, x) -> np.ndarray:
    """S(x) = -sum_j R_conv(phi E_j, phi x) phi E_j + phi Ric(x).

    With the PLUS-sign curvature this vanishes for every valid homomorphism;
    with the MINUS sign it equals 2 phi Ric(x).
    """
    ric1 = ricci(h.domain_algebra, h.domain_metric)
    return -_codomain_curvature_trace(h, conv, h.apply(x)) + h.apply(ric1.op @ np.asarray(x, float))


def nabla2_pushforward_direct(h: Homomorphism, x) -> np.ndarray:
    """Trace-Laplacian of phi(x) computed directly: (1/4) sum_j [A_j, [A_j, phi x]].

    By naturality of brackets this equals -phi Ric(x); nabla2_pushforward_paperchain
    evaluates the curvature-chain rewrite of the same quantity for comparison.
    """
    return _codomain_laplacian(h, h.apply(x))


def nabla2_pushforward_paperchain(
    h: Homomorphism, conv: CurvatureConvention, x
) -> np.ndarray:
    """The chain rewrite, evaluated literally:
    -sum_j R_conv(phi E_j, phi x) phi E_j + 2 phi Ric(x).

    No identity with the direct path is assumed; callers compare the two.
    """
    ric1 = ricci(h.domain_algebra, h.domain_metric)
    two_ric = 2.0 * h.apply(ric1.op @ np.asarray(x, float))
    return -_codomain_curvature_trace(h, conv, h.apply(x)) + two_ric


def smith_index_density(h: Homomorphism, conv: CurvatureConvention, v) -> float:
    """Second-variation integrand for a left-invariant field v:
    -< (1/4) sum_j [A_j,[A_j,v]] + sum_j R_conv(A_j, v) A_j , v >.

    Under the PLUS sign the two terms cancel for every v, matching the fact
    that flowing a left-invariant field is a right translation (an isometry).
    """
    v = np.asarray(v, dtype=float)
    operator = _codomain_laplacian(h, v) + _codomain_curvature_trace(h, conv, v)
    return -float(operator @ h.codomain_metric.g @ v) + 0.0


def index_theorem_density(h: Homomorphism, x) -> float:
    """-2 Ric(x, x) in the domain metric: always <= 0, zero iff x is central.

    Multiplying by the group volume gives the total index value I(phi x, phi x).
    """
    ric1 = ricci(h.domain_algebra, h.domain_metric)
    return -2.0 * ric1.quadratic_form(h.domain_metric, x) + 0.0


def _canonical_unit_vector(basis: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Deterministic representative of a subspace (columns of basis).

    Reduced row echelon form with pivot columns scanned from the last
    coordinate upward; the returned vector is the one with the most leading
    zeros, unit length in g, first nonzero coordinate positive.
    """
    rows = basis.T.copy()
    nrows, n = rows.shape
    scale = max(1.0, float(np.max(np.abs(rows))))
    r = 0
    pivot_cols: list[int] = []
    for col in reversed(range(n)):
        if r >= nrows:
            break
        pos = r + int(np.argmax(np.abs(rows[r:, col])))
        if abs(rows[pos, col]) <= 1e-12 * scale:
            continue
        rows[[r, pos]] = rows[[pos, r]]
        rows[r] /= rows[r, col]
        for other in range(nrows):
            if other != r:
                rows[other] -= rows[other, col] * rows[r]
        pivot_cols.append(col)
        r += 1
    if not pivot_cols:
        raise ValidationFailure("cannot canonicalize a zero subspace")
    best = rows[0]
    best[np.abs(best) <= 1e-12 * max(1.0, float(np.max(np.abs(best))))] = 0.0
    best = best / np.sqrt(best @ g @ best)
    for entry in best:
        if entry != 0.0:
            if entry < 0.0:
                best = -best
            break
    return best


def stability_report(h: Homomorphism, volume: float | None = None) -> StabilityReport:
    """Stability dichotomy for a validated minimal homomorphism.

    UNSTABLE iff the top eigenvalue of the domain Ricci operator exceeds
    tolerance, with the canonical unit eigenvector as witness and index
    density -2 * (top eigenvalue); otherwise the domain is flat and the
    verdict is FLAT_TORUS, which requires the torus flag on abelian factors
    (a flat noncompact domain is outside the dichotomy and raises).
    """
    require_valid(h)
    if volume is not None and not volume > 0.0:
        raise ValidationFailure(f"volume must be positive, got {volume}")
    ric1 = ricci(h.domain_algebra, h.domain_metric)
    frame = orthonormal_frame(h.domain_algebra, h.domain_metric)
    fmat = frame.matrix
    sym = fmat.T @ h.domain_metric.g @ (ric1.op @ fmat)
    sym = 0.5 * (sym + sym.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    lam_max = float(eigvals[-1])
    threshold = DEFAULT_TOL * max(1.0, abs(ric1.scalar))
    if lam_max > threshold:
        verdict = Verdict.UNSTABLE
        cluster = eigvals >= lam_max - threshold
        space = fmat @ eigvecs[:, cluster]
        witness = _canonical_unit_vector(space, h.domain_metric.g)
        index_density = -2.0 * lam_max
        v_field = h.apply(witness)
    else:
        if not h.domain_algebra.abelian_is_torus:
            raise ValidationFailure(
                "flat non-compact domain: abelian factors are declared non-torus, "
                "so the domain is not compact and the dichotomy does not apply"
            )
        verdict = Verdict.FLAT_TORUS
        witness = None
        index_density = 0.0
        v_field = h.apply(fmat[:, 0])
    smith_paper = smith_index_density(h, CurvatureConvention.PAPER, v_field)
    smith_standard = smith_index_density(h, CurvatureConvention.STANDARD, v_field)
    discrepancy = bool(index_density < -threshold and abs(smith_paper) <= threshold)
    total = None if volume is None else index_density * volume
    return StabilityReport(
        verdict=verdict,
        witness=witness,
        index_theorem_density=index_density,
        smith_density_paper=smith_paper,
        smith_density_standard=smith_standard,
        ricci_max_eigenvalue=lam_max,
        discrepancy_flag=discrepancy,
        volume=volume,
        total_index=total,
    )


__all__ = [
    "Verdict",
    "StabilityReport",
    "weitzenboeck_S",
    "nabla2_pushforward_direct",
    "nabla2_pushforward_paperchain",
    "smith_index_density",
    "index_theorem_density",
    "stability_report",
]
