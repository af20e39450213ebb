"""Lie algebras given by structure constants, with metric validation and a registry.

An algebra is a rank-3 tensor c with [e_i, e_j] = sum_k c[i,j,k] e_k; a metric
is a symmetric positive-definite matrix on the same basis.  A metric is
admissible here when it is ad-invariant (<[x,y],z> + <y,[x,z]> = 0), which is
the algebra-level form of bi-invariance and certifies a compact-type algebra.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Global relative tolerance for all residual checks.  Absolute thresholds are
#: this value times the relevant magnitude scale (never below 1).
DEFAULT_TOL = 1e-9


class StructureError(ValueError):
    """Malformed input: bad dimensions, bad file schema, unknown name."""


class ValidationFailure(ValueError):
    """A validation gate that an operation requires did not pass."""


class DegeneratePlaneError(ValueError):
    """Sectional curvature was requested on a linearly dependent pair."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LieAlgebra:
    """A finite-dimensional real Lie algebra in a fixed basis.

    c[i, j, k] is the coefficient of e_k in [e_i, e_j].  ``abelian_is_torus``
    declares whether abelian factors integrate to tori (compact) rather than
    vector spaces; it is user-supplied metadata, not inferable from c.
    """

    name: str
    dim: int
    c: np.ndarray
    abelian_is_torus: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise StructureError(f"algebra dimension must be positive, got {self.dim}")
        arr = _frozen(self.c)
        if arr.shape != (self.dim,) * 3:
            raise StructureError(
                f"structure tensor shape {arr.shape} does not match dim {self.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise StructureError("structure constants must be finite")
        object.__setattr__(self, "c", arr)

    def tolerance(self) -> float:
        """Absolute tolerance scaled to the structure-constant magnitude."""
        return DEFAULT_TOL * max(1.0, float(np.max(np.abs(self.c))))

    def ad(self, x) -> np.ndarray:
        """Matrix of ad_x = [x, .] in the defining basis."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.c)


@dataclass(frozen=True)
class Metric:
    """A symmetric bilinear form on the algebra, as an n x n matrix."""

    g: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.g)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise StructureError(f"metric must be a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise StructureError("metric entries must be finite")
        object.__setattr__(self, "g", arr)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def inner(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.g @ np.asarray(y, float))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))


@dataclass(frozen=True)
class OrthonormalFrame:
    """Columns are frame vectors E_j expressed in the defining basis."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]


@dataclass(frozen=True)
class AlgebraValidation:
    antisymmetry_residual: float
    jacobi_residual: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "antisymmetry_residual": self.antisymmetry_residual,
            "jacobi_residual": self.jacobi_residual,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class MetricValidation:
    spd: bool
    ad_invariance_residual: float
    passed: bool
    #: A pass certifies a compact-type (compact + abelian) algebra.
    compact_type: bool

    def to_dict(self) -> dict:
        return {
            "spd": self.spd,
            "ad_invariance_residual": self.ad_invariance_residual,
            "passed": self.passed,
            "compact_type": self.compact_type,
        }


def validate_algebra(alg: LieAlgebra, tol: float | None = None) -> AlgebraValidation:
    """Check antisymmetry of the bracket and the Jacobi identity.

    Residuals are max absolute values over all index tuples.
    """
    tol = alg.tolerance() if tol is None else tol
    c = alg.c
    anti = float(np.max(np.abs(c + c.transpose(1, 0, 2)))) if alg.dim else 0.0
    # Cyclic sum of [[e_i,e_j],e_k] over (i,j,k): contract c with itself once.
    comp = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = comp + comp.transpose(1, 2, 0, 3) + comp.transpose(2, 0, 1, 3)
    jac = float(np.max(np.abs(cyc)))
    return AlgebraValidation(anti, jac, passed=(anti <= tol and jac <= tol))


def bracket(alg: LieAlgebra, x, y) -> np.ndarray:
    """[x, y] per the structure constants."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.einsum("i,j,ijk->k", x, y, alg.c)


def killing_form(alg: LieAlgebra) -> np.ndarray:
    """B(x, y) = trace(ad_x ad_y) as a symmetric matrix on the basis."""
    return np.einsum("iab,jba->ij", alg.c, alg.c)


def validate_metric(alg: LieAlgebra, m: Metric, tol: float | None = None) -> MetricValidation:
    """Check that m is SPD and ad-invariant for alg.

    Raises StructureError for a non-symmetric matrix or a dimension mismatch;
    those are malformed inputs, not validation findings.
    """
    if m.dim != alg.dim:
        raise StructureError(f"metric dim {m.dim} does not match algebra dim {alg.dim}")
    g = m.g
    sym = float(np.max(np.abs(g - g.T)))
    scale = max(1.0, float(np.max(np.abs(g))))
    if sym > DEFAULT_TOL * scale:
        raise StructureError(f"metric matrix is not symmetric (residual {sym})")
    tol = alg.tolerance() * scale if tol is None else tol
    eigs = np.linalg.eigvalsh(0.5 * (g + g.T))
    spd = bool(eigs[0] > DEFAULT_TOL * scale)
    # <[e_i,e_j],e_k> + <e_j,[e_i,e_k]>
    res = np.einsum("ijl,lk->ijk", alg.c, g) + np.einsum("ikl,jl->ijk", alg.c, g)
    ad_res = float(np.max(np.abs(res)))
    passed = bool(spd and ad_res <= tol)
    return MetricValidation(spd, ad_res, passed=passed, compact_type=passed)


def orthonormal_frame(alg: LieAlgebra, m: Metric) -> OrthonormalFrame:
    """Deterministic orthonormal frame from the Cholesky factor of the metric.

    With g = L L^T the frame is F = (L^T)^{-1}, so F^T g F = I.
    """
    if m.dim != alg.dim:
        raise StructureError(f"metric dim {m.dim} does not match algebra dim {alg.dim}")
    try:
        low = np.linalg.cholesky(m.g)
    except np.linalg.LinAlgError as exc:
        raise ValidationFailure("metric is not positive definite") from exc
    return OrthonormalFrame(np.linalg.inv(low).T)


def direct_sum(
    alg1: LieAlgebra, m1: Metric, alg2: LieAlgebra, m2: Metric
) -> tuple[LieAlgebra, Metric]:
    """Block direct sum of two metrized algebras; cross-brackets vanish."""
    n1, n2 = alg1.dim, alg2.dim
    n = n1 + n2
    c = np.zeros((n, n, n))
    c[:n1, :n1, :n1] = alg1.c
    c[n1:, n1:, n1:] = alg2.c
    g = np.zeros((n, n))
    g[:n1, :n1] = m1.g
    g[n1:, n1:] = m2.g
    alg = LieAlgebra(
        name=f"{alg1.name}+{alg2.name}",
        dim=n,
        c=c,
        abelian_is_torus=alg1.abelian_is_torus and alg2.abelian_is_torus,
    )
    return alg, Metric(g)


def center(alg: LieAlgebra, tol: float | None = None) -> tuple[np.ndarray, bool]:
    """Basis (columns) of {x : [x, y] = 0 for all y} and an is_abelian flag."""
    tol = alg.tolerance() if tol is None else tol
    n = alg.dim
    # x in center iff sum_i x_i c[i, :, :] = 0; stack into an (n^2, n) map.
    mat = alg.c.reshape(n, n * n).T
    _, svals, vt = np.linalg.svd(mat)
    svals = np.concatenate([svals, np.zeros(n - svals.size)])
    mask = svals <= tol * max(1.0, svals[0] if svals.size else 0.0)
    basis = vt[mask].T.copy()
    return basis, bool(basis.shape[1] == n)


_EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k, _s in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
                       (1, 0, 2, -1.0), (2, 1, 0, -1.0), (0, 2, 1, -1.0)]:
    _EPS3[_i, _j, _k] = _s
_EPS3.setflags(write=False)

_TORUS_RE = re.compile(r"^torus_n\((\d+)\)$")

REGISTRY_NAMES = ("su2", "so3", "torus_n(m)", "su2xsu2", "heisenberg")


def registry(name: str) -> tuple[LieAlgebra, Metric]:
    """Built-in metrized algebras by name.

    su2 and so3 use c[i,j,k] = epsilon_ijk with the identity metric;
    torus_n(m) is the abelian algebra of dimension m; heisenberg ships with
    the identity metric and is the canonical ad-invariance counterexample
    (its metric validation fails by design).
    """
    if name in ("su2", "so3"):
        return LieAlgebra(name=name, dim=3, c=_EPS3), Metric(np.eye(3))
    if name == "su2xsu2":
        a1, g1 = registry("su2")
        a2, g2 = registry("su2")
        alg, g = direct_sum(a1, g1, a2, g2)
        return LieAlgebra(name="su2xsu2", dim=6, c=alg.c), g
    if name == "heisenberg":
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0
        c[1, 0, 2] = -1.0
        return LieAlgebra(name="heisenberg", dim=3, c=c), Metric(np.eye(3))
    match = _TORUS_RE.match(name)
    if match:
        m = int(match.group(1))
        if m < 1:
            raise StructureError(f"torus dimension must be positive: {name!r}")
        return LieAlgebra(name=name, dim=m, c=np.zeros((m, m, m))), Metric(np.eye(m))
    raise StructureError(f"unknown registry name: {name!r}")


def _metric_from_spec(spec, alg: LieAlgebra) -> Metric:
    if spec == "identity":
        return Metric(np.eye(alg.dim))
    if isinstance(spec, str) and spec.startswith("killing_negated_scaled:"):
        try:
            s = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise StructureError(f"bad metric spec {spec!r}") from exc
        return Metric(-s * killing_form(alg))
    if isinstance(spec, dict) and set(spec) == {"matrix"}:
        return Metric(np.asarray(spec["matrix"], dtype=float))
    raise StructureError(f"unrecognized metric spec: {spec!r}")


def _algebra_from_dict(data: dict) -> tuple[LieAlgebra, Metric]:
    for key in ("name", "dim", "brackets"):
        if key not in data:
            raise StructureError(f"algebra file missing field {key!r}")
    name = data["name"]
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise StructureError(f"dim must be a positive integer, got {dim!r}")
    c = np.zeros((dim, dim, dim))
    seen: set[tuple[int, int]] = set()
    for entry in data["brackets"]:
        try:
            i, j, terms = entry
        except (TypeError, ValueError) as exc:
            raise StructureError(f"bad bracket entry {entry!r}") from exc
        if not (isinstance(i, int) and isinstance(j, int) and 1 <= i <= dim and 1 <= j <= dim):
            raise StructureError(f"bracket indices out of range in {entry!r} (1-based)")
        if (i, j) in seen:
            raise StructureError(f"duplicate bracket pair ({i}, {j})")
        seen.add((i, j))
        row = np.zeros(dim)
        for term in terms:
            try:
                coeff, k = term
            except (TypeError, ValueError) as exc:
                raise StructureError(f"bad bracket term {term!r}") from exc
            if not (isinstance(k, int) and 1 <= k <= dim):
                raise StructureError(f"bracket target index out of range in {term!r}")
            row[k - 1] += float(coeff)
        if i == j and np.any(row != 0.0):
            raise StructureError(f"[e_{i}, e_{i}] must vanish, file says otherwise")
        c[i - 1, j - 1] = row
    # Antisymmetric completion; reject inconsistent double entries.
    for (i, j) in sorted(seen):
        if (j, i) in seen:
            if not np.allclose(c[j - 1, i - 1], -c[i - 1, j - 1], atol=0.0):
                raise StructureError(
                    f"brackets for ({i},{j}) and ({j},{i}) are not antisymmetric"
                )
        elif i != j:
            c[j - 1, i - 1] = -c[i - 1, j - 1]
    alg = LieAlgebra(
        name=str(name),
        dim=dim,
        c=c,
        abelian_is_torus=bool(data.get("abelian_factor_is_torus", True)),
    )
    return alg, _metric_from_spec(data.get("metric", "identity"), alg)


def load_algebra(source, base_dir: Path | None = None) -> tuple[LieAlgebra, Metric]:
    """Load a metrized algebra from a dict, a JSON file path, or a registry name."""
    if isinstance(source, dict):
        return _algebra_from_dict(source)
    if isinstance(source, (str, Path)):
        text = str(source)
        try:
            return registry(text)
        except StructureError:
            pass
        path = Path(text)
        if base_dir is not None and not path.is_absolute():
            candidate = base_dir / path
            if candidate.exists():
                path = candidate
        if not path.exists():
            raise StructureError(f"{text!r} is neither a registry name nor a readable file")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise StructureError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise StructureError(f"algebra file {path} must contain a JSON object")
        return _algebra_from_dict(data)
    raise StructureError(f"cannot load an algebra from {type(source).__name__}")
