from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import liestab as ls

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def build_identity_su2() -> ls.Homomorphism:
    alg, m = ls.registry("su2")
    return ls.Homomorphism(alg, m, alg, m, np.eye(3))


def build_torus_inclusion() -> ls.Homomorphism:
    dom_alg, dom_m = ls.registry("torus_n(2)")
    cod_alg, cod_m = ls.registry("torus_n(3)")
    phi = np.zeros((3, 2))
    phi[0, 0] = 1.0
    phi[1, 1] = 1.0
    return ls.Homomorphism(dom_alg, dom_m, cod_alg, cod_m, phi)


def build_diagonal_su2() -> ls.Homomorphism:
    dom_alg, _ = ls.registry("su2")
    cod_alg, cod_m = ls.registry("su2xsu2")
    phi = np.vstack([np.eye(3), np.eye(3)])
    return ls.Homomorphism(dom_alg, ls.Metric(2.0 * np.eye(3)), cod_alg, cod_m, phi)


def build_su2_plus_torus() -> ls.Homomorphism:
    a1, m1 = ls.registry("su2")
    a2, m2 = ls.registry("torus_n(1)")
    alg, met = ls.direct_sum(a1, m1, a2, m2)
    return ls.Homomorphism(alg, met, alg, met, np.eye(4))


HOM_BUILDERS = {
    "identity_su2": build_identity_su2,
    "torus_inclusion": build_torus_inclusion,
    "diagonal_su2": build_diagonal_su2,
    "su2_plus_torus": build_su2_plus_torus,
}


@pytest.fixture(params=sorted(HOM_BUILDERS))
def valid_hom(request) -> ls.Homomorphism:
    return HOM_BUILDERS[request.param]()


@pytest.fixture
def identity_su2() -> ls.Homomorphism:
    return build_identity_su2()


@pytest.fixture
def torus_inclusion() -> ls.Homomorphism:
    return build_torus_inclusion()


@pytest.fixture
def diagonal_su2() -> ls.Homomorphism:
    return build_diagonal_su2()


def brute_bracket(c: np.ndarray, x, y) -> np.ndarray:
    """Independent bracket evaluation by explicit loops (test oracle)."""
    n = c.shape[0]
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[k] += x[i] * y[j] * c[i, j, k]
    return out


def brute_jacobi_residual(c: np.ndarray) -> float:
    """Max residual of [[x,y],z] + [[y,z],x] + [[z,x],y] over basis triples."""
    n = c.shape[0]
    worst = 0.0
    eye = np.eye(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                total = (
                    brute_bracket(c, brute_bracket(c, eye[i], eye[j]), eye[k])
                    + brute_bracket(c, brute_bracket(c, eye[j], eye[k]), eye[i])
                    + brute_bracket(c, brute_bracket(c, eye[k], eye[i]), eye[j])
                )
                worst = max(worst, float(np.max(np.abs(total))))
    return worst
