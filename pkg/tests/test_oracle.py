from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

import liestab as ls
from conftest import build_identity_su2, build_torus_inclusion


@pytest.fixture
def su2_realization():
    alg, m = ls.registry("su2")
    return ls.SU2Realization(alg, m)


@pytest.fixture
def torus2_realization():
    alg, m = ls.registry("torus_n(2)")
    return ls.TorusRealization(alg, m)


def product_realization():
    su2 = ls.SU2Realization(*ls.registry("su2"))
    torus = ls.TorusRealization(*ls.registry("torus_n(2)"))
    return ls.ProductRealization([su2, torus])


def test_su2_volume_matches_round_sphere(su2_realization):
    # sectional curvature 1/4 means a round 3-sphere of radius 2
    assert su2_realization.volume == pytest.approx(2.0 * np.pi**2 * 8.0, rel=1e-14)


def test_su2_scaled_metric_volume():
    alg, _ = ls.registry("su2")
    r = ls.SU2Realization(alg, ls.Metric(4.0 * np.eye(3)))
    assert r.volume == pytest.approx(16.0 * np.pi**2 * 8.0, rel=1e-14)


def test_su2_realization_rejects_wrong_algebra():
    alg, m = ls.registry("torus_n(3)")
    with pytest.raises(ls.StructureError):
        ls.SU2Realization(alg, m)
    su2, _ = ls.registry("su2")
    with pytest.raises(ls.StructureError):
        ls.SU2Realization(su2, ls.Metric(np.diag([1.0, 2.0, 1.0])))


def test_torus_realization_rejects_nonabelian():
    alg, m = ls.registry("su2")
    with pytest.raises(ls.StructureError):
        ls.TorusRealization(alg, m)


def test_su2_exp_known_values(su2_realization):
    r = su2_realization
    assert np.allclose(r.exp(np.zeros(3)), [1.0, 0.0, 0.0, 0.0])
    # |x| = pi rotates the identity to the pure-imaginary quaternion
    assert np.allclose(r.exp(np.array([np.pi, 0.0, 0.0])), [0.0, 1.0, 0.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("make", [
    lambda: ls.SU2Realization(*ls.registry("su2")),
    lambda: ls.TorusRealization(*ls.registry("torus_n(2)")),
    product_realization,
])
def test_exp_log_round_trip(make):
    r = make()
    rng = np.random.default_rng(42)
    x = rng.normal(size=(1000, r.dim))
    x *= rng.uniform(0.01, 0.99, size=(1000, 1)) / np.linalg.norm(x, axis=1, keepdims=True)
    back = r.log(r.exp(x))
    assert np.max(np.abs(back - x)) < 1e-10


def test_haar_samples_deterministic(su2_realization):
    a, wa = ls.haar_samples(su2_realization, 4, 7)
    b, wb = ls.haar_samples(su2_realization, 4, 7)
    assert np.array_equal(a, b) and wa == wb
    c, _ = ls.haar_samples(su2_realization, 4, 8)
    assert not np.array_equal(a, c)
    with pytest.raises(ls.StructureError):
        ls.haar_samples(su2_realization, 0, 1)


def test_torus_lattice_dim1_equispaced():
    r = ls.TorusRealization(*ls.registry("torus_n(1)"))
    points, weight = ls.haar_samples(r, 4, 0)
    assert np.allclose(points.ravel(), [0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    assert weight == pytest.approx(r.volume / 4.0)


def test_torus_lattice_dim2_properties(torus2_realization):
    points, _ = ls.haar_samples(torus2_realization, 128, 3)
    assert points.shape == (128, 2)
    assert np.all(points >= 0.0) and np.all(points < 2.0 * np.pi)
    # first coordinate is the plain equispaced sequence
    assert np.allclose(np.sort(points[:, 0]), np.arange(128) / 128.0 * 2.0 * np.pi)


def test_su2_samples_are_unit_and_uniform(su2_realization):
    points, _ = ls.haar_samples(su2_realization, 100_000, 7)
    norms = np.linalg.norm(points, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-12
    assert np.mean(points[:, 0] ** 2) == pytest.approx(0.25, rel=0.01)


def test_su2_adjoint_is_matrix_exponential_of_ad(su2_realization):
    alg, _ = ls.registry("su2")
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=3)
        q = su2_realization.exp(x)
        rot = ls.SU2Realization.rotation_matrices(q)
        ref = scipy.linalg.expm(alg.ad(x))
        assert np.max(np.abs(rot - ref)) < 1e-12


def test_product_realization_layout():
    r = product_realization()
    assert r.dim == 5 and r.point_dim == 6
    assert r.volume == pytest.approx(16.0 * np.pi**2 * (2.0 * np.pi) ** 2, rel=1e-12)
    points, _ = ls.haar_samples(r, 64, 5)
    assert points.shape == (64, 6)
    again, _ = ls.haar_samples(r, 64, 5)
    assert np.array_equal(points, again)


def test_product_of_tori_coordinates_decorrelated():
    t1 = ls.TorusRealization(*ls.registry("torus_n(1)"))
    t2 = ls.TorusRealization(*ls.registry("torus_n(1)"))
    prod = ls.ProductRealization([t1, t2])
    points, _ = ls.haar_samples(prod, 233, 0)
    # a joint lattice: the two coordinates must not be the identical sequence
    assert not np.allclose(points[:, 0], points[:, 1])
    mean = np.mean(np.cos(points[:, 0] - points[:, 1]))
    assert abs(mean) < 0.05


def test_energy_density_values(identity_su2, torus_inclusion, diagonal_su2):
    assert ls.energy_density(identity_su2) == pytest.approx(1.5, abs=1e-13)
    assert ls.energy_density(torus_inclusion) == pytest.approx(1.0, abs=1e-13)
    assert ls.energy_density(diagonal_su2) == pytest.approx(1.5, abs=1e-13)


def test_energy_quadrature_constant_integrand(identity_su2, su2_realization):
    e = ls.energy_quadrature(identity_su2, su2_realization, 4096, 11)
    assert e == pytest.approx(1.5 * su2_realization.volume, abs=1e-10)


def test_energy_quadrature_broken_map():
    alg, m = ls.registry("su2")
    h = ls.Homomorphism(alg, m, alg, m, np.diag([1.0, 1.0, 2.0]))
    r = ls.SU2Realization(alg, m)
    # (1/2)(1 + 1 + 4) = 3 per unit volume, even though h fails validation
    assert ls.energy_quadrature(h, r, 512, 2) == pytest.approx(3.0 * r.volume, rel=1e-12)


def test_energy_quadrature_incompatible_realization(identity_su2, torus2_realization):
    with pytest.raises(ls.StructureError):
        ls.energy_quadrature(identity_su2, torus2_realization, 16, 0)


def test_variation_energy_left_invariant_is_energy(identity_su2, su2_realization):
    field = ls.SampledField.invariant([1.0, 0.0, 0.0])
    e0 = ls.energy_quadrature(identity_su2, su2_realization, 2048, 7)
    for t in (0.0, 0.05, 0.3):
        et = ls.variation_energy(identity_su2, su2_realization, field, t, 2048, 7)
        assert abs(et - e0) < 1e-10
    # t = 0 goes through the identical code path and so is bit-identical
    assert ls.variation_energy(identity_su2, su2_realization, field, 0.0, 2048, 7) == e0


def test_variation_energy_quadratic_growth_flat_target(torus_inclusion, torus2_realization):
    field = ls.builtin_field("sin1", torus_inclusion, torus2_realization)
    e0 = ls.energy_quadrature(torus_inclusion, torus2_realization, 1024, 0)
    assert e0 == pytest.approx(1.0 * torus2_realization.volume, abs=1e-10)
    t = 0.05
    et = ls.variation_energy(torus_inclusion, torus2_realization, field, t, 1024, 0)
    assert et >= e0
    expected_gain = t * t * 0.25 * torus2_realization.volume  # (t^2/2) integral of cos^2
    assert et - e0 == pytest.approx(expected_gain, rel=1e-10)


def test_second_variation_zero_field_exact(identity_su2, su2_realization):
    field = ls.SampledField.invariant([0.0, 0.0, 0.0])
    d1, d2 = ls.second_variation_fd(identity_su2, su2_realization, field, 1e-3, 256, 0)
    assert d1 == 0.0 and d2 == 0.0


def test_second_variation_left_invariant_su2(identity_su2, su2_realization):
    field = ls.SampledField.invariant([1.0, 0.0, 0.0])
    d1, d2 = ls.second_variation_fd(identity_su2, su2_realization, field, 1e-3, 10_000, 0)
    assert abs(d1) < 1e-8
    assert abs(d2) < 1e-6


def test_second_variation_flat_quadratic(torus_inclusion, torus2_realization):
    field = ls.builtin_field("sin1", torus_inclusion, torus2_realization)
    target = 0.5 * torus2_realization.volume
    d1, d2 = ls.second_variation_fd(torus_inclusion, torus2_realization, field, 1e-3, 10_000, 0)
    assert abs(d1) < 1e-8
    assert d2 == pytest.approx(target, rel=5e-3)


def test_second_variation_quadrature_convergence(torus_inclusion, torus2_realization):
    target = 0.5 * torus2_realization.volume
    floor = 1e-9 * torus2_realization.volume
    errors = []
    for count in (1000, 10_000, 100_000):
        _, d2 = ls.second_variation_fd(
            torus_inclusion, torus2_realization,
            ls.builtin_field("sin1", torus_inclusion, torus2_realization),
            1e-3, count, 0,
        )
        errors.append(abs(d2 - target))
    assert errors[1] <= errors[0] + floor
    assert errors[2] <= errors[1] + floor


def test_second_variation_step_bounds(identity_su2, su2_realization):
    field = ls.SampledField.invariant([1.0, 0.0, 0.0])
    for bad in (0.0, -1e-3, 0.2):
        with pytest.raises(ls.StructureError):
            ls.second_variation_fd(identity_su2, su2_realization, field, bad, 16, 0)


def test_noninvariant_field_requires_derivatives(torus_inclusion, torus2_realization):
    field = ls.SampledField.from_functions(lambda pts: np.zeros((pts.shape[0], 3)))
    with pytest.raises(ls.StructureError, match="derivative"):
        ls.variation_energy(torus_inclusion, torus2_realization, field, 0.1, 16, 0)


def test_invariant_field_dimension_checked(identity_su2, su2_realization):
    field = ls.SampledField.invariant([1.0, 0.0])
    with pytest.raises(ls.StructureError):
        ls.variation_energy(identity_su2, su2_realization, field, 0.1, 16, 0)


def test_builtin_field_unknown_name(torus_inclusion, torus2_realization):
    with pytest.raises(ls.StructureError):
        ls.builtin_field("nope", torus_inclusion, torus2_realization)


def test_oracle_agrees_with_closed_form_density(identity_su2, su2_realization):
    # second derivative for a left-invariant field matches the closed-form
    # integrand (zero under the plus-sign convention) times volume
    field = ls.SampledField.invariant([1.0, 0.0, 0.0])
    _, d2 = ls.second_variation_fd(identity_su2, su2_realization, field, 1e-3, 4096, 3)
    density = ls.smith_index_density(
        identity_su2, ls.CurvatureConvention.PAPER, np.array([1.0, 0.0, 0.0])
    )
    assert abs(d2 - density * su2_realization.volume) < 1e-6


def test_runs_are_bit_identical(identity_su2, su2_realization):
    field = ls.SampledField.invariant([1.0, 0.0, 0.0])
    first = ls.second_variation_fd(identity_su2, su2_realization, field, 1e-3, 5000, 7)
    second = ls.second_variation_fd(identity_su2, su2_realization, field, 1e-3, 5000, 7)
    assert first == second
    e1 = ls.energy_quadrature(identity_su2, su2_realization, 5000, 7)
    e2 = ls.energy_quadrature(identity_su2, su2_realization, 5000, 7)
    assert e1 == e2
