import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import collapse_spectra as cs
from collapse_spectra.torus_bundle import (eigenspace_split, nil_algebra,
                                           predict_spectrum,
                                           product_bundle_spectrum,
                                           product_oracle_spectrum,
                                           reduce as reduce_bundle)


def test_reduce_examples():
    rep = reduce_bundle([3, 6])
    assert rep.d == 3 and rep.decomposition == "N_3 x T^1"
    rep = reduce_bundle([1, 0, 0])
    assert rep.d == 1 and rep.decomposition == "N_1 x T^2"
    rep = reduce_bundle([1])
    assert rep.d == 1 and rep.decomposition == "N_1"
    with pytest.raises(cs.TrivialBundle):
        reduce_bundle([0, 0])


def test_bundle_dataclass():
    bundle = cs.TorusBundleOverT2(2, (3, 6))
    assert bundle.d == 3 and not bundle.trivial
    assert cs.TorusBundleOverT2(2, (0, 0)).trivial


def test_nil_algebra_brackets():
    L = nil_algebra([1.0, 0.0])
    expected = np.zeros((4, 4, 4))
    expected[2, 3, 0] = 1.0
    expected[3, 2, 0] = -1.0
    assert np.array_equal(L.c, expected)
    assert not np.any(nil_algebra([0.0, 0.0]).c)


def test_predict_spectrum_examples():
    rep = predict_spectrum(2, 1, 1.0)
    assert np.allclose(rep.eigenvalues, [0, 0, 0, 1])
    rep = predict_spectrum(2, 2, 1.0)
    assert np.allclose(rep.eigenvalues, [0, 0, 0, 0, 1, 1])
    rep = predict_spectrum(2, 1, 0.0)
    assert not np.any(rep.eigenvalues)
    rep = predict_spectrum(2, 1, 2.0, vol_base=2.0)
    assert float(rep.eigenvalues[-1]) == 1.0


def test_verify_spectrum_all_degrees():
    for n, b in ((1, [1.0]), (2, [1.0, 0.0]), (3, [0.0, 0.0, 2.0])):
        for p in range(0, n + 3):
            assert cs.verify_spectrum(n, p, b) <= 1e-10


def test_spectrum_depends_only_on_norm():
    s1 = cs.spectrum(nil_algebra([1.0, 0.0]), 1).eigenvalues
    s2 = cs.spectrum(nil_algebra([0.6, 0.8]), 1).eigenvalues
    assert np.max(np.abs(s1 - s2)) <= 1e-12


def test_eigenspace_split_counts():
    for n, b in ((2, [1.0, 0.0]), (3, [0.5, 0.5, 1.0])):
        for p in range(1, n + 2):
            split = eigenspace_split(n, p, b)
            expect_co = math.comb(n - 1, p - 1) if p - 1 <= n - 1 else 0
            expect_cl = math.comb(n - 1, p - 2) if 0 <= p - 2 <= n - 1 else 0
            assert split.coclosed == expect_co
            assert split.closed == expect_cl
            assert split.total == math.comb(n, p - 1)


def test_connection_change_leaves_tensor_fixed():
    # Y_i -> Y_i + sum xi_k V_k is unitriangular with exact inverse
    b = [0.7, -0.3]
    L = nil_algebra(b)
    n = 2
    P = np.eye(n + 2)
    xi1 = np.array([0.4, -1.2])
    xi2 = np.array([-0.9, 0.25])
    P[:n, n] = xi1
    P[:n, n + 1] = xi2
    P_inv = np.eye(n + 2)
    P_inv[:n, n] = -xi1
    P_inv[:n, n + 1] = -xi2
    L2 = cs.change_frame(L, P, p_inv=P_inv)
    assert np.array_equal(L.c, L2.c)


def test_collapse_direction_homothety():
    traj = cs.collapse_direction([1.0, 1.0], [1, 1], [0.5, 0.25])
    assert traj.lam == (2 * 0.25, 2 * 0.0625)
    assert traj.limit_class == "vanishes" and traj.limit == 0.0


def test_collapse_direction_dense():
    traj = cs.collapse_direction([0.5, 1.5], [1, 0], [0.5, 0.25])
    assert traj.limit == 1.5 ** 2
    assert traj.limit_class == "positive"
    assert traj.lam[0] == (0.5 * 0.5) ** 2 + 1.5 ** 2


def test_collapse_direction_constant():
    traj = cs.collapse_direction([1.0, 2.0], [0, 0], [0.5, 0.25])
    assert traj.lam[0] == traj.lam[1] == 5.0


def test_collapse_direction_validation():
    with pytest.raises(ValueError):
        cs.collapse_direction([1.0], [-1.0], [0.5])
    with pytest.raises(ValueError):
        cs.collapse_direction([1.0], [1.0], [1.5])


def test_curvature_bound():
    rep = cs.curvature_bound_check([1.0, 0.0])
    assert rep.ok and rep.attained_at_horizontal
    assert rep.max_abs_k == pytest.approx(0.75)
    assert cs.curvature_bound_check([0.0, 0.0]).max_abs_k == 0.0
    assert cs.curvature_bound_check([2.0, 0.0]).max_abs_k == pytest.approx(3.0)


def test_product_bundle_kunneth():
    rep = product_bundle_spectrum(1.0, 2.0, 1, 1, 1)
    nonzero = sorted(set(round(float(v), 12) for v in rep.nonzero))
    assert nonzero == [1.0, 4.0]
    for p in range(0, 4):
        merged = product_bundle_spectrum(1.0, 2.0, 1, 1, p).eigenvalues
        oracle = product_oracle_spectrum([1.0], [2.0], p).eigenvalues
        assert np.max(np.abs(merged - oracle)) <= 1e-12


def test_product_with_trivial_factor():
    for p in range(0, 3):
        merged = product_bundle_spectrum(1.0, 0.0, 1, 1, p).eigenvalues
        oracle = product_oracle_spectrum([1.0], [0.0], p).eigenvalues
        assert np.max(np.abs(merged - oracle)) <= 1e-12


def test_trajectory_csv():
    traj = cs.collapse_direction([1.0, 1.0], [1, 1], [0.5, 0.25])
    lines = traj.to_csv().splitlines()
    assert lines[0] == "eps,lambda,limit_class"
    assert lines[1].endswith("vanishes")


def test_vertical_vector():
    v = cs.VerticalVector((0.6, 0.8))
    assert v.eta == pytest.approx(1.0)
    assert cs.verify_spectrum(2, 1, v.b) <= 1e-12


@given(st.integers(1, 3), st.lists(st.floats(-3, 3, allow_nan=False),
                                   min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_property_unique_eigenvalue(n, coeffs):
    b = coeffs[:n]
    for p in range(1, n + 2):
        assert cs.verify_spectrum(n, p, b) <= 1e-10
