import math

import numpy as np
import pytest

import collapse_spectra as cs
from collapse_spectra.flat_torus import FlatTorus
from collapse_spectra.intlat import rational_rank


def test_ee_star_examples():
    assert not np.any(cs.ee_star([[0, 0]], np.eye(2)))
    assert cs.ee_star([[2]], [[1.0]]) == pytest.approx(np.array([[4.0]]))
    rng = np.random.default_rng(73)
    E = rng.integers(-3, 4, (3, 3)).tolist()
    assert np.allclose(cs.ee_star(E, np.eye(3)),
                       np.array(E).T @ np.array(E), atol=1e-12)


def test_euler_map_dataclass():
    em = cs.EulerMap(((1, 0), (0, 3)), np.diag([0.25, 0.25]))
    assert em.k == 2
    assert em.vol_t == pytest.approx(4.0)


def test_bound_chain_scalar_equality():
    rep = cs.bound_chain([[5]], [[1.0]])
    assert rep.lam_min == pytest.approx(rep.det_bound)
    assert rep.ok


def test_bound_chain_diagonal():
    rep = cs.bound_chain([[1, 0], [0, 3]], np.eye(2))
    assert rep.lam_min == pytest.approx(1.0)
    assert rep.det_bound == pytest.approx(1.0)
    assert rep.ok


def test_bound_chain_random():
    rng = np.random.default_rng(79)
    done = 0
    while done < 50:
        k = int(rng.integers(1, 5))
        m = int(rng.integers(k, k + 3))
        E = rng.integers(-4, 5, (m, k))
        if rational_rank([[int(x) for x in r] for r in E]) < k:
            continue
        done += 1
        w = rng.standard_normal((k, k))
        gram = w @ w.T + 0.5 * np.eye(k)
        rep = cs.bound_chain(E.tolist(), gram)
        assert rep.lam_min >= rep.mid_bound - 1e-10
        assert rep.mid_bound >= rep.det_bound - 1e-10


def test_bound_chain_rejects_kernel():
    with pytest.raises(cs.NotInjective):
        cs.bound_chain([[1, 2], [2, 4]], np.eye(2))


def test_det_factorization():
    rep = cs.det_factorization([[1]], [[1.0]])
    assert (rep.det_prime, rep.vol_t, rep.det_e) == (1.0, 1.0, 1.0)
    # dual Gram diag(4, 4): fiber volume 1/4
    rep = cs.det_factorization([[1, 0], [0, 3]], np.diag([4.0, 4.0]))
    assert rep.vol_t == pytest.approx(0.25)
    assert rep.det_e == pytest.approx(rep.det_prime * rep.vol_t)
    assert rep.ok
    rng = np.random.default_rng(83)
    for _ in range(10):
        E = rng.integers(-3, 4, (3, 2))
        if rational_rank([[int(x) for x in r] for r in E]) < 2:
            continue
        w = rng.standard_normal((2, 2))
        gram = w @ w.T + 0.5 * np.eye(2)
        assert cs.det_factorization(E.tolist(), gram).ok


def test_noninjective_zero_map():
    rep = cs.noninjective_reduce([[0, 0]], np.eye(2))
    assert rep.trivial and rep.restricted is None


def test_noninjective_block_oracle():
    # E = (0 | E') with E' full rank: restricted chain equals the chain of E'
    core = [[2, 1], [1, 1], [0, 3]]
    E = [[0] + row for row in core]
    rep = cs.noninjective_reduce(E, np.eye(3))
    oracle = cs.bound_chain(core, np.eye(2))
    assert rep.restricted is not None
    assert rep.restricted.lam_min == pytest.approx(oracle.lam_min, abs=1e-9)
    assert rep.restricted.det_bound == pytest.approx(oracle.det_bound,
                                                     abs=1e-9)
    assert rep.kernel_basis == ((1, 0, 0),)


def test_noninjective_obstruction_vector():
    rep = cs.noninjective_reduce([[3, 6]], np.eye(2))
    assert rep.kernel_basis == ((-2, 1),)
    assert rep.reduced_integral == ((3,),)
    assert rep.quotient_volume == pytest.approx(1.0 / math.sqrt(5.0))
    assert rep.restricted.lam_min == pytest.approx(45.0)


def test_noninjective_signed_permutation_mixes():
    rng = np.random.default_rng(89)
    for _ in range(10):
        r = int(rng.integers(1, 3))
        l = int(rng.integers(1, 3))
        while True:
            core = rng.integers(-3, 4, (r + 1, r))
            if rational_rank([[int(x) for x in row] for row in core]) == r:
                break
        E_raw = np.concatenate([np.zeros((r + 1, l), dtype=int), core],
                               axis=1)
        perm = rng.permutation(l + r)
        signs = rng.choice([-1, 1], size=l + r)
        W = np.zeros((l + r, l + r), dtype=int)
        for col, (p, s) in enumerate(zip(perm, signs)):
            W[p, col] = s
        rep = cs.noninjective_reduce((E_raw @ W).tolist(), np.eye(l + r))
        oracle = cs.bound_chain(core.tolist(), np.eye(r))
        assert rep.restricted.lam_min == pytest.approx(oracle.lam_min,
                                                       abs=1e-9)


def test_rho_flat():
    assert cs.rho_flat(FlatTorus.identity(2)).rho == 1.0
    assert cs.rho_flat(FlatTorus.identity(3)).rho == 1.0
    for s in (0.5, 2.0):
        torus = FlatTorus(np.diag([s * s, 1.0 / (s * s)]))
        assert cs.rho_flat(torus).rho == pytest.approx(1.0, rel=1e-12)


def test_rho_box_doubling():
    for gram in (np.eye(2), np.eye(3), np.diag([2.0, 1.0, 0.5])):
        torus = FlatTorus(gram)
        base = cs.rho_flat(torus)
        doubled = cs.rho_flat(torus, searchbound=4)
        assert base.rho == doubled.rho


def test_vol_bound_circle_constant_ratio():
    bundle = cs.TorusBundleOverT2(1, (1,))
    rep = cs.vol_bound_experiment(bundle, [1.0], [1.0, 0.5, 0.25, 0.125])
    ratios = [r.ratio for r in rep.rows]
    assert max(ratios) - min(ratios) <= 1e-12
    assert rep.ok


def test_vol_bound_homothety_grows():
    bundle = cs.TorusBundleOverT2(2, (1, 0))
    rep = cs.vol_bound_experiment(bundle, [1.0, 1.0], [1.0, 0.5, 0.25])
    assert rep.ok
    assert rep.rows[-1].ratio > rep.rows[0].ratio


def test_vol_bound_dense_direction():
    bundle = cs.TorusBundleOverT2(2, (1, 2))
    rep = cs.vol_bound_experiment(bundle, [1.0, 0.0], [1.0, 0.5, 0.25])
    assert rep.ok
    assert rep.rows[-1].lam >= 4.0       # limit sum_{i>1} b_i^2 = 4


def test_report_text_key_value():
    from collapse_spectra.euler_bound import report_text

    rep = cs.bound_chain([[1, 0], [0, 3]], np.eye(2))
    text = report_text(rep)
    assert "lam_min = 1.0" in text.replace("0.9999999999999998", "1.0")
    assert all("=" in line for line in text.strip().splitlines())
    nr = cs.noninjective_reduce([[3, 6]], np.eye(2))
    text = report_text(nr)
    assert "restricted.lam_min" in text and "quotient_volume" in text
