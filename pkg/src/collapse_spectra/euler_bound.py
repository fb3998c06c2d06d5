"""Euler map of a principal torus bundle and the determinant bound chain.

The map e sends the dual Lie algebra of the fiber to harmonic 2-forms of
the base; its matrix is integral in the lattice basis.  The smallest
eigenvalue of e*e obeys

    lambda_1 >= Det(e*e) / |e*e|^{k-1} >= (Det e)^2 / |e|^{2k-2}

with the operator norm, and Det e factors as (Det' e) Vol(T^k), which is
the volume-squared lower bound mechanism for collapsing bundles.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotInjective
from .flat_torus import FlatTorus
from .intlat import int_matrix, rational_rank, smith_normal_form

#: Convention: ``gramG`` is the Gram matrix of the fiber metric on the
#: DUAL algebra in its lattice basis, so Vol(T^k) = det(gramG)^{-1/2}.
#: Worked example: a circle fiber of length s has dual generator of norm
#: 1/s, gramG = (1/s^2) and volT = s.


@dataclass(frozen=True)
class EulerMap:
    """Integral matrix of e (rows: orthonormal harmonic 2-forms of the
    base; columns: lattice basis of the dual fiber algebra) plus the SPD
    Gram of the dual-algebra metric."""

    e_matrix: tuple
    gram_g: np.ndarray

    def __post_init__(self):
        E = int_matrix(self.e_matrix)
        g = np.asarray(self.gram_g, dtype=float)
        k = len(E[0]) if E else 0
        if g.shape != (k, k):
            raise ValueError("gramG shape must match the number of columns")
        np.linalg.cholesky(g)
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        object.__setattr__(self, "e_matrix", tuple(tuple(r) for r in E))
        object.__setattr__(self, "gram_g", g)

    @property
    def k(self) -> int:
        return len(self.e_matrix[0]) if self.e_matrix else 0

    @property
    def vol_t(self) -> float:
        return float(1.0 / math.sqrt(np.linalg.det(self.gram_g)))


def _orthonormal_matrix(e_matrix, gram_g) -> np.ndarray:
    """Matrix of e in a gram-orthonormalized dual-algebra frame."""
    E = np.asarray(e_matrix, dtype=float)
    L = np.linalg.cholesky(np.asarray(gram_g, dtype=float))
    return E @ np.linalg.inv(L).T


def ee_star(e_matrix, gram_g) -> np.ndarray:
    """Symmetric PSD matrix of e*e in the orthonormalized dual frame."""
    E_on = _orthonormal_matrix(e_matrix, gram_g)
    return E_on.T @ E_on


@dataclass(frozen=True)
class BoundChainReport:
    lam_min: float
    mid_bound: float          # Det(e*e) / |e*e|^{k-1}
    det_bound: float          # (Det e)^2 / |e|^{2k-2}
    det_e: float
    op_norm: float
    ok: bool


def bound_chain(e_matrix, gram_g) -> BoundChainReport:
    """Check the two-step determinant bound for an injective Euler map."""
    E = int_matrix(e_matrix)
    k = len(E[0])
    if rational_rank(E) < k:
        raise NotInjective("Euler map has a kernel; use noninjective_reduce")
    M = ee_star(E, gram_g)
    vals = np.linalg.eigvalsh(M)
    lam_min, lam_max = float(vals[0]), float(vals[-1])
    det_m = float(np.linalg.det(M))
    det_e = math.sqrt(max(det_m, 0.0))
    op_norm = math.sqrt(lam_max)
    mid = det_m / lam_max ** (k - 1) if k > 1 else det_m
    det_bound = det_e ** 2 / op_norm ** (2 * k - 2) if k > 1 else det_e ** 2
    ok = (lam_min >= mid - 1e-10 and mid >= det_bound - 1e-10
          and lam_min >= det_bound - 1e-10)
    return BoundChainReport(lam_min, mid, det_bound, det_e, op_norm, ok)


@dataclass(frozen=True)
class DetFactorizationReport:
    det_prime: float          # lattice-basis determinant of e
    vol_t: float              # fiber volume det(gramG)^{-1/2}
    det_e: float              # orthonormal-basis determinant
    residual: float           # |det_e - det_prime * vol_t| (relative)
    ok: bool


def det_factorization(e_matrix, gram_g) -> DetFactorizationReport:
    """Verify Det e = (Det' e) Vol(T^k) for an injective Euler map."""
    E = int_matrix(e_matrix)
    k = len(E[0])
    if rational_rank(E) < k:
        raise NotInjective("Euler map has a kernel; use noninjective_reduce")
    Ef = np.asarray(E, dtype=float)
    det_prime = math.sqrt(max(float(np.linalg.det(Ef.T @ Ef)), 0.0))
    vol_t = float(1.0 / math.sqrt(np.linalg.det(np.asarray(gram_g, float))))
    M = ee_star(E, gram_g)
    det_e = math.sqrt(max(float(np.linalg.det(M)), 0.0))
    residual = abs(det_e - det_prime * vol_t) / max(1.0, det_e)
    return DetFactorizationReport(det_prime, vol_t, det_e, residual,
                                  residual <= 1e-10)


@dataclass(frozen=True)
class NonInjectiveReport:
    kernel_basis: tuple            # integral lattice basis of ker e
    complement_basis: tuple        # integral complement in the lattice
    reduced_integral: tuple        # e on the complement, lattice basis
    quotient_volume: float         # volume of T^k / T^{k-l}
    restricted: BoundChainReport | None
    trivial: bool


def noninjective_reduce(e_matrix, gram_g) -> NonInjectiveReport:
    """Split off the integral kernel of e and bound e*e on its orthogonal
    complement.

    The kernel of an integral map is spanned by integral vectors; Smith
    reduction provides a primitive basis and a complementary sublattice.
    A zero map is flagged trivial (no bound available).
    """
    E = int_matrix(e_matrix)
    k = len(E[0])
    g = np.asarray(gram_g, dtype=float)
    _, d, v = smith_normal_form(E)
    rank = sum(1 for i in range(min(len(d), k)) if d[i][i] != 0)
    kernel_cols = [[v[i][j] for i in range(k)] for j in range(rank, k)]
    complement_cols = [[v[i][j] for i in range(k)] for j in range(rank)]
    Ef = np.asarray(E, dtype=float)
    reduced = [[int(sum(E[r][i] * complement_cols[j][i] for i in range(k)))
                for j in range(rank)] for r in range(len(E))]
    if rank == 0:
        return NonInjectiveReport(tuple(map(tuple, kernel_cols)), (),
                                  (), float("nan"), None, True)
    if rank == k:
        raise ValueError("Euler map is injective; use bound_chain directly")
    K = np.asarray(kernel_cols, dtype=float).T           # k x l
    gram_q = K.T @ g @ K
    quotient_volume = float(1.0 / math.sqrt(np.linalg.det(gram_q)))
    # gram-orthogonal complement of the kernel, orthonormalized
    null = _nullspace(K.T @ g)
    m_gram = null.T @ g @ null
    r = np.linalg.cholesky(m_gram)
    W = null @ np.linalg.inv(r).T
    A_on = Ef @ W
    M = A_on.T @ A_on
    vals = np.linalg.eigvalsh(M)
    lam_min, lam_max = float(vals[0]), float(vals[-1])
    det_m = float(np.linalg.det(M))
    det_a = math.sqrt(max(det_m, 0.0))
    op = math.sqrt(lam_max)
    kk = rank
    mid = det_m / lam_max ** (kk - 1) if kk > 1 else det_m
    det_bound = det_a ** 2 / op ** (2 * kk - 2) if kk > 1 else det_a ** 2
    restricted = BoundChainReport(lam_min, mid, det_bound, det_a, op,
                                  lam_min >= det_bound - 1e-10)
    return NonInjectiveReport(tuple(map(tuple, kernel_cols)),
                              tuple(map(tuple, complement_cols)),
                              tuple(map(tuple, reduced)),
                              quotient_volume, restricted, False)


def _nullspace(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    _, sv, vt = np.linalg.svd(m)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
    return vt[rank:].T


def report_text(report) -> str:
    """Serialize a report dataclass as 'key = value' lines."""
    lines = []
    for key, value in vars(report).items():
        if hasattr(value, "__dataclass_fields__"):
            for sub_key, sub_value in vars(value).items():
                lines.append(f"{key}.{sub_key} = {sub_value!r}")
        else:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# minimal norm of integral harmonic 2-forms on a flat base
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RhoReport:
    rho: float
    attaining: tuple              # integer coefficients in the dx_i ^ dx_j basis
    pairs: tuple                  # index pairs labelling the coefficients


def rho_flat(base: FlatTorus, searchbound: int = None) -> RhoReport:
    """Minimal L^2 norm of a nonzero integral constant-coefficient 2-form.

    The squared norm of sum c_I dx_I is c^T Gram2 c times the volume,
    where Gram2 is built from 2x2 minors of the inverse Gram.  The search
    box is certified the same way as the shortest dual vector.
    """
    m = base.k
    if m > 4:
        raise ValueError("rho enumeration supports dim <= 4")
    if m < 2:
        raise ValueError("need at least two dimensions for 2-forms")
    qinv = base.dual_quadratic()
    pairs = list(itertools.combinations(range(m), 2))
    dim = len(pairs)
    gram2 = np.zeros((dim, dim))
    for a, (i1, i2) in enumerate(pairs):
        for b, (j1, j2) in enumerate(pairs):
            gram2[a, b] = qinv[i1, j1] * qinv[i2, j2] \
                - qinv[i1, j2] * qinv[i2, j1]
    form = gram2 * base.volume
    q0 = float(form[0, 0])
    lam_min = float(np.linalg.eigvalsh(form)[0])
    box = searchbound if searchbound is not None else \
        max(1, int(math.ceil(math.sqrt(q0 / lam_min))))
    best = None
    for c in itertools.product(range(-box, box + 1), repeat=dim):
        if not any(c):
            continue
        cv = np.array(c, dtype=float)
        val = float(cv @ form @ cv)
        if best is None or val < best[0]:
            best = (val, c)
    return RhoReport(math.sqrt(best[0]), best[1], tuple(pairs))


# ---------------------------------------------------------------------------
# volume lower-bound experiment on torus bundles over T^2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VolBoundRow:
    eps: float
    lam: float
    vol: float
    ratio: float


@dataclass(frozen=True)
class VolBoundReport:
    rows: tuple
    min_ratio: float
    ok: bool

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "lambda", "vol", "ratio"])
        for row in self.rows:
            w.writerow([repr(row.eps), repr(row.lam), repr(row.vol),
                        repr(row.ratio)])
        return buf.getvalue()


def vol_bound_experiment(bundle, alpha, eps_grid) -> VolBoundReport:
    """Track lambda / Vol(T^k)^2 along a scaling collapse of the bundle.

    lambda is the unique nonzero invariant eigenvalue |V_eps|^2 and the
    fiber volume scales as prod eps^{alpha_i}; the ratio never drops
    below its value at the largest grid point.
    """
    b0 = [float(x) for x in bundle.a]
    alpha = [float(x) for x in alpha]
    if len(alpha) != len(b0):
        raise ValueError("alpha length must equal the fiber dimension")
    rows = []
    for eps in sorted(eps_grid, reverse=True):
        if not (0.0 < eps <= 1.0):
            raise ValueError("eps grid must lie in (0, 1]")
        lam = sum((eps ** a * x) ** 2 for a, x in zip(alpha, b0))
        vol = 1.0
        for a in alpha:
            vol *= eps ** a
        rows.append(VolBoundRow(float(eps), float(lam), float(vol),
                                float(lam / vol ** 2)))
    min_ratio = min(r.ratio for r in rows)
    ok = min_ratio >= rows[0].ratio * (1.0 - 1e-9) and min_ratio > 0.0
    return VolBoundReport(tuple(rows), min_ratio, ok)
