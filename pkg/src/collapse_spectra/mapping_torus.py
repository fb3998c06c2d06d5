"""Torus bundles over the circle: suspension of A in SL_n(Z) with A = exp(B).

The solvable model is R^n x| R with vertical brackets given by B.  The
degree-1 invariant Laplacian is diag(C C^T, 0) where C rewrites B in the
current orthonormal vertical frame, the zero-eigenvalue Jordan structure
of B (the invariants d and d') controls how many small eigenvalues a
collapse can produce, and the scaling recipe below realizes any count
k <= d - d'.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curvature import solvable_curvature_closed_form
from .errors import KTooLarge, NotSemisimple, NotUnimodular, RankAmbiguous
from .intlat import det_int, int_matrix, verify_log
from .lie_complex import SpectrumReport, StructureConstants, spectrum

RANK_TOL = 1e-9
FLOOR_TOL = 1e-4
#: eigenvalue lambda at grid point eps counts as small when
#: lambda < min(10 eps^2, SMALL_ABS_CAP); the absolute cap keeps large
#: grid points from classifying order-one eigenvalues as small
SMALL_ABS_CAP = 1e-3


def solvable_algebra(b_matrix) -> StructureConstants:
    """(n+1)-dim algebra with [Y, V_i] = sum_j B[j,i] V_j, Y = last index."""
    B = np.asarray(b_matrix, dtype=float)
    n = B.shape[0]
    brackets = {}
    for i in range(n):
        for j in range(n):
            if B[j, i] != 0.0:
                brackets[(i, n, j)] = brackets.get((i, n, j), 0.0) - B[j, i]
    return StructureConstants.from_brackets(n + 1, brackets)


@dataclass(frozen=True)
class MappingTorusBundle:
    """Suspension data: A in SL_n(Z) together with a verified logarithm B."""

    a_matrix: tuple
    b_matrix: np.ndarray

    def __post_init__(self):
        A = int_matrix(self.a_matrix)
        if det_int(A) != 1:
            raise NotUnimodular("A must lie in SL_n(Z)")
        B = np.asarray(self.b_matrix, dtype=float)
        if not verify_log(np.asarray(A, dtype=float), B, 1e-8):
            raise ValueError("exp(B) does not reproduce A within 1e-8")
        if abs(np.trace(B)) > 1e-8:
            raise ValueError("trace(B) must vanish (det A = 1 forces it)")
        object.__setattr__(self, "a_matrix", tuple(tuple(r) for r in A))
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "b_matrix", B)

    @property
    def n(self) -> int:
        return len(self.a_matrix)

    def algebra(self) -> StructureConstants:
        return solvable_algebra(self.b_matrix)

    def invariants(self, rank_tol: float = RANK_TOL):
        return invariants_dd(self.b_matrix, rank_tol)


def _checked_rank(m: np.ndarray, rank_tol: float) -> int:
    sv = np.linalg.svd(m, compute_uv=False)
    for s in sv:
        if rank_tol / 10.0 < s < rank_tol * 10.0:
            raise RankAmbiguous(
                f"singular value {s} too close to rank_tol {rank_tol}")
    return int(np.sum(sv > rank_tol))


def invariants_dd(b_matrix, rank_tol: float = RANK_TOL):
    """(d, d'): dimensions of the generalized 0-eigenspace and of ker B."""
    B = np.asarray(b_matrix, dtype=float)
    n = B.shape[0]
    scale = float(np.linalg.norm(B, 2))
    if scale == 0.0:
        return n, n
    Bs = B / scale
    d_prime = n - _checked_rank(Bs, rank_tol)
    d = n - _checked_rank(np.linalg.matrix_power(Bs, n), rank_tol)
    return d, d_prime


def laplacian1_fast(c_matrix) -> np.ndarray:
    """Degree-1 invariant Laplacian diag(C C^T, 0) of the solvable model."""
    C = np.asarray(c_matrix, dtype=float)
    n = C.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = C @ C.T
    return out


@dataclass(frozen=True)
class SmallEigenvaluePrediction:
    has_small: bool        # some homogeneous collapse produces one iff d != d'
    floor_index: int       # the (d - d' + 1)-th nonzero eigenvalue stays up
    nilpotent: bool        # d = n: the group is nilpotent
    torus: bool            # B = 0: the bundle is a torus


def predict_small_eigenvalues(b_matrix,
                              rank_tol: float = RANK_TOL) -> SmallEigenvaluePrediction:
    B = np.asarray(b_matrix, dtype=float)
    n = B.shape[0]
    d, d_prime = invariants_dd(B, rank_tol)
    return SmallEigenvaluePrediction(
        has_small=(d != d_prime),
        floor_index=d - d_prime + 1,
        nilpotent=(d == n),
        torus=(d_prime == n),
    )


# ---------------------------------------------------------------------------
# Jordan chains of the zero characteristic subspace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JordanZeroChain:
    """Frame adapted to the zero characteristic subspace E_0.

    Columns of ``frame``: the E_0 chain vectors ordered kernel-first, then
    by increasing height (taller chain members later), followed by an
    orthonormal complement of E_0.  ``heights[i]`` is the chain height of
    column i (0 for complement columns) and ``chain_ids[i]`` its chain.
    """

    frame: np.ndarray
    chain_lengths: tuple
    heights: tuple
    chain_ids: tuple
    d: int
    d_prime: int


def _frac_matrix(m) -> list:
    return [[Fraction(x) for x in row] for row in m]


def _frac_matmul(a, b) -> list:
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(a))]


def _frac_apply(a, v) -> list:
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def _frac_nullspace(m, n) -> list:
    """Basis of the rational kernel, deterministic free-column pattern."""
    a = [row[:] for row in m]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        f = a[r][c]
        a[r] = [x / f for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                g = a[i][c]
                a[i] = [x - g * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            v[pc] = -a[ri][fc]
        basis.append(v)
    return basis


def _frac_rank(columns, n) -> int:
    if not columns:
        return 0
    rows = [[col[i] for col in columns] for i in range(n)]
    from .intlat import rational_rank
    return rational_rank(rows)


def _exact_chains(B_int, n):
    """Jordan chains of E_0 for an integer matrix, exact arithmetic.

    Returns a list of chains; each chain lists its members bottom-up
    (kernel vector first) as Fraction vectors.
    """
    Bf = _frac_matrix(B_int)
    kernels = [[]]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    dims = [0]
    for _ in range(n):
        power = _frac_matmul(Bf, power)
        kernels.append(_frac_nullspace(power, n))
        dims.append(len(kernels[-1]))
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            break
    m = len(dims) - 1
    while m > 1 and dims[m] == dims[m - 1]:
        m -= 1
    if dims[m] == 0:
        return []
    chains = []          # each: list of members, bottom (kernel) first
    for j in range(m, 0, -1):
        existing = []
        for ch in chains:
            if len(ch) >= j:
                existing.append(ch[j - 1])      # height-j member
        base = kernels[j - 1] + existing
        needed = dims[j] - dims[j - 1] - sum(1 for ch in chains if len(ch) > j)
        picked = []
        for cand in kernels[j]:
            if needed == 0:
                break
            trial = base + picked + [cand]
            if _frac_rank(trial, n) == len(trial):
                picked.append(cand)
                needed -= 1
        if needed:
            raise ArithmeticError("chain extraction failed (exact path)")
        for v in picked:
            members = [v]
            for _ in range(j - 1):
                members.append(_frac_apply(Bf, members[-1]))
            members.reverse()                   # kernel vector first
            chains.append(members)
    return chains


def _numeric_chains(B, n, rank_tol):
    """Jordan chains of E_0 by SVD rank decisions at ``rank_tol``."""
    scale = float(np.linalg.norm(B, 2))
    if scale == 0.0:
        return [[np.eye(n)[:, i]] for i in range(n)]
    Bs = B / scale

    def nullspace(m):
        u, sv, vt = np.linalg.svd(m)
        for s in sv:
            if rank_tol / 10.0 < s < rank_tol * 10.0:
                raise RankAmbiguous(
                    f"singular value {s} too close to rank_tol {rank_tol}")
        r = int(np.sum(sv > rank_tol))
        return vt[r:].T

    kernels = [np.zeros((n, 0))]
    power = np.eye(n)
    for _ in range(n):
        power = Bs @ power
        kernels.append(nullspace(power))
        if kernels[-1].shape[1] == kernels[-2].shape[1]:
            break
    dims = [k.shape[1] for k in kernels]
    m = len(dims) - 1
    while m > 1 and dims[m] == dims[m - 1]:
        m -= 1
    if dims[m] == 0:
        return []
    chains = []
    for j in range(m, 0, -1):
        existing = [ch[j - 1] for ch in chains if len(ch) >= j]
        base_cols = [kernels[j - 1][:, i] for i in range(dims[j - 1])] + existing
        needed = dims[j] - dims[j - 1] - sum(1 for ch in chains if len(ch) > j)
        if needed == 0:
            continue
        if base_cols:
            W = np.column_stack(base_cols)
            qw, _ = np.linalg.qr(W)
            resid = kernels[j] - qw @ (qw.T @ kernels[j])
        else:
            resid = kernels[j]
        _, sv, zt = np.linalg.svd(resid)
        if len(sv) < needed or sv[needed - 1] <= rank_tol * 10.0:
            raise RankAmbiguous(
                f"chain extraction at height {j} is numerically degenerate")
        picked = [kernels[j] @ zt[i] for i in range(needed)]
        for v in picked:
            members = [v]
            for _ in range(j - 1):
                members.append(B @ members[-1])
            members.reverse()
            chains.append(members)
    return chains


def jordan_zero_chain(b_matrix, rank_tol: float = RANK_TOL) -> JordanZeroChain:
    """Adapted frame for E_0 with explicit Jordan chains.

    Integer matrices take an exact rational path (test matrices usually
    are exact); anything else uses SVD rank decisions and may raise
    RankAmbiguous.  Column order: kernel vectors first, then increasing
    height, finally an orthonormal complement of E_0.
    """
    B = np.asarray(b_matrix, dtype=float)
    n = B.shape[0]
    if np.array_equal(B, np.round(B)):
        chains = _exact_chains([[int(x) for x in row] for row in np.round(B)], n)
        chains = [[np.array([float(x) for x in v]) for v in ch] for ch in chains]
    else:
        chains = _numeric_chains(B, n, rank_tol)
    chains.sort(key=len, reverse=True)
    d = sum(len(ch) for ch in chains)
    d_prime = len(chains)
    max_h = max((len(ch) for ch in chains), default=0)
    cols, heights, chain_ids = [], [], []
    for h in range(1, max_h + 1):
        for ci, ch in enumerate(chains):
            if len(ch) >= h:
                cols.append(ch[h - 1])
                heights.append(h)
                chain_ids.append(ci)
    if d < n:
        if cols:
            e0 = np.column_stack(cols)
            q, _ = np.linalg.qr(e0)
            proj = np.eye(n) - q @ q.T
        else:
            proj = np.eye(n)
        u, sv, _ = np.linalg.svd(proj)
        comp = u[:, : n - d]
        for i in range(n - d):
            cols.append(comp[:, i])
            heights.append(0)
            chain_ids.append(-1)
    frame = np.column_stack(cols) if cols else np.zeros((n, 0))
    return JordanZeroChain(frame, tuple(sorted((len(c) for c in chains),
                                               reverse=True)),
                           tuple(heights), tuple(chain_ids), d, d_prime)


# ---------------------------------------------------------------------------
# collapse families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollapseFamily:
    """Scaling family V_i^eps = eps^{-exponents[i]} V_i on the adapted frame.

    For a single Jordan chain the exponents are exactly the recipe
    nu_i = eps^{-1} for i >= d' + k and nu_i = eps^{-(1 + d' + k - i)}
    below; with several chains each chain gets a budget k_c (longest
    chains first, sum k) and is scaled the same way internally, which
    annihilates exactly k rows in the limit.  k = 0 is a pure homothety.
    """

    frame: np.ndarray
    exponents: tuple
    k: int
    d: int
    d_prime: int
    chain_lengths: tuple
    c_base: np.ndarray

    def c_matrix(self, eps: float) -> np.ndarray:
        e = np.asarray(self.exponents, dtype=float)
        return self.c_base * np.power(eps, e[:, None] - e[None, :])


def collapse_family(b_matrix, k: int,
                    rank_tol: float = RANK_TOL) -> CollapseFamily:
    B = np.asarray(b_matrix, dtype=float)
    info = jordan_zero_chain(B, rank_tol)
    capacity = info.d - info.d_prime
    if not (0 <= k <= capacity):
        raise KTooLarge(f"k = {k} exceeds d - d' = {capacity}")
    # budgets: longest chains first, each up to length - 1
    budgets = {}
    remaining = k
    order = sorted(range(len(info.chain_lengths)),
                   key=lambda i: (-info.chain_lengths[i], i))
    for ci in order:
        take = min(info.chain_lengths[ci] - 1, remaining)
        budgets[ci] = take
        remaining -= take
    exponents = []
    for h, ci in zip(info.heights, info.chain_ids):
        if ci < 0:
            exponents.append(1)
        else:
            kc = budgets.get(ci, 0)
            exponents.append(1 + max(0, kc + 1 - h))
    if k == 0:
        exponents = [1] * len(exponents)
    c_base = np.linalg.solve(info.frame, B @ info.frame)
    return CollapseFamily(info.frame, tuple(exponents), k, info.d,
                          info.d_prime, info.chain_lengths, c_base)


@dataclass(frozen=True)
class CollapseRow:
    eps: float
    report: SpectrumReport
    trace: float
    max_k: float
    small_count: int


@dataclass(frozen=True)
class CollapseTable:
    b_matrix: np.ndarray
    k: int
    d: int
    d_prime: int
    rows: tuple

    def to_csv(self) -> str:
        n_eigs = len(self.rows[0].report.eigenvalues) if self.rows else 0
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps"] + [f"eig_{i + 1}" for i in range(n_eigs)]
                   + ["trace", "max_k", "small_count"])
        for row in self.rows:
            w.writerow([repr(row.eps)]
                       + [repr(float(v)) for v in row.report.eigenvalues]
                       + [repr(float(row.trace)), repr(float(row.max_k)),
                          row.small_count])
        return buf.getvalue()


def small_threshold(eps: float) -> float:
    """Classification threshold for a small eigenvalue at grid point eps."""
    return min(10.0 * eps * eps, SMALL_ABS_CAP)


def run_collapse(b_matrix, k: int, eps_grid,
                 rank_tol: float = RANK_TOL) -> CollapseTable:
    """Sweep the collapse family over eps and report spectra, the trace
    Tr(C_eps^T C_eps), the frame curvature bound, and small counts.

    The small count classifies the nonzero eigenvalues of C C^T (the
    kernel, of exact dimension d', is excluded by construction).
    """
    B = np.asarray(b_matrix, dtype=float)
    fam = collapse_family(B, k, rank_tol)
    rows = []
    for eps in eps_grid:
        if not (0.0 < eps <= 1.0):
            raise ValueError("eps grid must lie in (0, 1]")
        C = fam.c_matrix(eps)
        vals = np.linalg.eigvalsh(laplacian1_fast(C))
        report = SpectrumReport.from_eigenvalues(vals)
        nonzero = np.sort(vals)[fam.d_prime + 1:]
        count = int(np.sum(nonzero < small_threshold(eps)))
        table = solvable_curvature_closed_form(C)
        rows.append(CollapseRow(float(eps), report,
                                float(np.sum(C * C)), table.max_abs, count))
    return CollapseTable(B, k, fam.d, fam.d_prime, tuple(rows))


# ---------------------------------------------------------------------------
# semisimple floor experiment
# ---------------------------------------------------------------------------

def semisimple_defect(b_matrix) -> float:
    """Relative norm of m(B) where m is the squarefree part of the
    characteristic polynomial; zero iff B is semisimple."""
    B = np.asarray(b_matrix, dtype=float)
    eigs = np.linalg.eigvals(B)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    distinct = []
    for lam in sorted(eigs, key=lambda z: (z.real, z.imag)):
        if not distinct or abs(lam - distinct[-1]) > 1e-8 * scale:
            distinct.append(lam)
    m = np.eye(B.shape[0], dtype=complex)
    for lam in distinct:
        m = m @ (B - lam * np.eye(B.shape[0]))
    return float(np.max(np.abs(m)) / scale ** len(distinct))


@dataclass(frozen=True)
class FloorReport:
    floor: float
    trials: int
    cap: float
    vacuous: bool
    ok: bool


def semisimple_floor(b_matrix, trials: int = 200, curvature_cap: float = None,
                     seed: int = 0, floor_tol: float = FLOOR_TOL) -> FloorReport:
    """Empirical lower bound for the nonzero invariant spectrum over random
    metric frames with Tr(C^T C) below the cap.

    The guarantee for semisimple B is existence of a positive floor, not
    its value; this experiment reports the sampled minimum across all
    form degrees.
    """
    B = np.asarray(b_matrix, dtype=float)
    n = B.shape[0]
    if semisimple_defect(B) > 1e-8:
        raise NotSemisimple("B has a nontrivial nilpotent part")
    base_tr = float(np.sum(B * B))
    if curvature_cap is None:
        curvature_cap = 2.0 * base_tr + 1.0
    if base_tr == 0.0:
        return FloorReport(float("inf"), trials, curvature_cap, True, True)
    if curvature_cap < base_tr:
        raise ValueError("cap below Tr(B^T B); orthogonal frames already exceed it")
    rng = np.random.default_rng(seed)
    floor = float("inf")
    for _ in range(trials):
        q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
        q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
        u = rng.uniform(-2.0, 2.0, size=n)
        t = 1.0
        while True:
            P = q1 @ np.diag(np.exp(t * u)) @ q2
            C = np.linalg.solve(P, B @ P)
            if float(np.sum(C * C)) <= curvature_cap or t < 1e-8:
                break
            t /= 2.0
        L = solvable_algebra(C)
        for p in range(1, n + 1):
            rep = spectrum(L, p)
            if rep.nonzero.size:
                floor = min(floor, float(rep.nonzero[0]))
    return FloorReport(floor, trials, curvature_cap, False, floor > floor_tol)
