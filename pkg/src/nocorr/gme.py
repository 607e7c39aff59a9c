"""Genuine multipartite entanglement via the PPT-mixture witness.

The monotone is ``W(rho) = max(0, -min Tr(W rho))`` over operators ``W`` that
split, for every bipartition ``M | M^c``, as ``W = P_M + Q_M^{T_M}`` with
``0 <= P_M <= I`` and ``0 <= Q_M <= I``. A positive value rules out any
decomposition of ``rho`` into a mixture of states that are PPT across some
bipartition, and therefore certifies genuine multipartite entanglement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .optim.sdp import LMI, SDPProblem, SDPResult, Term, sdp_min
from .qla import DensityMatrix, partial_transpose, partial_transpose_permutation

GME_THRESHOLD = 1e-4


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __str__(self) -> str:
        return "".join(map(str, self.side_a)) + "|" + "".join(map(str, self.side_b))


def bipartitions(n: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 cuts, ``side_a`` being the smaller side.

    Equal halves keep party 0 in ``side_a``. Ordered by size, then
    lexicographically, so n = 3 gives 0|12, 1|02, 2|01.
    """
    if n < 2:
        raise ValueError(f"need at least two parties, got {n}")
    out = []
    for size in range(1, n // 2 + 1):
        for a in itertools.combinations(range(n), size):
            if 2 * size == n and 0 not in a:
                continue
            out.append(Bipartition(a, tuple(i for i in range(n) if i not in a)))
    return out


@dataclass
class WitnessResult:
    value: float
    witness_matrix: np.ndarray
    P: dict[Bipartition, np.ndarray]
    Q: dict[Bipartition, np.ndarray]
    raw_min: float
    sdp: SDPResult

    @property
    def is_gme(self) -> bool:
        return self.value > GME_THRESHOLD


@lru_cache(maxsize=None)
def _hermitian_param(D: int) -> sp.csc_matrix:
    """Map real coordinates to row-major vec of a D x D Hermitian matrix.

    Coordinates: diagonal entries, then Re and Im of the strict upper triangle
    (row-major).
    """
    rows, cols, vals = [], [], []
    col = 0
    for i in range(D):
        rows.append(i * D + i); cols.append(col); vals.append(1.0)
        col += 1
    upper = [(i, j) for i in range(D) for j in range(i + 1, D)]
    for i, j in upper:
        rows += [i * D + j, j * D + i]; cols += [col, col]; vals += [1.0, 1.0]
        col += 1
    for i, j in upper:
        rows += [i * D + j, j * D + i]; cols += [col, col]; vals += [1j, -1j]
        col += 1
    return sp.csc_matrix((vals, (rows, cols)), shape=(D * D, D * D), dtype=complex)


def _hermitian_from_coords(coords: np.ndarray, D: int) -> np.ndarray:
    m = (_hermitian_param(D) @ coords).reshape(D, D)
    return 0.5 * (m + m.conj().T)


def witness_problem(rho: DensityMatrix) -> tuple[SDPProblem, list[Bipartition], np.ndarray]:
    """SDP over coordinates ``[W, Q_1, ..., Q_K]`` with ``P_M = W - Q_M^{T_M}`` eliminated.

    Returns the problem, the bipartitions in block order and a strictly
    feasible start (W = I/2, Q_M = I/4).
    """
    dims, D = rho.dims, rho.matrix.shape[0]
    cuts = bipartitions(rho.n)
    T = _hermitian_param(D)
    nc = T.shape[1]
    w_var = slice(0, nc)
    eye, zeros = np.eye(D), np.zeros((D, D))
    blocks = []
    for k, cut in enumerate(cuts):
        q_var = slice(nc * (k + 1), nc * (k + 2))
        T_pt = T[partial_transpose_permutation(dims, cut.side_a), :]  # vec(E^{T_M})
        blocks += [
            LMI(zeros, [Term(w_var, T), Term(q_var, T_pt, -1.0)]),       # P_M >= 0
            LMI(eye, [Term(w_var, T, -1.0), Term(q_var, T_pt)]),        # I - P_M >= 0
            LMI(zeros, [Term(q_var, T)]),                               # Q_M >= 0
            LMI(eye, [Term(q_var, T, -1.0)]),                           # I - Q_M >= 0
        ]
    c = np.zeros(nc * (len(cuts) + 1))
    c[w_var] = np.real(T.conj().T @ np.asarray(rho.matrix).ravel())
    y0 = np.zeros_like(c)
    y0[:D] = 0.5
    for k in range(len(cuts)):
        y0[nc * (k + 1): nc * (k + 1) + D] = 0.25
    return SDPProblem(c, blocks), cuts, y0


def gme_witness(rho: DensityMatrix, *, tol: float = 1e-8, max_iter: int = 100) -> WitnessResult:
    if rho.n < 3:
        raise ValueError("the PPT-mixture monotone is used for three or more parties")
    problem, cuts, y0 = witness_problem(rho)
    res = sdp_min(problem, y0=y0, tol=tol, max_iter=max_iter)
    D = rho.matrix.shape[0]
    nc = D * D
    Wm = _hermitian_from_coords(res.y[:nc], D)
    P, Q = {}, {}
    for k, cut in enumerate(cuts):
        q = _hermitian_from_coords(res.y[nc * (k + 1): nc * (k + 2)], D)
        Q[cut] = q
        P[cut] = Wm - partial_transpose(q, cut.side_a, rho.dims)
    return WitnessResult(max(0.0, -res.value), Wm, P, Q, res.value, res)


def check_certificate(result: WitnessResult, dims, tol: float = 1e-8) -> float:
    """Worst violation of ``W = P + Q^T``, ``0 <= P, Q <= I`` over all cuts."""
    worst = 0.0
    eye = np.eye(result.witness_matrix.shape[0])
    for cut, p in result.P.items():
        q = result.Q[cut]
        recon = p + partial_transpose(q, cut.side_a, dims)
        worst = max(worst, np.max(np.abs(recon - result.witness_matrix)))
        for mat in (p, eye - p, q, eye - q):
            worst = max(worst, -np.linalg.eigvalsh(mat)[0])
    return worst
