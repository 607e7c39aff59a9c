"""Revised simplex with Bland's rule, for feasibility questions and small LPs.

Standard equality form ``A x = b, x >= lower``. Phase 1 starts from an
all-artificial basis; its optimal duals give a Farkas certificate when the
system is infeasible. The basis inverse is held densely and refactorised
periodically, which is adequate for a few hundred rows and tens of thousands
of (possibly sparse) columns.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    pass


@dataclass
class LPProblem:
    """``A x = b`` with ``x >= lower`` (zero by default). ``A`` may be scipy-sparse."""

    A: np.ndarray | sp.spmatrix
    b: np.ndarray
    lower: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not sp.issparse(self.A):
            self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        else:
            self.A = sp.csc_matrix(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.size} entries")
        if self.lower is None:
            self.lower = np.zeros(self.A.shape[1])
        else:
            self.lower = np.asarray(self.lower, dtype=float).ravel()
            if self.lower.size != self.A.shape[1]:
                raise ValueError("lower bound length does not match column count")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    duals: np.ndarray | None = None
    farkas: np.ndarray | None = None
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE

    @property
    def certificate(self) -> np.ndarray | None:
        """The solution vector if feasible, the Farkas dual otherwise."""
        return self.x if self.feasible else self.farkas


class _Tableau:
    """Revised-simplex state over columns ``[A | I]`` (structurals then artificials)."""

    stall_limit = 50

    def __init__(self, A, b, refactor_every: int, tol: float):
        self.A = A
        self.sparse = sp.issparse(A)
        self.m, self.n = A.shape
        self.b = b
        self.basis = np.arange(self.n, self.n + self.m)
        self.Binv = np.eye(self.m)
        self.xB = b.copy()
        self.refactor_every = refactor_every
        self.tol = tol
        self.pivots = 0
        self.allowed = np.ones(self.n + self.m, dtype=bool)

    def column(self, j: int) -> np.ndarray:
        if j >= self.n:
            e = np.zeros(self.m)
            e[j - self.n] = 1.0
            return e
        if self.sparse:
            col = self.A.getcol(j)
            return col.toarray().ravel()
        return self.A[:, j]

    def ftran(self, j: int) -> np.ndarray:
        if j >= self.n:
            return self.Binv[:, j - self.n].copy()
        if self.sparse:
            lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
            return self.Binv[:, self.A.indices[lo:hi]] @ self.A.data[lo:hi]
        return self.Binv @ self.A[:, j]

    def refactor(self) -> None:
        B = np.column_stack([self.column(j) for j in self.basis])
        self.Binv = np.linalg.inv(B)
        self.xB = self.Binv @ self.b

    def reduced_costs(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pi = c[self.basis] @ self.Binv
        d = np.empty(self.n + self.m)
        d[: self.n] = c[: self.n] - (self.A.T @ pi)
        d[self.n:] = c[self.n:] - pi
        return d, pi

    def pivot(self, j: int, r: int, u: np.ndarray) -> None:
        row = self.Binv[r] / u[r]
        xr = self.xB[r] / u[r]
        self.Binv -= np.outer(u, row)  # in place; row r is restored below
        self.xB -= u * xr
        self.Binv[r] = row
        self.xB[r] = xr
        self.basis[r] = j
        self.pivots += 1
        if self.pivots % self.refactor_every == 0:
            self.refactor()

    def run(self, c: np.ndarray, max_iter: int) -> str:
        """Minimise ``c`` from the current basis.

        Entering columns are priced by most negative reduced cost while the
        objective moves. After ``stall_limit`` consecutive degenerate pivots
        both choices switch to Bland's lowest-index rule, which cannot cycle,
        until a pivot makes progress again.
        """
        degenerate = 0
        for _ in range(max_iter):
            d, _ = self.reduced_costs(c)
            cand = np.flatnonzero((d < -self.tol) & self.allowed)
            if cand.size == 0:
                return OPTIMAL
            bland = degenerate >= self.stall_limit
            j = int(cand[0] if bland else cand[np.argmin(d[cand])])
            u = self.ftran(j)
            pos = u > self.tol
            if not pos.any():
                return UNBOUNDED
            ratios = np.full(self.m, np.inf)
            ratios[pos] = np.maximum(self.xB[pos], 0.0) / u[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + self.tol * max(1.0, best))
            r = int(ties[np.argmin(self.basis[ties])])  # lowest-index leaving variable
            degenerate = degenerate + 1 if best <= self.tol else 0
            self.pivot(j, r, u)
        raise LPError(f"simplex did not terminate in {max_iter} pivots")

    def solution(self) -> np.ndarray:
        x = np.zeros(self.n + self.m)
        x[self.basis] = self.xB
        return x


def _phase1(p: LPProblem, tol: float, refactor_every: int, max_iter: int):
    A, b = p.A, p.b - p.A @ p.lower
    sign = np.where(b < 0, -1.0, 1.0)
    A = sp.diags(sign) @ A if sp.issparse(A) else A * sign[:, None]
    if sp.issparse(A):
        A = sp.csc_matrix(A)
    b = b * sign
    tab = _Tableau(A, b, refactor_every, tol)
    c1 = np.r_[np.zeros(tab.n), np.ones(tab.m)]
    tab.allowed[tab.n:] = False  # artificials never re-enter
    tab.run(c1, max_iter)
    tab.refactor()
    return tab, sign, c1, b


def lp_feasible(p: LPProblem, *, tol: float = 1e-9, refactor_every: int = 50,
                max_iter: int = 200_000) -> LPResult:
    """Find ``x >= lower`` with ``A x = b``, or a Farkas certificate.

    Infeasible results carry ``y`` with ``y @ A >= 0`` and ``y @ b < 0``
    (``b`` shifted by ``A @ lower`` when lower bounds are non-zero).
    """
    tab, sign, c1, b = _phase1(p, tol, refactor_every, max_iter)
    residual = float(np.sum(tab.xB[tab.basis >= tab.n]))
    scale = 1.0 + np.abs(b).max(initial=0.0)
    if residual <= 1e3 * tol * scale:
        x = tab.solution()[: tab.n]
        x = np.where(np.abs(x) < tol, 0.0, x)
        return LPResult("feasible", x=x + p.lower, iterations=tab.pivots)
    _, pi = tab.reduced_costs(c1)
    # phase-1 optimality: pi @ A <= 0 and pi @ b = residual > 0
    return LPResult(INFEASIBLE, farkas=-pi * sign, iterations=tab.pivots)


def _drive_out_artificials(tab: _Tableau) -> list[int]:
    """Pivot zero-level artificials out of the basis; return redundant rows."""
    redundant = []
    for r in range(tab.m):
        if tab.basis[r] < tab.n:
            continue
        row = tab.Binv[r] @ tab.A if not tab.sparse else tab.A.T @ tab.Binv[r]
        cand = np.flatnonzero(np.abs(row) > 1e-7)
        if cand.size == 0:
            redundant.append(r)
            continue
        j = int(cand[np.argmax(np.abs(row[cand]))])
        tab.pivot(j, r, tab.ftran(j))
    return redundant


def lp_min(c: np.ndarray, p: LPProblem, *, tol: float = 1e-9, refactor_every: int = 50,
           max_iter: int = 200_000) -> LPResult:
    """Minimise ``c @ x`` over ``A x = b``, ``x >= lower``.

    ``duals`` are the row prices ``y`` with ``c - y @ A >= 0`` at optimality.
    """
    c = np.asarray(c, dtype=float)
    tab, sign, c1, b = _phase1(p, tol, refactor_every, max_iter)
    scale = 1.0 + np.abs(b).max(initial=0.0)
    if float(np.sum(tab.xB[tab.basis >= tab.n])) > 1e3 * tol * scale:
        _, pi = tab.reduced_costs(c1)
        return LPResult(INFEASIBLE, farkas=-pi * sign, iterations=tab.pivots)
    _drive_out_artificials(tab)
    tab.refactor()
    c2 = np.r_[c, np.zeros(tab.m)]
    status = tab.run(c2, max_iter)
    tab.refactor()
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=tab.pivots)
    x = tab.solution()[: tab.n]
    x = np.where(np.abs(x) < tol, 0.0, x) + p.lower
    _, pi = tab.reduced_costs(c2)
    return LPResult(OPTIMAL, x=x, value=float(c @ x), duals=pi * sign, iterations=tab.pivots)
