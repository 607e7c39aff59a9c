"""Primal-dual interior-point solver for small dense Hermitian SDPs.

Problems are given in linear-matrix-inequality form::

    minimize    c @ y
    subject to  S_b(y) = F0_b + sum_k y_k F_bk  >= 0     for every block b

with ``y`` real and every ``F`` Hermitian. The Lagrange dual is::

    maximize    -sum_b Tr(F0_b X_b)
    subject to  sum_b Re Tr(F_bk X_b) = c_k,   X_b >= 0.

A block's coefficient map is a sum of terms ``scale * A @ y[var]`` where
``A`` is a sparse ``(n_b^2, len(var))`` matrix whose columns are row-major
``vec(F_bk)``. Terms that share the same ``A`` object (across blocks too) are
merged when the Schur complement is assembled, which is what keeps
structured problems cheap.

The iteration is HKM with a Mehrotra predictor-corrector. ``y`` is kept
strictly feasible throughout, so the returned point satisfies every LMI,
while the dual multipliers converge from an infeasible start.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)


class SDPError(RuntimeError):
    """Solver failure; ``status`` is one of infeasible, unbounded, stalled."""

    def __init__(self, status: str, message: str):
        super().__init__(f"{status}: {message}")
        self.status = status


@dataclass
class Term:
    var: slice
    A: sp.csc_matrix
    scale: float = 1.0


class LMI:
    """``const + sum_terms scale * unvec(A @ y[var]) >= 0``."""

    def __init__(self, const: np.ndarray, terms: Sequence[Term]):
        const = np.asarray(const, dtype=complex)
        n = const.shape[0]
        if const.shape != (n, n):
            raise ValueError("LMI constant must be square")
        if np.max(np.abs(const - const.conj().T), initial=0.0) > 1e-12:
            raise ValueError("LMI constant is not Hermitian")
        for t in terms:
            if t.A.shape[0] != n * n:
                raise ValueError(f"LMI term needs {n * n} rows, got {t.A.shape[0]}")
            if t.A.shape[1] != t.var.stop - t.var.start:
                raise ValueError("LMI term width does not match its variable slice")
        self.const = const
        self.terms = list(terms)

    @classmethod
    def from_matrices(cls, const: np.ndarray, mats: Sequence[np.ndarray], offset: int = 0) -> "LMI":
        """Dense convenience form: ``const + sum_k y[offset + k] mats[k] >= 0``."""
        for f in mats:
            f = np.asarray(f)
            if np.max(np.abs(f - f.conj().T), initial=0.0) > 1e-12:
                raise ValueError("LMI coefficient is not Hermitian")
        cols = np.column_stack([np.asarray(f, dtype=complex).ravel() for f in mats])
        return cls(const, [Term(slice(offset, offset + len(mats)), sp.csc_matrix(cols))])

    @property
    def size(self) -> int:
        return self.const.shape[0]

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        n = self.size
        v = self.const.ravel().copy()
        for t in self.terms:
            v += t.scale * (t.A @ y[t.var])
        s = v.reshape(n, n)
        return 0.5 * (s + s.conj().T)

    def linear_part(self, dy: np.ndarray) -> np.ndarray:
        n = self.size
        v = np.zeros(n * n, dtype=complex)
        for t in self.terms:
            v += t.scale * (t.A @ dy[t.var])
        s = v.reshape(n, n)
        return 0.5 * (s + s.conj().T)

    def adjoint_into(self, x: np.ndarray, out: np.ndarray) -> None:
        """``out[k] += Re Tr(F_k X)`` for Hermitian ``X``."""
        xv = x.ravel()
        for t in self.terms:
            out[t.var] += t.scale * np.real(t.A.conj().T @ xv)

    def max_var(self) -> int:
        return max((t.var.stop for t in self.terms), default=0)


@dataclass
class SDPProblem:
    c: np.ndarray
    constraints: list[LMI]

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float)
        for b in self.constraints:
            if b.max_var() > self.c.size:
                raise ValueError("LMI refers to variables beyond the objective length")

    @property
    def num_vars(self) -> int:
        return self.c.size

    def slacks(self, y: np.ndarray) -> list[np.ndarray]:
        return [b.evaluate(y) for b in self.constraints]

    def adjoint(self, X: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.num_vars)
        for b, x in zip(self.constraints, X):
            b.adjoint_into(x, out)
        return out


@dataclass
class SDPResult:
    value: float
    y: np.ndarray
    slacks: list[np.ndarray]
    duals: list[np.ndarray]
    dual_value: float
    gap: float
    dual_infeasibility: float
    iterations: int
    history: list[dict] = field(default_factory=list, repr=False)


def _chol_inv(s: np.ndarray) -> np.ndarray | None:
    try:
        c = sla.cho_factor(s, lower=True)
    except np.linalg.LinAlgError:
        return None
    return sla.cho_solve(c, np.eye(s.shape[0], dtype=s.dtype))


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha dx >= 0 (x positive definite)."""
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = sla.solve_triangular(l, np.eye(x.shape[0]), lower=True)
    m = li @ dx @ li.conj().T
    lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _min_eig(s: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(s)[0])


def schur_complement(p: SDPProblem, X: Sequence[np.ndarray], Sinv: Sequence[np.ndarray]) -> np.ndarray:
    """``H_ij = sum_b Re Tr(F_bi X_b F_bj S_b^-1)``.

    With row-major vec, ``vec(X F S^-1) = kron(X, S^-T) vec(F)``, so each
    block contributes ``Re(A_i^H kron(X, S^-T) A_j)`` per pair of terms.
    Kernels of term pairs sharing the same matrices are summed first.
    """
    kernels: dict[tuple, np.ndarray] = {}
    pieces: dict[tuple, tuple[Term, Term]] = {}
    for b, x, si in zip(p.constraints, X, Sinv):
        K = None
        for ti in b.terms:
            for tj in b.terms:
                key = (id(ti.A), ti.var.start, id(tj.A), tj.var.start)
                if K is None:
                    K = np.kron(x, si.T)
                contrib = (ti.scale * tj.scale) * K
                if key in kernels:
                    kernels[key] += contrib
                else:
                    kernels[key] = contrib
                    pieces[key] = (ti, tj)
    H = np.zeros((p.num_vars, p.num_vars))
    for key, K in kernels.items():
        ti, tj = pieces[key]
        AK = ti.A.conj().T @ K  # sparse @ dense, C-ordered
        H[ti.var, tj.var] += np.real((tj.A.T @ AK.T).T)
    return 0.5 * (H + H.T)


def strictly_feasible_point(p: SDPProblem, max_iter: int = 100) -> np.ndarray:
    """Phase 1: minimise ``s`` over ``F(y) + s I >= 0``, ``s >= -1``; stop once ``s < 0``."""
    m = p.num_vars
    s_var = slice(m, m + 1)
    blocks = []
    for b in p.constraints:
        eye = sp.csc_matrix(np.eye(b.size, dtype=complex).reshape(-1, 1))
        blocks.append(LMI(b.const, b.terms + [Term(s_var, eye)]))
    blocks.append(LMI(np.eye(1), [Term(s_var, sp.csc_matrix(np.ones((1, 1), dtype=complex)))]))
    c = np.r_[np.zeros(m), 1.0]
    shift = max(-min(_min_eig(b.const) for b in p.constraints), 0.0) + 1.0
    res = sdp_min(SDPProblem(c, blocks), y0=np.r_[np.zeros(m), shift],
                  max_iter=max_iter, stop_below=-1e-3)
    if res.y[-1] < 0:
        return res.y[:m]
    raise SDPError("infeasible", f"no strictly feasible point (phase-1 optimum {res.value:.3e})")


def sdp_min(p: SDPProblem, y0: np.ndarray | None = None, *, tol: float = 1e-8,
            feas_tol: float = 1e-7, max_iter: int = 100, step_fraction: float = 0.95,
            stop_below: float | None = None, unbounded_limit: float = 1e10,
            refine: int = 1) -> SDPResult:
    """Minimise ``c @ y`` subject to the problem's LMIs.

    ``y0`` must make every block positive definite; when omitted a phase-1
    problem is solved first. Stops when the relative duality gap is below
    ``tol`` and the relative dual residual below ``feas_tol``. Should the
    iteration break down numerically after that point has been passed within
    a factor 100, the last good iterate is returned. ``stop_below`` ends the
    run early once the objective drops under that value (used by phase 1).
    """
    if y0 is None:
        y0 = strictly_feasible_point(p)
    y = np.asarray(y0, dtype=float).copy()
    blocks = p.constraints
    S = p.slacks(y)
    if any(_min_eig(s) <= 0 for s in S):
        raise SDPError("infeasible", "initial point is not strictly feasible")
    X = [np.eye(b.size, dtype=complex) for b in blocks]
    total = sum(b.size for b in blocks)
    cnorm = 1.0 + np.linalg.norm(p.c)
    history: list[dict] = []

    best = None

    def loosely_converged(rel_gap, infeas):
        return rel_gap < 1e2 * tol and infeas < 1e2 * feas_tol

    def finish(it, rel_gap, infeas, reason):
        if best is not None and loosely_converged(best["rel_gap"], best["infeas"]):
            log.debug("%s at iteration %d; returning last good iterate", reason, it)
            return SDPResult(**best["result"])
        raise SDPError("stalled", f"{reason} at iteration {it} (gap {rel_gap:.2e}, infeas {infeas:.2e})")

    for it in range(1, max_iter + 1):
        Sinv = [_chol_inv(s) for s in S]
        if any(si is None for si in Sinv):
            return finish(it, rel_gap, infeas, "slack lost definiteness")
        mu = sum(np.real(np.vdot(x, s)) for x, s in zip(X, S)) / total
        r_eq = p.c - p.adjoint(X)
        pval = float(p.c @ y)
        dval = float(-sum(np.real(np.vdot(b.const, x)) for b, x in zip(blocks, X)))
        gap = mu * total
        rel_gap = gap / (1.0 + abs(pval) + abs(dval))
        infeas = np.linalg.norm(r_eq) / cnorm
        history.append(dict(it=it, primal=pval, dual=dval, gap=gap, infeas=infeas))
        log.debug("it %3d  primal %.10e  dual %.10e  gap %.2e  infeas %.2e", it, pval, dval, gap, infeas)

        best = dict(rel_gap=rel_gap, infeas=infeas, result=dict(
            value=pval, y=y, slacks=S, duals=X, dual_value=dval, gap=gap,
            dual_infeasibility=float(np.linalg.norm(r_eq)), iterations=it, history=history))
        if stop_below is not None and pval < stop_below:
            break
        if rel_gap < tol and infeas < feas_tol:
            break
        if abs(pval) > unbounded_limit or np.linalg.norm(y) > unbounded_limit:
            raise SDPError("unbounded", f"objective {pval:.3e} diverging at iteration {it}")

        H = schur_complement(p, X, Sinv)
        try:
            H_fac = sla.cho_factor(H, lower=True)
            solve = lambda rhs: sla.cho_solve(H_fac, rhs)
        except np.linalg.LinAlgError:
            reg = 1e-12 * (1.0 + np.max(np.abs(np.diag(H))))
            lu = sla.lu_factor(H + reg * np.eye(H.shape[0]))
            solve = lambda rhs: sla.lu_solve(lu, rhs)

        def direction(target: float, corr: list[np.ndarray] | None):
            # linearised X dS + dX S = target I - X S - corr, with dS = F(dy)
            G = []
            for k, (x, si) in enumerate(zip(X, Sinv)):
                g = target * si - x
                if corr is not None:
                    g = g - corr[k] @ si
                G.append(_herm(g))
            dy = solve(p.adjoint(G) - r_eq)
            for step in range(refine + 1):
                dS = [b.linear_part(dy) for b in blocks]
                dX = [_herm(g - x @ ds @ si) for g, x, ds, si in zip(G, X, dS, Sinv)]
                if step == refine:
                    break
                # iterative refinement on the dual equality residual
                dy = dy + solve(p.adjoint(dX) - r_eq)
            return dy, dS, dX

        def steps(dS, dX):
            a_s = min(_max_step(s, ds) for s, ds in zip(S, dS))
            a_x = min(_max_step(x, dx) for x, dx in zip(X, dX))
            return min(1.0, step_fraction * a_s), min(1.0, step_fraction * a_x)

        dy, dS, dX = direction(0.0, None)
        a_s, a_x = steps(dS, dX)
        mu_aff = sum(np.real(np.vdot(x + a_x * dx, s + a_s * ds))
                     for x, dx, s, ds in zip(X, dX, S, dS)) / total
        sigma = min(1.0, max(mu_aff, 0.0) / mu) ** 3
        corr = [dx @ ds for dx, ds in zip(dX, dS)]
        dy, dS, dX = direction(sigma * mu, corr)
        a_s, a_x = steps(dS, dX)
        if a_s == 0.0 and a_x == 0.0:
            log.debug("no progress possible at iteration %d", it)
            break

        y_new = y + a_s * dy
        S_new = p.slacks(y_new)
        # guard against round-off pushing a slack onto the boundary
        while any(_min_eig(s) <= 0 for s in S_new):
            a_s *= 0.5
            if a_s < 1e-14:
                return finish(it, rel_gap, infeas, "no admissible step")
            y_new = y + a_s * dy
            S_new = p.slacks(y_new)
        y, S = y_new, S_new
        X = [_herm(x + a_x * dx) for x, dx in zip(X, dX)]
    else:
        return finish(it, rel_gap, infeas, "iteration limit")
    if not (stop_below is not None and pval < stop_below) and not loosely_converged(rel_gap, infeas):
        return finish(it, rel_gap, infeas, "no progress")
    return SDPResult(**best["result"])
