"""Born-rule probability tables and membership in the local polytope.

A local deterministic strategy for one party assigns an outcome to each of
its ``s`` settings; there are ``d**s`` of them, indexed as base-``d`` numbers
whose most significant digit is the outcome for setting 0. Joint strategies
are ordered party-major (party 0's strategy is the most significant digit
in base ``d**s``).

Table rows are ordered with settings ``(x_1..x_n)`` major and outcomes
``(a_1..a_n)`` minor, both big-endian, followed by one normalisation row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .optim.simplex import LPProblem, LPResult, lp_feasible, lp_min
from .qla import DensityMatrix
from .states import haar_random_unitary, rng


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """``bases[k][x]`` is a unitary whose columns are party k's basis for setting x."""

    bases: tuple[tuple[np.ndarray, ...], ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        for party in self.bases:
            for u in party:
                if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
                    raise ValueError("measurement basis is not orthonormal")

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def settings(self) -> int:
        return len(self.bases[0])

    @property
    def d(self) -> int:
        return self.bases[0][0].shape[0]


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """``values[x_1, ..., x_n, a_1, ..., a_n] = P(a | x)``."""

    values: np.ndarray
    n: int
    settings: int
    d: int

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        want = (self.settings,) * self.n + (self.d,) * self.n
        if v.shape != want:
            raise ValueError(f"table shape {v.shape}, expected {want}")
        if v.min() < -1e-12:
            raise ValueError(f"negative probability {v.min():.3e}")
        sums = v.reshape((self.settings,) * self.n + (-1,)).sum(axis=-1)
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise ValueError("a fixed-settings slice does not sum to one")
        for k in range(self.n):
            marg = self._marginal(v, k)
            # for each local setting x_k, the marginal must not depend on the other settings
            spread = marg.max(axis=tuple(i for i in range(self.n) if i != k)) - marg.min(
                axis=tuple(i for i in range(self.n) if i != k))
            if np.max(np.abs(spread), initial=0.0) > 1e-10:
                raise ValueError(f"party {k}'s marginal depends on remote settings")

    def _marginal(self, v: np.ndarray, party: int) -> np.ndarray:
        axes = tuple(self.n + k for k in range(self.n) if k != party)
        return v.sum(axis=axes)

    def vector(self) -> np.ndarray:
        return np.asarray(self.values).ravel()

    def marginal(self, party: int) -> np.ndarray:
        """``P(a_party | x_1..x_n)`` with shape (s,)*n + (d,)."""
        return self._marginal(self.values, party)


@dataclass
class BellCertificate:
    """Inequality ``coefficients . P <= classical_bound`` violated by the table.

    ``coefficients`` has the table's shape. ``quantum_value`` is its value on
    the table that produced it.
    """

    coefficients: np.ndarray
    classical_bound: float
    quantum_value: float
    noise_value: float | None = None

    @property
    def violation(self) -> float:
        return self.quantum_value - self.classical_bound


@dataclass
class LocalityResult:
    local: bool
    model: np.ndarray | None
    certificate: BellCertificate | None
    lp: LPResult


def random_bases(d: int, n: int, s: int, seed: int) -> MeasurementSet:
    if s < 1:
        raise ValueError("need at least one setting per party")
    gen = rng(seed)
    bases = tuple(tuple(haar_random_unitary(d, gen) for _ in range(s)) for _ in range(n))
    return MeasurementSet(bases, seed)


def born_table(rho: DensityMatrix, m: MeasurementSet) -> ProbabilityTable:
    n, s, d = m.n, m.settings, m.d
    if rho.dims != (d,) * n:
        raise ValueError(f"state dims {rho.dims} do not match {n} parties of dimension {d}")
    t = np.asarray(rho.matrix).reshape((d,) * (2 * n))
    out = np.empty((s,) * n + (d,) * n)
    for xs in itertools.product(range(s), repeat=n):
        # rotate every party into its measurement basis, read off the diagonal
        r = t
        for k, x in enumerate(xs):
            u = m.bases[k][x]
            r = np.moveaxis(np.tensordot(u.conj().T, r, axes=([1], [k])), 0, k)
            r = np.moveaxis(np.tensordot(r, u, axes=([n + k], [0])), -1, n + k)
        diag = np.einsum(r.reshape(d**n, d**n), [0, 0], [0]).real
        out[xs] = diag.reshape((d,) * n)
    if out.min() > -1e-12:
        out = np.clip(out, 0.0, None)
    return ProbabilityTable(out, n, s, d)


@lru_cache(maxsize=8)
def strategy_matrix(d: int, s: int, n: int) -> sp.csc_matrix:
    """0/1 matrix: rows are table entries plus normalisation, columns joint strategies.

    Cached; callers must not modify the returned matrix.
    """
    local = np.array(list(itertools.product(range(d), repeat=s)))  # (d^s, s) outcome per setting
    n_local = local.shape[0]
    n_rows = s**n * d**n
    rows, cols = [], []
    for col, strat in enumerate(itertools.product(range(n_local), repeat=n)):
        for xs in itertools.product(range(s), repeat=n):
            a = [local[strat[k], xs[k]] for k in range(n)]
            r = 0
            for x in xs:
                r = r * s + x
            for ak in a:
                r = r * d + ak
            rows.append(r)
            cols.append(col)
        rows.append(n_rows)
        cols.append(col)
    data = np.ones(len(rows))
    return sp.csc_matrix((data, (rows, cols)), shape=(n_rows + 1, n_local**n))


def _certificate_from_farkas(y: np.ndarray, table: ProbabilityTable) -> BellCertificate:
    # y @ A >= 0 for every strategy and y @ b < 0; write it as beta . P <= C
    beta = -y[:-1]
    return BellCertificate(beta.reshape(table.values.shape), float(y[-1]), float(beta @ table.vector()))


def lhv_feasible(table: ProbabilityTable, *, refine: bool = True, **lp_kwargs) -> LocalityResult:
    """Does a local hidden-variable model reproduce ``table``?

    When it does not, the raw Farkas inequality is replaced (``refine``) by
    the most noise-robust one, rescaled so that white noise scores 0 and the
    local bound is 2.
    """
    A = strategy_matrix(table.d, table.settings, table.n)
    b = np.r_[table.vector(), 1.0]
    res = lp_feasible(LPProblem(A, b), **lp_kwargs)
    if res.feasible:
        return LocalityResult(True, res.x, None, res)
    cert = _certificate_from_farkas(res.farkas, table)
    if refine:
        _, cert = critical_visibility(table, **lp_kwargs)
        cert = rescale(cert, table)
    return LocalityResult(False, None, cert, res)


def rescale(cert: BellCertificate, table: ProbabilityTable, bound: float = 2.0) -> BellCertificate:
    """Affine change of the inequality so noise -> 0 and the local bound -> ``bound``.

    The constant shift is folded into the coefficients using the fact that
    every table sums to ``settings**n``.
    """
    if cert.noise_value is None:
        raise ValueError("noise value unknown for this certificate")
    scale = bound / (cert.classical_bound - cert.noise_value)
    slices = table.settings**table.n
    coeffs = scale * (cert.coefficients - cert.noise_value / slices)
    return BellCertificate(coeffs, bound, float(coeffs.ravel() @ table.vector()), 0.0)


def white_noise_table(n: int, s: int, d: int) -> ProbabilityTable:
    return ProbabilityTable(np.full((s,) * n + (d,) * n, 1.0 / d**n), n, s, d)


def critical_visibility(table: ProbabilityTable, **lp_kwargs) -> tuple[float, BellCertificate]:
    """Largest ``v`` with ``v P + (1 - v) noise`` local, and the optimal inequality.

    The returned inequality satisfies ``(C - N) / (Q - N) = v`` where C, Q, N
    are its classical bound, value on ``P`` and value on white noise.
    """
    A = strategy_matrix(table.d, table.settings, table.n)
    noise = np.r_[white_noise_table(table.n, table.settings, table.d).vector(), 1.0]
    target = np.r_[table.vector(), 1.0]
    A_v = sp.hstack([A, sp.csc_matrix((noise - target).reshape(-1, 1))], format="csc")
    c = np.zeros(A_v.shape[1])
    c[-1] = -1.0
    res = lp_min(c, LPProblem(A_v, noise), **lp_kwargs)
    if res.status != "optimal":
        raise RuntimeError(f"visibility LP ended with status {res.status}")
    v = float(res.x[-1])
    pi = res.duals  # pi @ A <= 0 on strategies
    beta = pi[:-1]
    cert = BellCertificate(
        beta.reshape(table.values.shape),
        classical_bound=float(np.max(A[:-1].T @ beta)),
        quantum_value=float(beta @ table.vector()),
        noise_value=float(beta @ noise[:-1]),
    )
    return v, cert


def strategy_values(cert: BellCertificate, d: int, s: int, n: int) -> np.ndarray:
    """Value of the inequality's left side on every deterministic strategy."""
    A = strategy_matrix(d, s, n)
    return A[:-1].T @ cert.coefficients.ravel()
