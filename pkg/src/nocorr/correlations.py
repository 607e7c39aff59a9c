"""Correlation tensors in the generalized Gell-Mann basis.

``T[mu_1, ..., mu_n] = Tr(rho M_mu_1 x ... x M_mu_n)`` with ``M_0 = I``. The
*weight* of an index tuple is its number of non-zero entries; weight-n
entries are the full n-partite correlations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .gellmann import _operator_stack
from .qla import DensityMatrix

PER_PLACEMENT = "per_placement"
TOTAL = "total"
CONVENTIONS = (PER_PLACEMENT, TOTAL)


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    d: int
    n: int
    values: np.ndarray  # real, shape (d*d,) * n

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.d * self.d,) * self.n:
            raise ValueError(f"tensor shape {v.shape} does not match d={self.d}, n={self.n}")
        object.__setattr__(self, "values", v)

    def __getitem__(self, idx) -> float:
        return float(self.values[tuple(idx)])

    @classmethod
    def from_mapping(cls, d: int, n: int, entries: Mapping[tuple[int, ...], float]) -> "CorrelationTensor":
        """Build from ``{index tuple: value}``; missing tuples are left as NaN."""
        v = np.full((d * d,) * n, np.nan)
        for idx, val in entries.items():
            v[tuple(idx)] = val
        return cls(d, n, v)

    def weight_slice(self, placement: Sequence[int]) -> np.ndarray:
        """Entries with non-identity indices exactly on the parties in ``placement``."""
        sl = tuple(slice(1, None) if k in placement else 0 for k in range(self.n))
        return self.values[sl]

    def full(self) -> np.ndarray:
        """The weight-n block (no identity indices)."""
        return self.values[(slice(1, None),) * self.n]


def index_weights(d: int, n: int) -> np.ndarray:
    """Array of shape (d^2,)*n holding the weight of each index tuple."""
    nz = (np.arange(d * d) > 0).astype(int)
    w = np.zeros((d * d,) * n, dtype=int)
    for k in range(n):
        shape = [1] * n
        shape[k] = d * d
        w = w + nz.reshape(shape)
    return w


def corr_tensor(rho: DensityMatrix) -> CorrelationTensor:
    d, n = rho.local_dim, rho.n
    ops = _operator_stack(d)
    t = np.asarray(rho.matrix).reshape((d,) * (2 * n))
    for k in range(n):
        m = n - k
        t = np.tensordot(t, ops, axes=([k, k + m], [2, 1]))
        t = np.moveaxis(t, -1, k)
    return CorrelationTensor(d, n, t.real)


def expansion_weights(d: int, n: int) -> np.ndarray:
    """Prefactor ``(d/2)^weight / d^n`` of each term in the operator expansion."""
    return (d / 2.0) ** index_weights(d, n) / d**n


def reconstruct(t: CorrelationTensor) -> DensityMatrix:
    if np.isnan(t.values).any():
        raise ValueError("correlation tensor is incomplete")
    d, n = t.d, t.n
    ops = _operator_stack(d)
    coef = t.values * expansion_weights(d, n)
    out = coef.astype(complex)
    # out axes: (mu_0..mu_{n-1}); replace each mu_k by the pair (i_k, j_k)
    for k in range(n):
        out = np.tensordot(out, ops, axes=([0], [0]))  # drops mu_k, appends (i_k, j_k)
    # axes are now (i_0, j_0, i_1, j_1, ...); regroup rows then columns
    out = out.transpose([2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
    D = d**n
    return DensityMatrix(out.reshape(D, D), (d,) * n)


def sigma(t: CorrelationTensor, n_obs: int, convention: str = PER_PLACEMENT) -> float:
    """Sum of squared correlations between ``n_obs`` observers.

    ``per_placement`` sums over the single placement where the first ``n_obs``
    parties measure; ``total`` also sums over all C(n, n_obs) placements.
    """
    if not 1 <= n_obs <= t.n:
        raise ValueError(f"n_obs must be in 1..{t.n}, got {n_obs}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if convention == PER_PLACEMENT:
        return float(np.sum(t.weight_slice(range(n_obs)) ** 2))
    return float(sum(np.sum(t.weight_slice(p) ** 2) for p in itertools.combinations(range(t.n), n_obs)))


def corr_value(t: CorrelationTensor, observables: Sequence[Sequence[float]]) -> float:
    """Full n-party correlation for observables ``A_k = sum_j m_k[j] M_j``."""
    if len(observables) != t.n:
        raise ValueError(f"need {t.n} observable vectors, got {len(observables)}")
    c = t.full()
    for m in observables:
        m = np.asarray(m, dtype=float)
        if m.shape != (t.d * t.d - 1,):
            raise ValueError(f"observable vector must have length {t.d * t.d - 1}")
        c = np.tensordot(m, c, axes=([0], [0]))
    return float(c)


def observable(m: Sequence[float], d: int) -> np.ndarray:
    """Operator ``sum_j m[j] M_j`` for a real coefficient vector."""
    return np.tensordot(np.asarray(m, dtype=float), _operator_stack(d)[1:], axes=1)
