"""Generalized Gell-Mann matrices for su(d)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"
DIAGONAL = "diagonal"


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """The d^2 - 1 traceless Hermitian generators with Tr(M_i M_j) = 2 delta_ij.

    ``elements`` holds the generators only. Correlation-tensor index ``mu``
    maps to ``operators[mu]``, where ``operators[0]`` is the identity and
    ``operators[k] = elements[k - 1]``.
    ``labels[k]`` is ``(j, k)`` (zero-based, j < k) for off-diagonal kinds and
    the level ``l`` in 1..d-1 for diagonal ones.
    """

    d: int
    elements: tuple[np.ndarray, ...]
    kinds: tuple[str, ...]
    labels: tuple[object, ...]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.d, dtype=complex)

    @property
    def operators(self) -> np.ndarray:
        """Stack of shape (d^2, d, d): identity followed by the generators."""
        return _operator_stack(self.d)

    def index_of(self, kind: str, label) -> int:
        """Tensor index (1-based, 0 is the identity) of a generator."""
        for i, (k, lab) in enumerate(zip(self.kinds, self.labels)):
            if k == kind and lab == label:
                return i + 1
        raise KeyError((kind, label))

    def __len__(self) -> int:
        return len(self.elements)


def _build(d: int) -> tuple[list[np.ndarray], list[str], list[object]]:
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    elements, kinds, labels = [], [], []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        elements.append(m)
        kinds.append(SYMMETRIC)
        labels.append((j, k))
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        elements.append(m)
        kinds.append(ANTISYMMETRIC)
        labels.append((j, k))
    for level in range(1, d):
        diag = np.zeros(d)
        diag[:level] = 1.0
        diag[level] = -level
        elements.append(np.diag(np.sqrt(2.0 / (level * (level + 1))) * diag).astype(complex))
        kinds.append(DIAGONAL)
        labels.append(level)
    return elements, kinds, labels


@lru_cache(maxsize=None)
def gellmann_basis(d: int) -> GellMannBasis:
    """Symmetric (lexicographic in (j, k)), then antisymmetric, then diagonal by level."""
    if int(d) != d or d < 2:
        raise ValueError(f"Gell-Mann basis needs d >= 2, got {d}")
    d = int(d)
    elements, kinds, labels = _build(d)
    for m in elements:
        m.setflags(write=False)
    return GellMannBasis(d, tuple(elements), tuple(kinds), tuple(labels))


@lru_cache(maxsize=None)
def _operator_stack(d: int) -> np.ndarray:
    b = gellmann_basis(d)
    stack = np.stack([np.eye(d, dtype=complex), *b.elements])
    stack.setflags(write=False)
    return stack


def antisymmetric_subset(basis: GellMannBasis) -> list[np.ndarray]:
    return [m for m, k in zip(basis.elements, basis.kinds) if k == ANTISYMMETRIC]


def coefficients(op: np.ndarray, d: int | None = None) -> np.ndarray:
    """Trace inner products ``Tr(M_mu op)`` for mu = 0 .. d^2 - 1 (identity first)."""
    op = np.asarray(op)
    d = d or op.shape[0]
    return np.einsum("kij,ji->k", _operator_stack(d), op)
