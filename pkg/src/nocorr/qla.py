"""Dense complex linear algebra for small multipartite operators.

Matrices are plain ``numpy`` complex arrays. Subsystems are indexed from zero,
leftmost tensor factor first, and the computational basis is big-endian:
``|i_1 ... i_N>`` sits at index ``sum_k i_k d^(N-k)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


class StateError(ValueError):
    """Raised when a matrix fails the density-matrix invariants."""


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, ops)


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.max(np.abs(h - h.conj().T), initial=0.0) <= tol


def herm_eig(h: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("herm_eig: input is not Hermitian")
    # LAPACK zheevd reads one triangle only; symmetrise so both halves agree
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def min_eig(h: np.ndarray) -> float:
    return float(herm_eig(h)[0][0])


def is_psd(h: np.ndarray, tol: float = PSD_TOL) -> bool:
    return min_eig(h) >= tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state on a tensor product of subsystems."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        dims = tuple(int(x) for x in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        if not dims or any(x < 1 for x in dims) or int(np.prod(dims)) != m.shape[0]:
            raise StateError(f"dims {dims} do not match matrix side {m.shape[0]}")
        if not is_hermitian(m):
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise StateError(f"trace is {np.trace(m).real:.3e}, expected 1")
        lam = min_eig(m)
        if lam < PSD_TOL:
            raise StateError(f"density matrix has negative eigenvalue {lam:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def local_dim(self) -> int:
        """Common subsystem dimension; raises if the parties differ."""
        if len(set(self.dims)) != 1:
            raise ValueError(f"subsystems have unequal dimensions {self.dims}")
        return self.dims[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    D = int(np.prod(dims))
    return DensityMatrix(np.eye(D) / D, tuple(dims))


def _check_subsystems(indices: Iterable[int], n: int) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if any(i < 0 or i >= n for i in idx):
        raise ValueError(f"subsystem indices {idx} out of range for {n} parties")
    return idx


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (order preserved as sorted).

    An empty ``keep`` traces everything out and returns the 1x1 state [[1]]
    with dims ``(1,)``.
    """
    n = rho.n
    keep = _check_subsystems(keep, n)
    if not keep:
        return DensityMatrix(_ptrace(rho.matrix, rho.dims, []), (1,))
    return DensityMatrix(_ptrace(rho.matrix, rho.dims, keep), tuple(rho.dims[i] for i in keep))


def _ptrace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = m.reshape(tuple(dims) * 2)
    traced = [i for i in range(n) if i not in keep]
    # trace out from the highest index so axis numbers stay valid
    for cur_n, i in zip(range(n, n - len(traced), -1), sorted(traced, reverse=True)):
        t = np.trace(t, axis1=i, axis2=i + cur_n)
    side = int(np.prod([dims[i] for i in keep]))
    return t.reshape(side, side)


def partial_transpose(rho: DensityMatrix | np.ndarray, subset: Iterable[int],
                      dims: Sequence[int] | None = None) -> np.ndarray:
    """Transpose the tensor factors listed in ``subset``.

    Accepts either a DensityMatrix or a raw square array together with ``dims``
    (witness operators are not states).
    """
    if isinstance(rho, DensityMatrix):
        m, dims = rho.matrix, rho.dims
    else:
        if dims is None:
            raise ValueError("dims required for a raw matrix")
        m = np.asarray(rho)
    n = len(dims)
    subset = _check_subsystems(subset, n)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    for i in subset:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return t.transpose(axes).reshape(m.shape)


def partial_transpose_permutation(dims: Sequence[int], subset: Iterable[int]) -> np.ndarray:
    """Index map ``p`` with ``vec(X^{T_subset}) = vec(X)[p]`` for row-major vec."""
    D = int(np.prod(dims))
    idx = np.arange(D * D).reshape(D, D)
    return partial_transpose(idx, subset, dims).ravel()


# --- JSON matrix format ----------------------------------------------------

def matrix_to_json(m: np.ndarray, dims: Sequence[int] | None = None, **extra) -> dict:
    m = np.asarray(m, dtype=complex)
    out = {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(f"{x:.12g}") + 0.0 for x in m.real.ravel()],
        "im": [float(f"{x:.12g}") + 0.0 for x in m.imag.ravel()],
    }
    if dims is not None:
        out["dims"] = [int(x) for x in dims]
    out.update(extra)
    return out


def matrix_from_json(obj: dict) -> tuple[np.ndarray, list[int] | None]:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError("matrix JSON entry count does not match rows*cols")
    dims = obj.get("dims")
    return (re + 1j * im).reshape(rows, cols), (list(dims) if dims is not None else None)


def density_from_json(obj: dict) -> DensityMatrix:
    m, dims = matrix_from_json(obj)
    if dims is None:
        dims = [m.shape[0]]
    return DensityMatrix(m, tuple(dims))


def load_density(path: str) -> DensityMatrix:
    with open(path) as fh:
        return density_from_json(json.load(fh))
