"""The qudit NOT channel, anti-states and no-correlation mixtures.

Also houses the Heisenberg-Weyl "universal-not" candidate, kept only to show
that it is not a positive map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gellmann import antisymmetric_subset, gellmann_basis
from .qla import DensityMatrix, min_eig


@dataclass(frozen=True, eq=False)
class KrausSet:
    d: int
    operators: tuple[np.ndarray, ...]

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)


def kraus_ops(d: int) -> KrausSet:
    """Antisymmetric Gell-Mann matrices scaled by 1/sqrt(d-1)."""
    basis = gellmann_basis(d)
    return KrausSet(d, tuple(m / np.sqrt(d - 1) for m in antisymmetric_subset(basis)))


def not_channel(rho_local: np.ndarray, d: int) -> np.ndarray:
    """``sum_a K_a conj(rho) K_a^dagger`` on a single d-level system."""
    rho_local = np.asarray(rho_local, dtype=complex)
    if rho_local.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {rho_local.shape}")
    rc = rho_local.conj()
    return sum(k @ rc @ k.conj().T for k in kraus_ops(d).operators)


def _apply_local(t: np.ndarray, ops: tuple[np.ndarray, ...], k: int, n: int) -> np.ndarray:
    """Apply ``X -> sum_a A X A^dagger`` on tensor factor ``k`` of a (d,)*2n array."""
    out = np.zeros_like(t)
    for a in ops:
        s = np.moveaxis(np.tensordot(a, t, axes=([1], [k])), 0, k)
        s = np.moveaxis(np.tensordot(s, a.conj(), axes=([n + k], [1])), -1, n + k)
        out += s
    return out


def anti_state(rho: DensityMatrix) -> DensityMatrix:
    """NOT channel applied to every subsystem.

    Conjugation in the computational basis factorises over parties, so it is
    done once on the full matrix before the local Kraus sums.
    """
    d, n = rho.local_dim, rho.n
    ops = kraus_ops(d).operators
    t = np.asarray(rho.matrix).conj().reshape((d,) * (2 * n))
    for k in range(n):
        t = _apply_local(t, ops, k, n)
    D = d**n
    return DensityMatrix(t.reshape(D, D), rho.dims)


def mixing_probability(d: int, n: int) -> float:
    """Weight of the original state in the no-correlation mixture."""
    return 1.0 / (1.0 + (d - 1) ** n)


def nc_state(rho: DensityMatrix) -> DensityMatrix:
    """Mixture ``p rho + (1-p) anti(rho)`` with no n-partite correlations.

    Only defined for an odd number of parties; for even n the anti-state's
    full correlations carry the same sign and cannot cancel.
    """
    d, n = rho.local_dim, rho.n
    if n % 2 == 0:
        raise ValueError(
            f"no-correlation mixture needs an odd number of parties, got n={n}; "
            "even-n constructions require mixing three or more states"
        )
    p = mixing_probability(d, n)
    return DensityMatrix(p * rho.matrix + (1 - p) * anti_state(rho).matrix, rho.dims)


# --- Heisenberg-Weyl candidate ---------------------------------------------

@dataclass(frozen=True, eq=False)
class HWPair:
    d: int
    X: np.ndarray
    Z: np.ndarray
    omega: complex


def hw_pair(d: int) -> HWPair:
    """Shift ``X`` (ones on the superdiagonal and bottom-left) and clock ``Z``.

    This ``X`` maps ``|j>`` to ``|j-1>``, so ``X Z = omega Z X``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    omega = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d, dtype=complex), 1, axis=1)
    Z = np.diag(omega ** np.arange(d))
    return HWPair(d, X, Z, omega)


def naive_hw_map(rho_local: np.ndarray, d: int) -> tuple[np.ndarray, float]:
    """Multiply the ``X^m Z^n`` coefficients by ``omega^m`` (m >= 1) or ``omega^n`` (m = 0).

    Returns the image and its smallest eigenvalue, which can be negative.
    """
    rho_local = np.asarray(rho_local, dtype=complex)
    if rho_local.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {rho_local.shape}")
    hw = hw_pair(d)
    out = np.zeros((d, d), dtype=complex)
    for m in range(d):
        Xm = np.linalg.matrix_power(hw.X, m)
        for n in range(d):
            B = Xm @ np.linalg.matrix_power(hw.Z, n)
            c = np.trace(B.conj().T @ rho_local) / d
            phase = hw.omega**m if m else hw.omega**n
            out += phase * c * B
    return out, min_eig(out)
