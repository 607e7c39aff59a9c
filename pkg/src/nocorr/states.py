"""Named three-qutrit states, GHZ states and Haar-random pure states.

Random sampling uses ``numpy.random.Generator`` over the PCG64 bit generator
seeded with a single 64-bit integer. Complex Gaussians are drawn as
``standard_normal(size) + 1j * standard_normal(size)`` (real block first,
then imaginary block), which is bit-reproducible for a fixed numpy major
version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qla import DensityMatrix

NORM_TOL = 1e-12

PERMUTATIONS_012 = ("012", "021", "102", "120", "201", "210")


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(x) for x in self.dims)
        if amps.size != int(np.prod(dims)):
            raise ValueError(f"{amps.size} amplitudes do not match dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)


def basis_index(digits: str | tuple[int, ...], d: int) -> int:
    """Big-endian position of the product basis vector ``|i_1 ... i_N>``."""
    idx = 0
    for ch in digits:
        idx = idx * d + int(ch)
    return idx


def _from_terms(terms: list[tuple[str, float]], d: int = 3) -> PureState:
    n = len(terms[0][0])
    v = np.zeros(d**n, dtype=complex)
    for digits, coeff in terms:
        v[basis_index(digits, d)] += coeff
    return PureState(v / np.linalg.norm(v), (d,) * n)


def _named_terms() -> dict[str, list[tuple[str, float]]]:
    return {
        "a": [("000", 1), ("111", 1), ("222", 1)],
        "b": [("001", 1), ("010", 1), ("100", 1)],
        "c": [("002", 1), ("020", 1), ("200", 1), ("011", 2), ("101", 2), ("110", 2)],
        "d": [(p, 1) for p in PERMUTATIONS_012] + [("111", 2)],
        "e": list(zip(PERMUTATIONS_012, (1, -1, -1, 1, 1, -1))),
    }


NAMED_STATES = tuple(_named_terms())


def named_state(name: str) -> PureState:
    """One of the five three-qutrit states a (GHZ), b, c, d (Dicke), e (Aharonov singlet)."""
    terms = _named_terms()
    if name not in terms:
        raise ValueError(f"unknown state {name!r}; choose from {', '.join(terms)}")
    return _from_terms(terms[name])


def ghz(d: int, n: int) -> PureState:
    if d < 2 or n < 2:
        raise ValueError(f"GHZ state needs d >= 2 and n >= 2, got d={d}, n={n}")
    v = np.zeros(d**n, dtype=complex)
    step = sum(d**k for k in range(n))  # index of |k k ... k> is k * step
    v[np.arange(d) * step] = 1 / np.sqrt(d)
    return PureState(v, (d,) * n)


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.uint64(seed)))


def _complex_gaussian(gen: np.random.Generator, shape) -> np.ndarray:
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def haar_random_pure(d: int, n: int, seed: int | np.random.Generator) -> PureState:
    """Haar-distributed pure state of ``n`` qudits.

    ``seed`` may be an integer or an existing Generator (to draw a stream of
    states from one seed).
    """
    if d < 2 or n < 1:
        raise ValueError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    gen = seed if isinstance(seed, np.random.Generator) else rng(seed)
    v = _complex_gaussian(gen, d**n)
    return PureState(v / np.linalg.norm(v), (d,) * n)


def haar_random_unitary(d: int, gen: np.random.Generator) -> np.ndarray:
    """QR of a complex Gaussian matrix, with R's diagonal phases moved into Q."""
    z = _complex_gaussian(gen, (d, d)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def density(psi: PureState) -> DensityMatrix:
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()), psi.dims)
