import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nocorr.gme import GME_THRESHOLD, bipartitions, check_certificate, gme_witness
from nocorr.notmap import nc_state
from nocorr.qla import DensityMatrix, maximally_mixed
from nocorr.states import density, ghz, haar_random_pure, named_state
from oracles import WITNESS_FIXTURE, WITNESS_REFERENCE


def test_bipartitions_three():
    assert [str(b) for b in bipartitions(3)] == ["0|12", "1|02", "2|01"]


def test_bipartitions_two():
    assert [str(b) for b in bipartitions(2)] == ["0|1"]


def test_bipartitions_four():
    cuts = [str(b) for b in bipartitions(4)]
    assert len(cuts) == 7
    assert cuts[:4] == ["0|123", "1|023", "2|013", "3|012"]
    assert cuts[4:] == ["01|23", "02|13", "03|12"]


def test_bipartitions_need_two_parties():
    with pytest.raises(ValueError):
        bipartitions(1)


def test_ghz_qubits_detected():
    res = gme_witness(density(ghz(2, 3)))
    assert res.is_gme
    assert check_certificate(res, (2, 2, 2)) <= 1e-7
    assert res.value == pytest.approx(-np.real(np.trace(res.witness_matrix @ density(ghz(2, 3)).matrix)),
                                      abs=1e-6)


def test_separable_states_not_detected():
    assert gme_witness(maximally_mixed((2, 2, 2))).value <= 1e-6
    prod = np.kron(np.kron([1, 0], [0, 1]), [1, 1]) / np.sqrt(2)
    assert gme_witness(DensityMatrix(np.outer(prod, prod), (2, 2, 2))).value <= 1e-6


def test_biseparable_state_not_detected():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    v = np.kron(bell, [1, 0])
    assert gme_witness(DensityMatrix(np.outer(v, v), (2, 2, 2))).value <= GME_THRESHOLD


@settings(max_examples=5)
@given(seed=st.integers(0, 2**32 - 1))
def test_invariant_under_party_exchange(seed):
    rho = density(haar_random_pure(2, 3, seed))
    swapped = rho.matrix.reshape((2,) * 6).transpose(1, 0, 2, 4, 3, 5).reshape(8, 8)
    a = gme_witness(rho).value
    b = gme_witness(DensityMatrix(swapped, (2, 2, 2))).value
    assert a == pytest.approx(b, abs=1e-6)


def test_needs_three_parties():
    with pytest.raises(ValueError):
        gme_witness(maximally_mixed((2, 2)))


def test_nc_state_b_certificate():
    rho = nc_state(density(named_state("b")))
    res = gme_witness(rho)
    assert res.value == pytest.approx(WITNESS_REFERENCE["b"], abs=2e-3)
    assert res.value == pytest.approx(WITNESS_FIXTURE["b"], abs=1e-6)
    assert res.value == pytest.approx(-np.real(np.trace(res.witness_matrix @ rho.matrix)), abs=1e-9)
    assert check_certificate(res, (3, 3, 3)) <= 1e-7
    assert res.sdp.gap <= 1e-6
