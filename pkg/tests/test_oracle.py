import numpy as np
import pytest

from entwitness.errors import DimensionMismatchError
from entwitness.linalg import DensityMatrix, ket, trace_distance
from entwitness.oracle import (
    SeparableAnsatz,
    etr_upper_bound,
    partial_transpose,
    ppt_check,
    verify,
)
from entwitness.states import ghz, haar_ket, max_entangled, werner


def test_separable_werner_is_found():
    assert etr_upper_bound(werner(0.2), (2, 2), restarts=3).upper_bound <= 1e-4


def test_bell_state_distance():
    res = etr_upper_bound(max_entangled(2), (2, 2), restarts=5)
    assert res.upper_bound == pytest.approx(0.5, abs=5e-3)
    # the reported ansatz really is at the reported distance
    assert trace_distance(max_entangled(2), res.ansatz.density()) == pytest.approx(res.upper_bound)


def test_werner_one_is_about_half():
    assert etr_upper_bound(werner(1.0), (2, 2), restarts=5).upper_bound == pytest.approx(0.5, abs=5e-3)


def test_pure_product_states(rng):
    for _ in range(5):
        psi = np.kron(haar_ket(2, rng), haar_ket(3, rng))
        res = etr_upper_bound(DensityMatrix.from_ket(psi), (2, 3), restarts=2)
        assert res.upper_bound <= 1e-6


def test_multipartite_product_ansatz(rng):
    psi = np.kron(np.kron(haar_ket(2, rng), haar_ket(2, rng)), haar_ket(2, rng))
    assert etr_upper_bound(DensityMatrix.from_ket(psi), (2, 2, 2), restarts=2).upper_bound <= 1e-6
    res = etr_upper_bound(ghz(3), (2, 2, 2), restarts=3)
    assert 0.0 < res.upper_bound <= 0.5 + 1e-9
    assert res.ansatz.dims == (2, 2, 2)


def test_dims_mismatch():
    with pytest.raises(DimensionMismatchError):
        etr_upper_bound(werner(0.5), (2, 3))


def test_monotone_in_restarts():
    rho = werner(0.8)
    vals = [etr_upper_bound(rho, (2, 2), restarts=r, seed=3, max_steps=200).upper_bound
            for r in (1, 2, 4)]
    assert vals[1] <= vals[0] + 1e-12 and vals[2] <= vals[1] + 1e-12


def test_monotone_in_m_with_warm_start(rng):
    rho = DensityMatrix(0.7 * max_entangled(2).matrix + 0.3 * np.eye(4) / 4)
    prev = etr_upper_bound(rho, (2, 2), m=1, restarts=2)
    for m in (2, 4, 6):
        res = etr_upper_bound(rho, (2, 2), m=m, restarts=2, initial=[prev.ansatz])
        assert res.upper_bound <= prev.upper_bound + 1e-12
        prev = res


def test_ansatz_validation():
    f = (ket("0")[None, :], ket("1")[None, :])  # one factor array per party, shape (m, d_j)
    with pytest.raises(ValueError):
        SeparableAnsatz(np.array([0.5]), f)
    with pytest.raises(ValueError):
        SeparableAnsatz(np.array([0.5, 0.5]), f)
    a = SeparableAnsatz(np.array([1.0]), f)
    assert a.padded(3).m == 3
    assert a.padded(3).density().allclose(a.density())


def test_ppt_examples():
    assert ppt_check(werner(0.5), (2, 2)) == "entangled"
    lo = np.linalg.eigvalsh(partial_transpose(werner(0.5).matrix, (2, 2)))[0]
    assert lo == pytest.approx(-1 / 8, abs=1e-12)
    assert ppt_check(werner(1 / 3), (2, 2)) == "separable"
    assert ppt_check(DensityMatrix.from_ket(ket("01")), (2, 2)) == "separable"
    assert ppt_check(DensityMatrix.maximally_mixed(9), (3, 3)) == "inconclusive"
    with pytest.raises(DimensionMismatchError):
        ppt_check(werner(0.5), (2, 3))


def test_ppt_agrees_with_oracle_on_werner_line():
    for v in (0.1, 0.3, 0.5, 0.9):
        sep = ppt_check(werner(v), (2, 2)) == "separable"
        ub = etr_upper_bound(werner(v), (2, 2), restarts=2).upper_bound
        assert (ub <= 1e-4) == sep


def test_verify_examples():
    bell = etr_upper_bound(max_entangled(2), (2, 2), restarts=3)
    assert verify(max_entangled(2), 0.5, result=bell).passed
    assert not verify(max_entangled(2), 0.9, result=bell).passed
    rep = verify(werner(1.0), 0.25, dims=(2, 2), restarts=2)
    assert rep.passed and rep.to_dict()["status"] == "pass"
    assert rep.margin == pytest.approx(0.25, abs=5e-3)
