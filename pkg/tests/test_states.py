import numpy as np
import pytest

from entwitness.linalg import DensityMatrix, expectation
from entwitness.states import (
    StateFamily,
    fidelity_witness,
    ghz,
    max_entangled,
    noisy_w,
    singlet_ket,
    w_depth_witnesses,
    werner,
    werner_witness,
)
from entwitness.witness import normalize, trace_bound


def test_max_entangled_is_pure():
    rho = max_entangled(2)
    assert rho.purity() == pytest.approx(1.0)
    assert np.linalg.matrix_rank(rho.matrix) == 1


def test_fidelity_witness_spectrum_d3():
    ev = np.sort(np.linalg.eigvalsh(fidelity_witness(3).op.matrix))
    assert ev[0] == pytest.approx(-2 / 3, abs=1e-12)
    assert np.allclose(ev[1:], 1 / 3, atol=1e-12) and ev[1:].size == 8


def test_fidelity_witness_value_d2():
    assert expectation(fidelity_witness(2).op, max_entangled(2)) == pytest.approx(-0.5)


def test_werner_endpoints():
    assert werner(0).allclose(np.eye(4) / 4)
    s = singlet_ket()
    assert werner(1).allclose(np.outer(s, s.conj()))
    with pytest.raises(ValueError):
        werner(1.2)


def test_werner_boundary_and_grid():
    w = werner_witness().op
    assert expectation(w, werner(1 / 3)) == pytest.approx(0, abs=1e-15)
    for v in np.linspace(0, 1, 11):
        assert expectation(w, werner(v)) == pytest.approx((1 - 3 * v) / 4, abs=1e-12)


def test_w_depth_witness_spreads():
    for w in w_depth_witnesses():
        assert w.spread == pytest.approx(1.0, abs=1e-12)


def test_noisy_w_conventions():
    p1, _ = w_depth_witnesses()
    for v in (0.0, 0.3, 1.0):
        # direct evaluation: 4/9 - 1 + 7v/8 under the printed convention
        assert expectation(p1.op, noisy_w(v)) == pytest.approx(4 / 9 - 1 + 7 * v / 8, abs=1e-12)
        assert expectation(p1.op, noisy_w(v, "inverted")) == pytest.approx(
            4 / 9 - 1 / 8 - 7 * v / 8, abs=1e-12
        )
    with pytest.raises(ValueError):
        noisy_w(0.5, "sideways")


def test_noisy_w_fully_mixed_gives_no_bound():
    p1, _ = w_depth_witnesses()
    assert trace_bound(normalize(p1), noisy_w(1.0)) == 0.0


def test_ghz():
    rho2 = ghz(2)
    # (|00> + |11>)/sqrt2 is the d=2 maximally entangled state
    assert rho2.allclose(max_entangled(2).matrix)
    assert ghz(3).purity() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ghz(11)


@pytest.mark.parametrize(
    "family, params",
    [
        ("max-entangled", {"d": 3}),
        ("werner", {"v": 0.25}),
        ("noisy-w", {"v": 0.4}),
        ("noisy-w", {"v": 0.4, "convention": "inverted"}),
        ("ghz", {"n": 4}),
    ],
)
def test_state_family_generates_valid_states(family, params):
    fam = StateFamily(family, params)
    rho = fam.generate()
    assert isinstance(rho, DensityMatrix)
    assert fam.witness().dim == rho.dim


def test_unknown_family():
    with pytest.raises(ValueError):
        StateFamily("cluster")
