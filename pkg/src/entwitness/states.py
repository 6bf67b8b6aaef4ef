"""State and witness fixtures: maximally entangled, Werner, noisy W and GHZ families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DensityMatrix, HermitianOperator, ket
from .witness import Witness

__all__ = [
    "FAMILIES",
    "StateFamily",
    "max_entangled_ket",
    "max_entangled",
    "fidelity_witness",
    "singlet_ket",
    "werner",
    "werner_witness",
    "w_ket",
    "noisy_w",
    "w_depth_witnesses",
    "ghz",
    "haar_ket",
    "random_state",
]

FAMILIES = ("max-entangled", "werner", "noisy-w", "ghz")


def max_entangled_ket(d: int) -> np.ndarray:
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1 / np.sqrt(d)
    return v


def max_entangled(d: int) -> DensityMatrix:
    """|phi><phi| with |phi> = sum_i |ii> / sqrt(d)."""
    return DensityMatrix.from_ket(max_entangled_ket(d))


def fidelity_witness(d: int) -> Witness:
    """I/d - |phi><phi|; eigenvalues 1/d (multiplicity d^2 - 1) and 1/d - 1."""
    phi = max_entangled_ket(d)
    op = HermitianOperator(np.eye(d * d) / d - np.outer(phi, phi.conj()))
    return Witness(op, 1.0 / d, 1.0 / d - 1.0)


def singlet_ket() -> np.ndarray:
    return (ket("01") - ket("10")) / np.sqrt(2)


def _check_v(v: float):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {v}")


def werner(v: float) -> DensityMatrix:
    """(1 - v) I/4 + v |phi-><phi-| with |phi-> = (|01> - |10>)/sqrt 2. Entangled iff v > 1/3."""
    _check_v(v)
    s = singlet_ket()
    return DensityMatrix((1 - v) * np.eye(4) / 4 + v * np.outer(s, s.conj()))


def werner_witness() -> Witness:
    s = singlet_ket()
    op = HermitianOperator(np.eye(4) / 2 - np.outer(s, s.conj()))
    return Witness(op, 0.5, -0.5)


def w_ket() -> np.ndarray:
    return (ket("100") + ket("010") + ket("001")) / np.sqrt(3)


def noisy_w(v: float, convention: str = "printed") -> DensityMatrix:
    """Noisy tripartite W state.

    ``convention="printed"`` gives ``v I/8 + (1 - v)|W><W|`` (``v`` is the
    noise weight); ``"inverted"`` gives ``(1 - v) I/8 + v |W><W|``.
    """
    _check_v(v)
    psi = w_ket()
    proj = np.outer(psi, psi.conj())
    if convention == "printed":
        m = v * np.eye(8) / 8 + (1 - v) * proj
    elif convention == "inverted":
        m = (1 - v) * np.eye(8) / 8 + v * proj
    else:
        raise ValueError(f"unknown mixing convention {convention!r}")
    return DensityMatrix(m)


def w_depth_witnesses() -> tuple[Witness, Witness]:
    """Depth witnesses ``4/9 I - |W><W|`` (1-producible) and ``2/3 I - |W><W|`` (2-producible)."""
    psi = w_ket()
    proj = np.outer(psi, psi.conj())
    p1 = Witness(HermitianOperator(4 / 9 * np.eye(8) - proj), 4 / 9, 4 / 9 - 1)
    p2 = Witness(HermitianOperator(2 / 3 * np.eye(8) - proj), 2 / 3, 2 / 3 - 1)
    return p1, p2


def ghz(n: int) -> DensityMatrix:
    """(|0...0> + |1...1>)/sqrt 2 for 2 <= n <= 10 qubits."""
    if not 2 <= n <= 10:
        raise ValueError(f"GHZ party count must be in [2, 10], got {n}")
    return DensityMatrix.from_ket(ghz_ket(n))


def haar_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Mixed state obtained by tracing out a Haar-random purification of size ``rank``."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(m)


@dataclass(frozen=True)
class StateFamily:
    """A named family plus its parameters, e.g. ``StateFamily("werner", {"v": 0.8})``."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")

    def generate(self) -> DensityMatrix:
        p = self.params
        if self.family == "max-entangled":
            return max_entangled(int(p.get("d", 2)))
        if self.family == "werner":
            return werner(float(p["v"]))
        if self.family == "noisy-w":
            return noisy_w(float(p["v"]), p.get("convention", "printed"))
        return ghz(int(p.get("n", 3)))

    def witness(self) -> Witness:
        """The witness this package pairs with the family."""
        p = self.params
        if self.family == "max-entangled":
            return fidelity_witness(int(p.get("d", 2)))
        if self.family == "werner":
            return werner_witness()
        if self.family == "noisy-w":
            level = int(p.get("k", 1))
            return w_depth_witnesses()[level - 1]
        n = int(p.get("n", 3))
        return fidelity_witness_for_ket(ghz_ket(n))


def ghz_ket(n: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


def fidelity_witness_for_ket(psi: np.ndarray, threshold: float = 0.5) -> Witness:
    """``threshold * I - |psi><psi|``; with 1/2 this is the standard GHZ fidelity witness."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    op = HermitianOperator(threshold * np.eye(psi.size) - np.outer(psi, psi.conj()))
    return Witness(op, threshold, threshold - 1)
