"""Measurement-device-independent witnesses.

Alice and Bob each hold one half of ``rho`` and prepare trusted ancillas
``tau_s`` / ``omega_t``. Untrusted joint measurements ``{A_a}`` on
(ancilla-A, A) and ``{B_b}`` on (B, ancilla-B) produce ``p(a,b|s,t)``. With
the witness written as ``W = sum alpha_st tau_s^T (x) omega_t^T`` the
outcome-wise values ``w_ab = sum alpha_st p(a,b|s,t)`` are combined into the
nonlinear value ``I'`` (sum of the negative ``w_ab``), and
``E_tr >= -I' / Tr|W^T|``.

Tensor-factor order is fixed as (ancilla-A, rho_A, rho_B, ancilla-B).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import ConsistencyError, DecompositionError, DimensionMismatchError
from .linalg import DensityMatrix, HermitianOperator, ket, trace_norm

__all__ = [
    "BELL_LABELS",
    "PovmMeasurement",
    "CorrelationTable",
    "MdiDecomposition",
    "tetrahedron_states",
    "bell_measurement",
    "decompose_witness",
    "simulate",
    "outcome_values",
    "mdi_value",
    "mdi_trace_bound",
]

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# phi± = (|01> ± |10>)/sqrt2 and psi± = (|00> ± |11>)/sqrt2
_BELL_KETS = {
    "phi-": (ket("01") - ket("10")) / np.sqrt(2),
    "phi+": (ket("01") + ket("10")) / np.sqrt(2),
    "psi-": (ket("00") - ket("11")) / np.sqrt(2),
    "psi+": (ket("00") + ket("11")) / np.sqrt(2),
}
BELL_LABELS = ("phi-", "phi+", "psi-", "psi+")


@dataclass(frozen=True)
class PovmMeasurement:
    effects: tuple

    def __post_init__(self):
        effects = tuple(HermitianOperator(e) for e in self.effects)
        if not effects:
            raise ValueError("a measurement needs at least one effect")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise DimensionMismatchError("effects have different dimensions")
        tol = config.current().povm
        for i, e in enumerate(effects):
            lo = float(np.linalg.eigvalsh(e.matrix)[0])
            if lo < -tol:
                raise ValueError(f"effect {i} is not positive semidefinite (min eigenvalue {lo:.3e})")
        total = sum(e.matrix for e in effects)
        err = float(np.max(np.abs(total - np.eye(dim))))
        if err > tol:
            raise ValueError(f"effects do not sum to the identity (error {err:.3e})")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __len__(self):
        return len(self.effects)

    def stacked(self) -> np.ndarray:
        return np.stack([e.matrix for e in self.effects])

    def relabel(self, order) -> "PovmMeasurement":
        return PovmMeasurement(tuple(self.effects[i] for i in order))

    def to_list(self) -> list:
        return [e.to_dict() for e in self.effects]


def bell_measurement(order=BELL_LABELS) -> PovmMeasurement:
    """Two-qubit Bell-state measurement; outcome ``i`` projects onto ``order[i]``."""
    return PovmMeasurement(tuple(HermitianOperator.projector(_BELL_KETS[k]) for k in order))


def tetrahedron_states() -> list[DensityMatrix]:
    """Four qubit states whose Bloch vectors form a regular tetrahedron."""
    vecs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    return [DensityMatrix((np.eye(2) + x * _SX + y * _SY + z * _SZ) / 2) for x, y, z in vecs]


@dataclass(frozen=True)
class MdiDecomposition:
    """Real coefficients with ``W = sum_st alpha[s, t] tau_s^T (x) omega_t^T``."""

    coefficients: np.ndarray
    tau: tuple
    omega: tuple
    witness: HermitianOperator
    residual: float

    def reconstruct(self) -> np.ndarray:
        return np.einsum(
            "st,sij,tkl->ikjl",
            self.coefficients,
            np.stack([t.matrix.T for t in self.tau]),
            np.stack([o.matrix.T for o in self.omega]),
        ).reshape(self.witness.dim, self.witness.dim)


def decompose_witness(w: HermitianOperator, basis_tau, basis_omega) -> MdiDecomposition:
    """Least-squares coefficients expressing ``w`` in the product basis of transposed ancillas.

    Raises `DecompositionError` when the ancillas do not span ``w`` (max-entry
    residual above the configured tolerance).
    """
    w = HermitianOperator(w)
    tau = tuple(DensityMatrix(t) for t in basis_tau)
    omega = tuple(DensityMatrix(o) for o in basis_omega)
    d_tau, d_omega = tau[0].dim, omega[0].dim
    if d_tau * d_omega != w.dim:
        raise DimensionMismatchError(
            f"ancilla dims {d_tau} x {d_omega} do not match witness dim {w.dim}"
        )
    cols = [np.kron(t.matrix.T, o.matrix.T).ravel() for t in tau for o in omega]
    m = np.array(cols).T
    a = np.vstack([m.real, m.imag])
    y = np.concatenate([w.matrix.ravel().real, w.matrix.ravel().imag])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    residual = float(np.max(np.abs(m @ coef - w.matrix.ravel())))
    if residual > config.current().decomposition_residual:
        raise DecompositionError(
            f"ancilla basis does not span the witness: residual {residual:.3e}"
        )
    coef = coef.reshape(len(tau), len(omega))
    coef.setflags(write=False)
    return MdiDecomposition(coef, tau, omega, w, residual)


@dataclass(frozen=True)
class CorrelationTable:
    """``p[a, b, s, t] = p(a, b | s, t)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 4:
            raise ValueError(f"correlation table must be 4-index, got shape {p.shape}")
        tol = config.current()
        if p.min() < -tol.probability or p.max() > 1 + tol.probability:
            raise ValueError("probabilities outside [0, 1]")
        sums = p.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1)) > tol.normalization:
            raise ValueError("p(a,b|s,t) does not sum to 1 for every (s, t)")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def shape(self):
        return self.p.shape


def simulate(
    rho: DensityMatrix,
    a: PovmMeasurement,
    b: PovmMeasurement,
    dec: MdiDecomposition,
    dims: tuple[int, int] | None = None,
) -> CorrelationTable:
    """Born-rule statistics ``Tr[(A_a (x) B_b)(tau_s (x) rho (x) omega_t)]``."""
    d_tau, d_omega = dec.tau[0].dim, dec.omega[0].dim
    if dims is None:
        d = int(round(np.sqrt(rho.dim)))
        dims = (d, d)
    d_a, d_b = dims
    if d_a * d_b != rho.dim:
        raise DimensionMismatchError(f"dims {dims} do not multiply to state dim {rho.dim}")
    if a.dim != d_tau * d_a or b.dim != d_b * d_omega:
        raise DimensionMismatchError(
            f"measurement dims ({a.dim}, {b.dim}) vs expected ({d_tau * d_a}, {d_b * d_omega})"
        )
    ea, eb = a.stacked(), b.stacked()
    taus = np.stack([t.matrix for t in dec.tau])
    omegas = np.stack([o.matrix for o in dec.omega])
    r = rho.matrix.reshape(d_a, d_b, d_a, d_b)
    # joint[s, t] over (tau, A, B, omega) x (tau, A, B, omega)
    joint = np.einsum("sij,aKbL,tkl->stiaKkjbLl", taus, r, omegas, optimize=True)
    n_left, n_right = d_tau * d_a, d_b * d_omega
    joint = joint.reshape(len(taus), len(omegas), n_left, n_right, n_left, n_right)
    p = np.einsum("xik,yjl,stklij->xyst", ea, eb, joint, optimize=True)
    if np.max(np.abs(p.imag)) > config.current().imag_residue:
        raise ConsistencyError("probabilities came out complex")
    return CorrelationTable(np.clip(p.real, 0.0, 1.0))


def outcome_values(dec: MdiDecomposition, table: CorrelationTable) -> np.ndarray:
    """``w[a, b] = sum_st alpha[s, t] p(a, b | s, t)``."""
    if table.shape[2:] != dec.coefficients.shape:
        raise DimensionMismatchError(
            f"table inputs {table.shape[2:]} vs coefficient shape {dec.coefficients.shape}"
        )
    return np.einsum("st,abst->ab", dec.coefficients, table.p)


def mdi_value(w_table) -> float:
    """Sum of the strictly negative entries; entries within tolerance of zero are ignored."""
    w = np.asarray(w_table, dtype=float)
    neg = w[w < -config.current().negative_entry]
    return float(neg.sum()) if neg.size else 0.0


def mdi_trace_bound(i_prime: float, w: HermitianOperator) -> float:
    """``max(0, -I' / Tr|W^T|)``."""
    w = HermitianOperator(w)
    norm_t = trace_norm(w.transpose())
    norm = trace_norm(w)
    if abs(norm_t - norm) > config.current().spectrum * max(1.0, norm):
        raise ConsistencyError(f"Tr|W^T| = {norm_t} differs from Tr|W| = {norm}")
    if norm_t == 0:
        raise ValueError("witness is zero")
    return max(0.0, -i_prime / norm_t)
