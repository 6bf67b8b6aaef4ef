"""Dense Hermitian linear algebra: operators, states, spectra and trace norms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from numbers import Real

import numpy as np

from . import config
from .errors import (
    ConsistencyError,
    DimensionCapError,
    DimensionMismatchError,
    EigenDecompositionError,
    InvalidStateError,
    NotHermitianError,
)

__all__ = [
    "HermitianOperator",
    "DensityMatrix",
    "Spectrum",
    "eigendecompose",
    "tensor",
    "trace_norm",
    "trace_distance",
    "expectation",
    "ket",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class HermitianOperator:
    """Square complex matrix equal to its own conjugate transpose.

    Input whose anti-Hermitian residue is within ``config.current().hermitian``
    is symmetrized as ``(A + A^dagger) / 2``; anything worse is rejected.
    Instances are immutable.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        if isinstance(matrix, HermitianOperator):
            self._m = matrix._m
            return
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise NotHermitianError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NotHermitianError("matrix has non-finite entries")
        residue = float(np.max(np.abs(m - m.conj().T)))
        tol = config.current().hermitian
        if residue > tol:
            raise NotHermitianError(
                f"anti-Hermitian residue {residue:.3e} exceeds tolerance {tol:.1e}"
            )
        self._m = _frozen((m + m.conj().T) / 2)

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim))

    @classmethod
    def projector(cls, vector) -> "HermitianOperator":
        """|v><v| for a (not necessarily normalized) vector; the vector is normalized first."""
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"

    def transpose(self) -> "HermitianOperator":
        return HermitianOperator(self._m.T)

    T = property(transpose)

    def trace(self) -> float:
        return float(np.trace(self._m).real)

    def anti_hermitian_residue(self) -> float:
        return float(np.max(np.abs(self._m - self._m.conj().T)))

    def allclose(self, other, atol: float = 1e-10) -> bool:
        o = np.asarray(other, dtype=complex)
        return o.shape == self._m.shape and bool(np.allclose(self._m, o, rtol=0, atol=atol))

    def _check_same_dim(self, other: "HermitianOperator"):
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            self._check_same_dim(other)
            return HermitianOperator(self._m + other._m)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianOperator):
            self._check_same_dim(other)
            return HermitianOperator(self._m - other._m)
        return NotImplemented

    def __neg__(self):
        return HermitianOperator(-self._m)

    def __mul__(self, scalar):
        # only real scalars keep the operator Hermitian
        if isinstance(scalar, Real) or (np.isscalar(scalar) and np.isrealobj(scalar)):
            return HermitianOperator(float(scalar) * self._m)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Real) or (np.isscalar(scalar) and np.isrealobj(scalar)):
            return HermitianOperator(self._m / float(scalar))
        return NotImplemented

    def to_dict(self) -> dict:
        """Serialize as ``{"dim": n, "entries": [[re, im], ...]}`` in row-major order."""
        flat = self._m.ravel()
        return {"dim": self.dim, "entries": [[float(z.real), float(z.imag)] for z in flat]}

    @classmethod
    def from_dict(cls, obj: dict) -> "HermitianOperator":
        return cls(_matrix_from_dict(obj))


def _matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        dim = obj["dim"]
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix object needs 'dim' and 'entries' keys") from exc
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f"'dim' must be a positive integer, got {dim!r}")
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (dim * dim, 2):
        raise ValueError(f"'entries' must hold {dim * dim} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


class DensityMatrix(HermitianOperator):
    """Positive semidefinite, unit-trace Hermitian operator."""

    __slots__ = ()

    def __init__(self, matrix):
        super().__init__(matrix)
        tol = config.current()
        tr = np.trace(self._m).real
        if abs(tr - 1.0) > tol.trace:
            raise InvalidStateError(f"trace {tr!r} differs from 1 by more than {tol.trace:.1e}")
        lo = float(np.linalg.eigvalsh(self._m)[0])
        if lo < -tol.psd:
            raise InvalidStateError(f"state has negative eigenvalue {lo:.3e}")

    @classmethod
    def from_ket(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self._m, self._m).real)

    def to_dict(self) -> dict:
        return {"state": super().to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "DensityMatrix":
        if "state" not in obj:
            raise ValueError("density-matrix object needs a 'state' key")
        return cls(_matrix_from_dict(obj["state"]))


def ket(bits: str, dim: int = 2) -> np.ndarray:
    """Computational-basis vector, e.g. ``ket("010")``."""
    idx = 0
    for ch in bits:
        idx = idx * dim + int(ch)
    v = np.zeros(dim ** len(bits), dtype=complex)
    v[idx] = 1.0
    return v


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _tie_order(w: np.ndarray, v: np.ndarray, tol: float) -> np.ndarray:
    """Within runs of (numerically) equal eigenvalues, order by each vector's dominant basis index."""
    order = np.arange(w.size)
    start = 0
    for i in range(1, w.size + 1):
        if i == w.size or w[start] - w[i] > tol:
            if i - start > 1:
                lead = np.argmax(np.abs(v[:, start:i]) > np.abs(v[:, start:i]).max(axis=0) - 1e-12, axis=0)
                order[start:i] = start + np.argsort(lead, kind="stable")
            start = i
    return order


def eigendecompose(a: HermitianOperator) -> Spectrum:
    """Hermitian eigendecomposition, eigenvalues in descending order.

    Degenerate eigenvalues are ordered by the first basis index on which
    their eigenvector has its largest weight, so the output is deterministic. Raises `EigenDecompositionError` when the
    solver fails or the result does not reconstruct ``a``.
    """
    a = HermitianOperator(a)
    m = a.matrix
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(
            f"eigensolver did not converge for a matrix of dimension {a.dim}"
        ) from exc
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    order = _tie_order(w, v, config.current().spectrum)
    w, v = w[order], v[:, order]
    w.setflags(write=False)
    v.setflags(write=False)
    spec = Spectrum(w, v)
    tol = config.current().spectrum
    scale = max(1.0, float(np.max(np.abs(m))))
    err = float(np.max(np.abs(spec.reconstruct() - m)))
    if err > tol * scale:
        raise EigenDecompositionError(
            f"reconstruction error {err:.3e} for a matrix of dimension {a.dim}"
        )
    return spec


def tensor(*ops: HermitianOperator, max_dim: int | None = None) -> HermitianOperator:
    """Kronecker product of one or more operators, left to right."""
    if not ops:
        raise ValueError("tensor needs at least one operator")
    cap = config.current().max_dim if max_dim is None else max_dim
    dim = 1
    for op in ops:
        dim *= op.dim
    if dim > cap:
        raise DimensionCapError(f"product dimension {dim} exceeds cap {cap}")
    return HermitianOperator(reduce(np.kron, (op.matrix for op in ops)))


def trace_norm(a: HermitianOperator) -> float:
    """Tr|A|, the sum of absolute eigenvalues of a Hermitian operator."""
    return float(np.sum(np.abs(eigendecompose(a).eigenvalues)))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of ``rho - sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dimensions differ: {rho.dim} vs {sigma.dim}")
    d = 0.5 * trace_norm(HermitianOperator(rho.matrix - sigma.matrix))
    return min(max(d, 0.0), 1.0)


def expectation(a: HermitianOperator, rho: HermitianOperator) -> float:
    """Tr(rho A). Raises `ConsistencyError` if the imaginary residue is not negligible."""
    if a.dim != rho.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {rho.dim}")
    val = np.einsum("ij,ji->", np.asarray(rho, dtype=complex), np.asarray(a, dtype=complex))
    tol = config.current().imag_residue
    if abs(val.imag) > tol:
        raise ConsistencyError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)
