"""Numerical tolerances shared by every module.

All thresholds live in one frozen record. The active record is held in a
context variable so a caller (e.g. the CLI ``--tol-profile`` flag) can swap
profiles for a block of code without touching global state::

    with using("strict"):
        report = bound_table(-0.5)
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12  # max |A - A^dagger| accepted before symmetrizing
    psd: float = 1e-10  # smallest eigenvalue allowed for PSD objects
    trace: float = 1e-12  # |Tr(rho) - 1|
    imag_residue: float = 1e-10  # imaginary part discarded from expectation values
    spectrum: float = 1e-9  # eigen-reconstruction and unitarity checks
    eig_offdiag: float = 1e-12  # convergence target of the eigensolver
    eig_max_sweeps: int = 100
    max_dim: int = 4096  # cap on tensor-product dimension
    negative_entry: float = 1e-12  # w_{a,b} in (-tol, 0) counts as zero
    decomposition_residual: float = 1e-8
    povm: float = 1e-10
    probability: float = 1e-12
    normalization: float = 1e-10  # sum of a probability table
    weights: float = 1e-12  # separable-ansatz weight sum
    verify_margin: float = 1e-6  # slack allowed by oracle.verify
    enumeration_cap: int = 10_000_000


PROFILES = {
    "default": Tolerances(),
    "strict": replace(
        Tolerances(),
        hermitian=1e-14,
        psd=1e-12,
        trace=1e-14,
        imag_residue=1e-12,
        spectrum=1e-11,
        negative_entry=1e-14,
        decomposition_residual=1e-10,
        povm=1e-12,
        normalization=1e-12,
        verify_margin=1e-8,
    ),
}

_active: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "entwitness_tolerances", default=PROFILES["default"]
)


def current() -> Tolerances:
    """Return the tolerance record in effect for the calling context."""
    return _active.get()


@contextlib.contextmanager
def using(profile: str | Tolerances):
    """Temporarily activate a named profile or an explicit `Tolerances`."""
    tol = PROFILES[profile] if isinstance(profile, str) else profile
    token = _active.set(tol)
    try:
        yield tol
    finally:
        _active.reset(token)
