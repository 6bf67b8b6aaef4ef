"""Brute-force upper bounds on the trace-distance entanglement.

Any separable state ``sigma`` gives ``E_tr(rho) <= D_tr(rho, sigma)``, so the
search below only has to find good feasible points, not the optimum. Every
lower bound produced elsewhere in the package can be checked against it with
`verify`. Ansätze are mixtures of full product pure states across the given
party dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import optimize

from . import config
from .errors import DimensionMismatchError
from .linalg import DensityMatrix, trace_distance

__all__ = [
    "SeparableAnsatz",
    "OracleResult",
    "etr_upper_bound",
    "partial_transpose",
    "ppt_check",
    "VerificationReport",
    "verify",
]


@dataclass(frozen=True)
class SeparableAnsatz:
    """``sum_i weights[i] (x)_j |f_ij><f_ij|`` with ``factors[j]`` of shape (m, d_j)."""

    weights: np.ndarray
    factors: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        tol = config.current().weights
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty vector")
        if w.min() < -tol or abs(w.sum() - 1) > tol:
            raise ValueError("weights must be a probability vector")
        fac = tuple(np.asarray(f, dtype=complex) for f in self.factors)
        for f in fac:
            if f.ndim != 2 or f.shape[0] != w.size:
                raise ValueError("each factor array must have shape (m, d_j)")
            if np.max(np.abs(np.linalg.norm(f, axis=1) - 1)) > 1e-9:
                raise ValueError("product factors must be normalized")
        object.__setattr__(self, "weights", np.clip(w, 0, None))
        object.__setattr__(self, "factors", fac)

    @property
    def m(self) -> int:
        return self.weights.size

    @property
    def dims(self) -> tuple:
        return tuple(f.shape[1] for f in self.factors)

    def matrix(self) -> np.ndarray:
        return _mixture(self.weights, self.factors)

    def density(self) -> DensityMatrix:
        m = self.matrix()
        return DensityMatrix(m / np.trace(m).real)

    def padded(self, m: int) -> "SeparableAnsatz":
        """Same state written with ``m`` terms (extra terms carry zero weight)."""
        if m < self.m:
            raise ValueError("cannot shrink an ansatz")
        extra = m - self.m
        w = np.concatenate([self.weights, np.zeros(extra)])
        fac = tuple(np.vstack([f, np.tile(f[:1], (extra, 1))]) for f in self.factors)
        return SeparableAnsatz(w, fac)


def _products(factors) -> np.ndarray:
    """Rows are the product vectors (x)_j f_ij."""
    return reduce(lambda x, y: np.einsum("mi,mj->mij", x, y).reshape(x.shape[0], -1), factors)


def _mixture(weights, factors) -> np.ndarray:
    psi = _products(factors)
    return np.einsum("m,mi,mj->ij", weights, psi, psi.conj())


class _Problem:
    """Objective ``f(theta)`` over (softmax weights, unnormalized complex factors)."""

    def __init__(self, rho: np.ndarray, dims: tuple, m: int):
        self.rho = rho
        self.dims = dims
        self.m = m
        self.n = len(dims)
        self.sizes = [m] + [2 * m * d for d in dims]
        self.best_val = math.inf
        self.best_theta = None

    def unpack(self, theta):
        z = theta[: self.m]
        w = np.exp(z - z.max())
        w /= w.sum()
        xs, pos = [], self.m
        for d in self.dims:
            chunk = theta[pos : pos + 2 * self.m * d].reshape(2, self.m, d)
            xs.append(chunk[0] + 1j * chunk[1])
            pos += 2 * self.m * d
        return w, xs

    def pack(self, weights, factors):
        z = np.log(np.clip(weights, 1e-300, None))
        parts = [z]
        for f in factors:
            parts.append(np.stack([f.real, f.imag]).ravel())
        return np.concatenate(parts)

    def ansatz(self, theta) -> SeparableAnsatz:
        w, xs = self.unpack(theta)
        return SeparableAnsatz(w, tuple(x / np.linalg.norm(x, axis=1, keepdims=True) for x in xs))

    def _effective(self, g, facs, j):
        """``M[i]`` (d_j x d_j) with ``psi_i^dag g psi_i = a_ij^dag M[i] a_ij``."""
        n = self.n
        rows, cols, batch = list(range(n)), list(range(n, 2 * n)), 2 * n
        g_t = g.reshape(self.dims + self.dims)
        operands = [g_t, rows + cols]
        for l in range(n):
            if l != j:
                operands += [facs[l].conj(), [batch, rows[l]], facs[l], [batch, cols[l]]]
        return np.einsum(*operands, [batch, rows[j], cols[j]], optimize=True)

    def value_and_grad(self, theta, smooth: bool):
        w, xs = self.unpack(theta)
        norms = [np.linalg.norm(x, axis=1, keepdims=True) for x in xs]
        facs = [x / nrm for x, nrm in zip(xs, norms)]
        diff = _mixture(w, facs) - self.rho
        if smooth:
            val = float(np.sum(np.abs(diff) ** 2))
            g = 2 * diff
        else:
            ev, vec = np.linalg.eigh(diff)
            val = 0.5 * float(np.sum(np.abs(ev)))
            g = 0.5 * (vec * np.sign(ev)) @ vec.conj().T
            if val < self.best_val:
                self.best_val, self.best_theta = val, theta.copy()
        psi = _products(facs)
        gp = np.real(np.einsum("mi,ij,mj->m", psi.conj(), g, psi))
        grad = [w * (gp - np.dot(w, gp))]
        for j, (x, nrm) in enumerate(zip(xs, norms)):
            eff = self._effective(g, facs, j) * w[:, None, None]
            a = facs[j]
            ka = np.einsum("mij,mj->mi", eff, a)
            rq = np.real(np.einsum("mi,mi->m", a.conj(), ka))[:, None]
            gx = 2 * (ka - rq * a) / nrm
            grad.append(np.stack([gx.real, gx.imag]).ravel())
        return val, np.concatenate(grad)


def _random_theta(problem: _Problem, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(problem.m) * 0.1
    parts = [z]
    for d in problem.dims:
        parts.append(rng.standard_normal(2 * problem.m * d))
    return np.concatenate(parts)


def _diagonal_start(problem: _Problem, rho: np.ndarray) -> np.ndarray:
    """Computational-basis product states weighted by the diagonal of rho."""
    dims = problem.dims
    diag = np.clip(np.real(np.diag(rho)), 0, None)
    order = np.argsort(-diag, kind="stable")[: problem.m]
    w = np.full(problem.m, 1e-6)
    w[: order.size] += diag[order]
    w /= w.sum()
    factors = []
    for j, d in enumerate(dims):
        f = np.full((problem.m, d), 1e-3, dtype=complex)
        for i, idx in enumerate(order):
            digit = np.unravel_index(idx, dims)[j]
            f[i, digit] = 1.0
        factors.append(f / np.linalg.norm(f, axis=1, keepdims=True))
    return problem.pack(w, factors)


def _refine(problem: _Problem, theta0: np.ndarray, max_steps: int, tol: float) -> None:
    opts = {"maxiter": max_steps, "ftol": tol * 1e-3, "gtol": 1e-12}
    res = optimize.minimize(
        problem.value_and_grad, theta0, args=(True,), jac=True, method="L-BFGS-B", options=opts
    )
    theta = res.x
    prev = math.inf
    for _ in range(5):
        res = optimize.minimize(
            problem.value_and_grad, theta, args=(False,), jac=True, method="L-BFGS-B", options=opts
        )
        theta = problem.best_theta
        if prev - problem.best_val <= tol:
            break
        prev = problem.best_val


@dataclass(frozen=True)
class OracleResult:
    upper_bound: float
    ansatz: SeparableAnsatz
    dims: tuple
    m: int
    restarts: int
    seed: int
    per_start: tuple = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {
            "upper_bound": self.upper_bound,
            "dims": list(self.dims),
            "m": self.m,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _split_dims(rho: DensityMatrix, dims) -> tuple:
    if dims is None:
        d = int(round(math.sqrt(rho.dim)))
        dims = (d, d)
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != rho.dim:
        raise DimensionMismatchError(f"party dims {dims} do not multiply to {rho.dim}")
    return dims


def etr_upper_bound(
    rho: DensityMatrix,
    dims=None,
    m: int | None = None,
    restarts: int = 10,
    seed: int = 0,
    initial=(),
    max_steps: int = 2000,
    tol: float = 1e-9,
) -> OracleResult:
    """Smallest trace distance from ``rho`` to a product-state mixture found by local search.

    Starts: every ansatz in ``initial`` (padded to ``m`` terms), a
    diagonal-basis guess, then ``restarts`` random points drawn from
    ``SeedSequence(seed)``. Each start is polished on the Hilbert-Schmidt
    distance and then on the trace distance with L-BFGS. Since every
    evaluated point is feasible the result is a valid upper bound, and adding
    restarts or seeding with a previous ansatz never makes it worse.
    """
    dims = _split_dims(rho, dims)
    if m is None:
        m = math.prod(dims)  # d^2 for a d x d system
    r = np.asarray(rho.matrix)
    problem = _Problem(r, dims, m)

    starts = []
    for a in initial:
        starts.append(problem.pack(a.padded(m).weights, a.padded(m).factors))
    starts.append(_diagonal_start(problem, r))
    for ss in np.random.SeedSequence(seed).spawn(restarts):
        starts.append(_random_theta(problem, np.random.default_rng(ss)))

    per_start = []
    best_val, best_theta = math.inf, None
    for theta0 in starts:
        problem.best_val, problem.best_theta = math.inf, None
        problem.value_and_grad(theta0, False)  # the start itself is feasible
        _refine(problem, theta0, max_steps, tol)
        per_start.append(problem.best_val)
        if problem.best_val < best_val:
            best_val, best_theta = problem.best_val, problem.best_theta
    ansatz = problem.ansatz(best_theta)
    upper = trace_distance(rho, ansatz.density())
    return OracleResult(upper, ansatz, dims, m, restarts, seed, tuple(per_start))


def partial_transpose(rho, dims: tuple[int, int]) -> np.ndarray:
    """Transpose of the second factor."""
    d_a, d_b = dims
    r = np.asarray(rho, dtype=complex)
    if d_a * d_b != r.shape[0]:
        raise DimensionMismatchError(f"dims {dims} do not multiply to {r.shape[0]}")
    return r.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1).reshape(r.shape)


def ppt_check(rho: DensityMatrix, dims: tuple[int, int]) -> str:
    """'separable', 'entangled' or 'inconclusive' from the partial-transpose spectrum.

    PPT is only decisive for 2x2 and 2x3 (either order); larger PPT states
    are reported as inconclusive.
    """
    pt = partial_transpose(rho, dims)
    lo = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    if lo < -config.current().psd:
        return "entangled"
    if sorted(dims) in ([2, 2], [2, 3]) or min(dims) == 1:
        return "separable"
    return "inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    lower_bound: float
    upper_bound: float
    margin: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "status": "pass" if self.passed else "fail",
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "margin": self.margin,
            "seed": self.seed,
        }


def verify(rho: DensityMatrix, lower_bound: float, **oracle_kwargs) -> VerificationReport:
    """Pass iff ``lower_bound <= oracle upper bound + slack``."""
    res = oracle_kwargs.pop("result", None) or etr_upper_bound(rho, **oracle_kwargs)
    margin = res.upper_bound - lower_bound
    passed = lower_bound <= res.upper_bound + config.current().verify_margin
    return VerificationReport(passed, float(lower_bound), res.upper_bound, margin, res.seed)
