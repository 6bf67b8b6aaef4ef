"""Device-independent witnesses built from Bell expressions.

A `BellExpression` stores coefficients ``c[a, s]`` of the Bell quantity
``B = sum_{a,s} c[a,s] M_{a_1|s_1} (x) ... (x) M_{a_n|s_n}`` in probability
(projector) form. Two-outcome observables ``A = M_0 - M_1`` are converted to
this form with `observable_measurement`.

The certified bound is ``E_tr >= (<B> - beta) / (<B>_+ - <B>_-)`` where
``beta`` is the classical (or a tighter separable) bound and ``<B>_pm`` the
extreme quantum values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import config
from .errors import DimensionMismatchError, EnumerationCapError
from .linalg import HermitianOperator
from .mdi import PovmMeasurement

__all__ = [
    "BellExpression",
    "QuantumRange",
    "chsh",
    "observable_measurement",
    "classical_bound",
    "coefficient_upper_bound",
    "bell_operator",
    "quantum_range",
    "tsirelson_range",
    "di_trace_bound",
    "chsh_product_max",
    "ProductOptimum",
]


class _DenseTerms(dict):
    """Terms read off a dense array; indices are in range by construction."""

    shape: tuple = ()


@dataclass(frozen=True)
class BellExpression:
    """Sparse coefficient table over (outcome tuple, input tuple) pairs.

    JSON form: ``{"parties": n, "inputs": [...], "outputs": [...],
    "terms": [{"a": [...], "s": [...], "coeff": c}, ...]}``.
    """

    n_parties: int
    inputs: tuple
    outputs: tuple
    coefficients: dict

    def __post_init__(self):
        inputs, outputs = tuple(int(m) for m in self.inputs), tuple(int(o) for o in self.outputs)
        if self.n_parties < 1 or len(inputs) != self.n_parties or len(outputs) != self.n_parties:
            raise ValueError("inputs/outputs must list one entry per party")
        if min(inputs) < 1 or min(outputs) < 1:
            raise ValueError("every party needs at least one input and one output")
        n = self.n_parties
        if isinstance(self.coefficients, _DenseTerms) and self.coefficients.shape == outputs + inputs:
            coeffs = dict(self.coefficients)
            if not coeffs:
                raise ValueError("Bell expression has no non-zero coefficient")
            object.__setattr__(self, "inputs", inputs)
            object.__setattr__(self, "outputs", outputs)
            object.__setattr__(self, "coefficients", coeffs)
            return
        items = list(self.coefficients.items())
        try:
            idx = np.array([tuple(a) + tuple(s) for (a, s), _ in items], dtype=int)
        except ValueError:
            raise ValueError("a term has the wrong number of parties") from None
        if items and (idx.ndim != 2 or idx.shape[1] != 2 * n):
            raise ValueError("a term has the wrong number of parties")
        coeffs = {}
        if items:
            limits = np.array(outputs + inputs)
            bad = np.flatnonzero(((idx < 0) | (idx >= limits)).any(axis=1))
            if bad.size:
                raise ValueError(f"term {items[bad[0]][0]} is out of range")
            vals = np.array([c for _, c in items], dtype=float)
            for row, c in zip(idx.tolist(), vals.tolist()):
                if c != 0.0:
                    key = (tuple(row[:n]), tuple(row[n:]))
                    coeffs[key] = coeffs.get(key, 0.0) + c
        if not any(coeffs.values()):
            raise ValueError("Bell expression has no non-zero coefficient")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_dense(cls, c: np.ndarray) -> "BellExpression":
        """From an array indexed ``c[a_1, ..., a_n, s_1, ..., s_n]``."""
        c = np.asarray(c, dtype=float)
        n = c.ndim // 2
        nz = np.argwhere(c != 0)
        terms = _DenseTerms(
            ((tuple(row[:n]), tuple(row[n:])), v)
            for row, v in zip(nz.tolist(), c[tuple(nz.T)].tolist())
        )
        terms.shape = c.shape
        return cls(n, c.shape[n:], c.shape[:n], terms)

    def dense(self) -> np.ndarray:
        c = np.zeros(self.outputs + self.inputs)
        for (a, s), v in self.coefficients.items():
            c[a + s] = v
        return c

    def __neg__(self) -> "BellExpression":
        return BellExpression(
            self.n_parties, self.inputs, self.outputs, {k: -v for k, v in self.coefficients.items()}
        )

    def value(self, p) -> float:
        """Bell value of a behaviour ``p[a_1..a_n, s_1..s_n]``."""
        return float(np.sum(self.dense() * np.asarray(p)))

    def same_as(self, other: "BellExpression", atol: float = 1e-12) -> bool:
        return (
            self.inputs == other.inputs
            and self.outputs == other.outputs
            and bool(np.allclose(self.dense(), other.dense(), rtol=0, atol=atol))
        )

    def to_dict(self) -> dict:
        return {
            "parties": self.n_parties,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "terms": [
                {"a": list(a), "s": list(s), "coeff": c}
                for (a, s), c in sorted(self.coefficients.items())
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BellExpression":
        n = int(obj["parties"])
        inputs, outputs = obj["inputs"], obj["outputs"]
        if isinstance(inputs, int):
            inputs = [inputs] * n
        if isinstance(outputs, int):
            outputs = [outputs] * n
        coeffs = {}
        for t in obj["terms"]:
            key = (tuple(t["a"]), tuple(t["s"]))
            coeffs[key] = coeffs.get(key, 0.0) + float(t["coeff"])
        return cls(n, tuple(inputs), tuple(outputs), coeffs)


def chsh() -> BellExpression:
    """A0B0 + A0B1 + A1B0 - A1B1 in projector form: ``c[a, s] = (-1)^(a1 + a2 + s1 s2)``."""
    coeffs = {
        ((a1, a2), (s1, s2)): (-1.0) ** (a1 + a2 + s1 * s2)
        for a1, a2, s1, s2 in itertools.product(range(2), repeat=4)
    }
    return BellExpression(2, (2, 2), (2, 2), coeffs)


def observable_measurement(obs) -> PovmMeasurement:
    """Two-outcome measurement of a +-1 observable; outcome 0 is the +1 eigenspace."""
    a = np.asarray(obs, dtype=complex)
    eye = np.eye(a.shape[0])
    return PovmMeasurement((HermitianOperator((eye + a) / 2), HermitianOperator((eye - a) / 2)))


# ---------------------------------------------------------------------------
# classical bound
# ---------------------------------------------------------------------------


def _strategy_count(expr: BellExpression) -> int:
    return math.prod(o**m for o, m in zip(expr.outputs, expr.inputs))


def _deterministic_indicators(outputs: int, inputs: int) -> np.ndarray:
    """``D[f, a, s] = 1`` iff strategy ``f`` answers ``a`` on input ``s``."""
    funcs = np.array(list(itertools.product(range(outputs), repeat=inputs)), dtype=int)
    d = np.zeros((len(funcs), outputs, inputs))
    f_idx, s_idx = np.meshgrid(np.arange(len(funcs)), np.arange(inputs), indexing="ij")
    d[f_idx, funcs, s_idx] = 1.0
    return d


def classical_bound(expr: BellExpression) -> float:
    """Exact local-hidden-variable maximum by enumerating deterministic strategies.

    The last party is optimized input by input instead of enumerated, which
    is exact because its answers to different inputs are independent.
    """
    total = _strategy_count(expr)
    cap = config.current().enumeration_cap
    if total > cap:
        raise EnumerationCapError(
            f"{total} deterministic strategies exceed the cap {cap}; "
            "use coefficient_upper_bound() for a (looser) upper bound"
        )
    n = expr.n_parties
    t = expr.dense()  # axes: a_1..a_n, s_1..s_n
    # contract parties 1..n-1 one at a time; each adds a strategy axis at the end
    for i in range(n - 1):
        d = _deterministic_indicators(expr.outputs[i], expr.inputs[i])
        # current layout: a_i..a_n, s_i..s_n, f_1..f_{i-1}
        k = n - i  # remaining parties
        t = np.tensordot(t, d, axes=([0, k], [1, 2]))
        # tensordot appends f_i after the existing axes
    # t now has axes a_n, s_n, f_1..f_{n-1}
    best_last = t.max(axis=0).sum(axis=0)
    return float(np.max(best_last))


def coefficient_upper_bound(expr: BellExpression) -> float:
    """``sum_s max_a c[a, s]``; bounds every behaviour, classical or not."""
    c = expr.dense()
    return float(c.reshape(-1, *expr.inputs).max(axis=0).sum())


# ---------------------------------------------------------------------------
# Bell operator and see-saw
# ---------------------------------------------------------------------------


def _effects_array(measurements_for_party, outputs: int) -> np.ndarray:
    """Stack a party's measurements into ``E[a, s, i, j]``."""
    mats = []
    for meas in measurements_for_party:
        if not isinstance(meas, PovmMeasurement):
            meas = PovmMeasurement(tuple(meas))
        if len(meas) != outputs:
            raise DimensionMismatchError(
                f"measurement has {len(meas)} outcomes, expression declares {outputs}"
            )
        mats.append(meas.stacked())
    return np.stack(mats, axis=1)


def _bell_operator_array(c: np.ndarray, effects: list) -> np.ndarray:
    n = len(effects)
    dims = [e.shape[-1] for e in effects]
    a_idx, s_idx = list(range(n)), list(range(n, 2 * n))
    in_idx, out_idx = list(range(2 * n, 3 * n)), list(range(3 * n, 4 * n))
    operands = [c, a_idx + s_idx]
    for k, e in enumerate(effects):
        operands += [e, [a_idx[k], s_idx[k], in_idx[k], out_idx[k]]]
    b = np.einsum(*operands, in_idx + out_idx, optimize=True)
    dim = math.prod(dims)
    return b.reshape(dim, dim)


def bell_operator(expr: BellExpression, measurements) -> HermitianOperator:
    """``sum c[a, s] (x)_i M_{a_i|s_i}``.

    ``measurements[i][s]`` is party ``i``'s `PovmMeasurement` for input ``s``.
    """
    if len(measurements) != expr.n_parties:
        raise DimensionMismatchError(
            f"{len(measurements)} parties of measurements for a {expr.n_parties}-party expression"
        )
    effects = []
    for i, party in enumerate(measurements):
        if len(party) != expr.inputs[i]:
            raise DimensionMismatchError(
                f"party {i} has {len(party)} measurements, expression declares {expr.inputs[i]}"
            )
        effects.append(_effects_array(party, expr.outputs[i]))
    return HermitianOperator(_bell_operator_array(expr.dense(), effects))


@dataclass(frozen=True)
class QuantumRange:
    """Estimated extreme quantum values; ``certified`` labels (upper, lower) as analytic or heuristic."""

    upper: float
    lower: float
    certified: tuple = ("heuristic", "heuristic")
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.upper < self.lower:
            raise ValueError(f"upper {self.upper} below lower {self.lower}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "lower": self.lower,
            "certified": {"upper": self.certified[0], "lower": self.certified[1]},
            **self.details,
        }


def _random_projective(d: int, outputs: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    e = np.zeros((outputs, d, d), dtype=complex)
    for j in range(d):
        v = q[:, j]
        e[j % outputs] += np.outer(v, v.conj())
    return e


def _effective_operators(c, effects, rho_t, party) -> np.ndarray:
    """``O[a_i, s_i]`` with ``<psi|B|psi> = sum Tr(E_i[a_i, s_i] O[a_i, s_i])``."""
    n = len(effects)
    a_idx, s_idx = list(range(n)), list(range(n, 2 * n))
    in_idx, out_idx = list(range(2 * n, 3 * n)), list(range(3 * n, 4 * n))
    operands = [c, a_idx + s_idx]
    for k, e in enumerate(effects):
        if k != party:
            operands += [e, [a_idx[k], s_idx[k], in_idx[k], out_idx[k]]]
    operands += [rho_t, out_idx + in_idx]
    o = np.einsum(
        *operands, [a_idx[party], s_idx[party], out_idx[party], in_idx[party]], optimize=True
    )
    return (o + np.conj(np.swapaxes(o, -1, -2))) / 2


def _best_projective(effects_s: np.ndarray, ops_s: np.ndarray, sweeps: int = 50) -> np.ndarray:
    """Maximize ``sum_a Tr(P_a O_a)`` over projective measurements.

    Pairwise updates: for outcomes (a, b) the subspace ``P_a + P_b`` is
    re-split along the positive eigenspace of ``O_a - O_b`` restricted to it.
    Exact in one step for two outcomes; monotone in general.
    """
    e = effects_s.copy()
    m = e.shape[0]
    for _ in range(sweeps if m > 2 else 1):
        changed = False
        for a, b in itertools.combinations(range(m), 2):
            p = e[a] + e[b]
            w, v = np.linalg.eigh(p)
            q = v[:, w > 0.5]
            if q.shape[1] == 0:
                continue
            k = q.conj().T @ (ops_s[a] - ops_s[b]) @ q
            kw, kv = np.linalg.eigh((k + k.conj().T) / 2)
            pos = q @ kv[:, kw > 0]
            new_a = pos @ pos.conj().T
            new_b = q @ q.conj().T - new_a
            gain = np.real(np.trace(new_a @ ops_s[a]) + np.trace(new_b @ ops_s[b])) - np.real(
                np.trace(e[a] @ ops_s[a]) + np.trace(e[b] @ ops_s[b])
            )
            if gain > 1e-14:
                e[a], e[b] = new_a, new_b
                changed = True
        if not changed:
            break
    return e


def _seesaw_once(c, outputs, inputs, d, rng, tol, max_rounds):
    n = len(outputs)
    effects = [
        np.stack([_random_projective(d, outputs[i], rng) for _ in range(inputs[i])], axis=1)
        for i in range(n)
    ]
    prev = -np.inf
    value = prev
    for _ in range(max_rounds):
        b = _bell_operator_array(c, effects)
        w, v = np.linalg.eigh((b + b.conj().T) / 2)
        value = float(w[-1])
        if value - prev <= tol:
            break
        prev = value
        psi = v[:, -1].reshape((d,) * n)
        rho_t = np.multiply.outer(psi, psi.conj())
        for i in range(n):
            ops = _effective_operators(c, effects, rho_t, i)
            for s in range(inputs[i]):
                effects[i][:, s] = _best_projective(effects[i][:, s], ops[:, s])
    return value, effects


def _seesaw_max(expr: BellExpression, local_dim, restarts, seed, tol, max_rounds):
    c = expr.dense()
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    best, best_effects = -np.inf, None
    for ss in seqs:
        val, eff = _seesaw_once(
            c, expr.outputs, expr.inputs, local_dim, np.random.default_rng(ss), tol, max_rounds
        )
        if val > best:
            best, best_effects = val, eff
    return best, best_effects


def quantum_range(
    expr: BellExpression,
    local_dim: int = 2,
    restarts: int = 20,
    seed: int = 0,
    tol: float = 1e-10,
    max_rounds: int = 500,
) -> QuantumRange:
    """See-saw estimate of the largest and smallest quantum Bell values.

    Alternates between the top eigenvector of the Bell operator and, party
    by party, the projective measurement maximizing the effective local
    operator. Results are feasible values, so ``upper`` under-estimates the
    true maximum and ``lower`` over-estimates the true minimum; both are
    labelled heuristic.
    """
    if local_dim < 2 or restarts < 1:
        raise ValueError("need local_dim >= 2 and restarts >= 1")
    upper, _ = _seesaw_max(expr, local_dim, restarts, seed, tol, max_rounds)
    neg_upper, _ = _seesaw_max(-expr, local_dim, restarts, seed + 1, tol, max_rounds)
    return QuantumRange(
        upper,
        -neg_upper,
        ("heuristic", "heuristic"),
        {"method": "see-saw", "local_dim": local_dim, "restarts": restarts, "seed": seed},
    )


def _analytic_range(expr: BellExpression):
    from .depth import MAX_PARTIES, svetlichny_dense  # local import: depth builds on this module

    if expr.same_as(chsh()):
        t = 2 * math.sqrt(2)
        return QuantumRange(t, -t, ("analytic", "analytic"), {"method": "analytic", "name": "chsh"})
    if expr.inputs == (2,) * expr.n_parties and expr.outputs == (2,) * expr.n_parties:
        n = expr.n_parties
        if 2 <= n <= MAX_PARTIES and np.allclose(
            expr.dense(), svetlichny_dense(n), rtol=0, atol=1e-12
        ):
            t = 2 ** ((n - 1) / 2)
            return QuantumRange(
                t, -t, ("analytic", "analytic"), {"method": "analytic", "name": f"svetlichny-{n}"}
            )
    return None


def tsirelson_range(expr: BellExpression, local_dim: int = 2, restarts: int = 20, seed: int = 0):
    """Analytic quantum range for CHSH and Svetlichny expressions, see-saw otherwise."""
    known = _analytic_range(expr)
    if known is not None:
        return known
    return quantum_range(expr, local_dim, restarts, seed)


def di_trace_bound(
    expr: BellExpression,
    beta_sep: float | None,
    qrange: QuantumRange | None,
    observed_value: float,
) -> float:
    """``max(0, (observed - beta_sep) / (upper - lower))``.

    ``beta_sep`` defaults to the classical bound; a smaller separable-state
    maximum (when justified) gives a larger bound. ``qrange`` defaults to
    `tsirelson_range`.
    """
    if beta_sep is None:
        beta_sep = classical_bound(expr)
    if qrange is None:
        qrange = tsirelson_range(expr)
    width = qrange.upper - qrange.lower
    if width <= 0:
        raise ValueError("degenerate quantum range")
    return max(0.0, (observed_value - beta_sep) / width)


# ---------------------------------------------------------------------------
# CHSH on product states with anticommuting observables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductOptimum:
    value: float
    alice: tuple  # (<A0>, <A1>)
    bob: tuple  # (<B0>, <B1>)


def _product_expectations(x):
    # pure qubit state with Bloch angles (theta, phi); A0 = Z, A1 = X
    ta, pa, tb, pb = x
    return (np.cos(ta), np.sin(ta) * np.cos(pa), np.cos(tb), np.sin(tb) * np.cos(pb))


def _chsh_product_value(x):
    a0, a1, b0, b1 = _product_expectations(x)
    return a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1


def chsh_product_max(grid: int = 24) -> ProductOptimum:
    """Maximum of ``sum_ij (-1)^(ij) <A_i><B_j>`` over product pure qubit states.

    Alice and Bob each measure the anticommuting pair (Z, X). A coarse grid
    over both Bloch spheres seeds a local refinement.
    """
    theta = np.linspace(0, np.pi, grid)
    phi = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    ta, pa, tb, pb = np.meshgrid(theta, phi, theta, phi, indexing="ij")
    vals = _chsh_product_value((ta, pa, tb, pb))
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    x0 = np.array([ta[idx], pa[idx], tb[idx], pb[idx]])
    res = optimize.minimize(
        lambda x: -_chsh_product_value(x), x0, method="BFGS", options={"gtol": 1e-12}
    )
    x = res.x if -res.fun >= vals[idx] else x0
    a0, a1, b0, b1 = (float(v) for v in _product_expectations(x))
    return ProductOptimum(float(_chsh_product_value(x)), (a0, a1), (b0, b1))
