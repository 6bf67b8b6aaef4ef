"""Entanglement depth: Svetlichny expressions, k-producibility bounds and depth witnesses."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .di import BellExpression
from .linalg import DensityMatrix
from .witness import Witness, trace_bound

__all__ = [
    "DepthScenario",
    "svetlichny",
    "printed_producibility_bound",
    "producibility_bound",
    "svetlichny_quantum_max",
    "depth_trace_bound",
    "ghz_closed_form",
    "ghz_comparison",
    "trusted_depth_bound",
    "quoted_w_witness_values",
]

MAX_PARTIES = 10


@dataclass(frozen=True)
class DepthScenario:
    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n <= MAX_PARTIES:
            raise ValueError(f"need 1 <= k <= n <= {MAX_PARTIES}, got n={self.n}, k={self.k}")

    @property
    def blocks(self) -> int:
        """``floor(ceil(n/k) / 2)``, the exponent shared by every closed form below."""
        return math.ceil(self.n / self.k) // 2


def svetlichny(n: int) -> BellExpression:
    """``2^(-n/2) sum_{a,s} (-1)^(sum a + floor(sum s / 2)) M_{a_1|s_1} ... M_{a_n|s_n}``."""
    if not 2 <= n <= MAX_PARTIES:
        raise ValueError(f"Svetlichny expression needs 2 <= n <= {MAX_PARTIES}, got {n}")
    return BellExpression.from_dense(svetlichny_dense(n))


@functools.lru_cache(maxsize=None)
def svetlichny_dense(n: int) -> np.ndarray:
    """Read-only dense coefficient array of `svetlichny`, indexed ``c[a_1..a_n, s_1..s_n]``."""
    bits = np.array(list(itertools.product(range(2), repeat=n)), dtype=int)
    sums = bits.sum(axis=1)
    c = (2.0 ** (-n / 2) * (-1.0) ** (sums[:, None] + sums[None, :] // 2)).reshape((2,) * (2 * n))
    c.flags.writeable = False
    return c


def printed_producibility_bound(n: int, k: int) -> float:
    """``2^((n - 2 floor(ceil(n/k)/2)) / 2)`` taken literally.

    At ``k = n`` this gives ``2^(n/2)``, above the quantum maximum; see
    `producibility_bound`.
    """
    sc = DepthScenario(n, k)
    return 2.0 ** ((n - 2 * sc.blocks) / 2)


def producibility_bound(n: int, k: int) -> float:
    """Largest Svetlichny value over k-producible states (beta_k).

    The closed form is capped at the quantum maximum ``2^((n-1)/2)``; the cap
    only bites at ``k = n``, where every state is allowed.
    """
    return min(printed_producibility_bound(n, k), svetlichny_quantum_max(n))


def svetlichny_quantum_max(n: int) -> float:
    return 2.0 ** ((n - 1) / 2)


def depth_trace_bound(n: int, k: int, observed_value: float) -> float:
    """``max(0, (observed - beta_k) / 2^((n+1)/2))``.

    The denominator is the width of the quantum range, ``2 * 2^((n-1)/2)``.
    """
    beta = producibility_bound(n, k)
    return max(0.0, (observed_value - beta) / 2.0 ** ((n + 1) / 2))


def ghz_closed_form(n: int, k: int) -> float:
    """Quoted closed form at the GHZ point: ``(1 - 2^(-2 floor(ceil(n/k)/2))) / 2``."""
    sc = DepthScenario(n, k)
    return 0.5 * (1.0 - 2.0 ** (-2 * sc.blocks))


def ghz_comparison(n: int, k: int, atol: float = 1e-12) -> dict:
    """Evaluate the depth bound at the maximal (GHZ) value next to the quoted closed form.

    The two only coincide when ``ceil(n/k) < 2``; other pairs come back with
    ``agree=False`` so callers can surface the mismatch.
    """
    at_max = depth_trace_bound(n, k, svetlichny_quantum_max(n))
    closed = ghz_closed_form(n, k)
    return {
        "n": n,
        "k": k,
        "beta_k": producibility_bound(n, k),
        "beta_k_printed": printed_producibility_bound(n, k),
        "bound_at_max": at_max,
        "closed_form": closed,
        "agree": abs(at_max - closed) <= atol,
    }


def trusted_depth_bound(w: Witness, rho: DensityMatrix) -> float:
    """Trusted-device bound for a k-producibility witness; same algebra as `trace_bound`."""
    return trace_bound(w, rho)


def quoted_w_witness_values(v: float) -> tuple[float, float]:
    """Witness values for the noisy W state as quoted alongside the two depth witnesses.

    These are ``4/9 - 7v/8`` and ``2/3 - 7v/8``; they do not follow from
    either mixing convention of `states.noisy_w` (see `w_state_chain`).
    """
    return 4 / 9 - 7 * v / 8, 2 / 3 - 7 * v / 8


def w_state_chain(v: float = 1.0, atol: float = 1e-10) -> dict:
    """Depth bounds for the noisy W state from quoted and recomputed witness values."""
    from .linalg import expectation
    from .states import noisy_w, w_depth_witnesses

    quoted = quoted_w_witness_values(v)
    rows = []
    for level, (w, q) in enumerate(zip(w_depth_witnesses(), quoted), start=1):
        recomputed = {
            conv: expectation(w.op, noisy_w(v, conv)) / w.spread for conv in ("printed", "inverted")
        }
        rows.append(
            {
                "k": level,
                "spread": w.spread,
                "quoted_w_c": q,
                "quoted_bound": max(0.0, -q),
                "recomputed_w_c": recomputed,
                "recomputed_bound": {c: max(0.0, -x) for c, x in recomputed.items()},
                "flag": any(abs(x - q) > atol for x in recomputed.values()),
            }
        )
    return {"v": v, "rows": rows}
