"""Lower bounds from a trusted witness measurement, checked against the oracle."""
import numpy as np

from entwitness import states
from entwitness.linalg import expectation
from entwitness.oracle import etr_upper_bound
from entwitness.witness import bound_table, normalize, trace_bound

# The fidelity witness I/d - |phi+><phi+| detects the maximally entangled state.
# Its spectrum runs from 1/d - 1 to 1/d, so the spread is exactly 1.
for d in range(2, 6):
    w = states.fidelity_witness(d)
    rho = states.max_entangled(d)
    print(f"d={d}  E_tr >= {trace_bound(w, rho):.6f}   (1 - 1/d = {1 - 1 / d:.6f})")

# One normalized witness value feeds every derived quantifier.
w = states.fidelity_witness(2)
w_c = expectation(normalize(w).w_c, states.max_entangled(2))
table = bound_table(w_c)
for name, entry in table.entries.items():
    print(f"{name:6s} {entry.formula:28s} {entry.bound}")

# Werner states: the bound switches on at v = 1/3 and grows linearly.
ws = states.werner_witness()
vs = np.linspace(0, 1, 6)
bounds = [trace_bound(ws, states.werner(v)) for v in vs]
print(np.column_stack([vs, bounds]))

# Any bound must sit below the brute-force upper bound on the true distance.
res = etr_upper_bound(states.werner(1.0), (2, 2), restarts=3, seed=7)
print("oracle upper bound at v=1:", round(res.upper_bound, 4), "lower bound:", bounds[-1])
