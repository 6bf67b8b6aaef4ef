"""Measurement-device-independent certification of Werner states."""
import numpy as np

from entwitness import mdi, states

tet = mdi.tetrahedron_states()
bsm = mdi.bell_measurement()
w = states.werner_witness().op

# Write W as a combination of transposed ancilla products, then simulate the
# protocol.  p has axes (a, b, s, t).
dec = mdi.decompose_witness(w, tet, tet)
print("decomposition residual", dec.residual)

for v in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
    table = mdi.simulate(states.werner(v), bsm, bsm, dec)
    wab = mdi.outcome_values(dec, table)
    i_prime = mdi.mdi_value(wab)
    print(
        f"v={v:.1f}  w_aa={wab[0, 0]:+.4f}  w_ab={wab[0, 1]:+.4f}  "
        f"I'={i_prime:+.4f}  bound={mdi.mdi_trace_bound(i_prime, w):.4f}"
    )

# Relabeling Bell outcomes only permutes the table; I' does not move.
perm = np.array([3, 1, 0, 2])
t2 = mdi.simulate(states.werner(0.9), bsm.relabel(perm), bsm, dec)
print("relabelled I'", mdi.mdi_value(mdi.outcome_values(dec, t2)))
