"""CHSH: classical bound, see-saw Tsirelson estimate and the DI trace bound."""
import math

from entwitness import di

chsh = di.chsh()
print("classical bound", di.classical_bound(chsh))

# The see-saw only ever returns values that some state and measurements attain,
# so it approaches 2*sqrt(2) from below.
rng = di.quantum_range(chsh, local_dim=2, restarts=20, seed=7)
print("see-saw range", rng.upper, rng.lower, rng.certified)

observed = 2 * math.sqrt(2)
print("DI bound with beta_c:", di.di_trace_bound(chsh, None, None, observed))

# Product states with anticommuting local observables cannot beat sqrt(2);
# using that as the separable threshold tightens the bound to 1/4.
prod = di.chsh_product_max()
print("product-state maximum", prod.value, prod.alice, prod.bob)
print("DI bound with beta_sep:", di.di_trace_bound(chsh, prod.value, None, observed))

# Expressions round-trip through JSON (see data/chsh.json).
print(di.BellExpression.from_dict(chsh.to_dict()).same_as(chsh))
