"""Entanglement depth from Svetlichny values, and the noisy W state."""
from entwitness import depth

for n in range(2, 7):
    row = [depth.producibility_bound(n, k) for k in range(1, n + 1)]
    print(n, [round(b, 4) for b in row])

# At the GHZ value the normalized bound and the closed form are evaluated side
# by side; they only coincide when ceil(n/k) < 2.
for n, k in [(3, 1), (4, 2), (6, 2), (5, 5)]:
    c = depth.ghz_comparison(n, k)
    print(n, k, round(c["bound_at_max"], 4), round(c["closed_form"], 4), c["agree"])

chain = depth.w_state_chain(1.0)
for r in chain["rows"]:
    print(f"P{r['k']}: quoted {r['quoted_bound']:.4f}  recomputed {r['recomputed_bound']}  flag={r['flag']}")
