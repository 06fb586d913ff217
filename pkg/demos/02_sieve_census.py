# %% [markdown]
# Element census in the nine class-number-one imaginary quadratic fields:
# lattice counts against pi N^2 / R_K, the Mitsui prime ratio, and the split
# between primes, G2-numbers and beta = 1 elements.

# %%
import numpy as np

from heegner_gaps.arithmetic import residue_check
from heegner_gaps.box_sieve import BetaParams, census, count_box, dyadic, full, mitsui_ratio
from heegner_gaps.field_core import HEEGNER_D, make_field

for d in HEEGNER_D:
    f = make_field(d)
    a0, a = count_box(f, full(1000)), count_box(f, dyadic(1000))
    print(f"d={d:5d}  |A0|/main={a0.ratio:.6f}  |A|/main={a.ratio:.6f}  residue={residue_check(f, 10**5) / f.c_K:.4f}")

# %%
f = make_field(-1)
Ns = np.array([50, 100, 200, 400, 800])
ratios = np.array([mitsui_ratio(f, int(N)) for N in Ns])
print(np.column_stack([Ns, ratios.round(4)]))

# %% [markdown]
# Per-band census. Band j collects norms in (4^j, 4^(j+1)].

# %%
c = census(f, full(200), BetaParams())
print("total", c.total, "primes", c.primes, "G2", c.g2, "beta=1", c.beta_ones)
for row in c.to_dict()["bands"]:
    share = row["g2"] / row["total"] if row["total"] else 0.0
    print(f"band {row['band']:2d}  total {row['total']:7d}  G2 share {share:.3f}")
