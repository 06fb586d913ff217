# %% [markdown]
# Sieve weights at desk scale: the y/lambda inversion, the size of lambda
# against (log R)^(k + deg F), then the empirical sums S1 and S2 and the
# residue-class equidistribution of primes and beta = 1 elements.

# %%
import numpy as np

from heegner_gaps.field_core import make_field
from heegner_gaps.functional import PolyF
from heegner_gaps.gap_lab import Which, equidist_report
from heegner_gaps.tuples import HTuple
from heegner_gaps.weights import WeightConfig, WeightTable, empirical_sums, lambda_growth

f = make_field(-2)
F = PolyF.standard()
pair = HTuple.rational([0, 2])
for R in (10, 20, 40):
    cfg = WeightConfig(f, 2, R, 5, F, pair)
    t = WeightTable(cfg)
    print(f"R={R:3d}  support={len(t.support):5d}  inversion={t.inversion_discrepancy():.1e}  C={lambda_growth(cfg):.4f}")

# %%
cfg = WeightConfig(f, 2, 20, 5, F, pair)
s = empirical_sums(cfg, 60)
print("S1 =", round(s.S1, 4), " S2 =", round(s.S2, 4), " over", s.n_alpha, "alpha, v0 =", s.v0)

# %%
g = make_field(-1)
for which in Which:
    rep = equidist_report(g, 100, 40, which)
    eps = np.array([r.max_eps for r in rep.rows])
    print(which.value, "moduli", len(rep.rows), "sum max eps", round(rep.total_max_eps, 2), "worst", eps.max().round(2))
