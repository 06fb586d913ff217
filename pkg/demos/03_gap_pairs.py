# %% [markdown]
# G2 pairs in Z[i] at embedding distance 2, their norm-form decompositions,
# and how the pair count grows band by band.

# %%
from heegner_gaps.field_core import QuadInt, make_field
from heegner_gaps.gap_lab import corollary_decomposition, density_csv, density_report, find_gap_pairs
from heegner_gaps.tuples import HTuple

f = make_field(-1)
pair = HTuple.rational([0, 2])
pairs = list(find_gap_pairs(f, pair, 20))
print(len(pairs), "pairs with |alpha| <= 20")
for p in pairs[:8]:
    print(p.alpha1, p.alpha2, [str(q) for q, _ in p.factorizations[0].factors])

# %% [markdown]
# (3 + 3i, 5 + 3i): norms 18 = 2 * 9 and 34 = 2 * 17, so 3 shows up inert.

# %%
p = next(p for p in pairs if p.alpha1 == QuadInt(3, 3))
dec = corollary_decomposition(f, p)
for r in dec.factors1 + dec.factors2:
    print(r.p, r.coords, "inert" if r.inert else "split")
print("cross term Re(alpha1) =", dec.re_alpha1, " identity holds:", dec.identity_holds)

# %%
print(density_csv(density_report(f, pair, 128)))
