# %% [markdown]
# The sieve functional for the quadratic test function
# F(t1, t2) = 1 - (t1 + t2) + (t1^2 + t2^2), with theta = 2/5, eta = 1/250.

# %%
from fractions import Fraction

from heegner_gaps.functional import I2_detail, I3_detail, PolyF, criterion

F = PolyF.standard()
rep = criterion(F, k=2, theta=Fraction(2, 5), eta=Fraction(1, 250), rho=1, m_K=2)
print("I1     =", rep.I1, f"({float(rep.I1):.6f})")
for m, q, v in rep.I2:
    print(f"I2[{m}]  = ({q}) log 4 = {v:.9f}")
for m, v, _ in rep.I3:
    print(f"I3[{m}]  = {v:.12f}")
print("Itilde =", f"{rep.Itilde:.7f}", "positive" if rep.positive else "not positive")

# %% [markdown]
# Closed forms next to quadrature. Both I2 and I3 are computed twice, and the
# library refuses to answer if the two routes disagree by more than 1e-9.

# %%
d2 = I2_detail(F, 1, 5)
d3 = I3_detail(F, 1, 5, Fraction(1, 250))
print(f"I2: closed {d2.value:.15f}  quad {d2.quadrature:.15f}")
print(f"I3: closed {d3.value:.15f}  quad {d3.quadrature:.15f}")

# %% [markdown]
# Sensitivity to m_K (the root-of-unity count enters the log factor).

# %%
for mK in (2, 4, 6):
    r = criterion(F, m_K=mK)
    print(mK, f"{r.Itilde:+.6f}")
