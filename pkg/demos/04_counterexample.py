# %% [markdown]
# The divergence martingale below p = 1/2.
#
# With ``p = 1/3`` the block levels come from an exact integer search, the
# function is a sum of atoms with summable weights, and still
# ``|T_{M+2} f| >= M^(1/p-2) / (16 a_k)`` everywhere at ``M = M_{a_k}``.

# %%
from fractions import Fraction

from vlab import weights
from vlab.counterexample import (atoms, check_conditions, condition2_report, dense_chain,
                                 divergence_ratio, find_alphas, hp_bound, hp_bound_limit,
                                 lower_bound_chain)
from vlab.operators import hp_atomic_bound

spec = find_alphas(Fraction(1, 3), 2, 4)
print("levels:", spec.alphas)
print("exact conditions:", [(r.k, r.cond3, r.cond4) for r in check_conditions(spec)])
rep = condition2_report(spec)
print(f"sum a_k^(-1/3) so far {rep.partial_sum:.4f}, certified tail <= {rep.tail_bound:.4f}")

# %% [markdown]
# Block 1 fits in 2^14 points, so the chain can be checked everywhere.

# %%
fej = weights("fejer")
d = dense_chain(spec, 1, fej)
print(f"min |T f| = {d.min_abs_T:.2f} vs threshold {d.threshold:.2f};"
      f" max |I| = {d.max_abs_I:.2f} <= {d.i_bound:.0f}; analytic vs dense II: {d.II_rel_err:.1e}")
print("atomic H_p bound at k <= 1:", hp_atomic_bound(atoms(spec, 1)))

# %% [markdown]
# Deeper blocks go through the analytic tier only (2^48 points and beyond).

# %%
for k in (1, 2, 3):
    r = lower_bound_chain(spec, k, fej, samples=2000)
    print(f"k={k}: threshold {r.threshold:.3e}  min margin {r.min_margin:.3e}  "
          f"ratio {divergence_ratio(spec, k):.3e}  H_p bound {hp_bound(spec, k):.3f}")
print("H_p bound of the full series <=", round(hp_bound_limit(spec), 3))

# %% [markdown]
# Riesz weights sit outside the certificate (``M q_{M+1}/Q_{M+2}`` is about
# 1/log M); the report flags them instead of claiming the bound.

# %%
r = lower_bound_chain(spec, 1, weights("riesz"), samples=500)
print(f"riesz: certified={r.certified} c={r.certificate:.3f} min margin {r.min_margin:.2f}")
print(f"yet the dense minimum is {dense_chain(spec, 1, weights('riesz')).min_abs_T:.2f}")
