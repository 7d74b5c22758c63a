# %% [markdown]
# T-means as spectral multipliers, and the kernel route.
#
# ``T_n f = (1/Q_n) sum_{k<n} q_k S_k f`` multiplies coefficient ``j`` by
# ``(Q_n - Q_{j+1}) / Q_n``.  The same mean is the convolution of ``f`` with
# the kernel ``F_n = (1/Q_n) sum q_k D_k``.

# %%
import numpy as np

from vlab import GridFunction, abel_identity_check, build_basis, convolve, t_kernel, t_mean, weights
from vlab.summability import condition_checks

b = build_basis(2, 8)
rng = np.random.default_rng(1)
f = GridFunction(b, rng.standard_normal(b.size))

kinds = [weights("fejer"), weights("cesaro", 0.5), weights("inverse_cesaro", 0.5),
         weights("power", 0.5), weights("riesz"), weights("norlund_log"), weights("iterlog", 1, 1)]

# %%
for w in kinds:
    n = 37
    gap = np.abs(convolve(f, t_kernel(b, w, n)).values - t_mean(f, w, n).value.values).max()
    abel = abel_identity_check(w, 1000).rel_gap
    print(f"{w.label:20s} {w.monotonicity:15s} kernel gap {gap:.1e}  Abel gap {abel:.1e}")

# %% [markdown]
# Riesz weights fail the growth condition ``n q_{n+1} / Q_{n+2} >= c``: the
# ratio decays like ``1/log n``.  Constant weights keep it near 1.

# %%
for w in (weights("fejer"), weights("riesz"), weights("power", 0.5)):
    rep = condition_checks(w, 10**5)
    print(f"{w.label:10s} inf {rep.cond1_inf:.4f}   at 1e5 {rep.cond1_tail:.4f}")
