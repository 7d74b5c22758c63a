# %% [markdown]
# Maximal operators and pointwise domination by the Fejer maximal function.
#
# Non-increasing weights give ``T* f <= sigma* f``.  Non-decreasing weights give
# ``|T_n f| <= c_n sigma* f`` with ``c_n = (2 q_{n-1}(n-1) - Q_n + q_0) / Q_n``.

# %%
import numpy as np

from vlab import GridFunction, build_basis, hp_norm, weak_lp, weights
from vlab.operators import domination_bounds, domination_excess, maximal_batch

b = build_basis(2, 12)
rng = np.random.default_rng(2)
vals = rng.standard_normal((10, b.size))

ws = [None, weights("riesz"), weights("power", 0.5), weights("inverse_cesaro", 0.5)]
out = maximal_batch(b, vals, ws)
sigma = out[:, 0]
for i, w in enumerate(ws[1:], start=1):
    print(f"{w.label:20s} max(T* - sigma*) = {(out[:, i] - sigma).max():.2e}")

# %%
w = weights("iterlog", 1, 1)
c = domination_bounds(w, b.size)
print("c_n at n = 3, 10, 100, 4096:", c[[3, 10, 100, 4096]].round(4))
print("max(|T_n f| - c_n sigma* f) =", domination_excess(b, vals, w, sigma).max())

# %% [markdown]
# Weak-L_{1/2} size of the maximal function against the Hardy norm of ``f``.

# %%
for i, w in enumerate(ws):
    r = max(weak_lp(out[j, i], 0.5) / hp_norm(GridFunction(b, vals[j]), 0.5) for j in range(10))
    print(f"{'fejer' if w is None else w.label:20s} sup ratio {r:.4f}")
