# %% [markdown]
# Fast transform on a mixed-radix group.
#
# Points are digit tuples, stored in flat little-endian order.  The transform
# runs one small DFT per digit, so it costs O(M_N * sum m_k) instead of O(M_N^2).

# %%
import time

import numpy as np

from vlab import GridFunction, build_basis, dirichlet_dense, vft_forward, vft_inverse, vft_naive
from vlab.group import Cylinder

b = build_basis((2, 3, 2, 4, 2, 3), 6)
print("M_k:", b.Mk, " lambda:", b.lam)

# %%
rng = np.random.default_rng(0)
f = GridFunction(b, rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size))
t0 = time.perf_counter()
c = vft_forward(f)
t1 = time.perf_counter()
ref = vft_naive(f)
t2 = time.perf_counter()
print(f"fast {1e3 * (t1 - t0):.2f} ms, direct {1e3 * (t2 - t1):.1f} ms")
print("max |fast - direct| =", np.abs(c.coeffs - ref.coeffs).max())
print("round trip error    =", np.abs(vft_inverse(c).values - f.values).max())

# %% [markdown]
# Dirichlet kernels at the generalized powers are scaled cylinder indicators.

# %%
for n in range(b.N + 1):
    D = dirichlet_dense(b, b.Mk[n]).values
    gap = np.abs(D - b.Mk[n] * Cylinder(n).mask(b)).max()
    print(f"n={n}  M_n={b.Mk[n]:4d}  support={int((np.abs(D) > 1e-9).sum()):4d}  gap={gap:.1e}")
