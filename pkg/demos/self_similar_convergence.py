"""Convergence of rescaled memory-diffusion flows to self-similar profiles.

For a memory kernel whose integrated kernel A is regularly varying with
index beta in (-1, 1], the parabolically rescaled solution converges to a
profile built from the Mittag-Leffler function E_{1+beta}(-|xi|^2 t^{1+beta}).
This script walks the dilation ladder T = 10^2, 10^3, 10^4 for three
kernels (heat-like beta = 0, wave-like beta = 1, fractional beta = -1/2)
and prints the Sobolev distance to the limit profile, which should drop
at every rung.  A wrong scaling exponent is also tried: its distances do
not decrease, which is how a trivial (zero) limit is detected.

Run:  python3 demos/self_similar_convergence.py
"""

import numpy as np

from memdiff import (
    Exponential,
    Gaussian,
    ModeGrid,
    ScalingFunction,
    Wave,
    converge_to_limit,
    fractional,
)

grid = ModeGrid(n=1, modes_per_axis=64, xi_max=6.0)
u0 = Gaussian()
T_list = [1e2, 1e3, 1e4]

cases = [
    ("exponential kernel (beta = 0, heat limit)", Exponential(mu=1.0, c=1.0), 0.0, 0.0),
    ("wave kernel (beta = 1, cosine limit)", Wave(c=1.0), 1.0, -1.0),
    ("fractional kernel (beta = -1/2)", fractional(-0.5), -0.5, -1.0),
]

for title, kernel, beta, s in cases:
    sf = ScalingFunction(kernel=kernel, beta=beta)
    rep = converge_to_limit(kernel, u0, sf, T_list, [1.0], s, grid)
    d = rep.distances_at(1.0)
    print(title)
    for T, dist in zip(T_list, d):
        print(f"  T = {T:8.0f}   distance = {dist:.4e}")
    print()

# Negative control: a pure power scaling with the wrong exponent.
kernel = Exponential(mu=1.0, c=1.0)
sf_bad = ScalingFunction(kernel=kernel, beta=0.0, exponent_override=0.7)
rep = converge_to_limit(kernel, u0, sf_bad, T_list, [1.0], 0.0, grid)
d = rep.distances_at(1.0)
print("wrong scaling exponent 0.7 (correct is 0.5): distances do not decrease")
for T, dist in zip(T_list, d):
    print(f"  T = {T:8.0f}   distance = {dist:.4e}")
assert not np.all(np.diff(d) < 0)
