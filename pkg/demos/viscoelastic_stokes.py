"""Viscoelastic flow approaching the compressible Stokes fundamental solution.

A linearly viscoelastic velocity field splits in Fourier space into a
gradient part (projector P = xi xi^T / |xi|^2) and a divergence-free part
(Q = I - P), each relaxing under its own scalar kernel.  When both
kernels have finite total mass, the field approaches the Stokes
fundamental solution with effective viscosities A (shear) and
B = (4A + 2A_bulk)/3 (gradient part), at rate t^{-3/4} in negative
Sobolev norms.  This script prints the scaled residual
r(t) = t^{3/4} ||v - W V0||_{H^{-2}} along a geometric time list, then
spot-checks the real-space gradient part of W against its erf-potential
closed form.

Run:  python3 demos/viscoelastic_stokes.py
"""

import numpy as np

from memdiff import (
    Exponential,
    Heat,
    ModeGrid,
    SpectralField,
    VectorGaussian,
    ViscoKernelPair,
    evaluate_at,
    stokes_gradient_part_real,
    visco_asymptotics,
)

pair = ViscoKernelPair(shear=Exponential(mu=1.0, c=1.0), bulk=Heat(0.5))
A, B = pair.effective_viscosities()
print(f"effective viscosities: shear A = {A}, gradient-part B = {B}")

grid = ModeGrid(n=3, modes_per_axis=12, xi_max=3.0)
v0 = VectorGaussian(mass_vector=(1.0, 0.0, 0.0))
rep = visco_asymptotics(pair, v0, [5.0, 20.0, 80.0], s=-2.0, grid=grid)
print()
print("scaled residual against the Stokes fundamental solution:")
for t, r, raw in rep.rows:
    print(f"  t = {t:6.1f}   t^(3/4) * dist = {r:.4e}   dist = {raw:.4e}")

# Real-space spot check of the gradient part of the Stokes kernel:
# component (0, 1) of P e^{-|xi|^2 t}, synthesized from Fourier samples,
# against -d0 d1 [erf(|x|/sqrt(4t)) / (4 pi |x|)].
t = 1.0
gs = ModeGrid(n=3, modes_per_axis=24, xi_max=6.0)
c1, c2, c3 = gs.components()
lam = gs.xi_squared()
safe = lam.copy()
safe[gs.zero_index()] = 1.0
vals = (c1 * c2 / safe * np.exp(-lam * t)).astype(complex)
pts = [np.array(p) for p in [(0.5, 0.5, 0.0), (1.0, -0.5, 0.3), (-1.2, 0.8, 1.1)]]
fourier = evaluate_at(SpectralField(gs, vals), pts).real
closed = np.array([stokes_gradient_part_real(p, t)[0, 1] for p in pts])
print()
print("gradient part U_01(x, t=1): Fourier synthesis vs erf-potential form")
for p, a, b in zip(pts, fourier, closed):
    print(f"  x = {tuple(map(float, p))}: {a:.6f} vs {b:.6f} (diff {abs(a - b):.1e})")
