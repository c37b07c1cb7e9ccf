"""Five particles on seven lattice cycles: fermions and hard-core bosons
share a density and pair distribution but not their off-diagonal order.

Run: python3 demos/02_density_matrices.py  (about ten seconds)
"""
import numpy as np

from tglattice import (Grid1D, LatticeConfig, McConfig, antidiagonal_cut, density_profile,
                       ground_state_occupation, pair_distribution, rspdm_bose_mc, rspdm_fermi,
                       total_energy)
from tglattice.observables import cut_variance

cfg = LatticeConfig(M=7, q_value=1.0, mass=None, magnetic_moment=None)
state = ground_state_occupation(cfg, 5)
grid = Grid1D.uniform(cfg.M, 128)
print("occupied orbitals:", ", ".join(state.labels))
print(f"total energy (lambda units): {total_energy(state)[0]:.10f}")

fermi = rspdm_fermi(state, grid)
bose = rspdm_bose_mc(state, grid, McConfig(samples=400_000, seed=0))
rho = density_profile(state, grid)

z = np.abs(bose.diagonal - rho) / np.diag(bose.stderr)
print(f"\nBose diagonal vs Fermi density: {100 * np.mean(z <= 3):.1f}% of points within 3 sigma")
print(f"integral of rho: {grid.integrate(rho):.12f}")

D = pair_distribution(state, grid)
print(f"integral of D: {D.integral():.9f} (N(N-1) = 20), D(z, z) = {np.abs(np.diag(D.values)).max():g}")

print("\n  z      rho_F(z, L-z)   rho_B(z, L-z)")
zf, cut_f, _ = antidiagonal_cut(fermi)
_, cut_b, err_b = antidiagonal_cut(bose)
for i in range(8, 120, 14):
    print(f"{zf[i]:6.2f}  {cut_f[i]:+.5f}        {cut_b[i]:+.5f} +- {err_b[i]:.5f}")

var_f, _ = cut_variance(fermi)
var_b, err = cut_variance(bose)
print(f"\ninterior variance of the cut: Fermi {var_f:.5f}, Bose {var_b:.5f} +- {err:.5f}")
