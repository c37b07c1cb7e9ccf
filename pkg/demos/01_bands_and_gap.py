"""Band structure of a nine-cycle magnetic lattice and how its first gap
responds to the field strength and the lattice wavenumber.

Run: python3 demos/01_bands_and_gap.py
"""
import numpy as np

from tglattice import LatticeConfig, band_gap, boltzmann_ratio, compute_bands, gap_scan

cfg = LatticeConfig(M=9, B=1e-9, omega=1e7)
print(f"q = {cfg.q:.6g}, energy unit hbar^2 omega^2 / 2m = {cfg.energy_scale:.4e} J")

bs = compute_bands(cfg, n_bands=2)
print("\n band    l      nu        lambda")
for band, l, nu, lam, _ in bs.rows():
    print(f"{band:5d} {l:4d} {float(nu):+8.4f} {lam:13.8f}")

d_lam, d_E = band_gap(bs)
print(f"\nfirst gap: {d_lam:.6f} (lambda units) = {d_E:.4e} J")
# with no field the gap is still 4/M, the spacing of the sampled Bloch grid
print(f"B = 0 gap in lambda units: {band_gap(compute_bands(cfg.replace(B=0.0)))[0]:.6f} (4/M = {4 / 9:.6f})")

scan = gap_scan(cfg, "B", np.linspace(0, 2e-8, 9))
print("\n   B [T]        gap [J]")
for B, dE in zip(scan.values, scan.delta_E):
    print(f"{B:9.2e}  {dE:.4e}")

scan = gap_scan(cfg, "omega", np.linspace(5e6, 5e7, 6))
print("\nomega [1/m]    gap [J]")
for w, dE in zip(scan.values, scan.delta_E):
    print(f"{w:9.2e}  {dE:.4e}")

T = 1e-9
print(f"\nat T = {T:g} K the upper band is suppressed by exp(-dE/kT) = {boltzmann_ratio(d_E, T):.3e}")
