"""A filled lowest band (N = M = 7): bosons pile up at zero momentum while
fermions occupy every lattice momentum of the band once.

Run: python3 demos/03_momentum.py  (about ten seconds)
"""
from tglattice import (Grid1D, LatticeConfig, McConfig, average_position_and_potential,
                       ground_state_occupation, momentum_distribution, rspdm_bose_mc, total_momentum)

cfg = LatticeConfig(M=7, q_value=1.0, mass=None, magnetic_moment=None)
state = ground_state_occupation(cfg, 7)
grid = Grid1D.uniform(cfg.M, 128)

md_f = momentum_distribution(state)
bose = rspdm_bose_mc(state, grid, McConfig(samples=400_000, seed=0))
md_b = momentum_distribution(bose)

print("   j   kappa    n_F      n_B")
for j in range(-10, 11):
    n_f = md_f.occupation(j) if abs(j) <= md_f.j.max() else 0.0
    print(f"{j:4d} {2 * j / 7:+7.3f}  {n_f:7.4f}  {md_b.occupation(j):7.4f} +- {md_b.occupation_error(j):.4f}")

print(f"\nsum n: Fermi {md_f.occupations.sum():.10f}, Bose {md_b.occupations.sum():.3f}")
print(f"total momentum: Fermi {total_momentum(md_f):.1e}, Bose {total_momentum(md_b):.1e}")
print(f"sum kappa^2 n: Fermi {md_f.moment(2):.3f}, Bose {md_b.moment(2):.3f} +- {md_b.moment_error(2):.3f} (Bose window |j| <= 4M)")

pf = average_position_and_potential(state, grid)
pb = average_position_and_potential(state, grid, bose.diagonal)
print(f"\n<z>: {pf.z_mean:.4f} vs {pb.z_mean:.4f};  <V>/N (lambda units): {pf.potential_lambda:.4f} vs {pb.potential_lambda:.4f}")
