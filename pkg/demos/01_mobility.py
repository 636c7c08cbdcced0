# Where do random-waypoint users spend their time on a bounded line?
#
# Users walk between uniformly chosen points of the lattice 1..N at u points
# per slot and rest 0..M slots on arrival.  The closed-form occupancy is
# compared with the stationary law of the exact state chain.

import numpy as np

from blockcorr import (
    MobilitySpec,
    build_full_chain,
    displacement_law,
    simulate_trajectory,
    stationary_distribution,
    steady_state_pmf,
    think_probability,
)

spec = MobilitySpec(N=50, u=1, M=5)
f = steady_state_pmf(spec)
print(f"fraction of time spent thinking p = {spec.p:.4f}")
print(f"occupancy at the boundary {f[0]:.5f}, at the centre {f[24]:.5f}")

# position marginal of the full (position, destination, think time) chain
chain = build_full_chain(spec)
pi = stationary_distribution(chain)
marginal = np.bincount(chain.positions - 1, weights=pi, minlength=spec.N)
print(f"chain has {len(pi)} states; max deviation from closed form {np.abs(marginal - f).max():.1e}")

# users near the edges think more often, because every trip ends there
print(f"P(thinking | n=1) = {think_probability(spec, 1):.3f}, "
      f"P(thinking | n=25) = {think_probability(spec, 25):.3f}")

# one-slot displacement law seen from position 10
law = displacement_law(spec, 1)
for k in (-1, 0, 1):
    print(f"P(move {k:+d} | at 10) = {law.prob(10, k):.4f}")

# a long single trajectory settles on the same occupancy (odd speeds are ergodic)
x = simulate_trajectory(spec, seed=1, T=200_000)
hist = np.bincount(x - 1, minlength=spec.N) / len(x)
print(f"trajectory histogram max error {np.abs(hist - f).max():.4f}")
