# Does blockage make interference more or less correlated in time?
#
# With few users, obstacles decorrelate the interference; with many, every
# user's link is attenuated by the same obstacles and the correlation rises
# above the unblocked value.  The crossover density K* marks the switch.

from blockcorr import (
    NetworkConfig,
    critical_user_count,
    mean_interference,
    pearson_rho,
    rho_coefficients,
    rho_without_blockage,
    std_interference,
)

net = NetworkConfig(N=50, K=50, xi=1.0, u=1, M=5, N_o=10, gamma=0.5)
for y in (1.5, 12.5, 25.5):
    print(f"y_p={y:5.1f}  E[I]={mean_interference(net, y):.4f}  std={std_interference(net, y):.4f}  "
          f"std ignoring shared obstacles={std_interference(net, y, spatial=False):.4f}")

y = 12.5
co = rho_coefficients(net, y, 1)
ref = rho_without_blockage(net, y, 1)
k_star = critical_user_count(net, y, 1)
print(f"\nrho without blockage: {ref:.4f}; crossover at K* = {k_star:.1f}")
for K in (1, 10, 30, 100, 300):
    print(f"K={K:4d}  rho_1 with blockage {co.rho(K):.4f}")

# faster users forget their position sooner
for u in (1, 2, 5):
    print(f"u={u}: rho_1 at centre = {pearson_rho(net.replace(u=u, M=0, K=300), 25.5, 1):.4f}")
