# Checking the analytics against an independent ensemble simulation.
#
# Each realization draws its own users, obstacle field, activity and fading;
# statistics are taken across realizations at a fixed slot, with batch-means
# standard errors.

from blockcorr import NetworkConfig, RealizationConfig, estimate_statistics, mean_interference, pearson_rho
from blockcorr import std_interference

net = NetworkConfig(N=50, K=50, M=5, N_o=10, gamma=0.5)
points = (1.5, 12.5, 25.5)
rc = RealizationConfig(net, points, horizon=3, seed=7)
est = estimate_statistics(rc, 5000, lags=(1, 2))

for j, y in enumerate(points):
    print(f"y_p={y}")
    print(f"  mean  sim {est.mean[j]:.4f} +- {est.mean_se[j]:.4f}   analytic {mean_interference(net, y):.4f}")
    print(f"  std   sim {est.std[j]:.4f} +- {est.std_se[j]:.4f}   analytic {std_interference(net, y):.4f}")
    for l in (1, 2):
        print(f"  rho_{l} sim {est.rho[l][j]:.4f} +- {est.rho_se[l][j]:.4f}   "
              f"analytic {pearson_rho(net, y, l):.4f}")
