# How much power survives a link through random obstacles?
#
# Obstacles form a Poisson process on [1, N]; each keeps a uniform fraction
# of the power in [0, gamma].  We draw quenched fields and compare empirical
# link-loss moments with their closed forms.

import numpy as np

from blockcorr import BlockageSpec, beta_moment, product_loss_pdf, spatial_cross_moment
from blockcorr.blockage import link_loss_table, sample_fields

spec = BlockageSpec(N_o=10, gamma=0.5, N=50)
print(f"obstacle density alpha = {spec.alpha:.4f} per unit length")

y = 20.5
fields = sample_fields(spec, spec.N, seed=0, index=np.arange(200_000))
beta = link_loss_table(fields, [y], spec.N)[:, 0, :]

for n in (18, 14, 5):
    d = abs(n - y)
    for s in (1, 2):
        emp = (beta[:, n - 1] ** s).mean()
        print(f"d={d:5.1f} s={s}: simulated {emp:.5f}  closed form {beta_moment(s, d, spec):.5f}")

# two users on the same side share the obstacles on the shorter link
n, m = 14, 5
emp = (beta[:, n - 1] * beta[:, m - 1]).mean()
print(f"same side E[b_n b_m]: simulated {emp:.5f}  closed form "
      f"{spatial_cross_moment(abs(n - y), abs(m - y), True, spec):.5f}")
n, m = 14, 30
emp = (beta[:, n - 1] * beta[:, m - 1]).mean()
print(f"opposite sides E[b_n b_m]: simulated {emp:.5f}  closed form "
      f"{spatial_cross_moment(abs(n - y), abs(m - y), False, spec):.5f}")

# given three obstacles on a link, the retained fraction has a log-power density
grid = np.linspace(1e-4, 0.125, 6)
print("density of a product of three U(0, 0.5):", np.round(product_loss_pdf(3, 0.5, grid), 2))
