"""Closed-form interference statistics at an off-lattice probe.

All sums run over the N lattice points exactly.  ``y_p`` may be a float or a
:class:`~blockcorr.network.MeasurementPoint`.  Displacement laws default to
the exact chain-derived law of the configuration's mobility model; pass
``law=`` to override (e.g. an identity kernel for a frozen network).
"""

from dataclasses import dataclass
import math

import numpy as np

from .blockage import cross_moment_matrix
from .errors import UndefinedCorrelation, UnsupportedConfiguration
from .mobility import DisplacementLaw, displacement_law, steady_state_pmf
from .network import pathloss

__all__ = [
    "RhoCoefficients",
    "mean_interference",
    "second_moment_interference",
    "std_interference",
    "sigma_spatial",
    "sigma_l_generic",
    "sigma_1_cases",
    "pearson_rho",
    "rho_coefficients",
    "rho_without_blockage",
    "critical_user_count",
]


@dataclass(frozen=True)
class _Profile:
    y: float
    n: np.ndarray
    d: np.ndarray
    g: np.ndarray
    f: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray


def _profile(config, y_p):
    y = config.check_point(y_p)
    n = np.arange(1, config.N + 1)
    d = np.abs(n - y)
    a = config.alpha
    gm = config.gamma
    return _Profile(
        y=y,
        n=n,
        d=d,
        g=pathloss(d, config.pathloss),
        f=steady_state_pmf(config.mobility),
        beta1=np.exp(-a * d * (1 - gm / 2)),
        beta2=np.exp(-a * d * (1 - gm * gm / 3)),
    )


def _first_sum(pr):
    return float(np.sum(pr.beta1 * pr.g * pr.f))


def _square_sum(pr):
    return float(np.sum(pr.beta2 * pr.g**2 * pr.f))


def mean_interference(config, y_p):
    """E[I] = K xi sum_n E[beta_n] g(d_n) f(n)."""
    pr = _profile(config, y_p)
    return config.K * config.xi * _first_sum(pr)


def sigma_spatial(config, y_p):
    """Expected product of blockage-weighted pathloss of two distinct users."""
    pr = _profile(config, y_p)
    C = cross_moment_matrix(config.blockage, pr.y)
    w = pr.g * pr.f
    return float(w @ C @ w)


def _sigma(config, y_p, spatial):
    if spatial:
        return sigma_spatial(config, y_p)
    # users treated as uncorrelated: sigma collapses to the squared mean term
    return _first_sum(_profile(config, y_p)) ** 2


def second_moment_interference(config, y_p, spatial=True):
    """E[I^2] = 2 K xi sum_n E[beta_n^2] g^2 f + K^2 xi^2 sigma.

    With ``spatial=False`` the cross-user term ignores shared obstacles.
    """
    pr = _profile(config, y_p)
    K, xi = config.K, config.xi
    return 2 * K * xi * _square_sum(pr) + K**2 * xi**2 * _sigma(config, y_p, spatial)


def std_interference(config, y_p, spatial=True):
    m = mean_interference(config, y_p)
    var = second_moment_interference(config, y_p, spatial) - m * m
    return math.sqrt(max(var, 0.0))


def _law(config, l, law):
    if law is None:
        return displacement_law(config.mobility, l)
    return law


def sigma_l_generic(config, y_p, law):
    """Expected product of one user's blockage-weighted pathloss ``law.lag`` slots apart.

    The two links of the same user share obstacles exactly as the links of
    two users at the same pair of positions would, since obstacles are static.
    """
    pr = _profile(config, y_p)
    C = cross_moment_matrix(config.blockage, pr.y)
    P = law.kernel
    return float(np.sum((pr.g * pr.f)[:, None] * C * P * pr.g[None, :]))


def sigma_1_cases(config, y_p, law):
    """Lag-one, unit-speed temporal term assembled from its four cases.

    Users left of the probe's lower neighbour, right of its upper neighbour,
    and at either neighbour are summed separately; a step across the probe
    makes the two links independent.
    """
    if law.lag != 1 or (config.u != 1 and not config.mobility.is_static):
        raise UnsupportedConfiguration("the case decomposition covers lag 1 and u = 1 only")
    pr = _profile(config, y_p)
    N, y = config.N, pr.y
    alpha, gm = config.alpha, config.gamma
    r1 = alpha * (1 - gm / 2)
    r2 = alpha * (1 - gm * gm / 3)
    toward = math.exp(alpha * (gm / 2 - gm * gm / 3))
    away = math.exp(-r1)
    n1 = math.floor(y)
    n2 = n1 + 1
    c = y - n1
    cb = 1 - c

    def g(d):
        return float(pathloss(d, config.pathloss))

    def f(n):
        return float(pr.f[n - 1])

    def P(n, k):
        return law.prob(n, k)

    s11 = 0.0
    for n in range(1, n1):
        dn = y - n
        s11 += g(dn) * f(n) * math.exp(-r2 * dn) * (
            P(n, 0) * g(dn) + toward * P(n, 1) * g(dn - 1) + away * P(n, -1) * g(dn + 1)
        )
    s12 = 0.0
    for n in range(n2 + 1, N + 1):
        dn = n - y
        s12 += g(dn) * f(n) * math.exp(-r2 * dn) * (
            P(n, 0) * g(dn) + toward * P(n, -1) * g(dn - 1) + away * P(n, 1) * g(dn + 1)
        )
    s13 = g(c) * f(n1) * math.exp(-r2 * c) * (
        P(n1, 0) * g(c)
        + away * math.exp(r2 * c) * P(n1, 1) * g(cb)
        + away * P(n1, -1) * g(1 + c)
    )
    s14 = g(cb) * f(n2) * math.exp(-r2 * cb) * (
        P(n2, 0) * g(cb)
        + away * P(n2, 1) * g(1 + cb)
        + away * math.exp(r2 * cb) * P(n2, -1) * g(c)
    )
    return s11 + s12 + s13 + s14


@dataclass(frozen=True)
class RhoCoefficients:
    """rho(K) = (c1 + c2 K) / (c3 + c2 K); a single interferer gives c1 / c3."""

    c1: float
    c2: float
    c3: float

    def rho(self, K):
        if K == 1:
            return self.c1 / self.c3
        return (self.c1 + self.c2 * K) / (self.c3 + self.c2 * K)


def rho_coefficients(config, y_p, l, law=None, spatial=True):
    law = _law(config, l, law)
    pr = _profile(config, y_p)
    xi = config.xi
    c1 = xi * sigma_l_generic(config, y_p, law)
    c2 = xi * _sigma(config, y_p, spatial) - xi * _first_sum(pr) ** 2
    c3 = 2 * _square_sum(pr)
    return RhoCoefficients(c1, c2, c3)


def pearson_rho(config, y_p, l, law=None, spatial=True):
    """Correlation coefficient of the interference ``l`` slots apart.

    Evaluated from the moments directly.  ``K = 1`` is read as a lone
    interferer, for which cross-user terms vanish and rho = c1 / c3.

    Raises
    ------
    UndefinedCorrelation
        If the interference has zero variance (no users or no activity).
    """
    law = _law(config, l, law)
    K, xi = config.K, config.xi
    mean = mean_interference(config, y_p)
    second = second_moment_interference(config, y_p, spatial)
    var = second - mean * mean
    if K == 0 or xi == 0 or not var > 0:
        raise UndefinedCorrelation("interference has zero variance")
    sl = sigma_l_generic(config, y_p, law)
    if K == 1:
        pr = _profile(config, y_p)
        return xi * sl / (2 * _square_sum(pr))
    cross = K * xi**2 * sl + K**2 * xi**2 * _sigma(config, y_p, spatial)
    return (cross - mean * mean) / var


def rho_without_blockage(config, y_p, l, law=None):
    """The same coefficient with obstacles removed (independent of K)."""
    return pearson_rho(config.replace(N_o=0), y_p, l, law=law)


def critical_user_count(config, y_p, l, law=None):
    """User density above which blockage raises the correlation.

    Solves (c1 + c2 K) / (c3 + c2 K) = rho_without_blockage for K.  Returns
    ``None`` when the two curves never cross (no obstacles, c2 <= 0, or the
    blocked curve already starts above the unblocked one).
    """
    if config.alpha == 0:
        return None
    law = _law(config, l, law)
    co = rho_coefficients(config, y_p, l, law=law)
    rho0 = rho_without_blockage(config.replace(K=max(config.K, 2)), y_p, l, law=law)
    if not co.c2 > 0 or rho0 >= 1:
        return None
    k_star = (rho0 * co.c3 - co.c1) / (co.c2 * (1 - rho0))
    if not k_star > 0 or not math.isfinite(k_star):
        return None
    return k_star
