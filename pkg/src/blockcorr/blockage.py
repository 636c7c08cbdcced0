"""Poisson obstacle fields and the statistics of link penetration loss.

Obstacles are points of a Poisson process on the segment [1, N] with mean
count ``N_o``.  Each obstacle keeps a fraction of the power that crosses it,
drawn uniformly on [0, gamma]; a link's retained fraction ``beta`` is the
product over the obstacles strictly inside it.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import stats

from . import _random
from .errors import DomainError, ValidationError

__all__ = [
    "BlockageSpec",
    "ObstacleField",
    "ObstacleFields",
    "sample_field",
    "sample_fields",
    "link_loss",
    "product_loss_pdf",
    "beta_moment",
    "spatial_cross_moment",
    "cross_moment_matrix",
]


@dataclass(frozen=True)
class BlockageSpec:
    """Obstacle process on a lattice of ``N`` points.

    ``N_o`` is the mean number of obstacles on [1, N] and ``gamma`` the
    largest fraction of power an obstacle lets through.
    """

    N_o: float
    gamma: float
    N: int

    def __post_init__(self):
        problems = []
        if not self.N_o >= 0:
            problems.append(f"N_o must be non-negative, got {self.N_o}")
        if not 0 <= self.gamma <= 1:
            problems.append(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.N < 2:
            problems.append(f"N must be at least 2, got {self.N}")
        if problems:
            raise ValidationError(problems)

    @property
    def alpha(self):
        """Obstacle density per unit length."""
        return self.N_o / (self.N - 1)


@dataclass(frozen=True, eq=False)
class ObstacleField:
    """One realization of the obstacle process, fixed once drawn."""

    positions: np.ndarray
    losses: np.ndarray

    def __post_init__(self):
        if len(self.positions) != len(self.losses):
            raise ValidationError("positions and losses must have equal length")

    def __len__(self):
        return len(self.positions)


def sample_field(spec, N, seed):
    """Draw one obstacle field on [1, N]; reproducible for a given seed."""
    fields = sample_fields(spec, N, seed, np.array([0]))
    n = fields.counts[0]
    return ObstacleField(fields.positions[0, :n].copy(), fields.losses[0, :n].copy())


@dataclass(frozen=True, eq=False)
class ObstacleFields:
    """A batch of fields padded to a common width.

    Padding slots sit at position ``nan`` with loss 1 so they never block.
    """

    counts: np.ndarray
    positions: np.ndarray
    losses: np.ndarray

    def __len__(self):
        return len(self.counts)

    def field(self, i):
        n = self.counts[i]
        return ObstacleField(self.positions[i, :n], self.losses[i, :n])


def sample_fields(spec, N, seed, index):
    """Draw the fields labelled ``index`` (int array) under ``seed``.

    Field ``i`` depends only on ``(seed, i)``, so any subset of a large
    ensemble can be regenerated on its own.
    """
    index = np.asarray(index, dtype=np.int64)
    key = _random.derive_key(seed, index)
    if spec.N_o == 0:
        counts = np.zeros(len(index), dtype=np.int64)
    else:
        u = _random.uniform(key, _random.OBSTACLE_COUNT)
        counts = stats.poisson.ppf(u, spec.N_o).astype(np.int64)
    width = int(counts.max()) if len(counts) else 0
    j = np.arange(width)
    kk = key[:, None]
    pos = 1.0 + (N - 1) * _random.uniform(kk, _random.OBSTACLE_POSITION, j)
    loss = spec.gamma * _random.uniform(kk, _random.OBSTACLE_LOSS, j)
    pad = j[None, :] >= counts[:, None]
    pos = np.where(pad, np.nan, pos)
    loss = np.where(pad, 1.0, loss)
    return ObstacleFields(counts, pos, loss)


def link_loss(field, x, y):
    """Retained power fraction on the link between ``x`` and ``y``.

    Product of the losses of obstacles strictly between the endpoints; 1 for
    an unobstructed link.
    """
    lo, hi = min(x, y), max(x, y)
    inside = (field.positions > lo) & (field.positions < hi)
    return float(np.prod(field.losses[inside]))


def link_loss_table(fields, points, N):
    """``beta[f, p, n - 1]`` for every field, measurement point and lattice point.

    ``points`` are the (off-lattice) probe coordinates.
    """
    points = np.asarray(points, dtype=float)
    n = np.arange(1, N + 1, dtype=float)
    lo = np.minimum(n[None, :], points[:, None])
    hi = np.maximum(n[None, :], points[:, None])
    pos = fields.positions[:, None, None, :]
    inside = (pos > lo[None, :, :, None]) & (pos < hi[None, :, :, None])
    return np.where(inside, fields.losses[:, None, None, :], 1.0).prod(axis=-1)


def product_loss_pdf(n_o, gamma, beta):
    """Density of the product of ``n_o`` i.i.d. uniforms on [0, gamma].

    Zero outside (0, gamma**n_o].  For ``gamma = 0`` the product is the point
    mass at 0, returned as ``inf`` at 0 and 0 elsewhere.
    """
    if int(n_o) != n_o or n_o < 1:
        raise DomainError(f"n_o must be a positive integer, got {n_o}")
    if not 0 <= gamma <= 1:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    beta = np.asarray(beta, dtype=float)
    if gamma == 0:
        out = np.where(beta == 0, np.inf, 0.0)
        return float(out) if out.ndim == 0 else out
    top = gamma**n_o
    inside = (beta > 0) & (beta <= top)
    safe = np.where(inside, beta, top)
    dens = np.log(top / safe) ** (n_o - 1) / (top * math.factorial(n_o - 1))
    out = np.where(inside, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def beta_moment(s, d, spec):
    """E[beta**s] for a link of length ``d``: exp(-alpha d (1 - gamma**s / (1 + s)))."""
    if not s > -1:
        raise DomainError(f"moment order must exceed -1, got {s}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("link length must be non-negative")
    out = np.exp(-spec.alpha * d * (1 - spec.gamma**s / (1 + s)))
    return float(out) if out.ndim == 0 else out


def _rates(spec):
    g = spec.gamma
    return spec.alpha * (1 - g / 2), spec.alpha * (1 - g * g / 3)


def spatial_cross_moment(d_n, d_m, same_side, spec):
    """E[beta_n beta_m] for two links ending at the same probe.

    On the same side the shorter link is shared by both: it contributes the
    second-moment rate and only the excess length the first-moment rate.  On
    opposite sides the links see disjoint obstacles.
    """
    d_n = np.asarray(d_n, dtype=float)
    d_m = np.asarray(d_m, dtype=float)
    if np.any(d_n < 0) or np.any(d_m < 0):
        raise DomainError("link lengths must be non-negative")
    r1, r2 = _rates(spec)
    same = np.exp(-(r2 * np.minimum(d_n, d_m) + r1 * np.abs(d_m - d_n)))
    apart = np.exp(-r1 * (d_n + d_m))
    out = np.where(same_side, same, apart)
    return float(out) if out.ndim == 0 else out


def cross_moment_matrix(spec, y_p):
    """E[beta_n beta_m] for all lattice pairs (n, m) seen from ``y_p``."""
    n = np.arange(1, spec.N + 1, dtype=float)
    d = np.abs(n - y_p)
    side = np.sign(n - y_p)
    return spatial_cross_moment(d[:, None], d[None, :], side[:, None] == side[None, :], spec)
