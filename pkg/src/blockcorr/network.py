"""Network-level configuration shared by the analytics and the simulator."""

from dataclasses import dataclass, fields, replace
import math

import numpy as np

from .blockage import BlockageSpec
from .errors import ValidationError
from .mobility import MobilitySpec

__all__ = [
    "PathlossSpec",
    "PopulationSpec",
    "MeasurementPoint",
    "NetworkConfig",
    "pathloss",
]


@dataclass(frozen=True)
class PathlossSpec:
    """Pathloss ``g(d) = 1 / (epsilon + d**a)``."""

    a: float = 2.0
    epsilon: float = 0.5

    def __post_init__(self):
        problems = []
        if not self.a > 0:
            problems.append(f"pathloss exponent a must be positive, got {self.a}")
        if not self.epsilon > 0:
            problems.append(f"epsilon must be positive, got {self.epsilon}")
        if problems:
            raise ValidationError(problems)

    def __call__(self, d):
        return pathloss(d, self)


def pathloss(d, spec):
    return 1.0 / (spec.epsilon + np.abs(d) ** spec.a)


@dataclass(frozen=True)
class PopulationSpec:
    """Poisson number of users with mean ``K``, each active w.p. ``xi``."""

    K: float = 50
    xi: float = 1.0
    P_t: float = 1.0

    def __post_init__(self):
        problems = []
        if not self.K >= 0:
            problems.append(f"K must be non-negative, got {self.K}")
        if not 0 <= self.xi <= 1:
            problems.append(f"xi must lie in [0, 1], got {self.xi}")
        if self.P_t != 1.0:
            problems.append("transmit power is fixed to 1")
        if problems:
            raise ValidationError(problems)


@dataclass(frozen=True)
class MeasurementPoint:
    """Probe at ``y_p = n + c`` with ``c`` strictly inside (0, 1)."""

    n: int
    c: float = 0.5

    def __post_init__(self):
        problems = []
        if int(self.n) != self.n or self.n < 1:
            problems.append(f"n must be a positive integer, got {self.n}")
        if not 0 < self.c < 1:
            problems.append(f"c must lie in (0, 1), got {self.c}")
        if problems:
            raise ValidationError(problems)

    @property
    def y(self):
        return self.n + self.c

    def __float__(self):
        return float(self.y)


@dataclass(frozen=True)
class NetworkConfig:
    """All model parameters in one flat record.

    Defaults are those of the reference scenario: 50 lattice points, 50
    users, continuous activity, ``a = 2``, ``epsilon = 0.5``, think time up
    to 5 slots and ``gamma = 0.5``.
    """

    N: int = 50
    K: float = 50
    xi: float = 1.0
    u: int = 1
    M: float = 5
    N_o: float = 10
    gamma: float = 0.5
    a: float = 2.0
    epsilon: float = 0.5
    static: bool = False

    def __post_init__(self):
        problems = []
        for make in (self._mobility, self._blockage, self._pathloss, self._population):
            try:
                make()
            except ValidationError as exc:
                problems.extend(exc.problems)
        if problems:
            raise ValidationError(problems)

    def _mobility(self):
        return MobilitySpec(self.N, self.u, self.M, self.static)

    def _blockage(self):
        return BlockageSpec(self.N_o, self.gamma, self.N)

    def _pathloss(self):
        return PathlossSpec(self.a, self.epsilon)

    def _population(self):
        return PopulationSpec(self.K, self.xi)

    mobility = property(_mobility)
    blockage = property(_blockage)
    pathloss = property(_pathloss)
    population = property(_population)

    @property
    def alpha(self):
        return self.N_o / (self.N - 1)

    def replace(self, **changes):
        return replace(self, **changes)

    def default_points(self, c=0.5):
        return [MeasurementPoint(n, c) for n in range(1, self.N // 2 + 1)]

    def check_point(self, y_p):
        """Validate a probe location and return it as a float."""
        y = float(y_p)
        if not 1 < y < self.N or y == math.floor(y):
            raise ValidationError(f"probe must lie strictly between lattice points in (1, {self.N}), got {y}")
        return y

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]
