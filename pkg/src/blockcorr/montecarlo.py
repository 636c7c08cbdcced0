"""Ensemble simulator for the interference at fixed probes.

Each realization draws a Poisson number of users, one obstacle field that
stays fixed for the whole realization, and stationary trajectories for every
user.  In every slot each user is active with probability ``xi`` and sees
unit-mean Rayleigh (exponential power) fading, independently across users
and slots.  All randomness comes from counter-based streams keyed by
``(seed, realization, user, slot)``, so a realization is reproducible on its
own and the ensemble does not depend on chunking or worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import csv
import logging

import numpy as np
from scipy import stats

from . import _random
from .blockage import link_loss_table, sample_fields
from .errors import DomainError, ValidationError
from .mobility import DisplacementLaw, sample_positions
from .network import NetworkConfig, pathloss

__all__ = [
    "RealizationConfig",
    "InterferenceSeries",
    "EstimatorOutput",
    "run_realization",
    "simulate_ensemble",
    "estimate_statistics",
    "estimate_displacement_kernel",
    "write_series_csv",
]

log = logging.getLogger(__name__)

MIN_CONFIDENT_REALIZATIONS = 30


@dataclass(frozen=True)
class RealizationConfig:
    """What to simulate and where to look.

    ``points`` are probe locations (floats or MeasurementPoints).  Slots
    ``burn_in, ..., burn_in + horizon - 1`` are recorded; ``burn_in``
    defaults to ten times the lattice size.
    """

    network: NetworkConfig
    points: tuple
    burn_in: int = None
    horizon: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", 10 * self.network.N)
        problems = []
        if self.burn_in < 0:
            problems.append(f"burn_in must be non-negative, got {self.burn_in}")
        if self.horizon < 1:
            problems.append(f"horizon must be at least 1, got {self.horizon}")
        for y in self.points:
            try:
                self.network.check_point(y)
            except ValidationError as exc:
                problems.extend(exc.problems)
        if problems:
            raise ValidationError(problems)

    @property
    def slots(self):
        return np.arange(self.burn_in, self.burn_in + self.horizon)


@dataclass(frozen=True, eq=False)
class InterferenceSeries:
    """``values[p, t]``: interference at probe ``p`` in slot ``slots[t]``."""

    points: tuple
    slots: np.ndarray
    values: np.ndarray


def _realization_batch(config, index, slots, shared_field=False):
    """Interference for realizations ``index`` at ``slots``: array (R, P, S)."""
    net = config.network
    N = net.N
    seed = config.seed
    index = np.asarray(index, dtype=np.int64)
    R, P, S = len(index), len(config.points), len(slots)
    out = np.zeros((R, P, S))

    rkey = _random.derive_key(seed, index)
    if net.K > 0:
        counts = stats.poisson.ppf(_random.uniform(rkey, _random.USERS), net.K).astype(np.int64)
    else:
        counts = np.zeros(R, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return out
    owner = np.repeat(np.arange(R), counts)
    first = np.concatenate([[0], np.cumsum(counts)[:-1]])
    user = np.arange(total) - first[owner]
    ukey = _random.derive_key(seed, index[owner], user)

    x = sample_positions(net.mobility, ukey, slots)  # (U, S)
    field_index = np.zeros(R, dtype=np.int64) if shared_field else index
    fields = sample_fields(net.blockage, N, seed, field_index)
    ys = np.array(config.points)
    gain = pathloss(np.arange(1, N + 1)[None, :] - ys[:, None], net.pathloss)  # (P, N)

    s = np.asarray(slots, dtype=np.int64)[None, :]
    active = _random.uniform(ukey[:, None], _random.ACTIVITY, s) < net.xi
    fading = -np.log(_random.uniform(ukey[:, None], _random.FADING, s))
    power = np.where(active, fading, 0.0)  # (U, S)

    nonempty = counts > 0
    starts = first[nonempty]
    for p in range(P):
        beta = link_loss_table(fields, ys[p : p + 1], N)[:, 0, :]  # (R, N)
        contrib = power * beta[owner[:, None], x - 1] * gain[p][x - 1]
        out[nonempty, p, :] = np.add.reduceat(contrib, starts, axis=0)
    return out


def _chunks(n, size):
    return [np.arange(i, min(i + size, n)) for i in range(0, n, size)]


def _chunk_size(config):
    users = max(config.network.K, 1.0)
    return int(max(16, min(2000, 60000 / users)))


def simulate_ensemble(config, n_realizations, slots=None, jobs=1, shared_field=False):
    """Interference for realizations ``0 .. n_realizations - 1``.

    Returns an array of shape (n_realizations, points, slots).  With
    ``shared_field`` every realization reuses one obstacle field, which
    averages over users but not over obstacles; it exists to expose that bias.
    """
    slots = config.slots if slots is None else np.asarray(slots, dtype=np.int64)
    parts = _chunks(n_realizations, _chunk_size(config))
    if jobs > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_realization_batch, [config] * len(parts), parts,
                         [slots] * len(parts), [shared_field] * len(parts))
            )
    else:
        results = [_realization_batch(config, idx, slots, shared_field) for idx in parts]
    if not results:
        return np.zeros((0, len(config.points), len(slots)))
    return np.concatenate(results, axis=0)


def run_realization(config, index=0):
    """One realization's interference series over the recorded slots."""
    values = _realization_batch(config, np.array([index]), config.slots)[0]
    return InterferenceSeries(config.points, config.slots, values)


@dataclass(frozen=True, eq=False)
class EstimatorOutput:
    """Ensemble estimates per probe with batch-means standard errors.

    ``rho`` and ``rho_se`` map each lag to an array over probes.
    """

    points: tuple
    n_realizations: int
    n_batches: int
    mean: np.ndarray
    mean_se: np.ndarray
    std: np.ndarray
    std_se: np.ndarray
    rho: dict = field(default_factory=dict)
    rho_se: dict = field(default_factory=dict)
    low_confidence: bool = False


def _pearson(a, b):
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    den = np.sqrt((a * a).sum(axis=0) * (b * b).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        return (a * b).sum(axis=0) / den


def _default_batches(R):
    if R >= 100 * MIN_CONFIDENT_REALIZATIONS:
        return 100
    return max(2, min(MIN_CONFIDENT_REALIZATIONS, R // 2))


def _batch_se(values, n_batches, stat):
    groups = np.array_split(np.arange(len(values)), n_batches)
    per = np.array([stat(values[g]) for g in groups])
    return per.std(axis=0, ddof=1) / np.sqrt(n_batches)


def summarize(samples, lags, points=(), n_batches=None):
    """Estimate mean, std and lagged correlation from ensemble samples.

    ``samples[r, p, 0]`` is the reference slot and ``samples[r, p, j]`` the
    slot ``lags[j - 1]`` later (lag 0 means the reference slot itself).
    Standard errors come from batch means over groups of realizations.
    """
    R = samples.shape[0]
    if R < 2:
        raise DomainError("at least two realizations are needed")
    n_batches = n_batches or _default_batches(R)
    x0 = samples[:, :, 0]
    mean_se = _batch_se(x0, n_batches, lambda v: v.mean(axis=0))
    std_se = _batch_se(x0, n_batches, lambda v: v.std(axis=0, ddof=1))
    rho, rho_se = {}, {}
    for j, lag in enumerate(lags):
        xl = x0 if lag == 0 else samples[:, :, j + 1]
        pair = np.stack([x0, xl], axis=-1)
        rho[lag] = _pearson(x0, xl)
        rho_se[lag] = _batch_se(pair, n_batches, lambda v: _pearson(v[..., 0], v[..., 1]))
    low = R < MIN_CONFIDENT_REALIZATIONS
    if low:
        log.warning("only %d realizations; estimates are low-confidence", R)
    return EstimatorOutput(
        points=tuple(points),
        n_realizations=R,
        n_batches=n_batches,
        mean=x0.mean(axis=0),
        mean_se=mean_se,
        std=x0.std(axis=0, ddof=1),
        std_se=std_se,
        rho=rho,
        rho_se=rho_se,
        low_confidence=low,
    )


def estimate_statistics(config, n_realizations, lags=(1,), jobs=1, n_batches=None,
                        shared_field=False):
    """Ensemble mean, std and lag correlations at every probe.

    Interference is compared across independent realizations at slot
    ``burn_in`` and ``burn_in + lag``.
    """
    lags = [int(l) for l in lags]
    if any(l < 0 for l in lags):
        raise DomainError("lags must be non-negative")
    if lags and config.horizon < max(lags) + 1:
        raise ValidationError(f"horizon {config.horizon} too short for lag {max(lags)}")
    slots = np.array([config.burn_in] + [config.burn_in + l for l in lags])
    samples = simulate_ensemble(config, n_realizations, slots, jobs=jobs, shared_field=shared_field)
    return summarize(samples, lags, config.points, n_batches)


def estimate_displacement_kernel(spec, l, samples, seed=0):
    """Empirical displacement law from ``samples`` independent stationary users.

    Rows for positions that were never observed are left as NaN and listed
    in ``flagged_rows``.
    """
    if samples < 100_000:
        raise DomainError("at least 1e5 samples are required")
    N = spec.N
    counts = np.zeros((N, N), dtype=np.int64)
    for idx in _chunks(samples, 500_000):
        x = sample_positions(spec, _random.derive_key(seed, idx), np.array([0, l]))
        counts += np.bincount((x[:, 0] - 1) * N + x[:, 1] - 1, minlength=N * N).reshape(N, N)
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        kernel = counts / totals
    flagged = tuple(int(n) + 1 for n in np.flatnonzero(totals[:, 0] == 0))
    return DisplacementLaw(spec, int(l), kernel, counts=counts, flagged_rows=flagged)


def write_series_csv(path, series):
    """Dump interference series as (realization, slot, point_index, interference)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["realization", "slot", "point_index", "interference"])
        for r, s in enumerate(series):
            for t, slot in enumerate(s.slots):
                for p in range(len(s.points)):
                    w.writerow([r, int(slot), p, repr(float(s.values[p, t]))])
