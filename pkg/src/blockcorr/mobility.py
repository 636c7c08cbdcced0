"""Random waypoint mobility on the lattice {1, ..., N}.

A user picks a destination uniformly among the other N - 1 lattice points,
walks towards it at ``u`` lattice points per slot, pauses for a think time
drawn uniformly from {0, ..., M} slots and starts over.  Movement is at
constant speed: a slot is split into ``u`` unit sub-steps, and a user that
reaches its destination in the middle of a slot spends the remaining sub-steps
thinking or already heading to the next destination.  For ``u = 1`` this is
the usual slot-by-slot walk.

The module offers the closed-form steady-state PDF, an exact Markov chain
over the full hidden state (position, destination, remaining think time), the
displacement law derived from that chain, and a trajectory sampler.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _random
from .errors import ConvergenceError, DomainError, ValidationError

__all__ = [
    "MobilitySpec",
    "FullState",
    "MobilityChain",
    "DisplacementLaw",
    "steady_state_pdf",
    "steady_state_pmf",
    "think_probability",
    "build_full_chain",
    "stationary_distribution",
    "displacement_law",
    "simulate_trajectory",
    "sample_positions",
]


@dataclass(frozen=True)
class MobilitySpec:
    """Parameters of the walk.

    Parameters
    ----------
    N : int
        Number of lattice points (>= 3).
    u : int
        Speed in lattice points per slot, 1 <= u < N.
    M : int or float
        Maximum think time in slots.  ``math.inf`` gives the static limit
        where every user stays put and the PDF is uniform.
    static : bool
        Freeze users at their steady-state positions while keeping the PDF
        of the mobile network (a static network with the same user density).
    """

    N: int
    u: int = 1
    M: float = 0
    static: bool = False

    def __post_init__(self):
        problems = []
        if int(self.N) != self.N or self.N < 3:
            problems.append(f"N must be an integer >= 3, got {self.N}")
        if int(self.u) != self.u or self.u < 1:
            problems.append(f"u must be an integer >= 1, got {self.u}")
        elif self.u >= self.N:
            problems.append(f"u must be smaller than N, got u={self.u}, N={self.N}")
        if not (self.M == math.inf or (int(self.M) == self.M and self.M >= 0)):
            problems.append(f"M must be a non-negative integer or inf, got {self.M}")
        if problems:
            raise ValidationError(problems)

    @property
    def p(self):
        """Long-run fraction of time a user spends thinking."""
        if self.M == math.inf:
            return 1.0
        half = self.M / 2
        return half / (half + (self.N + 1) / (3 * self.u))

    @property
    def is_static(self):
        return self.static or self.M == math.inf


def steady_state_pmf(spec):
    """Steady-state probabilities of all lattice points as an array of length N."""
    N, p = spec.N, spec.p
    n = np.arange(1, N + 1, dtype=float)
    travel = (3 * N * (2 * n - 1) - 6 * n * (n - 1) - 3) / (N * (N**2 - 1))
    return p / N + (1 - p) * travel


def _check_point(spec, n):
    if int(n) != n or not 1 <= n <= spec.N:
        raise DomainError(f"lattice point must be in 1..{spec.N}, got {n}")


def steady_state_pdf(spec, n):
    """Probability that a user sits at lattice point ``n`` in steady state."""
    _check_point(spec, n)
    return float(steady_state_pmf(spec)[int(n) - 1])


def think_probability(spec, n):
    """Probability that a user observed at ``n`` is thinking there."""
    _check_point(spec, n)
    return spec.p / (spec.N * steady_state_pdf(spec, n))


@dataclass(frozen=True)
class FullState:
    """Hidden state that makes the walk Markovian.

    ``think_remaining`` counts sub-steps (1/u of a slot) the user will still
    stay at ``position``; it is only non-zero when the user is at its
    destination.
    """

    position: int
    destination: int
    think_remaining: int = 0

    def __post_init__(self):
        if self.think_remaining < 0:
            raise DomainError("think_remaining must be non-negative")
        if self.think_remaining > 0 and self.position != self.destination:
            raise DomainError("a thinking user must be at its destination")


@dataclass(frozen=True, eq=False)
class MobilityChain:
    """Sub-step transition matrix over the reachable full states.

    ``states`` has one row (position, destination, think_remaining) per state
    and ``transition`` is the row-stochastic matrix of one sub-step; a slot is
    ``spec.u`` sub-steps.
    """

    spec: MobilitySpec
    states: np.ndarray
    transition: sp.csr_matrix

    def __len__(self):
        return len(self.states)

    @property
    def positions(self):
        return self.states[:, 0]

    def index_of(self, state):
        hit = np.flatnonzero(
            (self.states[:, 0] == state.position)
            & (self.states[:, 1] == state.destination)
            & (self.states[:, 2] == state.think_remaining)
        )
        if hit.size == 0:
            raise KeyError(state)
        return int(hit[0])

    def state(self, i):
        return FullState(*(int(v) for v in self.states[i]))

    def slot_transition(self):
        """Transition matrix of one full slot (``u`` sub-steps)."""
        T = self.transition
        out = T
        for _ in range(self.spec.u - 1):
            out = out @ T
        return out.tocsr()


def build_full_chain(spec):
    """Enumerate reachable full states and their sub-step transitions."""
    if spec.is_static:
        raise DomainError("a static network has no mobility chain")
    N, u, M = spec.N, spec.u, int(spec.M)
    index = {}
    order = []

    def sid(s):
        i = index.get(s)
        if i is None:
            i = index[s] = len(order)
            order.append(s)
        return i

    rows, cols, vals = [], [], []
    think_p = 1.0 / (M + 1)
    sid((1, 1, 0))
    k = 0
    while k < len(order):
        x, d, r = order[k]
        if r > 0:
            targets = [((x, d, r - 1), 1.0)]
        else:
            dests = [d] if x != d else [y for y in range(1, N + 1) if y != x]
            w = 1.0 / len(dests)
            targets = []
            for dest in dests:
                nx = x + (1 if dest > x else -1)
                if nx == dest:
                    targets.extend(((nx, dest, t * u), w * think_p) for t in range(M + 1))
                else:
                    targets.append(((nx, dest, 0), w))
        for s, w in targets:
            rows.append(k)
            cols.append(sid(s))
            vals.append(w)
        k += 1
    S = len(order)
    T = sp.csr_matrix((vals, (rows, cols)), shape=(S, S))
    T.sum_duplicates()
    return MobilityChain(spec, np.array(order, dtype=np.int64), T)


def stationary_distribution(chain, tol=1e-12, max_iter=20):
    """Stationary distribution of the sub-step chain.

    Solved directly with a sparse LU factorization and polished by iterative
    refinement until the L1 residual ``||pi T - pi||`` drops below ``tol``.
    The result is also stationary for the slot chain.

    Raises
    ------
    ConvergenceError
        If the residual is still above ``tol`` after ``max_iter`` refinements.
    """
    T = chain.transition
    S = T.shape[0]
    A = (T.T - sp.identity(S, format="csr")).tolil()
    A[0, :] = np.ones(S)
    solve = spla.factorized(A.tocsc())
    b = np.zeros(S)
    b[0] = 1.0
    pi = solve(b)

    def residual(x):
        return np.abs(T.T @ x - x).sum() + abs(x.sum() - 1.0)

    res = residual(pi)
    for _ in range(max_iter):
        if res < tol:
            break
        r = b - A @ pi
        pi = pi + solve(r)
        res = residual(pi)
    else:
        if res >= tol:
            raise ConvergenceError("stationary solve did not converge", res)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@lru_cache(maxsize=64)
def _chain_and_stationary(spec):
    chain = build_full_chain(spec)
    return chain, stationary_distribution(chain)


@dataclass(frozen=True, eq=False)
class DisplacementLaw:
    """Conditional law of the position ``lag`` slots ahead.

    ``kernel[n - 1, m - 1]`` is the probability of being at ``m`` after
    ``lag`` slots given position ``n`` now.  Empirical kernels may carry
    ``flagged_rows`` (rows with no observations, left as NaN) and ``counts``.
    """

    spec: MobilitySpec
    lag: int
    kernel: np.ndarray
    counts: np.ndarray = None
    flagged_rows: tuple = ()

    def prob(self, n, k):
        """P(n + k, lag) for a user currently at ``n``."""
        m = n + k
        if not 1 <= m <= self.spec.N:
            return 0.0
        return float(self.kernel[n - 1, m - 1])

    @classmethod
    def identity(cls, spec, lag=1):
        return cls(spec, lag, np.eye(spec.N))

    def to_rows(self):
        """(n, k, probability) for every entry with non-zero probability."""
        N = self.spec.N
        out = []
        for n in range(1, N + 1):
            for m in range(1, N + 1):
                v = self.kernel[n - 1, m - 1]
                if v != 0.0:
                    out.append((n, m - n, float(v)))
        return out

    def to_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "k", "probability"])
            for n, k, v in self.to_rows():
                w.writerow([n, k, repr(v)])


def _position_indicator(chain):
    S = len(chain)
    return sp.csr_matrix(
        (np.ones(S), (np.arange(S), chain.positions - 1)), shape=(S, chain.spec.N)
    )


@lru_cache(maxsize=128)
def displacement_law(spec, l):
    """Exact displacement law for lag ``l`` slots.

    The stationary full-state distribution is conditioned on each position
    and pushed forward ``l * u`` sub-steps through the chain.
    """
    if int(l) != l or l < 1:
        raise DomainError(f"lag must be a positive integer, got {l}")
    if spec.is_static:
        return DisplacementLaw.identity(spec, l)
    chain, pi = _chain_and_stationary(spec)
    E = _position_indicator(chain)
    # row n of W: stationary distribution conditioned on position n
    W = (E.multiply(pi[:, None])).T.toarray()
    W /= W.sum(axis=1, keepdims=True)
    TT = chain.transition.T.tocsr()
    for _ in range(l * spec.u):
        W = (TT @ W.T).T
    K = np.asarray(W @ E.toarray())
    K /= K.sum(axis=1, keepdims=True)
    return DisplacementLaw(spec, int(l), K)


def _initial_states(spec, keys):
    """Draw stationary full states for walkers identified by ``keys``."""
    U = _random.uniform(keys, _random.INIT)
    if spec.is_static:
        cdf = np.cumsum(steady_state_pmf(spec))
        x = np.minimum(np.searchsorted(cdf, U * cdf[-1]), spec.N - 1) + 1
        return x, x.copy(), np.zeros_like(x)
    chain, pi = _chain_and_stationary(spec)
    cdf = np.cumsum(pi)
    i = np.minimum(np.searchsorted(cdf, U * cdf[-1]), len(pi) - 1)
    s = chain.states[i]
    return s[:, 0], s[:, 1], s[:, 2]


def _legs(spec, keys, first, count):
    """Destination offsets and pauses of legs ``first .. first + count - 1``.

    A leg starts at ``a``, walks to ``b`` in ``|b - a|`` sub-steps and then
    thinks ``pause`` sub-steps.  Leg 0 continues the initial state.
    """
    N, u, M = spec.N, spec.u, int(spec.M)
    j = np.arange(first, first + count, dtype=np.int64)
    kk = keys[:, None]
    offsets = 1 + np.floor(_random.uniform(kk, _random.DEST, j) * (N - 1)).astype(np.int64)
    pauses = u * np.floor(_random.uniform(kk, _random.THINK, j) * (M + 1)).astype(np.int64)
    return offsets, pauses


def _leg_table(spec, keys, horizon):
    """Start sub-step, start point, end point of every leg covering ``horizon``."""
    x0, d0, r0 = _initial_states(spec, keys)
    W = len(keys)
    mean_leg = (spec.N + 1) / 3 + spec.u * spec.M / 2
    block = int(math.ceil(horizon / mean_leg * 1.25)) + 8
    offs, pauses = _legs(spec, keys, 0, block)
    while True:
        # leg 0 replays the initial state; later legs draw fresh destinations
        offs[:, 0] = 0
        ends = np.empty_like(offs)
        ends[:, 0] = d0
        ends[:, 1:] = ((d0[:, None] - 1 + np.cumsum(offs[:, 1:], axis=1)) % spec.N) + 1
        starts = np.empty_like(ends)
        starts[:, 0] = x0
        starts[:, 1:] = ends[:, :-1]
        p = pauses.copy()
        p[:, 0] = np.where(x0 == d0, r0, pauses[:, 0])
        length = np.abs(ends - starts) + p
        t_start = np.zeros_like(length)
        t_start[:, 1:] = np.cumsum(length[:, :-1], axis=1)
        if W == 0 or (t_start[:, -1] + length[:, -1]).min() > horizon:
            return t_start, starts, ends
        more_o, more_p = _legs(spec, keys, offs.shape[1], block)
        offs = np.concatenate([offs, more_o], axis=1)
        pauses = np.concatenate([pauses, more_p], axis=1)


def sample_positions(spec, keys, slots):
    """Positions of independent stationary walkers at the given slots.

    Parameters
    ----------
    keys : uint64 array, shape (W,)
        One counter-based key per walker; a walker's path depends only on
        its key.
    slots : int array, shape (Q,)
        Non-negative slot indices.

    Returns
    -------
    positions : int array, shape (W, Q)
    """
    keys = np.atleast_1d(np.asarray(keys, dtype=np.uint64))
    slots = np.asarray(slots, dtype=np.int64)
    if spec.is_static:
        x0, _, _ = _initial_states(spec, keys)
        return np.repeat(x0[:, None], len(slots), axis=1)
    ticks = slots * spec.u
    horizon = int(ticks.max()) if ticks.size else 0
    t_start, a, b = _leg_table(spec, keys, horizon)
    W, L = t_start.shape
    span = max(int(t_start.max()), horizon) + 1
    flat = (t_start + np.arange(W)[:, None] * span).ravel()
    q = ticks[None, :] + np.arange(W)[:, None] * span
    j = np.searchsorted(flat, q, side="right") - 1
    rows = np.arange(W)[:, None]
    j_local = j - rows * L
    ts, aa, bb = t_start[rows, j_local], a[rows, j_local], b[rows, j_local]
    step = np.minimum(ticks[None, :] - ts, np.abs(bb - aa))
    return aa + np.sign(bb - aa) * step


def simulate_trajectory(spec, seed, T):
    """Stationary position sequence of one user over ``T`` slots."""
    if T < 1:
        raise DomainError("T must be at least 1")
    key = _random.derive_key(seed)
    return sample_positions(spec, key[None], np.arange(T))[0]
