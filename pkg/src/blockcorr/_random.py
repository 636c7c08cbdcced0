"""Counter-based uniform variates.

Every random number used by the simulators is a pure function of a key and a
tuple of integer counters (realization, user, slot, ...), so results do not
depend on batch sizes, chunking or the order in which workers run.  The mixer
is the splitmix64 finalizer.
"""

import numpy as np

_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

# stream tags
DEST = 1
THINK = 2
INIT = 3
USERS = 4
OBSTACLE_COUNT = 5
OBSTACLE_POSITION = 6
OBSTACLE_LOSS = 7
ACTIVITY = 8
FADING = 9


def _mix(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


def derive_key(*ids):
    """Fold integer ids (scalars or arrays) into a uint64 key array."""
    with np.errstate(over="ignore"):
        h = np.zeros((), dtype=np.uint64)
        for i in ids:
            i = np.asarray(i).astype(np.uint64)
            h = _mix(h + _GOLDEN + _mix(i + _GOLDEN))
    return np.asarray(h, dtype=np.uint64)


def uniform(key, *counters):
    """Uniform variates on the open interval (0, 1), broadcasting over inputs."""
    h = derive_key(key, *counters)
    return ((h >> _S11).astype(np.float64) + 0.5) * 2.0**-53
