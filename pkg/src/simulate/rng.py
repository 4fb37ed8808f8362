"""Counter-based random streams: one independent Philox stream per trial."""

import numpy as np

# Trial index goes in the top 64-bit word of the 256-bit counter, so draws
# within a trial (which advance the low word) never reach the next trial.
_TRIAL_SHIFT = 192


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    if seed < 0 or trial_index < 0:
        raise ValueError("seed and trial index must be >= 0")
    return np.random.Generator(
        np.random.Philox(key=seed, counter=trial_index << _TRIAL_SHIFT)
    )


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for auxiliary experiments keyed off the master seed."""
    return np.random.Generator(
        np.random.Philox(key=seed, counter=(stream << _TRIAL_SHIFT) | (1 << 128))
    )
