import numpy as np


def trial_rng(master_seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent stream determined only by (master seed, trial index, stream)."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(trial), int(stream)]))
