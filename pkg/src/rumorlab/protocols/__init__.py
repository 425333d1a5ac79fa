from .common import SpreadState, SpreadTrace
from .derandomized import Protocol2Config, run_protocol2
from .goodpair import (AveragingRun, GoodPairRound, Protocol5Config, averaging_matrix,
                       averaging_matrix_exact, good_pair_round, is_matching, perp_norm,
                       rounds_to_accuracy, run_protocol5)
from .hashing import HashingConfig, expander_field, run_protocol3, run_protocol4
from .push import fully_random_informed, run_fully_random, run_pull, run_push_pull
