from .experiment import (CSV_COLUMNS, Experiment, Summary, aggregate, make_runner, resolve_threads,
                         run_experiment, run_trials)
from .suites import VerifyReport, verify_coupling, verify_dispersion, verify_mixing, verify_pairwise, verify_walk_moments
