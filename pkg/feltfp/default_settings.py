"""
Default settings that will be loaded in the `feltfp.config` dict.

Every key can be overridden from the environment with the ``FELTFP_`` prefix,
e.g. ``FELTFP_SEED=7``. Values are parsed as JSON.
"""

# a distance below this counts as 0 in floating point arithmetic
TOL_ZERO = 1e-12
# bound on the fixed point residual p(x, fx)
TOL_FIXED = 1e-9
MAX_ITER = 10000
# consecutive sub-TOL_ZERO steps required before an orbit counts as vanished
WINDOW = 3
# keep iterating a vanished orbit while the step distance still decreases
SETTLE = True

SEED = 0
SAMPLE_COUNT = 2000
# grid points per axis added to every sampled check
GRID_POINTS = 21
# random sequences drawn per point by the sampled 0-continuity check
ZERO_SEQUENCES = 16
# candidate sequences simulated by the finite 0-completeness check
COMPLETENESS_TRIALS = 1000

# epsilons tested for the felt continuity condition
FELT_EPSILONS = [1.0, 0.5, 0.2, 0.1, 0.01]
# default band widths of the sampled contraction checks, as fractions of alpha;
# 1/16 admits Banach contractions up to c = 16/17
EPSILON_FRACTIONS = [1.0, 0.5, 0.25, 0.125, 0.0625]
# returned by banach_epsilon for c = 0, where every epsilon works
EPSILON_MAX = 1e9

# oracle
ALPHABET = "0,0.5,1"
TRIALS = 1000
WORKERS = 1

LOG_LEVEL = "WARNING"
