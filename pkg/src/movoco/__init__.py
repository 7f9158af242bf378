"""Parameter-free dynamic-regret online convex optimization with
time-varying movement costs, plus reductions from delayed feedback and
time-varying memory."""

from .batching import (BatchedLearner, EpochMember, EpochRecord, LipschitzAdaptiveLearner,
                       epoch_decomposition_check, epoch_prefix_check)
from .cmd import CmdLearner, CmdParams, StepOverflowError, objective_value, psi_gradient, psi_value, solve_update
from .core import (DimensionMismatchError, Feedback, NonFiniteValueError, as_vector, dot,
                   norm, zeros)
from .delays import (DelayLedger, DelayReduction, DelaySchedule, build_ledger,
                     delay_aux_check, ledger_identity_check)
from .grid import GridLearner, GridParams, build_grid, expected_grid_size, grid_tuning_check
from .harness import BoundReport, Prop1Report, RegretTrace, bound_shapes, growth_slope, prop1_bound
from .memory import (AssumptionViolationError, MemoryReduction, MemorySchedule, UnaryOracle,
                     xi_bounds_check, xi_naive, xi_profile)

__version__ = "0.1.0"
