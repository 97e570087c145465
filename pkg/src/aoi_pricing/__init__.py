"""Dynamic pricing of driver-collected road information with AoI objectives."""

from .arrival import ArrivalChain, expected_arrival
from .cost_dist import CostDistribution, check_regularity, invert_hazard
from .errors import CapacityError, DomainError, SingularityError
from .multi_path import MultiPathProblem, MultiPathState, approx_price_online
from .single_path import (SinglePathProblem, SinglePathState, build_lookup_table,
                          optimal_price_online, receding_horizon_price)
from .sim import RunConfig, monte_carlo, run_multi_path, run_single_path

__version__ = "0.1.0"
