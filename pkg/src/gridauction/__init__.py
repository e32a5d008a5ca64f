"""Grid scheduling simulator with an auction-based global scheduler."""

from .auction import (AssignmentInstance, AuctionResult, AuctionError,
                      EpsCsViolationError, ScaleError, check_eps_cs,
                      oracle_solve, pad_and_expand, solve)
from .costs import (CostBreakdown, ResourceView, StrategyParams,
                    cost_matrix, effective_cost, machine_cost, raw_cost,
                    starvation_weight, survival)
from .domain import (AssignmentRecord, GridState, JobSpec, MachineSpec,
                     ResourceSpec, UserSpec, apply_presence_rules,
                     free_procs_machine, free_procs_resource, ready_machines,
                     ready_resources, resource_quality)
from .engine import (FailureModel, JobOutcome, LoadingSample, RunReport,
                     loading_variance_series, run, sample_failures, step)
from .properties import (GridProperties, JobProperties, PropertiesError,
                         UserProperties, format_properties, parse_properties)
from .reporting import emit_report, load_report
from .scenario import (Scenario, generate_scenario, load_scenario,
                       save_scenario)
from .scheduling import (GlobalPlan, LocalPlan, compute_quotas,
                         schedule_global, schedule_local)

__version__ = "0.1.0"
