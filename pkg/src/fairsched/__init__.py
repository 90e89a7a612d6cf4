"""Multi-resource fair scheduling on heterogeneous servers.

Progressive-filling allocation under DRF, TSF, PS-DSF and rPS-DSF criteria
with round-robin, best-fit, or joint server selection; a Monte Carlo trial
harness; and a discrete-event simulator of a Mesos-style offer cycle.
"""

from .criteria import (CriterionKind, INELIGIBLE, drf_score, psdsf_score,
                       rpsdsf_score, tsf_score)
from .engine import (FillResult, SchedulerConfig, ServerPolicy, TieBreak,
                     best_fit_server, best_match_server, progressive_fill,
                     replay, rrr_permutation)
from .model import (ClusterState, ConfigurationError, FrameworkSpec,
                    InfeasibleAllocationError, ResourceVector, ServerSpec,
                    max_standalone_tasks, task_fits)
from .onlinesim import (EventTrace, Mode, ReleaseMode, SimConfig,
                        builtin_scenarios, simulate, utilization_series)
from .scenario import (OnlineSection, RoleSection, Scenario, ScenarioError,
                       bundled_scenario_path, load_scenario, parse_scenario,
                       save_scenario, scenario_to_doc)
from .trials import (TrialSummary, confidence_interval, derive_seed,
                     run_trials, sample_stddev)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
