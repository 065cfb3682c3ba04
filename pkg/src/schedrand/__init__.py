"""EDF simulation with randomized, budget-bounded priority inversions."""

__version__ = "0.1.0"

from .analysis import AnalysisResult, analyze, busy_period_bound, wcib, wcrt
from .entropy import EntropyParams, approx_entropy, empirical_true_entropy, slot_shannon_entropy
from .scheduler import ExecPolicy, Scheme, SchedulerConfig, SimulationResult, simulate
from .taskgen import GenConfig, generate_taskset, uunifast
from .taskmodel import INF, Job, Task, Taskset, validate
from .trace import ScheduleTrace

__all__ = [
    "AnalysisResult", "EntropyParams", "ExecPolicy", "GenConfig", "INF", "Job",
    "ScheduleTrace", "Scheme", "SchedulerConfig", "SimulationResult", "Task", "Taskset",
    "analyze", "approx_entropy", "busy_period_bound", "empirical_true_entropy",
    "generate_taskset", "simulate", "slot_shannon_entropy", "uunifast", "validate",
    "wcib", "wcrt",
]
