"""Sequential best-arm identification frameworks."""

from purex.explorer.lucb import Step, lucb, lucb_reference, select, select_intervals
from purex.explorer.problem import Problem, RunResult, argmax_first, gaps_from_values, level_at
from purex.explorer.racing import Phase, eliminate, eliminate_intervals, phase_schedule, racing
from purex.explorer.streams import CHUNK, ArmStream, arm_streams


def gaps(problem: Problem):
    """Gap of every arm; see :meth:`Problem.gaps`."""
    return problem.gaps()


FRAMEWORKS = {"racing": racing, "lucb": lucb}

__all__ = [
    "ArmStream",
    "CHUNK",
    "FRAMEWORKS",
    "Phase",
    "Problem",
    "RunResult",
    "Step",
    "arm_streams",
    "argmax_first",
    "eliminate",
    "eliminate_intervals",
    "gaps",
    "gaps_from_values",
    "level_at",
    "lucb",
    "lucb_reference",
    "phase_schedule",
    "racing",
    "select",
    "select_intervals",
]
