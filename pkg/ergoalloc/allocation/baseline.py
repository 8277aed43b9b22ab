"""Static allocation from RULA grand scores, for comparison."""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence

from typing_extensions import Self

from ergoalloc.core.assembly import Worker, make_workers
from ergoalloc.core.scenario import Scenario

__all__ = ["G_MAX", "BaselineRulaPolicy", "baseline_rula_allocate"]

G_MAX = 9  # highest RULA grand score


@dataclass(frozen=True)
class BaselineRulaPolicy:
    """Robot takes an action whose score exceeds `ratio · g_max`."""

    action_scores: Mapping[str, float] = field(default_factory=dict)
    g_max: float = G_MAX
    ratio: float = 0.8

    @property
    def g_th(self) -> float:
        return self.ratio * self.g_max

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> Self:
        return cls(dict(scenario.baseline_scores))


def baseline_rula_allocate(
    policy: BaselineRulaPolicy,
    actions: Sequence[str],
    workers: Optional[Sequence[Worker]] = None,
) -> Dict[str, str]:
    """Worker name per action, the same at every repetition.

    Raises
    ------
    ValueError
        An action has no score.
    """
    workers = list(workers) if workers is not None else make_workers(2)
    human = next(w.name for w in workers if w.is_human())
    robot = next(w.name for w in workers if not w.is_human())

    out = {}
    for a in actions:
        if a not in policy.action_scores:
            raise ValueError(f"no RULA score for action `{a}`")
        out[a] = robot if policy.action_scores[a] > policy.g_th else human
    return out
