"""Fairness scores minimized by progressive filling.

A score of math.inf marks a framework as ineligible (a demanded resource is
exhausted); it orders above every finite score.  Resources a framework does
not demand never contribute, so 0/0 cannot arise.
"""

import enum
import math
from fractions import Fraction

from .model import ClusterState, max_standalone_tasks

INELIGIBLE = math.inf


class CriterionKind(enum.Enum):
    DRF = "drf"
    TSF = "tsf"
    PSDSF = "psdsf"
    RPSDSF = "rpsdsf"

    @property
    def per_server(self) -> bool:
        """Whether the score depends on a particular server."""
        return self in (CriterionKind.PSDSF, CriterionKind.RPSDSF)


def drf_score(state: ClusterState, n: int):
    """Cluster-wide dominant share: largest fraction of aggregate capacity used."""
    fw = state.frameworks[n]
    total = state.total_capacity()
    xn = state.tasks_of(n)
    if xn == 0:
        return Fraction(0)
    best = Fraction(0)
    for r in range(state.num_resources):
        if fw.demand[r] == 0:
            continue
        if total[r] == 0:
            return INELIGIBLE
        best = max(best, xn * fw.demand[r] / total[r])
    return best / fw.weight


def tsf_score(state: ClusterState, n: int):
    """Allocated tasks as a fraction of what the framework gets standalone."""
    fw = state.frameworks[n]
    cap = max_standalone_tasks(fw, state.servers)
    if cap == 0:
        return INELIGIBLE
    return Fraction(state.tasks_of(n)) / (fw.weight * cap)


def psdsf_score(state: ClusterState, n: int, j: int):
    """Virtual dominant share on server j, against j's full capacity."""
    return _server_share(state, n, state.servers[j].capacity)


def rpsdsf_score(state: ClusterState, n: int, j: int):
    """Virtual dominant share on server j, against j's current residual."""
    return _server_share(state, n, state.residual_capacity(j))


def _server_share(state: ClusterState, n: int, denom):
    fw = state.frameworks[n]
    xn = state.tasks_of(n)
    if xn == 0:
        return Fraction(0)
    best = Fraction(0)
    for r in range(state.num_resources):
        if fw.demand[r] == 0:
            continue
        if denom[r] == 0:
            return INELIGIBLE
        best = max(best, fw.demand[r] / denom[r])
    return xn * best / fw.weight


def score(state: ClusterState, criterion: CriterionKind, n: int, j: int = None):
    if criterion is CriterionKind.DRF:
        return drf_score(state, n)
    if criterion is CriterionKind.TSF:
        return tsf_score(state, n)
    if criterion is CriterionKind.PSDSF:
        return psdsf_score(state, n, j)
    return rpsdsf_score(state, n, j)
