"""Progressive filling with integer tasks under a criterion and server policy.

Server policies:
  RRR      - randomized round-robin.  For per-server criteria the permutation
             picks the server and the criterion picks the framework for it;
             for cluster-wide criteria (DRF, TSF) the criterion picks the
             framework, which then takes the first server of a fresh
             permutation that fits it and is retired once none does.
  BESTFIT  - criterion picks the framework; it is offered the server whose
             residual direction best matches its demand (cosine similarity,
             over all servers).  If the task does not fit there, the
             framework stops receiving offers.
  JOINTMIN - one task goes to the feasible (framework, server) pair with the
             minimal per-server score.

Filling ends when no placement can be made; with integer tasks this is the
discrete analogue of exhausting some resource on every server.
"""

import csv
import enum
import random
from dataclasses import dataclass, field

from .criteria import CriterionKind, score
from .model import ClusterState, ConfigurationError, ResourceVector


class ServerPolicy(enum.Enum):
    RRR = "rrr"
    BESTFIT = "bestfit"
    JOINTMIN = "jointmin"


class TieBreak(enum.Enum):
    LOWEST_INDEX = "lowest"
    SEEDED_RANDOM = "random"


_VALID = {
    ServerPolicy.RRR: set(CriterionKind),
    ServerPolicy.BESTFIT: {CriterionKind.DRF, CriterionKind.TSF},
    ServerPolicy.JOINTMIN: {CriterionKind.PSDSF, CriterionKind.RPSDSF},
}


@dataclass(frozen=True)
class SchedulerConfig:
    criterion: CriterionKind
    policy: ServerPolicy
    tie_break: TieBreak = TieBreak.LOWEST_INDEX
    seed: int = 0

    def __post_init__(self):
        if self.criterion not in _VALID[self.policy]:
            raise ConfigurationError(
                f"policy {self.policy.value} does not support criterion "
                f"{self.criterion.value}")


@dataclass
class FillResult:
    alloc: list          # N x I task counts
    unused: list         # I x R residual quantities
    steps: list = field(default_factory=list)  # (framework, server, score)

    @property
    def total_tasks(self) -> int:
        return sum(sum(row) for row in self.alloc)

    def write_steps_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["step", "framework_id", "server_id", "criterion_value"])
            for k, (n, i, s) in enumerate(self.steps):
                w.writerow([k, n, i, float(s)])


def rrr_permutation(servers: list, rng: random.Random) -> list:
    """Uniform random permutation; deterministic for a given RNG state."""
    order = list(servers)
    rng.shuffle(order)
    return order


def _pick_min(scored, tie_break, rng):
    """scored: list of (score, key).  Returns key of the minimum score."""
    lo = min(s for s, _ in scored)
    ties = [k for s, k in scored if s == lo]
    if len(ties) > 1 and tie_break is TieBreak.SEEDED_RANDOM:
        return lo, rng.choice(ties)
    return lo, min(ties)


def _cosine_better(demand, res_a, res_b) -> bool:
    """True iff res_a matches the demand direction strictly better than res_b."""
    dot_a = sum(d * v for d, v in zip(demand, res_a))
    dot_b = sum(d * v for d, v in zip(demand, res_b))
    n2_a = sum(v * v for v in res_a)
    n2_b = sum(v * v for v in res_b)
    if n2_a == 0:
        return False
    if n2_b == 0:
        return True
    return dot_a * dot_a * n2_b > dot_b * dot_b * n2_a


def best_match_server(state: ClusterState, n: int, candidates=None) -> int:
    """Server whose residual direction is closest to framework n's demand.

    Considered regardless of whether the task actually fits there.
    """
    if candidates is None:
        candidates = range(len(state.servers))
    demand = state.frameworks[n].demand
    best = None
    for j in candidates:
        if best is None or _cosine_better(demand, state._residual[j],
                                          state._residual[best]):
            best = j
    return best


def best_fit_server(state: ClusterState, n: int):
    """Best cosine match among servers where the task fits; None if none fit."""
    fitting = [j for j in range(len(state.servers)) if state.fits(n, j)]
    if not fitting:
        return None
    return best_match_server(state, n, fitting)


def progressive_fill(state: ClusterState, config: SchedulerConfig) -> FillResult:
    st = state.copy()
    rng = random.Random(config.seed)
    steps = []

    def place(n, j, s):
        st.apply_task(n, j)
        steps.append((n, j, s))

    N = len(st.frameworks)
    I = len(st.servers)

    if config.policy is ServerPolicy.JOINTMIN:
        while True:
            scored = [(score(st, config.criterion, n, j), (n, j))
                      for n in range(N) for j in range(I) if st.fits(n, j)]
            if not scored:
                break
            s, (n, j) = _pick_min(scored, config.tie_break, rng)
            place(n, j, s)

    elif config.policy is ServerPolicy.BESTFIT:
        active = set(range(N))
        while active:
            scored = [(score(st, config.criterion, n), n) for n in active]
            s, n = _pick_min(scored, config.tie_break, rng)
            j = best_match_server(st, n)
            if j is not None and st.fits(n, j):
                place(n, j, s)
            else:
                active.discard(n)

    elif config.criterion.per_server:  # RRR, per-server criterion
        active_servers = list(range(I))
        while active_servers:
            for j in rrr_permutation(active_servers, rng):
                scored = [(score(st, config.criterion, n, j), n)
                          for n in range(N) if st.fits(n, j)]
                if not scored:
                    active_servers.remove(j)
                    continue
                s, n = _pick_min(scored, config.tie_break, rng)
                place(n, j, s)

    else:  # RRR, cluster-wide criterion
        active = set(range(N))
        while active:
            scored = [(score(st, config.criterion, n), n) for n in active]
            s, n = _pick_min(scored, config.tie_break, rng)
            for j in rrr_permutation(range(I), rng):
                if st.fits(n, j):
                    place(n, j, s)
                    break
            else:
                active.discard(n)

    unused = [list(st.residual_capacity(i)) for i in range(I)]
    return FillResult(alloc=[row[:] for row in st.alloc], unused=unused,
                      steps=steps)


def replay(state: ClusterState, steps) -> ClusterState:
    """Apply a placement log to a fresh copy of the initial state."""
    st = state.copy()
    for n, j, _ in steps:
        st.apply_task(n, j)
    return st
