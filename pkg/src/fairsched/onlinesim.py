"""Discrete-event simulator of a Mesos-style offer cycle.

Jobs arrive from per-role submission queues (one job running per queue at a
time) and receive executors on registered agents.  Allocation happens in
periodic offer cycles: each cycle an agent's free resources are offered to
the framework the configured criterion selects; if the task does not fit
there the offer is declined and the agent stays idle until the next cycle.
In characterized mode a grant is one task's worth of resources and an idle
executor hands its resources back immediately; in oblivious mode the
selected framework receives the agent's entire free bundle and holds
everything until the job completes.
"""

import enum
import heapq
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .criteria import INELIGIBLE, CriterionKind
from .engine import SchedulerConfig, ServerPolicy, TieBreak, _cosine_better
from .model import ConfigurationError, ResourceVector
from .scenario import OnlineSection, RoleSection, Scenario


class Mode(enum.Enum):
    OBLIVIOUS = "oblivious"
    CHARACTERIZED = "characterized"


class ReleaseMode(enum.Enum):
    POOL = "pool"
    SEQUENTIAL = "sequential"


@dataclass
class SimConfig:
    scheduler: SchedulerConfig
    mode: Mode = Mode.CHARACTERIZED
    release: ReleaseMode = ReleaseMode.POOL
    horizon: float = 10.0**7
    sample_period: float = 5.0
    offer_interval: float = 1.0
    startup_delay: float = 10.0   # gap before a queue's next job submits
    filter_timeout: float = 5.0   # declined agent not re-offered to that job
    seed: int = 0

    def __post_init__(self):
        if self.sample_period <= 0 or self.offer_interval <= 0:
            raise ConfigurationError("sample_period and offer_interval must be "
                                     "positive")


@dataclass
class JobRecord:
    job_id: int
    role: str
    queue: int
    start: float
    end: float


@dataclass
class EventTrace:
    sample_times: list     # sampling grid
    samples: dict          # resource name -> allocated-fraction series
    job_completions: list  # JobRecord, in completion order
    makespan: float
    truncated: bool = False

    def utilization_series(self, resource: str) -> list:
        if resource not in self.samples:
            raise ConfigurationError(f"unknown resource {resource!r}")
        return self.samples[resource]


class _Executor:
    __slots__ = ("job", "server")

    def __init__(self, job, server):
        self.job = job
        self.server = server


class _Job:
    __slots__ = ("id", "role", "queue", "tasks_left", "tasks_done",
                 "executors", "held", "usage", "start", "accepting")

    def __init__(self, job_id, role, queue, now, nres):
        self.id = job_id
        self.role = role
        self.queue = queue
        self.tasks_left = role.tasks_per_job   # not yet started
        self.tasks_done = 0
        self.executors = []                    # active _Executor list
        self.held = []                         # (server, vector) until job end
        self.usage = [Fraction(0)] * nres
        self.start = now
        self.accepting = True                  # cleared after oblivious startup

    def wants_executor(self) -> bool:
        if not self.accepting:
            return False
        cap = self.role.max_executors_per_job
        return self.tasks_left > 0 and (cap is None or len(self.executors) < cap)

    def done(self) -> bool:
        return self.tasks_done >= self.role.tasks_per_job


class OnlineSimulator:
    """One simulation run; deterministic for a given config seed."""

    def __init__(self, scenario: Scenario, sim_config: SimConfig):
        if scenario.online is None:
            raise ConfigurationError("scenario has no online section")
        self.scenario = scenario
        self.cfg = sim_config
        self.rng = random.Random(sim_config.seed)
        self.nres = len(scenario.resources)
        self.capacity = list(scenario.servers)
        self.free = [None] * len(self.capacity)       # None until registered
        self.registered_cap = [Fraction(0)] * self.nres
        self.allocated = [Fraction(0)] * self.nres
        self.events = []                              # (time, seq, fn, args)
        self.seq = 0
        self.now = 0.0
        self.changepoints = []                        # (time, [fraction]*R)
        self.completions = []
        self.queues = []                              # [role, jobs left] per queue
        self.active = []                              # running _Job per queue
        self.next_job_id = 0
        self.pending_jobs = 0
        self.rotation = 0                             # sequential-release cursor
        self.filters = {}                             # (job id, server) -> expiry

        online = scenario.online
        for role in online.roles:
            for _ in range(role.queues):
                self.queues.append([role, role.jobs_per_queue])
                self.active.append(None)
                self.pending_jobs += role.jobs_per_queue
        self._start_queued_jobs()

        registration = online.registration
        if registration is None:
            registration = [(0.0, i) for i in range(len(self.capacity))]
        for t, i in registration:
            self._push(t, self._register, i)
        self._push(0.0, self._offer_cycle)

    # -- event plumbing -------------------------------------------------

    def _push(self, t, fn, *args):
        heapq.heappush(self.events, (t, self.seq, fn, args))
        self.seq += 1

    def _record(self):
        fracs = [float(self.allocated[r] / self.registered_cap[r])
                 if self.registered_cap[r] > 0 else 0.0
                 for r in range(self.nres)]
        self.changepoints.append((self.now, fracs))

    # -- model events ---------------------------------------------------

    def _register(self, i):
        self.free[i] = list(self.capacity[i])
        for r in range(self.nres):
            self.registered_cap[r] += self.capacity[i][r]
        # a fresh agent is offered immediately, as a pool with whatever else
        # is currently free
        self._allocate(self._pool())
        self._record()

    @property
    def _anything_running(self):
        return self.pending_jobs > 0 or any(self.active)

    def _offer_cycle(self):
        pool = self._pool()
        if pool:
            if self.cfg.release is ReleaseMode.SEQUENTIAL:
                # one agent per cycle, rotating
                pool = [pool[self.rotation % len(pool)]]
                self.rotation += 1
            self._allocate(pool)
            self._record()
        # without other pending events the state can never change again, so
        # another cycle could not place anything either
        if self._anything_running and self.events:
            self._push(self.now + self.cfg.offer_interval, self._offer_cycle)

    def _start_queued_jobs(self):
        for q, (role, left) in enumerate(self.queues):
            if self.active[q] is None and left > 0:
                job = _Job(self.next_job_id, role, q, self.now, self.nres)
                self.next_job_id += 1
                self.queues[q][1] = left - 1
                self.active[q] = job

    def _duration(self, role) -> float:
        if role.duration_model == "exponential":
            return self.rng.expovariate(1.0 / role.task_duration)
        return role.task_duration

    def _launch_task(self, ex):
        ex.job.tasks_left -= 1
        self._push(self.now + self._duration(ex.job.role), self._task_done, ex)

    def _task_done(self, ex):
        job = ex.job
        job.tasks_done += 1
        if job.tasks_left > 0:
            self._launch_task(ex)       # executor pulls the next task
            return
        job.executors.remove(ex)
        if self.cfg.mode is Mode.CHARACTERIZED:
            demand = job.role.demand
            for r in range(self.nres):
                self.free[ex.server][r] += demand[r]
                self.allocated[r] -= demand[r]
                job.usage[r] -= demand[r]
        if job.done() and not job.executors:
            self._complete_job(job)
        self._record()

    def _complete_job(self, job):
        for server, held in job.held:
            for r in range(self.nres):
                self.free[server][r] += held[r]
                self.allocated[r] -= held[r]
        job.held = []
        self.completions.append(JobRecord(job.id, job.role.name, job.queue,
                                          job.start, self.now))
        self.active[job.queue] = None
        self.pending_jobs -= 1
        self._push(self.now + self.cfg.startup_delay, self._start_queued_jobs)

    # -- allocation cycle -----------------------------------------------

    def _pool(self):
        return [i for i, f in enumerate(self.free)
                if f is not None and any(v > 0 for v in f)]

    def _fits(self, demand, server) -> bool:
        f = self.free[server]
        return all(demand[r] <= f[r] for r in range(self.nres))

    def _score(self, job, server=None):
        """Criterion score from the job's currently held resources."""
        crit = self.cfg.scheduler.criterion
        used = job.usage
        if crit is CriterionKind.DRF:
            shares = [used[r] / self.registered_cap[r]
                      for r in range(self.nres) if self.registered_cap[r] > 0]
            return max(shares) if shares else Fraction(0)
        if crit is CriterionKind.TSF:
            demand = job.role.demand
            cap = 0
            for i, f in enumerate(self.free):
                if f is None:
                    continue
                cap += min(self.capacity[i][r] // demand[r]
                           for r in range(self.nres) if demand[r] > 0)
            return Fraction(len(job.executors)) / cap if cap else INELIGIBLE
        # per-server dominant share on `server`
        denom = (self.capacity[server] if crit is CriterionKind.PSDSF
                 else self.free[server])
        best = Fraction(0)
        for r in range(self.nres):
            if used[r] == 0:
                continue
            if denom[r] == 0:
                return INELIGIBLE
            best = max(best, used[r] / denom[r])
        return best

    def _pick_min(self, scored):
        lo = min(s for s, _ in scored)
        ties = [k for s, k in scored if s == lo]
        if (len(ties) > 1
                and self.cfg.scheduler.tie_break is TieBreak.SEEDED_RANDOM):
            return self.rng.choice(ties)
        return min(ties, key=lambda job: job.id)

    def _grant(self, job, server):
        """Give `job` resources on `server` per the allocation mode."""
        demand = job.role.demand
        if self.cfg.mode is Mode.CHARACTERIZED:
            take = list(demand)
            n_exec = 1
        else:
            take = list(self.free[server])    # accepts everything offered
            fit = min(take[r] // demand[r]
                      for r in range(self.nres) if demand[r] > 0)
            cap = job.role.max_executors_per_job
            room = math.inf if cap is None else cap - len(job.executors)
            n_exec = int(min(fit, job.tasks_left, room))
            job.held.append((server, ResourceVector(take)))
        for r in range(self.nres):
            self.free[server][r] -= take[r]
            self.allocated[r] += take[r]
            job.usage[r] += take[r]
        self._cycle_grants.add(job)
        for _ in range(n_exec):
            ex = _Executor(job, server)
            job.executors.append(ex)
            self._launch_task(ex)

    def _filtered(self, job, server) -> bool:
        expiry = self.filters.get((job.id, server))
        if expiry is None:
            return False
        if expiry <= self.now:
            del self.filters[(job.id, server)]
            return False
        return True

    def _decline(self, job, server):
        self.filters[(job.id, server)] = self.now + self.cfg.filter_timeout

    def _allocate(self, pool):
        """One offer cycle: each agent gets at most one offer."""
        sched = self.cfg.scheduler
        wanting = [j for j in self.active if j is not None and j.wants_executor()]
        if not wanting:
            return
        self._cycle_grants = set()
        try:
            self._offer_pass(pool, wanting, sched)
        finally:
            if self.cfg.mode is Mode.OBLIVIOUS:
                # a coarse-grained job sizes itself from its startup offers
                # and declines everything afterwards
                for job in self._cycle_grants:
                    job.accepting = False
            self._cycle_grants = set()

    def _offer_pass(self, pool, wanting, sched):

        if sched.policy is ServerPolicy.JOINTMIN:
            remaining = list(pool)
            while remaining:
                wanting = [j for j in wanting if j.wants_executor()]
                scored = [(self._score(j, i), (j, i))
                          for j in wanting for i in remaining
                          if self._fits(j.role.demand, i)]
                if not scored:
                    return
                lo = min(s for s, _ in scored)
                ties = [k for s, k in scored if s == lo]
                job, server = min(ties, key=lambda p: (p[0].id, p[1]))
                self._grant(job, server)
                remaining.remove(server)
            return

        if sched.policy is ServerPolicy.BESTFIT:
            # the minimum-share framework gets the offer of its best-matching
            # agent; a decline leaves that agent idle for this cycle
            job = self._pick_min([(self._score(j), j) for j in wanting])
            best = None
            for i in pool:
                if self._filtered(job, i):
                    continue
                if best is None or _cosine_better(job.role.demand,
                                                  self.free[i], self.free[best]):
                    best = i
            if best is None:
                return
            if self._fits(job.role.demand, best):
                self._grant(job, best)
            else:
                self._decline(job, best)
            return

        for server in self._perm(pool):
            while True:
                offerable = [j for j in wanting
                             if j.wants_executor()
                             and not self._filtered(j, server)]
                if not offerable:
                    break
                if sched.criterion.per_server:
                    job = self._pick_min([(self._score(j, server), j)
                                          for j in offerable])
                else:
                    job = self._pick_min([(self._score(j), j)
                                          for j in offerable])
                if not self._fits(job.role.demand, server):
                    # declined: whatever is left on the agent stays idle this
                    # cycle, and the decliner is not re-offered this agent
                    # until the filter expires
                    self._decline(job, server)
                    break
                self._grant(job, server)
                if self.cfg.mode is Mode.OBLIVIOUS:
                    break      # the grant took the whole free bundle

    def _perm(self, pool):
        order = list(pool)
        self.rng.shuffle(order)
        return order

    # -- main loop -------------------------------------------------------

    def run(self) -> EventTrace:
        truncated = False
        while self.events:
            t, _, fn, args = heapq.heappop(self.events)
            if t > self.cfg.horizon:
                truncated = True
                break
            self.now = t
            fn(*args)
        if self.pending_jobs > 0 and not self.events:
            truncated = True   # stuck: jobs left but nothing can run
        makespan = self.completions[-1].end if self.completions else 0.0
        if truncated:
            makespan = max(makespan, min(self.now, self.cfg.horizon))
        times, series = self._sampled_series(makespan)
        return EventTrace(sample_times=times, samples=series,
                          job_completions=self.completions,
                          makespan=makespan, truncated=truncated)

    def _sampled_series(self, makespan):
        times = []
        t = 0.0
        while t <= makespan + 1e-9:
            times.append(round(t, 9))
            t += self.cfg.sample_period
        series = {name: [] for name in self.scenario.resources}
        idx = 0
        current = [0.0] * self.nres
        for t in times:
            while (idx < len(self.changepoints)
                   and self.changepoints[idx][0] <= t + 1e-9):
                current = self.changepoints[idx][1]
                idx += 1
            for r, name in enumerate(self.scenario.resources):
                series[name].append(current[r])
        return times, series


def simulate(scenario: Scenario, sim_config: SimConfig) -> EventTrace:
    return OnlineSimulator(scenario, sim_config).run()


def utilization_series(trace: EventTrace, resource: str) -> list:
    return trace.utilization_series(resource)


# -- built-in scenario presets ------------------------------------------

def _roles(jobs_per_queue: int):
    return [
        RoleSection(name="pi", demand=ResourceVector([2, 2]),
                    jobs_per_queue=jobs_per_queue),
        RoleSection(name="wordcount", demand=ResourceVector([1, Fraction(7, 2)]),
                    jobs_per_queue=jobs_per_queue),
    ]


def builtin_scenarios() -> dict:
    type1 = ResourceVector([4, 14])
    type2 = ResourceVector([8, 8])
    type3 = ResourceVector([6, 11])
    pi = ResourceVector([2, 2])
    wc = ResourceVector([1, Fraction(7, 2)])
    frameworks = [(pi, Fraction(1)), (wc, Fraction(1))]

    hetero6 = Scenario(
        resources=["cpu", "mem"],
        servers=[type1, type1, type2, type2, type3, type3],
        frameworks=frameworks,
        online=OnlineSection(roles=_roles(50)),
    )
    homo6 = Scenario(
        resources=["cpu", "mem"],
        servers=[type3] * 6,
        frameworks=frameworks,
        online=OnlineSection(roles=_roles(50)),
    )
    staged3 = Scenario(
        resources=["cpu", "mem"],
        servers=[type1, type2, type3],
        frameworks=frameworks,
        online=OnlineSection(roles=_roles(20),
                             registration=[(0.0, 0), (120.0, 1), (240.0, 2)]),
    )
    illustrative = Scenario(
        resources=["r1", "r2"],
        servers=[ResourceVector([100, 30]), ResourceVector([30, 100])],
        frameworks=[(ResourceVector([5, 1]), Fraction(1)),
                    (ResourceVector([1, 5]), Fraction(1))],
    )
    return {"HETERO6": hetero6, "HOMO6": homo6, "STAGED3": staged3,
            "ILLUSTRATIVE": illustrative}
