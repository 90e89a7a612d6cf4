"""Cluster data model: servers, frameworks, integer allocations, residuals.

All quantities are exact rationals so residual-capacity checks never drift,
even for fractional demands like 3.5 GB.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational


class ConfigurationError(ValueError):
    """Invalid scenario or scheduler configuration."""


class InfeasibleAllocationError(ValueError):
    """An allocation step would violate a server's capacity."""


Quantity = Fraction


def as_quantity(v) -> Fraction:
    if isinstance(v, float):
        # exact conversion of literals like 3.5; scenario files carry
        # decimal strings for anything float can't represent exactly
        return Fraction(v).limit_denominator(10**9)
    return Fraction(v)


class ResourceVector(tuple):
    """Ordered non-negative quantities, one per resource kind."""

    def __new__(cls, values):
        vals = tuple(as_quantity(v) for v in values)
        if any(v < 0 for v in vals):
            raise ConfigurationError(f"negative resource quantity in {vals}")
        return super().__new__(cls, vals)

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        self._check_len(other)
        return ResourceVector(a + b for a, b in zip(self, other))

    def __sub__(self, other: "ResourceVector") -> "ResourceVector":
        self._check_len(other)
        diff = [a - b for a, b in zip(self, other)]
        if any(v < 0 for v in diff):
            raise InfeasibleAllocationError(f"{tuple(self)} - {tuple(other)} is negative")
        return ResourceVector(diff)

    def scaled(self, k) -> "ResourceVector":
        return ResourceVector(v * as_quantity(k) for v in self)

    def le(self, other: "ResourceVector") -> bool:
        self._check_len(other)
        return all(a <= b for a, b in zip(self, other))

    def _check_len(self, other) -> None:
        if len(self) != len(other):
            raise ConfigurationError(
                f"resource vector length mismatch: {len(self)} vs {len(other)}")

    @classmethod
    def zeros(cls, n: int) -> "ResourceVector":
        return cls([0] * n)


@dataclass(frozen=True)
class ServerSpec:
    id: int
    capacity: ResourceVector

    def __post_init__(self):
        if not any(v > 0 for v in self.capacity):
            raise ConfigurationError(f"server {self.id} has no capacity")


@dataclass(frozen=True)
class FrameworkSpec:
    id: int
    demand: ResourceVector  # per task
    weight: Quantity = Fraction(1)

    def __post_init__(self):
        if not any(v > 0 for v in self.demand):
            raise ConfigurationError(f"framework {self.id} has all-zero demand")
        if self.weight <= 0:
            raise ConfigurationError(f"framework {self.id} has non-positive weight")


def task_fits(demand: ResourceVector, residual: ResourceVector) -> bool:
    """True iff one task with this demand fits in the residual, componentwise."""
    return demand.le(residual)


def max_standalone_tasks(framework: FrameworkSpec, servers: list) -> int:
    """Whole tasks the framework could run if it monopolized every server.

    Resources the framework does not demand never limit it.
    """
    if not servers:
        raise ConfigurationError("no servers")
    total = 0
    for s in servers:
        total += min(s.capacity[r] // framework.demand[r]
                     for r in range(len(framework.demand))
                     if framework.demand[r] > 0)
    return int(total)


class ClusterState:
    """Servers, frameworks and the integer allocation matrix x[n][i].

    Value semantics: one writer per instance; copy() for independent runs.
    Residuals are kept incrementally and always match the matrix exactly.
    """

    def __init__(self, servers: list, frameworks: list):
        if not servers or not frameworks:
            raise ConfigurationError("need at least one server and one framework")
        nres = {len(s.capacity) for s in servers} | {len(f.demand) for f in frameworks}
        if len(nres) != 1:
            raise ConfigurationError("inconsistent resource counts across specs")
        self.servers = list(servers)
        self.frameworks = list(frameworks)
        self.num_resources = nres.pop()
        self.alloc = [[0] * len(servers) for _ in frameworks]
        self._residual = [list(s.capacity) for s in servers]

    def copy(self) -> "ClusterState":
        st = ClusterState(self.servers, self.frameworks)
        st.alloc = [row[:] for row in self.alloc]
        st._residual = [row[:] for row in self._residual]
        return st

    def residual_capacity(self, i: int) -> ResourceVector:
        return ResourceVector(self._residual[i])

    def tasks_of(self, n: int) -> int:
        return sum(self.alloc[n])

    def usage_of(self, n: int) -> ResourceVector:
        return self.frameworks[n].demand.scaled(self.tasks_of(n))

    def fits(self, n: int, i: int) -> bool:
        d = self.frameworks[n].demand
        res = self._residual[i]
        return all(d[r] <= res[r] for r in range(self.num_resources))

    def apply_task(self, n: int, i: int) -> None:
        if not self.fits(n, i):
            raise InfeasibleAllocationError(
                f"task of framework {self.frameworks[n].id} does not fit on "
                f"server {self.servers[i].id}")
        d = self.frameworks[n].demand
        self.alloc[n][i] += 1
        for r in range(self.num_resources):
            self._residual[i][r] -= d[r]

    def release_task(self, n: int, i: int) -> None:
        if self.alloc[n][i] < 1:
            raise InfeasibleAllocationError(
                f"framework {self.frameworks[n].id} has no task on server "
                f"{self.servers[i].id} to release")
        d = self.frameworks[n].demand
        self.alloc[n][i] -= 1
        for r in range(self.num_resources):
            self._residual[i][r] += d[r]

    def total_capacity(self) -> ResourceVector:
        total = ResourceVector.zeros(self.num_resources)
        for s in self.servers:
            total = total + s.capacity
        return total
