"""Scenario files: a JSON tree with explicit schema version.

Quantities may be written as integers, decimals, or fraction strings like
"7/2"; they are parsed exactly.  Validation errors carry the JSON path of
the offending element.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .model import (ClusterState, ConfigurationError, FrameworkSpec,
                    ResourceVector, ServerSpec)

SCHEMA_VERSION = 1


class ScenarioError(ConfigurationError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _parse_quantity(v, path) -> Fraction:
    try:
        if isinstance(v, str):
            return Fraction(v)
        if isinstance(v, bool):
            raise ValueError("boolean")
        if isinstance(v, (int, float)):
            return Fraction(v).limit_denominator(10**9) if isinstance(v, float) \
                else Fraction(v)
    except (ValueError, ZeroDivisionError):
        pass
    raise ScenarioError(path, f"not a quantity: {v!r}")


def _emit_quantity(q: Fraction):
    return int(q) if q.denominator == 1 else str(q)


@dataclass
class RoleSection:
    name: str
    demand: ResourceVector
    tasks_per_job: int = 10
    task_duration: float = 10.0
    duration_model: str = "deterministic"  # or "exponential"
    max_executors_per_job: int = None
    queues: int = 5
    jobs_per_queue: int = 50


@dataclass
class OnlineSection:
    roles: list
    registration: list = None  # [(time, server index)]; None = all at t=0


@dataclass
class Scenario:
    resources: list
    servers: list      # list of ResourceVector
    frameworks: list   # list of (demand ResourceVector, weight Fraction)
    online: OnlineSection = None

    def cluster_state(self) -> ClusterState:
        servers = [ServerSpec(i, cap) for i, cap in enumerate(self.servers)]
        fws = [FrameworkSpec(n, d, w) for n, (d, w) in enumerate(self.frameworks)]
        return ClusterState(servers, fws)


def _vector(raw, path, nres) -> ResourceVector:
    if not isinstance(raw, list):
        raise ScenarioError(path, "expected a list of quantities")
    if len(raw) != nres:
        raise ScenarioError(path, f"expected {nres} components, got {len(raw)}")
    return ResourceVector(_parse_quantity(v, f"{path}[{k}]")
                          for k, v in enumerate(raw))


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("$", "expected an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ScenarioError("schema_version",
                            f"expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    resources = doc.get("resources")
    if (not isinstance(resources, list) or not resources
            or not all(isinstance(r, str) for r in resources)):
        raise ScenarioError("resources", "expected a non-empty list of names")
    nres = len(resources)

    raw_servers = doc.get("servers")
    if not isinstance(raw_servers, list) or not raw_servers:
        raise ScenarioError("servers", "expected a non-empty list")
    servers = [_vector(s, f"servers[{i}]", nres) for i, s in enumerate(raw_servers)]

    raw_fw = doc.get("frameworks")
    if not isinstance(raw_fw, list) or not raw_fw:
        raise ScenarioError("frameworks", "expected a non-empty list")
    frameworks = []
    for n, f in enumerate(raw_fw):
        if not isinstance(f, dict) or "demand" not in f:
            raise ScenarioError(f"frameworks[{n}]", "expected an object with 'demand'")
        demand = _vector(f["demand"], f"frameworks[{n}].demand", nres)
        weight = _parse_quantity(f.get("weight", 1), f"frameworks[{n}].weight")
        if weight <= 0:
            raise ScenarioError(f"frameworks[{n}].weight", "must be positive")
        frameworks.append((demand, weight))

    online = None
    if "online" in doc:
        online = _parse_online(doc["online"], nres, len(servers))
    return Scenario(resources=resources, servers=servers,
                    frameworks=frameworks, online=online)


def _parse_online(raw, nres, nservers) -> OnlineSection:
    if not isinstance(raw, dict) or "roles" not in raw:
        raise ScenarioError("online", "expected an object with 'roles'")
    roles = []
    for k, r in enumerate(raw["roles"]):
        path = f"online.roles[{k}]"
        if not isinstance(r, dict) or "name" not in r or "demand" not in r:
            raise ScenarioError(path, "expected an object with 'name' and 'demand'")
        model = r.get("duration_model", "deterministic")
        if model not in ("deterministic", "exponential"):
            raise ScenarioError(f"{path}.duration_model", f"unknown model {model!r}")
        roles.append(RoleSection(
            name=r["name"],
            demand=_vector(r["demand"], f"{path}.demand", nres),
            tasks_per_job=int(r.get("tasks_per_job", 10)),
            task_duration=float(r.get("task_duration", 10.0)),
            duration_model=model,
            max_executors_per_job=r.get("max_executors_per_job"),
            queues=int(r.get("queues", 5)),
            jobs_per_queue=int(r.get("jobs_per_queue", 50)),
        ))
    registration = None
    if raw.get("registration") is not None:
        registration = []
        for k, pair in enumerate(raw["registration"]):
            path = f"online.registration[{k}]"
            if (not isinstance(pair, list) or len(pair) != 2
                    or not 0 <= int(pair[1]) < nservers):
                raise ScenarioError(path, "expected [time, valid server index]")
            registration.append((float(pair[0]), int(pair[1])))
    return OnlineSection(roles=roles, registration=registration)


def scenario_to_doc(sc: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "resources": list(sc.resources),
        "servers": [[_emit_quantity(q) for q in s] for s in sc.servers],
        "frameworks": [{"demand": [_emit_quantity(q) for q in d],
                        "weight": _emit_quantity(w)} for d, w in sc.frameworks],
    }
    if sc.online is not None:
        roles = []
        for r in sc.online.roles:
            roles.append({
                "name": r.name,
                "demand": [_emit_quantity(q) for q in r.demand],
                "tasks_per_job": r.tasks_per_job,
                "task_duration": r.task_duration,
                "duration_model": r.duration_model,
                "max_executors_per_job": r.max_executors_per_job,
                "queues": r.queues,
                "jobs_per_queue": r.jobs_per_queue,
            })
        online = {"roles": roles}
        if sc.online.registration is not None:
            online["registration"] = [[t, i] for t, i in sc.online.registration]
        doc["online"] = online
    return doc


def load_scenario(path) -> Scenario:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"{path}:{e.lineno}", e.msg) from e
    return parse_scenario(doc)


def save_scenario(sc: Scenario, path) -> None:
    with open(path, "w") as f:
        json.dump(scenario_to_doc(sc), f, indent=2)
        f.write("\n")


def bundled_scenario_path(name: str = "illustrative.scenario"):
    """Path to a scenario file shipped with the package."""
    path = resources.files(__package__) / "data" / name
    if not path.is_file():
        raise ScenarioError(name, "no such bundled scenario")
    return path
