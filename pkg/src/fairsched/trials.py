"""Monte Carlo harness: repeated seeded fills with mean/sd/CI summaries."""

import csv
import hashlib
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .engine import SchedulerConfig, progressive_fill
from .model import ClusterState, ConfigurationError

# Two-sigma intervals: approximately 95% coverage.
CI_MULTIPLIER = 2


def derive_seed(base_seed: int, trial: int) -> int:
    """Stable per-trial seed; trials never share RNG state."""
    digest = hashlib.sha256(f"{base_seed}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def sample_stddev(values) -> float:
    """Bessel-corrected standard deviation, exact mean and variance inside."""
    vals = [Fraction(v) for v in values]
    if len(vals) < 2:
        raise ConfigurationError("sample standard deviation needs >= 2 values")
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return math.sqrt(var)


def confidence_interval(mean, sd, trials: int):
    if trials < 1 or sd < 0:
        raise ConfigurationError("need trials >= 1 and sd >= 0")
    half = CI_MULTIPLIER * Fraction(sd) / Fraction(math.sqrt(trials))
    return float(Fraction(mean) - half), float(Fraction(mean) + half)


@dataclass
class TrialSummary:
    trials: int
    mean_alloc: list      # N x I
    sd_alloc: list        # N x I (None when trials == 1)
    mean_unused: list     # I x R
    sd_unused: list       # I x R
    mean_total_tasks: Fraction

    def ci_alloc(self, n: int, i: int):
        return confidence_interval(self.mean_alloc[n][i], self.sd_alloc[n][i],
                                   self.trials)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["role", "row", "col", "mean", "sd", "ci_lo", "ci_hi"])
            for role, means, sds in (("alloc", self.mean_alloc, self.sd_alloc),
                                     ("unused", self.mean_unused, self.sd_unused)):
                for a, row in enumerate(means):
                    for b, m in enumerate(row):
                        sd = sds[a][b] if sds else ""
                        if sd == "":
                            lo = hi = ""
                        else:
                            lo, hi = confidence_interval(m, sd, self.trials)
                        w.writerow([role, a, b, float(m), sd, lo, hi])


def run_trials(state: ClusterState, config: SchedulerConfig, trials: int,
               base_seed: int = 0) -> TrialSummary:
    if trials < 1:
        raise ConfigurationError("need at least one trial")
    N, I, R = len(state.frameworks), len(state.servers), state.num_resources
    alloc_vals = [[[] for _ in range(I)] for _ in range(N)]
    unused_vals = [[[] for _ in range(R)] for _ in range(I)]
    totals = []
    for t in range(trials):
        result = progressive_fill(
            state, replace(config, seed=derive_seed(base_seed, t)))
        for n in range(N):
            for i in range(I):
                alloc_vals[n][i].append(result.alloc[n][i])
        for i in range(I):
            for r in range(R):
                unused_vals[i][r].append(result.unused[i][r])
        totals.append(result.total_tasks)

    def mean(vals):
        return sum(Fraction(v) for v in vals) / len(vals)

    def grid(vals, fn):
        return [[fn(cell) for cell in row] for row in vals]

    return TrialSummary(
        trials=trials,
        mean_alloc=grid(alloc_vals, mean),
        sd_alloc=grid(alloc_vals, sample_stddev) if trials > 1 else None,
        mean_unused=grid(unused_vals, mean),
        sd_unused=grid(unused_vals, sample_stddev) if trials > 1 else None,
        mean_total_tasks=mean(totals),
    )
