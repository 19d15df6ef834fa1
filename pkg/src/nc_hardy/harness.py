"""Seeded trial execution and report assembly shared by the inequality suites.

Every trial draws its generator from ``(master seed, suite name, trial
index)``, so serial and threaded runs give identical reports.
"""

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .fixtures import to_fixture
from .sampling import random_algebra

SCHEMA_VERSION = 1
THREADS_ENV = "NC_HARDY_THREADS"


class ConfigError(ValueError):
    """Invalid :class:`TrialConfig`."""


@dataclass(frozen=True)
class TrialConfig:
    """Sampling and tolerance settings for a suite run.

    ``block_spec`` is ``singletons``, ``random`` or ``fixed:K``; ``weight_spec``
    is ``uniform`` or ``random``.  ``s_count`` log-spaced values of ``s``
    spanning ``10**s_log_range`` (times ``||u||_1``) are used by the weak-type
    suite.
    """

    dims: tuple = (2, 4, 8)
    block_spec: str = "random"
    weight_spec: str = "random"
    trials: int = 100
    seed: int = 0
    tolerance: float = 1e-9
    s_count: int = 50
    s_log_range: tuple = (-2.0, 2.0)
    weak_type_constant: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "s_log_range", tuple(float(v) for v in self.s_log_range))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.dims or min(self.dims) < 1:
            raise ConfigError("dims must be a non-empty list of integers >= 1")
        if not self.tolerance >= 0:
            raise ConfigError("tolerance must be >= 0")
        if self.s_count < 1 or len(self.s_log_range) != 2 or self.s_log_range[0] > self.s_log_range[1]:
            raise ConfigError("s grid needs s_count >= 1 and an increasing log range")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        if self.weight_spec not in ("uniform", "random"):
            raise ConfigError(f"unknown weight spec {self.weight_spec!r}")
        if self.block_spec not in ("singletons", "random") and not self.block_spec.startswith("fixed:"):
            raise ConfigError(f"unknown block spec {self.block_spec!r}")
        if self.block_spec.startswith("fixed:"):
            try:
                size = int(self.block_spec.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad fixed block size in {self.block_spec!r}") from None
            if size < 1:
                raise ConfigError("fixed block size must be >= 1")

    def to_dict(self):
        d = asdict(self)
        d["dims"] = list(self.dims)
        d["s_log_range"] = list(self.s_log_range)
        return d


@dataclass
class VerificationReport:
    name: str
    config: dict
    trials: int
    violations: list
    constants: dict
    kind: str = "verification"
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        d = {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "kind": self.kind,
            "config": self.config,
            "trials": self.trials,
            "violations": self.violations,
            "constants": self.constants,
            "pass": self.passed,
        }
        if self.extra:
            d["extra"] = self.extra
        return d


def trial_rng(seed, suite, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(suite.encode()), int(index)]))


class Trial:
    """Context handed to a suite's per-trial function.

    ``check_le(name, lhs, rhs)`` records an inequality ``lhs <= rhs``; it is
    violated when ``lhs - rhs`` exceeds ``tolerance * max(1, |lhs|, |rhs|)``
    (or ``tol`` when given, unscaled).
    """

    def __init__(self, suite, cfg, index):
        self.suite = suite
        self.cfg = cfg
        self.index = index
        self.rng = trial_rng(cfg.seed, suite, index)
        self.dim = cfg.dims[index % len(cfg.dims)]
        self.alg = random_algebra(self.dim, self.rng, cfg.block_spec, cfg.weight_spec)
        self.checks = []
        self.metrics = {}
        self.witness = {}
        self.data = {}

    def check_le(self, name, lhs, rhs, tol=None):
        lhs, rhs = float(lhs), float(rhs)
        if tol is None:
            tol = self.cfg.tolerance * max(1.0, abs(lhs), abs(rhs))
        self.checks.append((name, lhs, rhs, float(tol)))

    def metric(self, name, value, mode="max"):
        value = float(value)
        if name in self.metrics:
            old_mode, old = self.metrics[name]
            value = _combine(old_mode, old, value)
        self.metrics[name] = (mode, value)

    def violated(self):
        return [c for c in self.checks if not c[1] - c[2] <= c[3]]


def _combine(mode, a, b):
    if mode == "max":
        return max(a, b)
    if mode == "min":
        return min(a, b)
    if mode == "sum":
        return a + b
    raise ValueError(f"unknown metric mode {mode!r}")


def thread_count(threads=None):
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        threads = int(raw) if raw not in (None, "") else 1
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def execute_trial(suite, cfg, fn, index):
    trial = Trial(suite, cfg, index)
    fn(trial)
    return trial


def run_trials(suite, cfg, fn, threads=None):
    """Run ``fn`` on every trial; results come back in trial order."""
    threads = thread_count(threads)
    indices = range(cfg.trials)
    if threads == 1:
        return [execute_trial(suite, cfg, fn, i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda i: execute_trial(suite, cfg, fn, i), indices))


def _violation_record(trial, check):
    name, lhs, rhs, tol = check
    return {
        "seed": trial.cfg.seed,
        "trial": trial.index,
        "dimension": trial.dim,
        "check": name,
        "lhs": lhs,
        "rhs": rhs,
        "slack": lhs - rhs,
        "tolerance": tol,
        "witness": {k: to_fixture(trial.alg, v) for k, v in trial.witness.items()},
    }


def build_report(suite, cfg, trials, kind="verification", extra=None):
    """Merge trial results (in trial order) into a :class:`VerificationReport`.

    Besides the suite's own metrics, ``max_gap.<check>`` holds the largest
    raw ``lhs - rhs`` seen for each check.
    """
    violations = []
    merged = {}
    for trial in trials:
        for check in trial.violated():
            violations.append(_violation_record(trial, check))
        for name, lhs, rhs, _ in trial.checks:
            key = f"max_gap.{name}"
            merged[key] = ("max", max(merged[key][1], lhs - rhs)) if key in merged else ("max", lhs - rhs)
        for name, (mode, value) in trial.metrics.items():
            merged[name] = (mode, _combine(mode, merged[name][1], value)) if name in merged else (mode, value)
    constants = {k: float(v) for k, (_, v) in sorted(merged.items())}
    return VerificationReport(suite, cfg.to_dict(), len(trials), violations, constants, kind, extra or {})
