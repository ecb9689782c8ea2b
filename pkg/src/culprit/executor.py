"""Black-box pipeline execution under a bounded worker pool.

Child protocol, bit exact: the configuration is written to the child's stdin
as a single JSON object, the child prints a single JSON object containing the
metric key on stdout and exits 0. Nonzero exit, unparseable output, or a
timeout all count as failing observations rather than errors; only a missing
command binary aborts, since that is a setup problem, not a pipeline result.
"""
from __future__ import annotations

import json
import os
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from .model import Configuration, Instance, Origin, Outcome

CRASH = "CRASH"
BAD_OUTPUT = "BAD_OUTPUT"
TIMEOUT = "TIMEOUT"

_BASE_ENV_VARS = ("PATH", "HOME", "TMPDIR", "LANG", "LC_ALL")


class BudgetExceededError(RuntimeError):
    pass


@dataclass
class Budget:
    """Counts executor invocations; stored-provenance lookups cost nothing."""

    max_runs: int
    spent: int = 0

    @property
    def remaining(self) -> int:
        return self.max_runs - self.spent

    def spend(self, n: int) -> None:
        if n < 0 or self.spent + n > self.max_runs:
            raise BudgetExceededError(
                f"cannot spend {n} runs: {self.spent}/{self.max_runs} already used"
            )
        self.spent += n


class Direction(str, Enum):
    GE = "ge"
    LE = "le"


@dataclass(frozen=True)
class EvaluationSpec:
    metric_key: str
    threshold: float
    direction: Direction = Direction.GE

    def outcome_for(self, score: Optional[float]) -> Outcome:
        if score is None:
            return Outcome.FAIL
        ok = score >= self.threshold if self.direction is Direction.GE else score <= self.threshold
        return Outcome.SUCCEED if ok else Outcome.FAIL


@dataclass(frozen=True)
class ExecutorConfig:
    command: str
    timeout: float = 300.0
    workers: int = 5
    env_passthrough: tuple[str, ...] = ()

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def _child_env(cfg: ExecutorConfig) -> dict:
    env = {}
    for name in (*_BASE_ENV_VARS, *cfg.env_passthrough):
        if name in os.environ:
            env[name] = os.environ[name]
    return env


def run(
    config: Configuration,
    exec_cfg: ExecutorConfig,
    eval_spec: EvaluationSpec,
    run_id: str,
    origin: Origin = Origin.PROBE,
) -> Instance:
    """Execute one configuration and apply the evaluation predicate."""
    argv = shlex.split(exec_cfg.command)
    payload = json.dumps(config.as_dict(), sort_keys=True)
    try:
        proc = subprocess.run(
            argv,
            input=payload,
            capture_output=True,
            text=True,
            timeout=exec_cfg.timeout,
            env=_child_env(exec_cfg),
        )
    except FileNotFoundError:
        raise  # configuration problem, not a pipeline failure
    except subprocess.TimeoutExpired:
        return Instance(config, None, Outcome.FAIL, run_id, origin, failure=TIMEOUT)
    if proc.returncode != 0:
        return Instance(config, None, Outcome.FAIL, run_id, origin, failure=CRASH)
    try:
        output = json.loads(proc.stdout)
        score = float(output[eval_spec.metric_key])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return Instance(config, None, Outcome.FAIL, run_id, origin, failure=BAD_OUTPUT)
    return Instance(config, score, eval_spec.outcome_for(score), run_id, origin)


def run_batch(
    configs: Sequence[Configuration],
    exec_cfg: ExecutorConfig,
    eval_spec: EvaluationSpec,
    budget: Budget,
    run_ids: Optional[Sequence[str]] = None,
    origin: Origin = Origin.PROBE,
    run_fn: Callable[..., Instance] = run,
) -> list[Instance]:
    """Execute a batch with at most `workers` concurrent children.

    Results come back in input order regardless of completion order, and the
    budget is charged one run per configuration.
    """
    if run_ids is None:
        run_ids = [f"run-{budget.spent + i + 1:05d}" for i in range(len(configs))]
    if len(run_ids) != len(configs):
        raise ValueError("run_ids and configs must align")
    budget.spend(len(configs))
    if not configs:
        return []
    with ThreadPoolExecutor(max_workers=exec_cfg.workers) as pool:
        futures = [
            pool.submit(run_fn, cfg, exec_cfg, eval_spec, rid, origin)
            for cfg, rid in zip(configs, run_ids)
        ]
        return [f.result() for f in futures]


class SubprocessRunner:
    """Stateful executor handle used by the debugging loop."""

    def __init__(self, exec_cfg: ExecutorConfig, eval_spec: EvaluationSpec):
        self.exec_cfg = exec_cfg
        self.eval_spec = eval_spec
        self._seq = 0

    def run_batch(
        self,
        configs: Sequence[Configuration],
        budget: Budget,
        origin: Origin = Origin.PROBE,
    ) -> list[Instance]:
        ids = [f"run-{self._seq + i + 1:05d}" for i in range(len(configs))]
        self._seq += len(configs)
        return run_batch(configs, self.exec_cfg, self.eval_spec, budget, ids, origin)
