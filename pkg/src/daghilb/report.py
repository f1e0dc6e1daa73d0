from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

MAX_LISTED_FAILURES = 20


def check_rng(check: str, seed: int, trial: int | None = None) -> np.random.Generator:
    """Independent PRNG stream per (check, seed[, trial]).

    Keyed on a CRC of the check name, so adding a check never shifts the
    stream another check sees.
    """
    key = [int(seed) & 0xFFFFFFFF, zlib.crc32(check.encode())]
    if trial is not None:
        key.append(int(trial))
    return np.random.default_rng(np.random.SeedSequence(key))


def _clean(x: float) -> float | None:
    if x is None or math.isnan(x):
        return None
    return float(x) if math.isfinite(x) else None


@dataclass
class Report:
    check: str
    statement_ref: str
    trials: int = 0
    failed: int = 0
    worst_residual: float = 0.0
    tolerance: float | None = None
    failures: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    proxy: bool = False

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def observe(self, residual: float, limit: float, *, seed: int, trial: int, detail: str = "") -> bool:
        """Record one trial whose residual must not exceed ``limit``."""
        self.trials += 1
        if math.isnan(residual):
            residual = math.inf
        self.worst_residual = max(self.worst_residual, residual)
        ok = residual <= limit
        if not ok:
            self.fail(seed=seed, trial=trial, detail=detail or f"residual {residual:.3e} > {limit:.1e}", count=False)
        return ok

    def check_true(self, ok: bool, *, seed: int, trial: int, detail: str) -> bool:
        self.trials += 1
        if not ok:
            self.fail(seed=seed, trial=trial, detail=detail, count=False)
        return ok

    def fail(self, *, seed: int, trial: int, detail: str, count: bool = True) -> None:
        if count:
            self.trials += 1
        self.failed += 1
        if len(self.failures) < MAX_LISTED_FAILURES:
            self.failures.append({"seed": int(seed), "trial": int(trial), "detail": detail})

    def merge(self, other: "Report") -> "Report":
        if other.check != self.check:
            raise ValueError(f"cannot merge reports of {self.check!r} and {other.check!r}")
        out = Report(
            self.check,
            self.statement_ref,
            self.trials + other.trials,
            self.failed + other.failed,
            max(self.worst_residual, other.worst_residual),
            self.tolerance,
            (self.failures + other.failures)[:MAX_LISTED_FAILURES],
            list(dict.fromkeys(self.notes + other.notes)),
            self.proxy or other.proxy,
        )
        return out

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "statement_ref": self.statement_ref,
            "passed": self.passed,
            "trials": self.trials,
            "failed": self.failed,
            "worst_residual": _clean(self.worst_residual),
            "tolerance": self.tolerance,
            "proxy": self.proxy,
            "failures": list(self.failures),
            "notes": list(self.notes),
        }

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = _clean(self.worst_residual)
        w = "n/a" if worst is None else f"{worst:.2e}"
        tag = " (proxy)" if self.proxy else ""
        return f"[{status}] {self.check}{tag}: {self.trials - self.failed}/{self.trials} ok, worst residual {w}"
