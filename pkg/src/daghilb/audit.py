"""Assemble every check into one versioned, deterministic audit report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from . import dagcat, l2equiv, monoidal, ortho, scalars, unidecomp
from .report import Report
from .scalars import FieldTag
from .tolerances import DEFAULT_TOL, ToleranceProfile

SCHEMA_VERSION = "1.0"

AXIOMS = {
    "D": "dagger: an involutive identity-on-objects contravariant functor",
    "G": "a simple dagger generator K whose scalars form a division ring",
    "B": "finite dagger biproducts",
    "E": "dagger equalizers of parallel pairs",
    "K": "every dagger mono is a dagger kernel",
    "C": "directed colimits of dagger monos",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AuditConfig:
    fields: tuple[FieldTag, ...] = (FieldTag.R, FieldTag.C, FieldTag.H)
    dims: tuple[int, ...] = (1, 2, 3, 4)
    trials: int = 20
    seed: int = 0
    tol: ToleranceProfile = field(default_factory=lambda: DEFAULT_TOL)

    def __post_init__(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.dims:
            raise ConfigError("need at least one dimension")
        if any((not isinstance(d, int)) or d < 0 for d in self.dims):
            raise ConfigError(f"dimensions must be nonnegative integers, got {self.dims!r}")
        if not self.fields:
            raise ConfigError("need at least one field")
        object.__setattr__(self, "fields", tuple(FieldTag.parse(f) for f in self.fields))
        object.__setattr__(self, "dims", tuple(self.dims))

    @property
    def max_dim(self) -> int:
        return max(self.dims)

    @property
    def positive_dims(self) -> tuple[int, ...]:
        return tuple(d for d in self.dims if d > 0) or (1,)

    def to_dict(self) -> dict:
        return {
            "fields": [f.value for f in self.fields],
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "tolerances": self.tol.as_dict(),
        }


def _section(statement: str, reports: list[Report]) -> dict:
    checks = sorted((r.to_dict() for r in reports), key=lambda d: d["check"])
    return {
        "statement": statement,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def _per_field(cfg: AuditConfig, fn: Callable[[FieldTag], Report | list[Report]]) -> list[Report]:
    out: list[Report] = []
    for f in cfg.fields:
        r = fn(f)
        out.extend(r if isinstance(r, list) else [r])
    return out


def run_audit(cfg: AuditConfig) -> dict:
    t, s, tol = cfg.trials, cfg.seed, cfg.tol
    md = max(1, cfg.max_dim)
    dims = cfg.positive_dims

    axioms = {
        "D": _per_field(cfg, lambda f: dagcat.check_dagger_laws(f, t, s, md, tol)),
        "G": _per_field(cfg, lambda f: dagcat.check_generator(f, t, s, md, tol)),
        "B": _per_field(cfg, lambda f: dagcat.check_biproduct_addition(f, t, s, md, tol)),
        "E": _per_field(cfg, lambda f: dagcat.check_equalizers(f, t, s, md, tol)),
        "K": _per_field(cfg, lambda f: dagcat.check_kernels(f, t, s, md, tol)),
        "C": _per_field(cfg, lambda f: l2equiv.check_directed_colimits(f, t, s, tol)),
    }

    sections: dict[str, dict] = {}
    sections["scalar-laws"] = _section(
        "the scalars form an involutive division ring",
        _per_field(cfg, lambda f: scalars.check_scalar_laws(f, max(t, 100), s)),
    )
    sections["factorization"] = _section(
        "epi / dagger-mono factorisation of every morphism",
        _per_field(cfg, lambda f: dagcat.check_factorization(f, t, s, md, tol)),
    )
    sections["ortholattice"] = _section(
        "dagger subobjects form an orthomodular ortholattice",
        _per_field(cfg, lambda f: [
            ortho.check_ortholattice(f, dims, t, s, tol),
            ortho.check_orthomodular_battery(f, dims, t, s, tol),
        ]),
    )
    sections["subspace-correspondence"] = _section(
        "dagger subobjects correspond to closed subspaces of the hom-space",
        _per_field(cfg, lambda f: ortho.check_phi(f, dims, t, s, tol)),
    )
    sections["equivalence"] = _section(
        "the hom-functor out of the generator is a dagger equivalence onto Hilbert spaces",
        l2equiv.verify_equivalence(cfg.fields, dims, t, s, tol),
    )
    sections["unitary-decomposition"] = _section(
        "every operator is a short linear combination of unitaries",
        _per_field(cfg, lambda f: unidecomp.check_decomposition(f, dims, t, s, tol)),
    )
    if FieldTag.H in cfg.fields:
        sections["promoted-inner-product"] = _section(
            "real inner products with compatible structure promote to quaternionic ones",
            [scalars.check_promoted_form(t, s)],
        )
    mono_reports: list[Report] = []
    for f in cfg.fields:
        if f is FieldTag.H:
            continue
        mono_reports.extend(monoidal.check_monoidal(f, t, s, min(md, 4), tol))
        mono_reports.append(monoidal.check_bullet_equals_circ(t, s, f, md, tol))
    if FieldTag.H in cfg.fields:
        mono_reports.append(monoidal.quaternionic_obstruction())
    sections["monoidal"] = _section("dagger monoidal structure and commutativity of scalars", mono_reports)

    axiom_out = {k: _section(AXIOMS[k], v) for k, v in axioms.items()}
    all_sections = list(axiom_out.values()) + list(sections.values())
    n_checks = sum(len(sec["checks"]) for sec in all_sections)
    n_failed = sum(1 for sec in all_sections for c in sec["checks"] if not c["passed"])
    return {
        "kind": "audit",
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "axioms": axiom_out,
        "sections": sections,
        "summary": {"checks": n_checks, "failed_checks": n_failed, "passed": n_failed == 0},
    }


def load_schema() -> dict:
    """The published JSON schema covering every report kind."""
    from importlib import resources

    return json.loads(resources.files("daghilb").joinpath("schemas/report.schema.json").read_text())


def dumps(report: dict) -> str:
    """Canonical serialisation: sorted keys, no NaN, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def summary_lines(report: dict) -> list[str]:
    lines = []
    for key in sorted(report.get("axioms", {})):
        for c in report["axioms"][key]["checks"]:
            lines.append(f"{key}  {_line(c)}")
    for name in sorted(report.get("sections", {})):
        for c in report["sections"][name]["checks"]:
            lines.append(f"   {_line(c)}")
    return lines


def _line(c: dict) -> str:
    status = "PASS" if c["passed"] else "FAIL"
    w = c["worst_residual"]
    w = "n/a" if w is None else f"{w:.2e}"
    tag = " (proxy)" if c["proxy"] else ""
    return f"[{status}] {c['check']}{tag}: {c['trials'] - c['failed']}/{c['trials']} ok, worst {w}"
