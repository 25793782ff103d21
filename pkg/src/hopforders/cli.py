"""Command-line harness: build an instance from a JSON spec, run verification
suites, write a deterministic JSON report.

Exit codes: 0 when every selected suite passes, 1 on a verification failure,
2 on unreadable input, unknown suites or cap errors.
"""

from __future__ import annotations

import json
import sys
import time
from typing import Any, Callable, Optional

import click

from . import __version__
from .certificates import Certificate, jsonable
from .cocharacters import (HypothesisError, coalgebra_decomposition, double_coset_data,
                           distinguished_cocharacter, induced_character, uniqueness_pipeline)
from .groups import CapExceededError, GroupError
from .instances import (BuiltInstance, InstanceError, InstanceSpec, build_instance,
                        check_thm2_hypotheses)
from .orders import contains, verify_hopf_order
from .qsparse import ExactOverflowError
from .twisting import TwistError, lemma_J_forms, decomposition_from_iso, verify_twist_axioms, \
    verify_twisted_hopf_axioms

SCHEMA_VERSION = 1

SUITES = ("hopf-axioms", "twist-axioms", "order-closure", "cocharacter", "uniqueness-pipeline",
          "thm2-hypotheses", "psl-witness", "composite")

_TAU_FAMILIES = {"sl", "gl", "sp"}
_APPLICABLE: dict[str, Callable[[str], bool]] = {
    "hopf-axioms": lambda f: f != "psl_witness",
    "twist-axioms": lambda f: f != "psl_witness",
    "order-closure": lambda f: f != "psl_witness",
    "cocharacter": lambda f: f != "psl_witness",
    "uniqueness-pipeline": lambda f: f in _TAU_FAMILIES,
    "thm2-hypotheses": lambda f: f in _TAU_FAMILIES,
    "psl-witness": lambda f: f == "psl_witness",
    "composite": lambda f: f == "composite",
}

CATALOG = (
    ("sl", "q in {2,3,4,5}, n = 1", "§6.1", "F_q^2n x| SL_2n(q); order closure, structural hypotheses, uniqueness chain"),
    ("gl", "q in {2,3}, n = 1", "§6.2", "F_q^2n x| GL_2n(q); same suites as sl"),
    ("sp", "q in {2,3}, n = 1", "§6.2", "F_q^2n x| Sp_2n(q) with a trace-orthogonal basis"),
    ("s4", "none", "§4", "S4 with the Klein four-group twist; order closure and cocharacters"),
    ("heisenberg_gl", "p = 2, n = 1", "§4", "Heisenberg-type example; M outside every normal abelian subgroup"),
    ("psl_witness", "p in {2,3,5}", "§7", "non-integral minimal polynomial inside the Heisenberg subgroup of SL_3(p)"),
    ("composite", "q = 2, ns = (1,1)", "§6.3", "block-diagonal product of SL factors with the product twist"),
)

SUITE_NOTES = (
    ("hopf-axioms", "bialgebra and antipode axioms of the twisted structure on a fixed sample"),
    ("twist-axioms", "dual cocycle identity, counit normalization, inverse, J expansions"),
    ("order-closure", "unit, product, coproduct, counit, antipode and J containment for X"),
    ("cocharacter", "double-coset decomposition, N_tau, Rad_tau, distinguished cocharacters"),
    ("uniqueness-pipeline", "E_tau closed form and recovery of e_eps^L"),
    ("thm2-hypotheses", "conditions (i)-(v) by enumeration"),
    ("psl-witness", "Heisenberg irrep image and minimal polynomial"),
    ("composite", "product twist equals the twist of the combined subgroup"),
)


class PreconditionError(Exception):
    """Input that cannot be run: exit code 2."""


def catalog_text() -> str:
    lines = ["families:"]
    for fam, params, ref, note in CATALOG:
        lines.append(f"  {fam:<14} {params:<20} {ref:<5} {note}")
    lines.append("suites:")
    for name, note in SUITE_NOTES:
        lines.append(f"  {name:<20} {note}")
    return "\n".join(lines) + "\n"


def parse_suites(text: str, family: str) -> list[str]:
    if text.strip() == "all":
        return [s for s in SUITES if _APPLICABLE[s](family)]
    asked = [s.strip() for s in text.split(",") if s.strip()]
    if not asked:
        raise PreconditionError("at least one suite must be selected")
    unknown = [s for s in asked if s not in SUITES]
    if unknown:
        raise PreconditionError(f"unknown suites: {', '.join(unknown)}")
    bad = [s for s in asked if not _APPLICABLE[s](family)]
    if bad:
        raise PreconditionError(f"suites not applicable to family {family}: {', '.join(bad)}")
    return [s for s in SUITES if s in asked]


# ---------------------------------------------------------------- suites

def _hopf_sample(inst: BuiltInstance):
    alg = inst.algebra
    sample = list(inst.X.basis[:6])
    extra = list(inst.M.generators) + ([inst.tau] if inst.tau is not None else [])
    extra += list(getattr(inst.X, "coset_reps", [])[1:3])
    seen = set()
    for g in extra:
        if g not in seen:
            seen.add(g)
            sample.append(alg.basis(g))
    return sample


def _suite_hopf_axioms(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    return [verify_twisted_hopf_axioms(inst.twist, _hopf_sample(inst))]


def _suite_twist_axioms(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    certs = [verify_twist_axioms(inst.twist.J, inst.twist.J_inv)]
    dec = inst.extras.get("decomposition")
    if dec is None:
        dec = decomposition_from_iso(inst.M, inst.L.abstract.rank, inst.twist.omega)
    certs.append(lemma_J_forms(inst.twist, dec))
    return certs


def _suite_order_closure(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    certs = [verify_hopf_order(inst.X, inst.twist, jobs=jobs).as_certificate()]
    mirror = inst.extras.get("X_mirror")
    if mirror is not None:
        c = verify_hopf_order(mirror, inst.twist, jobs=jobs).as_certificate()
        c.name = "hopf_order_mirror"
        certs.append(c)
    example = inst.extras.get("certificate")
    if example is not None:
        certs.append(example)
    return certs


def _suite_cocharacter(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    alg, M = inst.algebra, inst.M
    certs = [coalgebra_decomposition(alg, M, inst.omega)]
    summary = Certificate("distinguished_cocharacters")
    for data in double_coset_data(alg, M, inst.omega):
        coch, cert = distinguished_cocharacter(data)
        member = contains(inst.X, coch.value, "distinguished cocharacter")
        key = f"tau_{data.tau}"
        summary.record(key, cert.passed and member.integral,
                       {"failed": cert.failed(), "membership_violation": member.first_violation})
        summary.details[key] = cert.details
    certs.append(summary)
    if inst.spec.family in _TAU_FAMILIES:
        certs.append(induced_character(inst.X)[1])
    return certs


def _suite_uniqueness(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    try:
        return [uniqueness_pipeline(inst)]
    except HypothesisError as exc:
        cert = Certificate("uniqueness_pipeline")
        cert.record("hypotheses", False, {"error": str(exc)})
        return [cert]


def _suite_thm2(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    return [check_thm2_hypotheses(inst)]


def _suite_composite(inst: BuiltInstance, jobs: int) -> list[Certificate]:
    return [inst.extras["product_twist"]]


_RUNNERS = {
    "hopf-axioms": _suite_hopf_axioms,
    "twist-axioms": _suite_twist_axioms,
    "order-closure": _suite_order_closure,
    "cocharacter": _suite_cocharacter,
    "uniqueness-pipeline": _suite_uniqueness,
    "thm2-hypotheses": _suite_thm2,
    "composite": _suite_composite,
}


def run(spec: InstanceSpec, suites: list[str], jobs: int = 1,
        timings: bool = True) -> tuple[dict[str, Any], int]:
    """Build, run suites in declared order, return (report, exit code)."""
    report: dict[str, Any] = {"schema_version": SCHEMA_VERSION,
                              "tool": {"name": "hopforders", "version": __version__},
                              "spec": spec.to_dict(), "suites": {}}
    times: dict[str, float] = {}
    t0 = time.perf_counter()
    built = build_instance(spec)
    times["build"] = time.perf_counter() - t0
    results: dict[str, Any] = {}
    if isinstance(built, Certificate):
        report["instance"] = {"label": spec.label, "order": built.details.get("order")}
        report["choices"] = {"generators": "x12(1), x13(1), x23(1) in SL_3(p)", "conductor": spec.p}
        for name in suites:
            results[name] = {"passed": built.passed, "certificates": [built.to_dict()]}
    else:
        report["instance"] = built.summary()
        report["choices"] = jsonable(built.choices)
        for name in suites:
            t = time.perf_counter()
            certs = _RUNNERS[name](built, jobs)
            times[name] = time.perf_counter() - t
            results[name] = {"passed": all(c.passed for c in certs),
                             "certificates": [c.to_dict() for c in certs]}
    report["suites"] = results
    report["summary"] = summary_lines(results)
    ok = all(r["passed"] for r in results.values())
    report["overall"] = "pass" if ok else "fail"
    if timings:
        report["timings"] = {"jobs": jobs, "seconds": {k: round(v, 4) for k, v in times.items()}}
    return report, 0 if ok else 1


def summary_lines(results: dict[str, Any]) -> list[str]:
    """One "suite/certificate/check: true|false" line per recorded check."""
    lines = []
    for suite, res in results.items():
        for cert in res["certificates"]:
            for check, ok in cert["checks"].items():
                lines.append(f"{suite}/{cert['name']}/{check}: {'true' if ok else 'false'}")
    return lines


def dump_report(report: dict[str, Any]) -> str:
    return json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- click

@click.group()
@click.version_option(__version__, prog_name="hopforders")
def main() -> None:
    """Exact verification of Hopf orders in twisted group algebras."""


@main.command("list-instances")
def list_instances() -> None:
    """Print the instance families and what each suite checks."""
    click.echo(catalog_text(), nl=False)


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(dir_okay=False),
              help="JSON instance spec, e.g. {\"family\": \"sl\", \"q\": 2, \"n\": 1}.")
@click.option("--suites", default=None, help="Comma-separated suites, or 'all' (default).")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Report path; stdout when omitted.")
@click.option("--cap", default=None, type=click.IntRange(min=1),
              help="Override the group-order cap from the spec file.")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--no-timings", is_flag=True, help="Omit wall-clock fields for byte-identical reports.")
def verify(spec_path: str, suites: Optional[str], out_path: Optional[str], cap: Optional[int],
           jobs: int, no_timings: bool) -> None:
    """Build an instance and run verification suites."""
    try:
        try:
            with open(spec_path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"cannot read spec: {exc}") from exc
        if not isinstance(data, dict):
            raise PreconditionError("spec must be a JSON object")
        data = dict(data)
        file_suites = data.pop("suites", None)
        if cap is not None:
            data["cap"] = cap
        spec = InstanceSpec.from_dict(data)
        if suites is None:
            suites = ",".join(file_suites) if isinstance(file_suites, list) else (file_suites or "all")
        chosen = parse_suites(suites, spec.family)
        report, code = run(spec, chosen, jobs, timings=not no_timings)
    except (PreconditionError, InstanceError, CapExceededError, GroupError, TwistError,
            ExactOverflowError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    text = dump_report(report)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"{spec.label}: {report['overall']}", err=True)
    sys.exit(code)


if __name__ == "__main__":
    main()
