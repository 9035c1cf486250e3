"""Command line entry point: audit suites over groups and primes, torsion tables."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from sympy import isprime

from .chevalley import (
    build_chevalley_algebra,
    springer_injective_mod,
    springer_surjective_mod,
    springer_torsion_report,
)
from .centralizer import centralizer_audit, rs_audit
from .errors import ConfigError, KkitError, WeylTooLarge
from .groth import FLAG_MAX_N, FLAG_MAX_Q, groth_fiber_audit
from .kostant import (
    FieldModel,
    direct_sum_certificate,
    integral_complement,
    regularity_audit,
    slice_weight_check,
)
from .linalg import is_unit
from .quotient import (
    CHART_MAX_N,
    CHART_MAX_Q,
    conjugation_invariance_check,
    kappa_form,
    restriction_check,
    slice_chart_audit_gl,
)
from .report import EXPECTED_FAIL, FAIL, NOT_APPLICABLE, PASS, CheckResult, VerificationReport
from .roots import build_root_datum, condition_check
from .waction import TruncatedTwistedModule, tau_root_audit, waction_audit

SUITES = ("springer", "conditions", "slice", "quotient", "centralizer", "groth", "waction")
DEFAULT_PRIMES = (0, 2, 3, 5, 7, 11, 31)
DEFAULT_GROUPS = (
    "SC(A1)", "SC(A2)", "SC(A3)", "SC(A4)", "SC(B2)", "SC(B3)", "SC(C3)", "SC(D4)",
    "SC(G2)", "SC(F4)", "GL(2)", "GL(3)", "GL(4)",
)
MAX_DEGREE = 10


@dataclass
class SuiteConfig:
    groups: list[str]
    primes: list[int] = field(default_factory=lambda: list(DEFAULT_PRIMES))
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    seed: int = 0
    samples: int = 100
    degree: int = 6
    strict: bool = False
    output: str | None = None

    def validate(self) -> None:
        if not self.groups:
            raise ConfigError("at least one --group is required")
        for g in self.groups:
            try:
                build_root_datum(g)
            except KkitError as exc:
                raise ConfigError(f"bad group spec {g!r}: {exc}") from exc
        for p in self.primes:
            if p < 0 or (p and not isprime(p)):
                raise ConfigError(f"{p} is neither 0 nor a prime")
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)} or all")
        if self.samples < 1:
            raise ConfigError("--samples must be positive")
        if not 0 <= self.degree <= MAX_DEGREE:
            raise ConfigError(f"--degree must lie in [0, {MAX_DEGREE}]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")


def _na(check, group, p, reason, statement=""):
    return CheckResult(check, group, p, NOT_APPLICABLE, statement, {"reason": reason})


def _springer(group, primes, cfg):
    alg = build_chevalley_algebra(group)
    rd = alg.datum
    rep = springer_torsion_report(alg)
    out = [
        CheckResult(
            "springer-torsion", group, None, PASS if rep.localized else FAIL,
            "torsion of coker(t_i) away from degrees -1, 0 lies in the bad primes",
            rep.as_dict(), None if rep.localized else {"other_torsion": sorted(rep.other_torsion)},
        ),
        CheckResult(
            "springer-N", group, None, PASS if rep.n_matches else FAIL,
            "product of torsion primes equals the product of non-very-good primes",
            {"derived_N": rep.derived_n, "very_good_product": rep.very_good_product},
            None if rep.n_matches else {"derived_N": rep.derived_n, "expected": rep.very_good_product},
        ),
    ]
    for p in primes:
        vg = rd.is_very_good(p)
        for check, data, statement in (
            ("springer-injective", springer_injective_mod(alg, p), "t_i is injective mod p for i < 0"),
            ("springer-surjective", springer_surjective_mod(alg, p), "t_i is surjective mod p for i >= 0"),
        ):
            bad = sorted(i for i, ok in data.items() if not ok)
            status = PASS if not bad else (FAIL if vg else EXPECTED_FAIL)
            out.append(CheckResult(check, group, p, status, statement,
                                   {"very_good": vg, "degrees": sorted(data)},
                                   {"degrees": bad} if bad else None))
    return out


def _conditions(group, primes, cfg):
    rd = build_root_datum(group)
    out = []
    for p in primes:
        prof = condition_check(rd, p)
        vg = rd.is_very_good(p)
        for name in ("c1", "c2", "c3", "c4"):
            val = getattr(prof, name)
            status = PASS if val else (FAIL if vg else EXPECTED_FAIL)
            out.append(CheckResult(
                f"condition-{name.upper()}", group, p, status, f"condition ({name.upper()})",
                {"value": val, "very_good": vg},
                None if val else prof.witnesses or {"value": False},
            ))
        chain = prof.chain_holds()
        out.append(CheckResult("condition-chain", group, p, PASS if chain else FAIL,
                               "C4 => C3 => C2 and C3 => C1", prof.as_dict(),
                               None if chain else prof.as_dict()))
    return out


def _slice(group, primes, cfg):
    alg = build_chevalley_algebra(group)
    sl = integral_complement(alg)
    divs = direct_sum_certificate(alg, sl)
    ok = len(divs) == sum(1 for d in alg.degrees if d <= 0) and all(is_unit(d, sl.n_inverted) for d in divs)
    out = [
        slice_weight_check(sl, build_root_datum(group)),
        CheckResult("slice-integral-complement", group, None, PASS if ok else FAIL,
                    "b = s + [e, n] over Z[1/N]",
                    {"complement": [list(alg.labels[b]) for b in sl.complement], "N": sl.n_inverted},
                    None if ok else {"divisors": list(divs)}),
    ]
    for p in primes:
        out.extend(regularity_audit(FieldModel(alg, p), sl, cfg.samples, cfg.seed, cfg.strict))
    return out


def _quotient(group, primes, cfg):
    alg = build_chevalley_algebra(group)
    rd = alg.datum
    k = kappa_form(alg)
    out = [CheckResult("kappa-form", group, None, PASS, "kappa is symmetric, invariant, unit over Z[1/N]",
                       {"det_primes": k.det_primes(), "choice": list(k.choice)})]
    is_gl = len(rd.factors) == 1 and rd.factors[0].kind == "GL"
    for p in primes:
        out.append(CheckResult("kappa-nondegenerate", group, p,
                               PASS if k.nondegenerate_at(p) else (FAIL if rd.is_very_good(p) else EXPECTED_FAIL),
                               "kappa is nondegenerate mod p", {"det_primes": k.det_primes()},
                               None if k.nondegenerate_at(p) else {"gram_det_primes": k.det_primes()}))
        if not is_gl:
            out.append(_na("kostant-chart-gl", group, p, "invariant rings are only modeled for GL(n)"))
            continue
        n = rd.rank
        out.append(restriction_check(n, p, 1000, cfg.seed))
        out.append(conjugation_invariance_check(n, p, cfg.samples, cfg.seed))
        if p == 0:
            out.append(_na("kostant-chart-gl", group, p, "chart enumeration needs a finite field"))
        elif n > CHART_MAX_N or p > CHART_MAX_Q:
            out.append(_na("kostant-chart-gl", group, p, f"outside the envelope n <= {CHART_MAX_N}, q <= {CHART_MAX_Q}"))
        else:
            out.append(slice_chart_audit_gl(n, p))
    return out


def _centralizer(group, primes, cfg):
    alg = build_chevalley_algebra(group)
    sl = integral_complement(alg)
    k = kappa_form(alg)
    out = []
    for p in primes:
        model = FieldModel(alg, p)
        out.extend(centralizer_audit(model, sl, k, cfg.samples, cfg.seed))
        try:
            out.append(rs_audit(model, alg.datum, 2 * cfg.samples, cfg.seed))
        except WeylTooLarge as exc:
            out.append(_na("regular-semisimple", group, p, str(exc)))
    return out


def _groth(group, primes, cfg):
    rd = build_root_datum(group)
    out = []
    for p in primes:
        if len(rd.factors) != 1 or rd.factors[0].kind != "GL":
            out.append(_na("groth-fiber-count", group, p, "flag enumeration is only modeled for GL(n)"))
        elif p == 0 or rd.rank > FLAG_MAX_N or p > FLAG_MAX_Q:
            out.append(_na("groth-fiber-count", group, p,
                           f"outside the envelope n <= {FLAG_MAX_N}, 0 < q <= {FLAG_MAX_Q}"))
        else:
            out.extend(groth_fiber_audit(rd.rank, p, max(cfg.samples // 2, 50), cfg.seed))
    return out


def _waction(group, primes, cfg):
    rd = build_root_datum(group)
    if len(rd.factors) != 1 or rd.factors[0].kind != "SC":
        return [_na("waction", group, None, "needs a single simply connected quasi-simple factor")]
    out = []
    for p in primes:
        if not rd.is_very_good(p):
            out.append(_na("tau-roots", group, p, f"p={p} is not very good for {group}"))
            continue
        out.append(tau_root_audit(rd, p))
        if rd.ss_rank > 2:
            out.append(_na("waction", group, p, "twisted-module audit is limited to rank <= 2"))
            continue
        module = TruncatedTwistedModule(build_chevalley_algebra(group), p, cfg.degree)
        out.extend(waction_audit(module, rd, cfg.degree, cfg.seed))
    return out


RUNNERS = {
    "springer": _springer,
    "conditions": _conditions,
    "slice": _slice,
    "quotient": _quotient,
    "centralizer": _centralizer,
    "groth": _groth,
    "waction": _waction,
}


def _run_task(task):
    suite, group, cfg = task
    start = time.perf_counter()
    try:
        results = RUNNERS[suite](group, cfg.primes, cfg)
    except Exception as exc:  # a broken check must not abort the suite
        results = [CheckResult(f"{suite}-error", group, None, FAIL, f"{suite} suite raised",
                               {}, {"error": f"{type(exc).__name__}: {exc}"})]
    return results, time.perf_counter() - start


def run_suite(cfg: SuiteConfig, timing: bool = False) -> VerificationReport:
    cfg.validate()
    tasks = [(s, g, cfg) for g in cfg.groups for s in cfg.suites]
    threads = int(os.environ.get("KKIT_THREADS", "1") or 1)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(t) for t in tasks]
    report = VerificationReport(seed=cfg.seed, config={k: v for k, v in asdict(cfg).items() if k != "output"})
    times = {}
    for (suite, group, _), (results, secs) in zip(tasks, outcomes):
        report.extend(results)
        times[f"{group}/{suite}"] = round(secs, 3)
    if timing:
        report.timing = times
    return report


def emit_torsion_tables(specs, out=None) -> dict:
    """Per group: torsion primes of every t_i, the derived N and the very-good comparison."""
    table = {}
    for spec in specs:
        rep = springer_torsion_report(build_chevalley_algebra(spec))
        table[spec] = rep.as_dict()
    text = json.dumps(table, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    return table


def _primes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kkit", description="Exact audits of Kostant slices over Z and F_p.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run audit suites")
    check.add_argument("--group", action="append", default=[], help="group spec, e.g. SC(A2)*GL(3); repeatable")
    check.add_argument("--primes", type=_primes, default=list(DEFAULT_PRIMES), help="comma-separated primes (0 = Q)")
    check.add_argument("--suite", action="append", default=[], choices=SUITES + ("all",), help="repeatable")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--samples", type=int, default=100)
    check.add_argument("--degree", type=int, default=6, help="truncation degree D for the W-action audit")
    check.add_argument("--json", dest="json_path", help="write the JSON report here ('-' for stdout)")
    check.add_argument("--strict", action="store_true", help="raise instead of marking not-applicable")
    check.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")

    tables = sub.add_parser("tables", help="emit Springer torsion tables")
    tables.add_argument("--group", action="append", default=[])
    tables.add_argument("--out", help="output path (default stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "tables":
        specs = args.group or list(DEFAULT_GROUPS)
        try:
            table = emit_torsion_tables(specs, args.out)
        except KkitError as exc:
            print(f"kkit: {exc}", file=sys.stderr)
            return 2
        if not args.out:
            sys.stdout.write(json.dumps(table, sort_keys=True, indent=2) + "\n")
        return 0

    suites = list(SUITES) if not args.suite or "all" in args.suite else list(dict.fromkeys(args.suite))
    cfg = SuiteConfig(
        groups=args.group, primes=args.primes, suites=suites, seed=args.seed,
        samples=args.samples, degree=args.degree, strict=args.strict, output=args.json_path,
    )
    try:
        report = run_suite(cfg, timing=args.timing)
    except ConfigError as exc:
        print(f"kkit: {exc}", file=sys.stderr)
        return 2
    text = report.to_json()
    if args.json_path == "-":
        sys.stdout.write(text)
    else:
        if args.json_path:
            with open(args.json_path, "w") as fh:
                fh.write(text)
        counts = report.counts()
        print(" ".join(f"{k}={v}" for k, v in counts.items()))
        for r in report.failures:
            print(f"FAIL {r.group} p={r.p} {r.check}: {r.witness}")
    return 1 if report.failures else 0


if __name__ == "__main__":
    sys.exit(main())
