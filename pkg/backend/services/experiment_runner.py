# backend/services/experiment_runner.py - CLI / HTTP 공용 실험 실행기

import csv
import io
import json
import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from constants import PSI_DEFAULT_GROUPS
from models import ExperimentResult, ExperimentSpec
from storage import (
    dump_kernel_file,
    dump_rule_file,
    dump_window_csv,
    parse_group_algebra_matrix,
    parse_group_spec,
    parse_kernel_file,
    parse_rule_spec,
    read_text,
    write_text,
)
from workbench.marked_groups import free_ball, marked_distance
from workbench.uniform_windows import ProjectionFamily, hb_agreement_radius
from workbench.shift_space import (
    FiniteConfiguration,
    FixFamily,
    PeriodicConfiguration,
    fix_window,
    full_shift,
    parse_symbols,
    periodic_family,
)
from workbench.ca_engine import (
    CellularAutomaton,
    ca_apply,
    ca_compose,
    ca_equivalent,
    ca_equivalent_on,
    synthesize_ca,
    window_map,
)
from workbench.linear_ca import (
    lin_decide,
    lin_inverse_kernel,
    random_unit_pair,
    stable_finiteness_witness,
)
from workbench.surjunctivity_lab import (
    convergence_experiment,
    eca_sweep,
    gromov_radius,
    injectivity_transfer_check,
    is_injective_1d,
    is_surjective_1d,
    modulus_profile,
    periodic_test_families,
    psi_bounds,
)
from workbench.shared import error_handler, metrics
from workbench.shared.error_handler import DomainError, FormatError, WorkbenchError

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    data: Dict[str, Any]
    lines: List[str]
    rows: Optional[List[List[Any]]] = None
    dump: Optional[str] = None


def _need(spec: ExperimentSpec, name: str) -> Any:
    value = getattr(spec, name)
    if value is None or value == []:
        raise FormatError(f"{spec.command} needs --{name.replace('_', '-')}")
    return value


def _subshift(text: str, rank: int, q: int) -> ProjectionFamily:
    """full | fix:<group> | period:<n>"""
    kind, _, arg = text.partition(":")
    if kind == "full":
        return full_shift(rank, q)
    if kind == "fix":
        return FixFamily(parse_group_spec(arg), q)
    if kind == "period":
        try:
            return periodic_family(int(arg), q)
        except ValueError:
            raise FormatError(f"invalid subshift {text!r}")
    raise FormatError(f"unknown subshift {text!r}")


def _rule_outcome(tau: CellularAutomaton, extra: Optional[Dict[str, Any]] = None) -> Outcome:
    text = dump_rule_file(tau)
    data = {
        "rank": tau.rank,
        "alphabet": tau.q,
        "memory": [str(w) for w in tau.memory],
        "rule": list(tau.rule),
    }
    data.update(extra or {})
    lines = text.splitlines() + [f"{k}: {str(v).lower()}" for k, v in (extra or {}).items()]
    return Outcome(data, lines, dump=text)


# ===== Handlers =====

def _marked_dist(spec: ExperimentSpec) -> Outcome:
    g1, g2 = parse_group_spec(_need(spec, "group1")), parse_group_spec(_need(spec, "group2"))
    radius = marked_distance(g1, g2, spec.rmax, spec.cap)
    return Outcome({"group1": str(g1), "group2": str(g2), "rmax": spec.rmax, "radius": radius.to_dict()},
                   [f"agreement radius: {radius}"])


def _fix_window(spec: ExperimentSpec) -> Outcome:
    group = parse_group_spec(_need(spec, "group"))
    radius = _need(spec, "radius")
    windows = fix_window(group, spec.alphabet, radius, spec.cap)
    patterns = windows.ordered()
    header = [str(w) for w in free_ball(group.rank, radius)]
    return Outcome(
        {"group": str(group), "alphabet": spec.alphabet, "radius": radius,
         "count": len(patterns), "patterns": [list(p.labels) for p in patterns]},
        [f"patterns: {len(patterns)}"] + [str(p) for p in patterns],
        rows=[header] + [list(p.labels) for p in patterns],
        dump=dump_window_csv(windows),
    )


def _hb_dist(spec: ExperimentSpec) -> Outcome:
    g1, g2 = parse_group_spec(_need(spec, "group1")), parse_group_spec(_need(spec, "group2"))
    radius = hb_agreement_radius(FixFamily(g1, spec.alphabet), FixFamily(g2, spec.alphabet), spec.rmax)
    return Outcome({"group1": str(g1), "group2": str(g2), "alphabet": spec.alphabet, "rmax": spec.rmax,
                    "radius": radius.to_dict()},
                   [f"agreement radius: {radius}"])


def _ca_apply(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    values = parse_symbols(_need(spec, "config"))
    if spec.group:
        x = FiniteConfiguration(parse_group_spec(spec.group), values)
    else:
        x = PeriodicConfiguration(values)
        if spec.period is not None and spec.period != x.period:
            raise FormatError(f"configuration has {x.period} symbols but --period is {spec.period}")
    y = ca_apply(tau, x)
    return Outcome({"rule": str(tau), "input": list(x.values), "output": list(y.values)}, [str(y)])


def _ca_compose(spec: ExperimentSpec) -> Outcome:
    tau1, tau2 = parse_rule_spec(_need(spec, "rule")), parse_rule_spec(_need(spec, "rule2"))
    return _rule_outcome(ca_compose(tau1, tau2, spec.cap))


def _ca_synthesize(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    if spec.group:
        group = parse_group_spec(spec.group)
        result = synthesize_ca(lambda x: ca_apply(tau, x), spec.bound, q=tau.q, group=group,
                               minimize=spec.minimize, cap=spec.cap)
        equivalent = ca_equivalent_on(result, tau, group, spec.cap)
    else:
        result = synthesize_ca(window_map(tau), spec.bound, q=tau.q, minimize=spec.minimize, cap=spec.cap)
        equivalent = ca_equivalent(result, tau, spec.cap)
    return _rule_outcome(result, {"equivalent": equivalent})


def _lin_decide(spec: ExperimentSpec) -> Outcome:
    kernel = parse_kernel_file(read_text(_need(spec, "kernel")))
    group = parse_group_spec(_need(spec, "group"))
    decision = lin_decide(kernel, group)
    return Outcome({"group": str(group), **decision.to_dict()},
                   [f"verdict: {decision.verdict}", f"rank: {decision.rank}/{decision.size}"])


def _lin_inverse(spec: ExperimentSpec) -> Outcome:
    kernel = parse_kernel_file(read_text(_need(spec, "kernel")))
    group = parse_group_spec(_need(spec, "group"))
    inverse = lin_inverse_kernel(kernel, group)
    text = dump_kernel_file(inverse)
    data = {
        "prime": inverse.p,
        "dim": inverse.dim,
        "support": [str(w) for w in inverse.support],
        "matrices": [[list(row) for row in M] for M in inverse.matrices],
    }
    return Outcome(data, text.splitlines(), dump=text)


def _stable_finite(spec: ExperimentSpec) -> Outcome:
    group = parse_group_spec(_need(spec, "group"))
    if spec.matrix and spec.inverse:
        M = parse_group_algebra_matrix(read_text(spec.matrix), group, spec.prime)
        L = parse_group_algebra_matrix(read_text(spec.inverse), group, M.p)
        witness = stable_finiteness_witness(M, L, spec.side)
        return Outcome({"group": str(group), "verdict": witness.verdict.value,
                        "representation_size": witness.representation_size},
                       [f"verdict: {witness.verdict.value}"])
    if spec.trials:
        rng = random.Random(spec.seed)
        confirmed = 0
        for _ in range(spec.trials):
            M, L = random_unit_pair(group, spec.prime, spec.size, rng)
            stable_finiteness_witness(M, L, "left")
            confirmed += 1
        return Outcome({"group": str(group), "prime": spec.prime, "size": spec.size,
                        "trials": spec.trials, "confirmed": confirmed},
                       [f"confirmed: {confirmed}/{spec.trials}"])
    raise FormatError("stable-finite needs --matrix and --inverse, or --trials")


def _surj_1d(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    surjective = is_surjective_1d(tau, spec.cap)
    return Outcome({"rule": str(tau), "surjective": surjective}, [f"surjective: {str(surjective).lower()}"])


def _inj_1d(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    injective = is_injective_1d(tau, spec.cap)
    return Outcome({"rule": str(tau), "injective": injective}, [f"injective: {str(injective).lower()}"])


def _gromov_radius(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    family = _subshift(spec.subshift, tau.rank, tau.q)
    profile = modulus_profile(tau, family)
    radius = gromov_radius(profile)
    return Outcome(
        {"rule": str(tau), "subshift": family.name, "profile": profile.model_dump(), "radius": radius},
        [f"memory radius: {profile.memory_radius}", f"embedding radius: {profile.embedding_radius}",
         f"radius: {radius}"],
    )


def _transfer_check(spec: ExperimentSpec) -> Outcome:
    tau = parse_rule_spec(_need(spec, "rule"))
    family = _subshift(spec.subshift, tau.rank, tau.q)
    radius = spec.radius if spec.radius is not None else gromov_radius(modulus_profile(tau, family))
    tests = periodic_test_families(tau.q, spec.max_period)
    report = injectivity_transfer_check(tau, family, radius, tests, spec.cap)
    lines = [f"radius: {radius}"]
    lines += [f"{e.family}: {e.status}" + (f" ({e.reason})" if e.reason else "") for e in report.entries]
    lines.append(f"counterexamples: {report.counterexamples}")
    rows = [["family", "contained", "injective", "status"]]
    rows += [[e.family, e.contained, e.injective, e.status] for e in report.entries]
    return Outcome(report.model_dump(mode="json"), lines, rows=rows)


def _converge(spec: ExperimentSpec) -> Outcome:
    groups = [parse_group_spec(g) for g in _need(spec, "groups")]
    limit = parse_group_spec(_need(spec, "limit"))
    if spec.kernel:
        tau = parse_kernel_file(read_text(spec.kernel))
    else:
        tau = parse_rule_spec(_need(spec, "rule"))
    report = convergence_experiment(groups, limit, tau, spec.rmax, cap=spec.cap)
    lines = [f"mode: {report.mode}"]
    lines += [f"{stage.name}: {stage.status}" for stage in report.stages]
    lines.append(f"verdict: {report.verdict}")
    return Outcome(report.model_dump(mode="json"), lines)


def _eca_sweep(spec: ExperimentSpec) -> Outcome:
    report = eca_sweep(spec.max_period)
    lines = [
        f"injective: {' '.join(map(str, report.injective_rules))}",
        f"surjective: {len(report.surjective_rules)} rules",
        f"surjunctivity violations: {len(report.surjunctivity_violations)}",
        f"disagreements: {len(report.disagreements)}",
        f"inconclusive: {len(report.inconclusive)}",
    ]
    rows = [["rule", "injective", "surjective", "oracle_injective_failure", "oracle_surjective_failure"]]
    rows += [[r.rule, r.injective, r.surjective, r.oracle_injective_failure, r.oracle_surjective_failure]
             for r in report.rows]
    return Outcome(report.model_dump(mode="json"), lines, rows=rows)


def _psi_bounds(spec: ExperimentSpec) -> Outcome:
    groups = [parse_group_spec(g) for g in (spec.groups or PSI_DEFAULT_GROUPS)]
    report = psi_bounds(groups, spec.alphabet, spec.rmax, spec.cap)
    lines = [
        f"{r.group1} / {r.group2}: marked {r.marked}, fix {r.fix}, lower {r.lower_bound}, "
        f"{'ok' if r.holds else 'VIOLATED'}"
        for r in report.rows
    ]
    lines.append(f"violations: {report.violations}")
    rows = [["group1", "group2", "marked", "fix", "lower_bound", "holds"]]
    rows += [[r.group1, r.group2, str(r.marked), str(r.fix), r.lower_bound, r.holds] for r in report.rows]
    return Outcome(report.model_dump(mode="json"), lines, rows=rows)


HANDLERS: Dict[str, Callable[[ExperimentSpec], Outcome]] = {
    'marked-dist': _marked_dist,
    'fix-window': _fix_window,
    'hb-dist': _hb_dist,
    'ca-apply': _ca_apply,
    'ca-compose': _ca_compose,
    'ca-synthesize': _ca_synthesize,
    'lin-decide': _lin_decide,
    'lin-inverse': _lin_inverse,
    'stable-finite': _stable_finite,
    'surj-1d': _surj_1d,
    'inj-1d': _inj_1d,
    'gromov-radius': _gromov_radius,
    'transfer-check': _transfer_check,
    'converge': _converge,
    'eca-sweep': _eca_sweep,
    'psi-bounds': _psi_bounds,
}


def run(spec: ExperimentSpec) -> ExperimentResult:
    """실험 실행. 실패는 exit code 와 한 줄 메시지로 변환"""
    context = f"runner.{spec.command}"
    try:
        with metrics.timed("runner.command", command=spec.command):
            outcome = HANDLERS[spec.command](spec)
        if spec.dump:
            if outcome.dump is None:
                raise DomainError(f"{spec.command} has nothing to dump")
            write_text(spec.dump, outcome.dump)
            logger.info(f"{spec.command}: wrote {spec.dump}")
        metrics.increment_counter(context)
        return ExperimentResult(command=spec.command, data=outcome.data, lines=outcome.lines, rows=outcome.rows)
    except (WorkbenchError, ValueError) as e:
        return _failure(spec, context, e)
    except Exception as e:
        logger.exception(f"{context}: unexpected {type(e).__name__}")
        return _failure(spec, context, e)


def _failure(spec: ExperimentSpec, context: str, error: Exception) -> ExperimentResult:
    error_handler.record(context, error)
    return ExperimentResult(
        command=spec.command,
        exit_code=error_handler.exit_code_for(error),
        error=str(error).splitlines()[0] if str(error) else type(error).__name__,
        error_type=type(error).__name__,
    )


def canonical_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render(result: ExperimentResult, fmt: str = "table") -> str:
    if not result.ok:
        return ""
    if fmt == "json":
        return canonical_json(result.data)
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        if result.rows is not None:
            writer.writerows(result.rows)
        else:
            writer.writerow(["key", "value"])
            for key in sorted(result.data):
                value = result.data[key]
                writer.writerow([key, json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value])
        return out.getvalue()
    return "\n".join(result.lines) + "\n"
