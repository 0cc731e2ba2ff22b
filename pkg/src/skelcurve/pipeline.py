"""End-to-end certification of one job, producing a deterministic text report.

Stages run in a fixed order.  The first stage that fails names itself in
``failed_stage`` and the run stops there; the report still lists everything
that was established before the failure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, is_dataclass, replace

import numpy as np

from .config import JobConfig
from .curve import CurveApproximation, convergence_diagnostic, holder_diagnostic, sample_curve
from .errors import (ConfigError, DepthOverflow, RuleViolation, SearchExhausted, SkelCurveError,
                     ToleranceError)
from .gifs import (InducedGifs, check_chain_condition, check_pure_cell_disjointness, induce_gifs,
                   measure_weights, spectral_certify)
from .graphs import AbstractEdge, search_orientation
from .ifs import Skeleton, validate_skeleton
from .substitution import (SubstitutionRule, coarse, find_pure_cell, format_rule, is_primitive,
                           is_traversing, parse_rule, partition_orientation, rule_from_partition,
                           validate_rule)

log = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 2
EXIT_EXHAUSTED = 3
EXIT_CONFIG = 4


def _f(x: float) -> str:
    return format(float(x), ".17g")


def _cx(z: complex) -> str:
    return f"({_f(z.real)}, {_f(z.imag)})"


def _beta(beta) -> str:
    return ",".join(f"{b:+d}" for b in beta)


def _plain(obj) -> str:
    """Deterministic text for error details (dataclasses, numpy scalars, tuples)."""
    if is_dataclass(obj):
        return "{" + ", ".join(f"{k}: {_plain(v)}" for k, v in vars(obj).items()) + "}"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{k}: {_plain(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_plain(v) for v in obj) + "]"
    if isinstance(obj, (float, np.floating)):
        return _f(obj)
    if isinstance(obj, np.integer):
        return str(int(obj))
    return str(obj)


@dataclass
class CertificationReport:
    name: str
    mode: str
    fields: list[tuple[str, str]] = field(default_factory=list)
    verdict: str = "PASS"
    failed_stage: str | None = None
    error_code: str | None = None
    error_message: str | None = None
    error_detail: str | None = None
    exit_code: int = EXIT_PASS

    def add(self, key: str, value) -> None:
        self.fields.append((key, str(value)))

    def get(self, key: str) -> str | None:
        for k, v in self.fields:
            if k == key:
                return v
        return None

    def fail(self, stage: str, exc: BaseException, exit_code: int = EXIT_FAIL) -> None:
        self.verdict = "FAIL"
        self.failed_stage = stage
        self.error_code = getattr(exc, "code", None) or type(exc).__name__
        self.error_message = str(exc.args[0]) if exc.args else type(exc).__name__
        detail = getattr(exc, "detail", None)
        self.error_detail = None if detail is None else _plain(detail)
        self.exit_code = exit_code

    def render(self) -> str:
        lines = ["skelcurve certification report", f"name: {self.name}", f"mode: {self.mode}",
                 f"verdict: {self.verdict}"]
        if self.failed_stage is not None:
            lines += [f"failed_stage: {self.failed_stage}", f"error_code: {self.error_code}",
                      f"error: {self.error_message}"]
            if self.error_detail is not None:
                lines.append(f"error_detail: {self.error_detail}")
        for key, value in self.fields:
            if "\n" in value:
                lines.append(f"{key}:")
                lines.extend("  " + v for v in value.splitlines())
            else:
                lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"


@dataclass
class PipelineResult:
    report: CertificationReport
    skeleton: Skeleton | None = None
    rule: SubstitutionRule | None = None
    gifs: InducedGifs | None = None
    curve: CurveApproximation | None = None

    @property
    def exit_code(self) -> int:
        return self.report.exit_code


class _Stop(Exception):
    pass


def run_pipeline(config: JobConfig, *, depth: int | None = None, beta: tuple[int, ...] | None = None,
                 seed: int | None = None, diagnostics: bool = True) -> PipelineResult:
    """Certify ``config`` and sample its curve.  Never raises for
    mathematical failures; those end up in the report."""
    depth = config.depth if depth is None else depth
    beta = config.beta if beta is None else beta
    seed = config.seed if seed is None else seed
    budgets = config.budgets
    report = CertificationReport(config.name, config.mode)
    result = PipelineResult(report)

    def stage(name, fn, *, exit_code=EXIT_FAIL, expected=(SkelCurveError,)):
        log.info("stage %s", name)
        try:
            return fn()
        except expected as exc:
            report.fail(name, exc, exit_code)
            raise _Stop from exc

    try:
        ifs = stage("config", config.ifs, exit_code=EXIT_CONFIG, expected=(ValueError, SkelCurveError))
        if beta is not None and len(beta) != ifs.N:
            report.fail("config", ConfigError(f"beta needs {ifs.N} entries"), EXIT_CONFIG)
            raise _Stop
        tol = stage("config", config.tol, exit_code=EXIT_CONFIG, expected=(ValueError,))

        def _skeleton():
            try:
                return validate_skeleton(ifs, config.skeleton, tol)
            except ToleranceError as exc:
                report.fail("validate_skeleton", exc, EXIT_CONFIG)
                raise _Stop from exc

        sk = stage("validate_skeleton", _skeleton)
        result.skeleton = sk
        m = sk.m
        report.add("maps", ifs.N)
        report.add("skeleton", f"valid, m={m}, tolerance={_f(sk.tol.epsilon)}")
        report.add("skeleton_points", " ".join(f"a{j + 1}={_cx(p)}" for j, p in enumerate(sk.points)))
        report.add("hata_spanning_tree", " ".join(f"S{i + 1}-S{k + 1}" for i, k in sk.spanning_tree)
                   or "-")

        rule = _obtain_rule(config, ifs, sk, beta, report, stage)
        result.rule = rule
        stage("validate_rule", lambda: validate_rule(rule, ifs, sk))
        report.add("fine_rule", format_rule(rule))

        traversing = None
        if config.mode == "traversing-check":
            traversing = is_traversing(rule, ifs)
            report.add("traversing", "yes, E_j = K for all j" if traversing else "no")

        cs, M = coarse(rule)
        report.add("coarse_rule", cs.text())
        report.add("incidence_matrix", " ; ".join(" ".join(str(x) for x in row) for row in M))
        primitive, k = is_primitive(M)
        report.add("primitive", f"yes, exponent {k}" if primitive else "no")
        found_beta = partition_orientation(rule, ifs.N)
        report.add("consistent_partition", f"yes, beta={_beta(found_beta)}" if found_beta else "no")
        witness = find_pure_cell(rule, budgets.pure_cell_depth)
        report.add("pure_cell", str(witness) if witness else f"none up to depth {budgets.pure_cell_depth}")

        g = stage("induce_gifs", lambda: induce_gifs(rule, ifs, sk, require_unicursal=not traversing))
        report.add("gifs_states", " ".join(str(u) for u in g.states))
        report.add("bridges", len(g.all_bridges()))
        report.add("unicursal", "yes" if g.unicursal else "no")

        chain = check_chain_condition(g)
        report.add("chain_condition",
                   f"{'PASS' if chain.ok else 'FAIL'}, {chain.bridge_joins_passed}/{chain.bridge_joins} "
                   f"bridge joins, {chain.internal_junctions} internal junctions, "
                   f"{chain.head_anchors} head anchors, max error {_f(chain.max_error)}")
        if not chain.ok:
            report.fail("chain_condition", RuleViolation(
                f"{len(chain.violations)} chain violations, first {chain.violations[0]}",
                code="CHAIN_VIOLATION"))
            raise _Stop

        cert = stage("spectral_certify", lambda: spectral_certify(g, rule))
        report.add("dimension", _f(cert.dimension))
        report.add("spectral_radius", f"{_f(cert.spectral_radius)} in [{_f(cert.radius_bounds[0])}, "
                                      f"{_f(cert.radius_bounds[1])}]")
        report.add(f"{cert.sum_axis}_sums", f"[{_f(cert.sum_min)}, {_f(cert.sum_max)}]")
        report.add("simplified_spectral_radius", _f(cert.simplified_radius))
        report.add("strongly_connected", "yes")

        weights = stage("measure_weights", lambda: measure_weights(g))
        g = replace(g, weights=weights)
        result.gifs = g
        report.add("weights", " ".join(f"h({AbstractEdge(j, 1)})={_f(weights[AbstractEdge(j, 1)])}"
                                       for j in range(m)))
        report.add("weight_normalization", "sum of h(v_j) over j = 1")

        # certification hypotheses, in order
        if traversing:
            report.add("certified_by", "traversing rule, chain condition, spectral radius 1")
        else:
            if found_beta is None:
                report.fail("consistency", SkelCurveError(
                    "positive images do not partition G(S, A, beta) for any beta",
                    code="NOT_CONSISTENT"))
                raise _Stop
            if not primitive:
                report.fail("primitivity", SkelCurveError("coarse substitution is not primitive",
                                                          code="NOT_PRIMITIVE"))
                raise _Stop
            if witness is None:
                report.fail("pure_cell", SkelCurveError(
                    f"no pure cell up to depth {budgets.pure_cell_depth}", code="NO_PURE_CELL"))
                raise _Stop
            pc = stage("pure_cell", lambda: check_pure_cell_disjointness(g, witness))
            report.add("pure_cell_check", pc.conclusion)
            report.add("certified_by", "consistent partition, primitive, pure cell, chain condition, "
                                       "spectral radius 1")

        approx = stage("sample_curve",
                       lambda: sample_curve(g, depth, weights=weights, segment_cap=budgets.segment_cap),
                       exit_code=EXIT_CONFIG, expected=(DepthOverflow,))
        result.curve = approx
        report.add("depth", depth)
        report.add("segments", approx.n_segments)
        report.add("total_mass", _f(approx.t[-1]))
        report.add("max_chain_gap", _f(approx.max_gap))
        if diagnostics and depth >= 1:
            _diagnostics(g, weights, depth, seed, budgets.segment_cap, approx, report)
    except _Stop:
        pass
    return result


def _obtain_rule(config, ifs, sk, beta, report, stage) -> SubstitutionRule:
    m = sk.m
    if config.rule:
        rule = stage("parse_rule", lambda: parse_rule(config.rule, m),
                     exit_code=EXIT_CONFIG, expected=(ValueError,))
        report.add("rule_source", "explicit")
        return rule

    budgets = config.budgets

    def certifier(partition, b):
        rule = rule_from_partition(partition)
        ok, k = is_primitive(coarse(rule)[1])
        if not ok:
            return False, "coarse substitution not primitive"
        if find_pure_cell(rule, budgets.pure_cell_depth) is None:
            return False, f"no pure cell up to depth {budgets.pure_cell_depth}"
        return True, "ok"

    betas = [tuple(beta)] if beta is not None else None

    def _search():
        return search_orientation(ifs, sk, certifier, node_budget=budgets.node_budget,
                                  max_partitions=budgets.max_partitions,
                                  max_orientations=budgets.max_orientations, betas=betas)

    try:
        found = stage("search", _search, expected=())
    except SearchExhausted as exc:
        report.fail("search", exc, EXIT_EXHAUSTED)
        tried = exc.detail or []
        report.add("orientations_tried", len(tried))
        for b, reason in tried:
            report.add(f"beta {_beta(b)}", reason)
        raise _Stop from exc
    except SkelCurveError as exc:
        report.fail("search", exc, EXIT_EXHAUSTED)
        raise _Stop from exc
    report.add("rule_source", "search")
    report.add("beta", _beta(found.beta))
    report.add("partitions_tried", found.partitions_tried)
    report.add("orientations_rejected", len(found.failures))
    report.add("partition", "\n".join(f"P{j + 1} = " + " ".join(map(str, p))
                                      for j, p in enumerate(found.partition)))
    return rule_from_partition(found.partition)


def _diagnostics(g, weights, depth, seed, cap, approx, report) -> None:
    curves = {depth: approx}
    lo = max(0, depth - 4)
    for d in range(lo, depth):
        curves[d] = sample_curve(g, d, weights=weights, segment_cap=cap)
    holder = [(d, holder_diagnostic(curves[d], seed=seed)) for d in range(max(1, depth - 2), depth + 1)]
    report.add("holder_statistic", " ".join(f"n={d}:{_f(h)}" for d, h in holder))
    diffs = [(d, convergence_diagnostic(curves[d], curves[d + 1])) for d in range(lo, depth)]
    report.add("convergence_sup", " ".join(f"n={d}:{_f(x)}" for d, x in diffs))
    ratios = [(diffs[i + 1][0], diffs[i + 1][1] / diffs[i][1]) for i in range(len(diffs) - 1)
              if diffs[i][1] > 0]
    if ratios:
        report.add("convergence_ratios", " ".join(f"n={d}:{_f(r)}" for d, r in ratios))
    report.add("max_contraction_ratio", _f(max(g.ifs.ratios)))
