# cli.py
"""
Command-line front end: read JSON job specifications, run the requested
analyses on the described inclusion and emit a machine-readable report.

    python cli.py --spec job.json --analysis index,markov --pretty

Exit codes: 0 success, 1 malformed job or unmet precondition, 2 a numerical
verification failed.
"""
import argparse
import hashlib
import itertools
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd

import config
from angle import angle, cauchy_schwarz_check, meet_projection_check, rigidity_report
from basic_construction import basic_construction, build_a1, dual_index_check, higher_commutant, pushdown_residual
from errors import DegeneratePerron, IndexLabError, InputError, SpecError, TensorSizeExceeded, VerificationError
from expectation import (
    compatibility_check,
    minimal_index_search,
    pp_constant,
    quasi_basis,
    reconstruction_residual,
    trace_preserving_expectation,
    watatani_index,
)
from inclusion import (
    ConcreteAlgebra,
    UnitalInclusion,
    block_structure,
    inclusion_matrix,
    intersect,
    join,
    relative_commutant,
    subalgebra_from_generators,
    subspace_distance,
    trace_from_block_weights,
)
from instances import (
    InstanceDescriptor,
    group_pair_from_params,
    build_instance,
    group_algebra,
    group_intermediates,
    intermediate_subgroup_lattice,
    parse_complex_matrix,
    resolve_intermediate,
)
from logger import append_entries, log_entry
from markov import bound_pipeline, markov_trace, pp_constant_closed_form, scalar_markov_closed_form
from multimatrix import AmbientAlgebra, TraceFunctional, as_int
from tensor import commutant_stability, stability_check, tensor_basic_check, tensor_inclusion

ANALYSES = ("index", "markov", "commutant", "bound", "lattice", "angle", "meet", "stability")
SIGNIFICANT_DIGITS = 12


def check(value, tol, passed, asserted=True, reason=""):
    out = {"value": value, "tol": tol, "pass": bool(passed)}
    if not asserted:
        out["asserted"] = False
    if reason:
        out["reason"] = reason
    return out


def _below(value, tol):
    return check(value, tol, value is not None and value <= tol)


@dataclass(eq=False)
class JobContext:
    """Everything a single job shares between analyses."""

    name: str
    inclusion: UnitalInclusion
    trace: TraceFunctional
    descriptor: InstanceDescriptor = None
    intermediates: dict = field(default_factory=dict)
    tensor_m: int = 2
    seed: int = 0
    bound: object = None
    _bc: object = None
    _pp_samples: int = None

    def basic(self, with_algebra=False):
        """The basic construction, computed once and upgraded with A₁ on demand."""
        if self._bc is None:
            self._bc = basic_construction(self.inclusion, self.trace, build_algebra=with_algebra)
        elif with_algebra and self._bc.a1 is None:
            build_a1(self._bc)
        return self._bc

    def pairs(self):
        names = sorted(self.intermediates)
        return list(itertools.combinations(names, 2))


def _weights(raw):
    try:
        return tuple(Fraction(str(w).strip()) for w in raw)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"trace weights must be rationals or decimals, got {raw!r}") from None


def _inline_instance(spec):
    """Inclusion described by generator matrices, or by a dimension vector for the full sup."""
    if "dims" in spec:
        ambient = AmbientAlgebra.from_dims(spec["dims"])
        sup = ConcreteAlgebra.full(ambient, spec.get("sup_label", "A"))
        size = ambient.size
    elif "sup_generators" in spec:
        gens = [parse_complex_matrix(g) for g in spec["sup_generators"]]
        if not gens:
            raise SpecError("sup_generators is empty")
        size = gens[0].shape[0]
        sup = subalgebra_from_generators(size, gens, spec.get("sup_label", "A"))
    else:
        raise SpecError("inline instance needs dims or sup_generators")
    sub_gens = [parse_complex_matrix(g) for g in spec.get("sub_generators", [])]
    if any(g.shape != (size, size) for g in sub_gens):
        raise SpecError(f"sub generators must be {size}x{size}")
    sub = subalgebra_from_generators(size, sub_gens, spec.get("sub_label", "B"))
    inc = UnitalInclusion(sub, sup, f"{sub.label} ⊂ {sup.label}")
    return inc, TraceFunctional.normalized(AmbientAlgebra.full_matrix(size))


def _select_trace(inc, default, spec, seed):
    if spec in (None, "default"):
        return default
    if spec == "markov":
        try:
            data = markov_trace(inclusion_matrix(inc, seed))
        except DegeneratePerron as exc:
            raise SpecError(f"instance has no unique Markov trace: {exc}") from exc
        weights = data.t_sup_exact or tuple(float(t) for t in data.t_sup)
        return trace_from_block_weights(data.lam.sup_structure, weights)
    if isinstance(spec, list):
        return trace_from_block_weights(block_structure(inc.sup, seed), _weights(spec))
    raise SpecError(f"trace must be 'default', 'markov' or a list of block weights, got {spec!r}")


def load_job(job):
    """Validate a job dictionary and build its context."""
    if not isinstance(job, dict):
        raise SpecError("job must be a JSON object")
    unknown = set(job) - {"name", "instance", "trace", "analyses", "intermediates", "tensor_m", "seed", "tolerances"}
    if unknown:
        raise SpecError(f"unknown job fields: {', '.join(sorted(unknown))}")
    seed = as_int(job.get("seed", config.SEED), "seed", 0)
    tensor_m = as_int(job.get("tensor_m", 2), "tensor_m", 1)
    analyses = job.get("analyses", [])
    if not isinstance(analyses, list):
        raise SpecError("analyses must be a list of analysis names")
    for a in analyses:
        if a not in ANALYSES:
            raise SpecError(f"unknown analysis {a!r}; expected one of {', '.join(ANALYSES)}")
    instance = job.get("instance")
    if not isinstance(instance, dict):
        raise SpecError("job needs an instance object")
    for key in ("params", "expected"):
        if not isinstance(instance.get(key, {}), dict):
            raise SpecError(f"instance {key} must be an object")
    expected = instance.get("expected", {}).get("index")
    if expected is not None and (isinstance(expected, bool) or not isinstance(expected, (int, float))):
        raise SpecError(f"expected index must be a number, got {expected!r}")

    descriptor = None
    if "inline" in instance:
        if not isinstance(instance["inline"], dict):
            raise SpecError("inline instance must be an object")
        inc, tau = _inline_instance(instance["inline"])
    else:
        descriptor = InstanceDescriptor(instance.get("kind"), dict(instance.get("params", {})), dict(instance.get("expected", {})), instance.get("name", ""))
        inc, tau = build_instance(descriptor)
    tau = _select_trace(inc, tau, job.get("trace"), seed)

    named = job.get("intermediates") or {}
    if not isinstance(named, dict):
        raise SpecError("intermediates must be an object mapping names to algebras")
    intermediates = {}
    for name, spec in named.items():
        alg = resolve_intermediate(descriptor, inc, spec)
        alg.label = name
        intermediates[name] = alg
    if not intermediates and descriptor is not None and descriptor.kind == "group_pair":
        g, h = group_pair_from_params(descriptor.params)
        intermediates = group_intermediates(g, h)

    return JobContext(job.get("name", inc.label), inc, tau, descriptor, intermediates, tensor_m, seed)


def analyze_index(ctx):
    e = trace_preserving_expectation(ctx.inclusion.sup, ctx.inclusion.sub, ctx.trace)
    qb = quasi_basis(e, seed=ctx.seed)
    index = watatani_index(qb)
    report = {
        "quasi_basis_size": len(qb),
        "watatani": index.to_dict(),
        "checks": {
            "reconstruction": _below(reconstruction_residual(qb), 1e-8),
            "central": _below(index.residuals["central"], 1e-8),
            "independence": _below(index.residuals["independence"], 1e-8),
        },
    }
    expected = (ctx.descriptor.expected if ctx.descriptor else {}).get("index")
    if expected is not None:
        diff = abs(index.norm - float(expected))
        report["checks"]["expected_index"] = check(diff, 1e-8, diff <= 1e-8)
    minimal = minimal_index_search(ctx.inclusion, seed=ctx.seed)
    report["minimal_index"] = {
        "value": minimal.value,
        "regime": minimal.regime,
        "weights": [str(w) if isinstance(w, Fraction) else w for w in minimal.weights],
        "optimality_gap": minimal.optimality_gap,
    }
    report["checks"]["minimal_index_formula"] = _below(minimal.formula_residual, 1e-7)
    report["checks"]["minimal_index_converged"] = check(minimal.optimality_gap, 1e-6, minimal.converged)
    report["checks"]["minimal_index_le_index"] = check(minimal.value - index.norm, 1e-7, minimal.value <= index.norm + 1e-7)

    bc = ctx.basic()
    report["checks"]["unit_criterion"] = _below(bc.checks["unit_criterion"], 1e-8)
    report["checks"]["markov_identity"] = _below(bc.checks["markov_identity"], 1e-8)
    report["checks"]["pushdown"] = _below(pushdown_residual(bc, seed=ctx.seed), 1e-8)
    if index.is_scalar:
        bc = ctx.basic(with_algebra=True)
        dual = dual_index_check(bc)
        report["dual_index"] = dual.dual_index.to_dict()
        report["checks"]["dual_extension"] = _below(bc.checks["dual_least_squares"], 1e-8)
        report["checks"]["dual_formula"] = _below(bc.checks["dual_formula_agreement"], 1e-8)
        report["checks"]["dual_index_equal"] = check(abs(dual.dual_index.norm - index.norm), 1e-7, dual.equal)
    return report


def analyze_markov(ctx):
    lam = inclusion_matrix(ctx.inclusion, ctx.seed)
    try:
        data = markov_trace(lam)
    except DegeneratePerron as exc:
        data = None
        report = {
            "markov": {"lambda": lam.as_lists(), "degenerate": exc.invariant},
            "checks": {"markov_perron": check(exc.residual, 0, False, False, str(exc))},
        }
    else:
        report = {"markov": data.to_dict(), "checks": {"markov_perron": _below(data.residual, 1e-10)}}
    e = trace_preserving_expectation(ctx.inclusion.sup, ctx.inclusion.sub, ctx.trace)
    pp = pp_constant(e, samples=ctx._pp_samples, seed=ctx.seed, structure=lam.sup_structure)
    report["pp_constant"] = pp.value
    report["probabilistic_index"] = math.inf if pp.value <= 0 else 1.0 / pp.value
    if data is not None and ctx.inclusion.sub.dim == 1:
        weights, total = scalar_markov_closed_form(lam.sup_dims)
        diff = max(abs(float(a) - float(b)) for a, b in zip(weights, data.t_sup))
        report["checks"]["closed_form_weights"] = check(diff, 1e-10, diff <= 1e-10)
        report["checks"]["closed_form_alpha"] = check(abs(data.alpha - total), 1e-10, data.alpha_exact == total)
        if ctx.trace.weights is not None and tuple(Fraction(w) for w in ctx.trace.weights) == weights:
            expected = float(pp_constant_closed_form(weights))
            report["checks"]["pp_closed_form"] = check(abs(pp.value - expected), 1e-6, abs(pp.value - expected) <= 1e-6)
    return report


def analyze_commutant(ctx):
    inc = ctx.inclusion
    rel = relative_commutant(inc.sub, inc.sup, seed=ctx.seed)
    bc = ctx.basic(with_algebra=True)
    comm, structure = higher_commutant(inc, bc, ctx.seed)
    return {
        "relative_commutant_dim": rel.dim,
        "relative_commutant_blocks": block_structure(rel, ctx.seed).dims.as_list(),
        "irreducible": rel.dim == 1,
        "basic_construction_dim": bc.a1.dim,
        "higher_commutant_dim": comm.dim,
        "higher_commutant_blocks": structure.dims.as_list(),
        "checks": {
            "a1_span": _below(bc.checks["span_distance"], 1e-8),
            "a1_commutant_of_right_b": _below(bc.checks["commutant_of_right_b"], 1e-8),
            "jones_projection": _below(bc.checks["jones_projection"], 1e-8),
        },
    }


def analyze_bound(ctx):
    report = bound_pipeline(ctx.inclusion, ctx.trace, samples=ctx._pp_samples, seed=ctx.seed, bc=ctx.basic(with_algebra=True))
    out = report.to_dict()
    out["checks"] = out.pop("chain")
    ctx.bound = report
    return out


def analyze_lattice(ctx):
    if ctx.descriptor is None or ctx.descriptor.kind != "group_pair":
        raise SpecError("lattice analysis needs a group_pair instance")
    g, h = group_pair_from_params(ctx.descriptor.params)
    lattice = intermediate_subgroup_lattice(g, h)
    out = lattice.to_dict()

    algebras = [group_algebra(g, k) for k in lattice.subgroups]
    meet_worst, join_worst = 0.0, 0.0
    for (a, ka), (b, kb) in itertools.combinations(zip(algebras, lattice.subgroups), 2):
        meet_worst = max(meet_worst, subspace_distance(intersect(a, b), group_algebra(g, ka & kb)))
        join_worst = max(join_worst, subspace_distance(join(a, b), group_algebra(g, g.closure(ka | kb))))
    out["checks"] = {"meet_is_intersection": _below(meet_worst, 1e-8), "join_is_generated": _below(join_worst, 1e-8)}
    if ctx.bound is None:
        ctx.bound = bound_pipeline(ctx.inclusion, ctx.trace, samples=ctx._pp_samples, seed=ctx.seed, bc=ctx.basic(with_algebra=True))
    count = len(lattice.subgroups)
    within = math.log10(count) <= ctx.bound.bound_log10 + 1e-12
    if ctx.bound.bound_exact is not None:
        within = within and count <= int(ctx.bound.bound_exact)
    out["intermediate_count"] = count
    out["bound_log10"] = ctx.bound.bound_log10
    out["checks"]["count_le_bound"] = check(count, 0, within)
    return out


def _require_pairs(ctx):
    if not ctx.pairs():
        raise SpecError("angle, meet and stability analyses need at least two intermediates")
    return ctx.pairs()


def analyze_angle(ctx):
    bc = ctx.basic()
    pairs = []
    for a, b in _require_pairs(ctx):
        report = angle(ctx.inclusion, ctx.intermediates[a], ctx.intermediates[b], ctx.trace, bc)
        pairs.append(report.to_dict())
    rigidity = rigidity_report(ctx.inclusion, ctx.intermediates, ctx.trace, bc)
    cs = cauchy_schwarz_check(bc.expectation, samples=200, seed=ctx.seed)
    return {
        "pairs": pairs,
        "rigidity": rigidity.to_dict(),
        "checks": {"cauchy_schwarz": check(cs, 1e-9, cs <= 1e-9)},
    }


def analyze_meet(ctx):
    g = ctx.basic().gns
    pairs = []
    for a, b in _require_pairs(ctx):
        c, d = ctx.intermediates[a], ctx.intermediates[b]
        meet = meet_projection_check(ctx.inclusion, c, d, ctx.trace, g)
        compat = max(
            compatibility_check(ctx.inclusion.sup, ctx.inclusion.sub, c, ctx.trace),
            compatibility_check(ctx.inclusion.sup, ctx.inclusion.sub, d, ctx.trace),
        )
        pairs.append(
            {
                "pair": [a, b],
                "iterations": meet.iterations,
                "checks": {
                    "meet_projection": _below(meet.difference, 1e-8),
                    "power_convergence": check(meet.final_distance, 1e-6, meet.final_distance < 1e-6),
                    "monotone": check(None, 0, meet.monotone),
                    "compatibility": _below(compat, 1e-8),
                },
            }
        )
    return {"pairs": pairs}


def analyze_stability(ctx):
    ti = tensor_inclusion(ctx.inclusion, ctx.trace, ctx.tensor_m)
    out = {
        "m": ctx.tensor_m,
        "base_index": ti.base_index.to_dict(),
        "tensored_index": ti.tensored_index.to_dict(),
        "checks": {
            "lifted_quasi_basis": _below(ti.checks["lifted_reconstruction"], 1e-8),
            "index_tensor_identity": _below(ti.checks["index_tensor_identity"], 1e-8),
            "index_norm": _below(ti.checks["index_norm_difference"], 1e-8),
            "relative_commutant": _below(commutant_stability(ti), 1e-8),
        },
    }
    try:
        distance, passed = tensor_basic_check(ti, seed=ctx.seed)
        out["checks"]["basic_construction"] = check(distance, 1e-7, passed)
    except TensorSizeExceeded as exc:
        out["checks"]["basic_construction"] = check(None, 1e-7, False, False, str(exc))

    pairs = []
    for a, b in ctx.pairs():
        result = stability_check(ctx.inclusion, ctx.intermediates[a], ctx.intermediates[b], ctx.trace, ctx.tensor_m, ti)
        pairs.append(
            {
                "pair": [a, b],
                "angle": result.base.angle,
                "tensored_angle": result.tensored.angle,
                "checks": {"angle_stable": _below(result.difference, 1e-8)},
            }
        )
    out["pairs"] = pairs
    return out


ANALYZERS = {
    "index": analyze_index,
    "markov": analyze_markov,
    "commutant": analyze_commutant,
    "bound": analyze_bound,
    "lattice": analyze_lattice,
    "angle": analyze_angle,
    "meet": analyze_meet,
    "stability": analyze_stability,
}


def canonical(value):
    """JSON-ready copy with floats rounded to a fixed number of significant digits."""
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return repr(x)
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return [canonical(value.real), canonical(value.imag)]
    return value


def spec_hash(job):
    return hashlib.sha256(json.dumps(job, sort_keys=True).encode("utf-8")).hexdigest()


def failed_checks(report, path=""):
    """Paths of asserted checks that did not pass."""
    failures = []
    if isinstance(report, dict):
        if "pass" in report and "tol" in report:
            if not report["pass"] and report.get("asserted", True):
                failures.append(path)
            return failures
        for key, value in report.items():
            failures.extend(failed_checks(value, f"{path}.{key}" if path else key))
    elif isinstance(report, list):
        for k, value in enumerate(report):
            failures.extend(failed_checks(value, f"{path}[{k}]"))
    return failures


def _tolerance(job, default):
    overrides = (job.get("tolerances") or {}) if isinstance(job, dict) else {}
    if not isinstance(overrides, dict):
        raise SpecError("tolerances must be an object")
    tol = overrides.get("tol", default)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not 0 < tol < 1:
        raise SpecError(f"tol must be a number in (0, 1), got {tol!r}")
    return float(tol)


def run(job, log_path=None, pp_samples=None, entries=None):
    """
    Run every requested analysis of one job in dependency order. Returns
    (report, timings); raises IndexLabError subclasses on failure.

    Log rows go straight to log_path, or are appended to `entries` for the
    caller to write when several jobs share one log.
    """
    digest = spec_hash(job)
    name = job.get("name", "job") if isinstance(job, dict) else "job"
    tolerance = config.TOLERANCE

    def record(*row, **kwargs):
        entry = log_entry(name, digest, *row, **kwargs)
        if entries is None:
            append_entries([entry], log_path)
        else:
            entries.append(entry)

    try:
        config.TOLERANCE = _tolerance(job, tolerance)
        ctx = load_job(job)
        ctx._pp_samples = pp_samples
        requested = [a for a in ANALYSES if a in job.get("analyses", ANALYSES)]
        report = {
            "report_version": config.REPORT_VERSION,
            "tool_version": config.TOOL_VERSION,
            "spec_hash": digest,
            "seed": ctx.seed,
            "inclusion": {
                "label": ctx.inclusion.label,
                "size": ctx.inclusion.size,
                "dim_sub": ctx.inclusion.sub.dim,
                "dim_sup": ctx.inclusion.sup.dim,
                "trace_weights": ctx.trace.weights_as_text(),
            },
            "analyses": {},
        }
        timings = {}
        for analysis in requested:
            start = time.perf_counter()
            try:
                report["analyses"][analysis] = ANALYZERS[analysis](ctx)
            except IndexLabError as exc:
                record(analysis, "failed", time.perf_counter() - start, str(exc))
                raise
            timings[analysis] = time.perf_counter() - start
            record(analysis, "ok", timings[analysis])
        return canonical(report), timings
    finally:
        config.TOLERANCE = tolerance


def _run_file(args):
    """One spec file end to end. Log rows come back with the result so only the parent writes the log."""
    path, overrides = args
    entries = []
    try:
        with open(path, encoding="utf-8") as f:
            job = json.load(f)
    except OSError as exc:
        return path, None, None, 1, f"cannot read {path}: {exc}", entries
    except json.JSONDecodeError as exc:
        return path, None, None, 1, f"{path} is not valid JSON: {exc}", entries
    if isinstance(job, dict):
        job.update(overrides)
    try:
        report, timings = run(job, entries=entries)
    except InputError as exc:
        return path, None, None, 1, f"{type(exc).__name__}: {exc}", entries
    except VerificationError as exc:
        return path, None, None, 2, f"{type(exc).__name__}: invariant '{exc.invariant}' failed, residual {exc.residual}", entries
    failures = failed_checks(report)
    if failures:
        return path, report, timings, 2, "failed checks: " + ", ".join(failures), entries
    return path, report, timings, 0, "", entries


def _check_rows(report, prefix=""):
    rows = []
    for key, value in report.items() if isinstance(report, dict) else enumerate(report):
        where = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict) and "pass" in value and "tol" in value:
            rows.append({"check": where, "value": value["value"], "tol": value["tol"], "pass": value["pass"]})
        elif isinstance(value, (dict, list)):
            rows.extend(_check_rows(value, where))
    return rows


def render_pretty(path, report, timings):
    lines = [f"== {path}", f"{report['inclusion']['label']}  (dim B = {report['inclusion']['dim_sub']}, dim A = {report['inclusion']['dim_sup']})"]
    rows = _check_rows(report["analyses"])
    if rows:
        lines.append(pd.DataFrame(rows).to_string(index=False))
    if timings:
        lines.append(pd.DataFrame({"analysis": list(timings), "seconds": [round(t, 3) for t in timings.values()]}).to_string(index=False))
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(description="Index invariants of finite-dimensional *-algebra inclusions.")
    parser.add_argument("--spec", action="append", required=True, help="JSON job file (repeatable)")
    parser.add_argument("--analysis", help=f"comma-separated subset of {','.join(ANALYSES)}")
    parser.add_argument("--seed", type=int, help="override the job seed")
    parser.add_argument("--tol", type=float, help="override the matrix equality tolerance")
    parser.add_argument("--pretty", action="store_true", help="print check tables instead of JSON on stdout")
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--log", help=f"CSV run log (default {config.LOG_PATH})")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for several specs")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.analysis:
        overrides["analyses"] = [a.strip() for a in args.analysis.split(",") if a.strip()]
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["tolerances"] = {"tol": args.tol}

    tasks = [(path, overrides) for path in args.spec]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_file, tasks))
    else:
        results = [_run_file(t) for t in tasks]
    append_entries([entry for r in results for entry in r[5]], args.log)

    code = max(r[3] for r in results)
    for path, _, _, status, message, _ in results:
        if status:
            print(f"{path}: {message}", file=sys.stderr)
    if any(r[3] == 1 for r in results):
        return 1

    reports = [r[1] for r in results if r[1] is not None]
    document = reports[0] if len(args.spec) == 1 and reports else {"reports": reports}
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    if args.pretty:
        print("\n\n".join(render_pretty(p, r, t) for p, r, t, _, _, _ in results if r is not None))
    elif not args.out:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
