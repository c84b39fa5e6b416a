"""Benchmark and reproduction harness.

Subcommands:

* ``run``     execute solver variants on a preset instance, write one CSV
              of per-iteration trajectories plus a JSON summary;
* ``compare`` run and print a per-variant summary table;
* ``check``   run the brute-force oracle-equivalence and invariant
              suites, exit non-zero on any failure.

The ``CGKIT_SEED`` environment variable overrides the configured seed.
Exit codes: 0 success, 1 solver failure, 2 unknown preset/variant.
"""

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

import numpy as np

from cgkit import _core
from cgkit.atoms import ActiveSet, ScaledUnit, atom_inner, dense_inner
from cgkit.lmo import (
    BirkhoffLMO,
    EnumerationLMO,
    KSparseLMO,
    LinearMinimizationOracle,
    LpBallLMO,
    NuclearNormLMO,
    ProbabilitySimplexLMO,
    VertexCache,
    cached_query,
    hungarian,
)
from cgkit.pgd import pgd_reference, project_l1_ball, project_nuclear_ball
from cgkit.problems import (
    SquaredDistance,
    StochasticLinearOracle,
    build_monomial_features,
    generate_sparse_regression,
    matrix_completion_instance,
    save_instance,
)
from cgkit.solvers import (
    RunParams,
    away_frank_wolfe,
    blended_cg,
    dual_gap,
    frank_wolfe,
    lazified_frank_wolfe,
    stochastic_fw,
)
from cgkit.steps import make_step_rule

CSV_HEADER = [
    "variant",
    "iteration",
    "elapsed_seconds",
    "primal",
    "dual_gap",
    "lmo_calls",
    "cache_hits",
    "active_set_size",
    "step_kind",
]

PRESET_NAMES = ("polyreg", "matcomp", "birkhoff", "rational", "simplex-projection")
ALL_VARIANTS = ("fw", "lfw", "afw", "lafw", "bcg", "sfw", "pgd-reference")


def _fmt(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class _Preset:
    """Everything a run needs: instance, oracles, defaults, extras."""

    def __init__(self, name, objective, gradient, lmo, x0_atom, supported,
                 default_variants):
        self.name = name
        self.objective = objective
        self.gradient = gradient
        self.lmo = lmo
        self.x0_atom = x0_atom
        self.supported = supported
        self.default_variants = default_variants
        self.exact = False
        self.test_error = None
        self.projection = None
        self.lipschitz = None
        self.sfw_oracle = None
        self.batch_schedule = None
        self.momentum_schedule = None
        self.enum_lmo = None
        self.track_atoms = False
        self.default_step = "adaptive"
        self.default_max_iterations = 500
        self.default_epsilon = 1e-7
        self.summary_extra = {}
        self.instance_spec = None


def _start_atom(lmo, gradient, shape, exact=False):
    # deterministic feasible vertex: oracle answer at the zero point
    if exact:
        zero = np.empty(shape, dtype=object)
        zero[...] = Fraction(0)
    else:
        zero = np.zeros(shape)
    grad = np.empty_like(zero)
    gradient(grad, zero)
    return lmo.compute_extreme_point(grad)


def _build_polyreg(cfg):
    seed = cfg["seed"]
    regression, coeffs = generate_sparse_regression(
        cfg["n"], cfg["degree"], cfg["density"], cfg["noise_sigma"],
        cfg["n_samples"], seed=seed,
    )
    radius = 0.95 * float(np.abs(coeffs).sum())
    lmo = LpBallLMO(radius=radius, p=1)
    x0 = _start_atom(lmo, regression.gradient, (regression.n_features,))
    preset = _Preset(
        "polyreg", regression.value, regression.gradient, lmo, x0,
        supported=("fw", "lfw", "afw", "lafw", "bcg", "sfw", "pgd-reference"),
        default_variants=("lafw", "bcg", "pgd-reference"),
    )
    rng = np.random.default_rng(seed + 1)
    test_samples = rng.standard_normal((cfg["n_samples"], cfg["n"]))
    test_features = build_monomial_features(test_samples, cfg["degree"])
    test_targets = test_features.dot(coeffs)
    if cfg["noise_sigma"] > 0:
        test_targets = test_targets + cfg["noise_sigma"] * rng.standard_normal(
            cfg["n_samples"]
        )

    def test_error(c_hat):
        resid = test_targets - test_features.dot(c_hat)
        return float(resid.dot(resid) / len(test_targets))

    preset.test_error = test_error
    preset.projection = lambda y: project_l1_ball(y, radius)
    preset.lipschitz = regression.smoothness()
    preset.sfw_oracle = StochasticLinearOracle(
        regression.features, regression.targets, seed=seed + 17
    )
    preset.batch_schedule = lambda t: min((t + 1) ** 2, 500)
    preset.momentum_schedule = lambda t: 1.0
    preset.default_max_iterations = 250
    preset.summary_extra = {"l1_radius": radius, "true_nonzeros": int((coeffs != 0).sum())}
    preset.instance_spec = (
        "polyreg",
        dict(n_vars=cfg["n"], degree=cfg["degree"], density=cfg["density"],
             noise_sigma=cfg["noise_sigma"], n_samples=cfg["n_samples"], seed=seed),
    )
    return preset


def _build_matcomp(cfg):
    seed = cfg["seed"]
    instance = matrix_completion_instance(
        cfg["n_rows"], cfg["n_cols"], cfg["rank"], cfg["fraction_observed"],
        cfg["noise_sigma"], seed=seed,
    )
    objective = instance.objective
    lmo = NuclearNormLMO(radius=instance.suggested_radius, seed=seed)
    x0 = _start_atom(lmo, objective.gradient, objective.shape)
    preset = _Preset(
        "matcomp", objective.value, objective.gradient, lmo, x0,
        supported=("fw", "lfw", "afw", "lafw", "bcg", "pgd-reference"),
        default_variants=("fw", "lfw", "pgd-reference"),
    )
    preset.test_error = instance.test_error
    preset.projection = lambda y: project_nuclear_ball(y, instance.suggested_radius)
    preset.lipschitz = 2.0
    preset.track_atoms = True
    preset.default_max_iterations = 100
    preset.summary_extra = {
        "nuclear_radius": instance.suggested_radius,
        "uncovered_lines": instance.uncovered_lines,
    }
    preset.instance_spec = (
        "matcomp",
        dict(n_rows=cfg["n_rows"], n_cols=cfg["n_cols"], rank=cfg["rank"],
             fraction_observed=cfg["fraction_observed"],
             noise_sigma=cfg["noise_sigma"], seed=seed,
             observed_rows=objective.rows.tolist()),
    )
    return preset


def _build_birkhoff(cfg):
    rng = np.random.default_rng(cfg["seed"])
    target = rng.random((cfg["n"], cfg["n"]))
    objective = SquaredDistance(target)
    lmo = BirkhoffLMO()
    x0 = _start_atom(lmo, objective.gradient, target.shape)
    preset = _Preset(
        "birkhoff", objective.value, objective.gradient, lmo, x0,
        supported=("fw", "lfw", "afw", "lafw", "bcg"),
        default_variants=("fw", "lfw", "lafw", "bcg"),
    )
    preset.default_max_iterations = 1000
    return preset


def _build_rational(cfg):
    n = cfg["n"]
    target = np.empty(n, dtype=object)
    target[...] = Fraction(0)
    objective = SquaredDistance(target)
    lmo = ProbabilitySimplexLMO(radius=Fraction(1))
    x0 = ScaledUnit(0, Fraction(1), n)
    preset = _Preset(
        "rational", objective.value, objective.gradient, lmo, x0,
        supported=("fw",), default_variants=("fw",),
    )
    preset.exact = True
    preset.track_atoms = True
    preset.default_step = "agnostic"
    preset.default_max_iterations = 200
    # analytic optimum of |x|^2 over the simplex: the uniform point;
    # certified below by an exactly-zero dual gap
    uniform = np.empty(n, dtype=object)
    uniform[...] = Fraction(1, n)
    grad = np.empty(n, dtype=object)
    objective.gradient(grad, uniform)
    vertex = lmo.compute_extreme_point(grad)
    gap = dense_inner(grad, uniform) - atom_inner(grad, vertex)
    preset.summary_extra = {
        "exact_optimum_coordinate": str(Fraction(1, n)),
        "exact_optimum_dual_gap": str(gap),
    }
    return preset


def _build_simplex_projection(cfg):
    rng = np.random.default_rng(cfg["seed"])
    n = cfg["n"]
    target = rng.standard_normal(n)
    objective = SquaredDistance(target)
    lmo = ProbabilitySimplexLMO(radius=1.0)
    x0 = _start_atom(lmo, objective.gradient, (n,))
    preset = _Preset(
        "simplex-projection", objective.value, objective.gradient, lmo, x0,
        supported=("fw", "lfw", "afw", "lafw", "bcg"),
        default_variants=("fw",),
    )
    if n <= 12:
        preset.enum_lmo = EnumerationLMO(lmo.vertices(n))
    preset.default_max_iterations = 300
    return preset


_BUILDERS = {
    "polyreg": _build_polyreg,
    "matcomp": _build_matcomp,
    "birkhoff": _build_birkhoff,
    "rational": _build_rational,
    "simplex-projection": _build_simplex_projection,
}


def _build_preset(cfg):
    return _BUILDERS[cfg["preset"]](cfg)


def _make_params(preset, cfg, lazy=False):
    step = cfg["step"] or preset.default_step
    rule = make_step_rule(step, lipschitz=cfg["lipschitz"])
    capacity = cfg["cache_capacity"] if cfg["cache_capacity"] else None
    return RunParams(
        max_iterations=(
            cfg["max_iterations"]
            if cfg["max_iterations"] is not None
            else preset.default_max_iterations
        ),
        epsilon=cfg["eps"] if cfg["eps"] is not None else preset.default_epsilon,
        step_rule=rule,
        lazy=lazy,
        cache_capacity=capacity,
        k_lazy=cfg["k_lazy"],
        seed=cfg["seed"],
        track_atoms=preset.track_atoms,
    )


def _run_variant(preset, variant, cfg, lmo=None):
    lmo = lmo if lmo is not None else preset.lmo
    test_errors = []
    params = _make_params(preset, cfg, lazy=variant == "lafw")
    if preset.test_error is not None:
        def callback(record, x, _errors=test_errors):
            _errors.append(preset.test_error(x))
            return False
        params.callback = callback

    if variant == "fw":
        result = frank_wolfe(preset.objective, preset.gradient, lmo, preset.x0_atom, params)
    elif variant == "lfw":
        result = lazified_frank_wolfe(
            preset.objective, preset.gradient, lmo, preset.x0_atom, params
        )
    elif variant in ("afw", "lafw"):
        result = away_frank_wolfe(
            preset.objective, preset.gradient, lmo, preset.x0_atom, params
        )
    elif variant == "bcg":
        result = blended_cg(preset.objective, preset.gradient, lmo, preset.x0_atom, params)
    elif variant == "sfw":
        result = stochastic_fw(
            preset.sfw_oracle, lmo, preset.x0_atom,
            preset.batch_schedule, preset.momentum_schedule, params,
        )
    elif variant == "pgd-reference":
        result = pgd_reference(
            preset.objective, preset.gradient, preset.projection,
            preset.x0_atom.densify(), params,
            lipschitz=preset.lipschitz, gap_lmo=lmo,
        )
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return result, test_errors


def _trajectory_rows(variant, result, test_errors):
    rows = []
    for i, rec in enumerate(result.trajectory):
        row = [
            variant,
            str(rec.iteration),
            repr(float(rec.elapsed_seconds)),
            _fmt(rec.primal),
            _fmt(rec.dual_gap),
            str(rec.lmo_calls),
            str(rec.cache_hits),
            str(rec.active_set_size),
            rec.step_kind,
        ]
        if test_errors:
            row.append(repr(float(test_errors[i])))
        rows.append(row)
    return rows


def _summarize(variant, result):
    last = result.trajectory[-1]
    summary = {
        "final_primal": _fmt(result.primal),
        "final_dual_gap": _fmt(result.dual_gap),
        "iterations": last.iteration,
        "lmo_calls": last.lmo_calls,
        "cache_hits": last.cache_hits,
        "final_sparsity": last.active_set_size,
        "termination": result.termination,
        "wall_seconds": float(last.elapsed_seconds),
    }
    if result.active_set is not None:
        sample = [_fmt(w) for w in result.active_set.weights[:5]]
        summary["active_weights_preview"] = sample
    return summary


def _resolve_config(args):
    cfg = {
        "preset": None, "variants": None, "max_iterations": None, "eps": None,
        "step": None, "lipschitz": None, "cache_capacity": 0, "k_lazy": 2.0,
        "seed": 0, "out": "cgkit-run.csv", "n": None, "degree": 4,
        "density": 0.05, "noise_sigma": 1.0, "n_samples": 1000,
        "n_rows": 50, "n_cols": 40, "rank": 5, "fraction_observed": 0.3,
        "save_instance": None,
    }
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        for key, value in file_cfg.items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        arg_val = getattr(args, key.replace("-", "_"), None)
        if arg_val is not None:
            cfg[key] = arg_val
    if cfg["preset"] not in PRESET_NAMES:
        return None, f"unknown preset {cfg['preset']!r} (choose from {', '.join(PRESET_NAMES)})"
    if cfg["n"] is None:
        cfg["n"] = {"polyreg": 15, "rational": 100, "simplex-projection": 8,
                    "birkhoff": 20}.get(cfg["preset"], 8)
    if isinstance(cfg["variants"], str):
        cfg["variants"] = [v.strip() for v in cfg["variants"].split(",") if v.strip()]
    env_seed = os.environ.get("CGKIT_SEED")
    if env_seed is not None:
        cfg["seed"] = int(env_seed)
    return cfg, None


def cmd_run(args, quiet=False):
    cfg, err = _resolve_config(args)
    if err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    preset = _build_preset(cfg)
    variants = cfg["variants"] or list(preset.default_variants)
    for variant in variants:
        if variant not in ALL_VARIANTS:
            print(f"error: unknown variant {variant!r}", file=sys.stderr)
            return 2
        if variant not in preset.supported:
            print(
                f"error: variant {variant!r} is not supported by preset "
                f"{preset.name!r} (supported: {', '.join(preset.supported)})",
                file=sys.stderr,
            )
            return 2
    cfg["variants"] = variants

    if cfg["save_instance"] and preset.instance_spec is not None:
        kind, spec = preset.instance_spec
        save_instance(cfg["save_instance"], kind, **spec)

    header = list(CSV_HEADER)
    if preset.test_error is not None:
        header.append("test_error")

    all_rows = []
    summaries = {}
    results = {}
    for variant in variants:
        result, test_errors = _run_variant(preset, variant, cfg)
        results[variant] = result
        all_rows.extend(_trajectory_rows(variant, result, test_errors))
        summaries[variant] = _summarize(variant, result)
        if not quiet:
            print(
                f"{preset.name}/{variant}: f={float(result.trajectory[-1].primal):.6e} "
                f"gap={_fmt(result.dual_gap)} lmo={result.trajectory[-1].lmo_calls} "
                f"[{result.termination}]"
            )

    if preset.enum_lmo is not None and "fw" in variants:
        # second oracle route over the same region: per-iteration progress
        # must match the closed form exactly
        result, test_errors = _run_variant(preset, "fw", cfg, lmo=preset.enum_lmo)
        all_rows.extend(_trajectory_rows("fw-enum", result, test_errors))
        summaries["fw-enum"] = _summarize("fw-enum", result)
        base = [r for r in all_rows if r[0] == "fw"]
        twin = [r for r in all_rows if r[0] == "fw-enum"]
        matches = len(base) == len(twin) and all(
            b[3] == t[3] for b, t in zip(base, twin)
        )
        preset.summary_extra["oracle_interchangeable"] = bool(matches)

    out_path = cfg["out"]
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(all_rows)
    summary_path = os.path.splitext(out_path)[0] + ".json"
    summary = {
        "preset": preset.name,
        "seed": cfg["seed"],
        "variants": summaries,
        "backend": _core.backend(),
    }
    summary.update(preset.summary_extra)
    if preset.exact:
        summary["exact_run"] = True
        final_x = results[variants[0]].x
        summary["final_iterate_preview"] = [str(c) for c in final_x[:10]]
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    if not quiet:
        print(f"wrote {out_path} and {summary_path}")
    return 0


def cmd_compare(args):
    code = cmd_run(args, quiet=True)
    if code != 0:
        return code
    cfg, _ = _resolve_config(args)
    summary_path = os.path.splitext(cfg["out"])[0] + ".json"
    with open(summary_path, encoding="utf-8") as fh:
        summary = json.load(fh)
    columns = ("variant", "final_primal", "final_dual_gap", "lmo_calls",
               "wall_seconds", "final_sparsity")
    print("  ".join(f"{c:>18}" for c in columns))
    for variant, row in summary["variants"].items():
        cells = [variant, row["final_primal"], row["final_dual_gap"],
                 str(row["lmo_calls"]), f"{row['wall_seconds']:.4f}",
                 str(row["final_sparsity"])]
        print("  ".join(f"{c:>18}" for c in cells))
    return 0


class _CorruptedOracle(LinearMinimizationOracle):
    """Test hook: answers for the negated direction (always wrong)."""

    def __init__(self, inner):
        self.inner = inner

    def compute_extreme_point(self, direction):
        return self.inner.compute_extreme_point(-np.asarray(direction))


def _oracle_suites(corrupt):
    rng = np.random.default_rng(20240 + 7)

    def wrap(name, oracle):
        return _CorruptedOracle(oracle) if corrupt == name else oracle

    def enum_min(atoms, direction):
        return min(atom_inner(direction, a) for a in atoms)

    suites = []

    def simplex_suite():
        oracle = wrap("simplex", ProbabilitySimplexLMO(radius=1.5))
        verts = ProbabilitySimplexLMO(radius=1.5).vertices(6)
        ok = 0
        for _ in range(100):
            d = rng.standard_normal(6)
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += abs(val - enum_min(verts, d)) <= 1e-12 * max(1.0, abs(val))
        return ok, 100
    suites.append(("simplex", simplex_suite))

    def l1_suite():
        oracle = wrap("l1", LpBallLMO(radius=2.0, p=1))
        verts = LpBallLMO(radius=2.0, p=1).vertices(6)
        ok = 0
        for _ in range(100):
            d = rng.standard_normal(6)
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += abs(val - enum_min(verts, d)) <= 1e-12 * max(1.0, abs(val))
        return ok, 100
    suites.append(("l1", l1_suite))

    def linf_suite():
        oracle = wrap("linf", LpBallLMO(radius=1.25, p=np.inf))
        verts = LpBallLMO(radius=1.25, p=np.inf).vertices(6)
        ok = 0
        for _ in range(100):
            d = rng.standard_normal(6)
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += abs(float(val) - float(enum_min(verts, d))) <= 1e-12 * max(1.0, abs(val))
        return ok, 100
    suites.append(("linf", linf_suite))

    def ksparse_suite():
        oracle = wrap("ksparse", KSparseLMO(radius=1.5, k=3))
        verts = KSparseLMO(radius=1.5, k=3).vertices(6)
        ok = 0
        for _ in range(100):
            d = rng.standard_normal(6)
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += abs(val - enum_min(verts, d)) <= 1e-12 * max(1.0, abs(val))
        return ok, 100
    suites.append(("ksparse", ksparse_suite))

    def birkhoff_suite():
        oracle = wrap("birkhoff", BirkhoffLMO())
        verts = BirkhoffLMO().vertices(4)
        ok = 0
        for _ in range(100):
            d = rng.standard_normal((4, 4))
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += abs(val - enum_min(verts, d)) <= 1e-12 * max(1.0, abs(val))
        return ok, 100
    suites.append(("birkhoff", birkhoff_suite))

    def hungarian_suite():
        from itertools import permutations

        ok = 0
        for _ in range(100):
            cost = rng.standard_normal((5, 5))
            _, total = hungarian(cost)
            best = min(
                sum(cost[i, p[i]] for i in range(5)) for p in permutations(range(5))
            )
            ok += abs(total - best) <= 1e-12 * max(1.0, abs(best))
        return ok, 100
    suites.append(("hungarian", hungarian_suite))

    def rational_suite():
        # exact assertions, no tolerance
        oracle = wrap("rational", ProbabilitySimplexLMO(radius=Fraction(2)))
        verts = ProbabilitySimplexLMO(radius=Fraction(2)).vertices(5)
        ok = 0
        for _ in range(50):
            d = np.array(
                [Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 20)))
                 for _ in range(5)],
                dtype=object,
            )
            val = atom_inner(d, oracle.compute_extreme_point(d))
            ok += val == enum_min(verts, d)
        return ok, 50
    suites.append(("rational", rational_suite))

    def invariant_suite():
        ok = 0
        total = 50
        for _ in range(total):
            dim = 6
            aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, dim))
            for step in range(10):
                atom = ScaledUnit(int(rng.integers(0, dim)), 1.0, dim)
                aset.update_forward(atom, float(rng.uniform(0.0, 0.9)))
            recon = aset.reconstruct()
            drift = float(np.abs(recon - aset.iterate).max())
            weight_ok = abs(aset.weight_sum() - 1.0) <= 1e-9
            ok += drift <= 1e-10 and weight_ok and all(w > 0 for w in aset.weights)
        return ok, total
    suites.append(("active-set", invariant_suite))

    def cache_suite():
        ok = 0
        total = 50
        oracle = ProbabilitySimplexLMO(radius=1.0)
        for _ in range(total):
            cache = VertexCache(capacity=3)
            x = np.full(4, 0.25)
            good = True
            for _ in range(8):
                d = rng.standard_normal(4)
                threshold = float(rng.uniform(0.0, 0.2))
                atom, source = cached_query(cache, oracle, d, x, threshold)
                served = float(d.dot(x)) - float(atom_inner(d, atom))
                if source == "cache":
                    good &= served >= threshold - 1e-12
                good &= len(cache) <= 3
            ok += good
        return ok, total
    suites.append(("cache", cache_suite))

    return suites


def cmd_check(args):
    corrupt = getattr(args, "corrupt", None)
    failures = []
    for name, suite in _oracle_suites(corrupt):
        passed, total = suite()
        status = "ok" if passed == total else "FAIL"
        print(f"{name:>10}: {passed}/{total} {status}")
        if passed != total:
            failures.append(name)
    if failures:
        print(f"failing suites: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


def _add_run_arguments(sub):
    sub.add_argument("--preset", required=False, default=None)
    sub.add_argument("--variants", default=None,
                     help="comma-separated list, e.g. fw,lfw,bcg")
    sub.add_argument("--max-iterations", type=int, default=None, dest="max_iterations")
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--step", default=None,
                     choices=("adaptive", "agnostic", "short", "rational-short",
                              "line-search"))
    sub.add_argument("--lipschitz", type=float, default=None)
    sub.add_argument("--cache-capacity", type=int, default=None, dest="cache_capacity",
                     help="vertex-cache bound; 0 or omitted = unbounded")
    sub.add_argument("--k-lazy", type=float, default=None, dest="k_lazy")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", default=None)
    sub.add_argument("--config", default=None, help="JSON file with run settings")
    sub.add_argument("--save-instance", default=None, dest="save_instance")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--degree", type=int, default=None)
    sub.add_argument("--density", type=float, default=None)
    sub.add_argument("--noise-sigma", type=float, default=None, dest="noise_sigma")
    sub.add_argument("--n-samples", type=int, default=None, dest="n_samples")
    sub.add_argument("--n-rows", type=int, default=None, dest="n_rows")
    sub.add_argument("--n-cols", type=int, default=None, dest="n_cols")
    sub.add_argument("--rank", type=int, default=None)
    sub.add_argument("--fraction-observed", type=float, default=None,
                     dest="fraction_observed")


def build_parser():
    parser = argparse.ArgumentParser(prog="cgkit", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    run_p = subparsers.add_parser("run", help="run variants, write CSV + JSON")
    _add_run_arguments(run_p)
    run_p.set_defaults(func=cmd_run)
    cmp_p = subparsers.add_parser("compare", help="run and print a summary table")
    _add_run_arguments(cmp_p)
    cmp_p.set_defaults(func=cmd_compare)
    chk_p = subparsers.add_parser("check", help="oracle and invariant self-tests")
    chk_p.add_argument("--corrupt", default=None,
                       help="test hook: corrupt the named oracle suite")
    chk_p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # solver hard errors map to exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
