"""Scenario execution and report writing.

Each scenario produces a structured report: per-test records, an overall
verdict, the seed, a hash of the originating config and the tool version.
Rerunning the same config byte-reproduces every report except the timing
block.
"""
from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, ScenarioConfig
from .distributions import DirichletParams, RngStream
from .moments import (
    DirMultParams,
    MomentIndex,
    compositions,
    dirmult_normalization_check,
    kerov_tsilevich_check,
    rwa_moment_closed_form,
    rwa_moment_expansion,
)
from .rwa import (
    RwaSpec,
    resolve_variant_reading,
    sample_rwa_direct_batch,
    sample_rwa_gamma_path_batch,
    scenario_of,
    target_params,
    variant_scenario,
)
from .stattest import (
    DEFAULT_ENERGY_LEVEL,
    DEFAULT_KS_LEVEL,
    DEFAULT_Z_THRESHOLD,
    SampleBatch,
    energy_two_sample,
    ks_marginal,
    moment_ztest,
)
from .stieltjes import (
    PowerSemicircleParams,
    equation1_check,
    equation3_residual,
    power_semicircle_transform,
)

__all__ = ["run_scenario", "run_config", "write_report", "moment_indices"]


def moment_indices(k: int, max_total: int):
    """All exponent vectors of length k with 1 <= total order <= max_total."""
    out = []
    for total in range(1, max_total + 1):
        out.extend(compositions(total, k))
    return out


def _statistical_suite(scenario, target: DirichletParams, seed: int, params: dict):
    """Moment z-tests, marginal KS tests and a path-equivalence energy test
    for a weighted-average scenario sampled along both paths."""
    n_samples = int(params.get("n_samples", 200_000))
    max_order = int(params.get("max_moment_order", 3))
    z_thr = float(params.get("z_threshold", DEFAULT_Z_THRESHOLD))
    ks_level = float(params.get("ks_level", DEFAULT_KS_LEVEL))
    energy_level = float(params.get("energy_level", DEFAULT_ENERGY_LEVEL))
    energy_perms = int(params.get("energy_permutations", 1999))

    direct_stream = RngStream(seed, 1)
    gamma_stream = RngStream(seed, 2)
    direct = SampleBatch(
        sample_rwa_direct_batch(scenario, n_samples, direct_stream), direct_stream
    )
    gamma = SampleBatch(
        sample_rwa_gamma_path_batch(scenario, n_samples, gamma_stream), gamma_stream
    )

    tests = []
    k = direct.k
    for path, batch in (("direct", direct), ("gamma", gamma)):
        for s in moment_indices(k, max_order):
            rec = moment_ztest(batch, target, s, z_thr).to_dict()
            rec["path"] = path
            tests.append(rec)
        for c in range(k):
            rec = ks_marginal(batch, target, c, ks_level).to_dict()
            rec["path"] = path
            tests.append(rec)
    rec = energy_two_sample(
        direct, gamma, level=energy_level, n_permutations=energy_perms, seed=seed
    ).to_dict()
    rec["path"] = "direct-vs-gamma"
    tests.append(rec)
    return tests


def _run_theorem(sc: ScenarioConfig):
    spec = RwaSpec(sc.params["alphas"])
    if "target_override" in sc.params:
        target = DirichletParams(sc.params["target_override"])
    else:
        target = target_params(spec)
    tests = _statistical_suite(scenario_of(spec), target, sc.seed, sc.params)
    return tests, []


def _run_variant(sc: ScenarioConfig):
    alpha = sc.params["alpha"]
    reading = resolve_variant_reading(alpha)
    if reading is None:
        note = (
            "variant scenario quarantined: neither parameter reading matches "
            "the claimed target under the exact moment oracle"
        )
        return [{"kind": "variant-resolution", "reading": None, "pass": False}], [note]
    scenario = variant_scenario(alpha, reading)
    target = DirichletParams(scenario.target_alpha)
    notes = [f"variant parameter reading resolved by moment oracle: {reading}"]
    tests = [{"kind": "variant-resolution", "reading": reading, "pass": True}]
    tests += _statistical_suite(scenario, target, sc.seed, sc.params)
    return tests, notes


def _spec_grid(sizes, entries, n_random: int, seed: int):
    """Deterministic fixture grid of alpha matrices: exhaustive when small,
    otherwise a seeded sample of entry combinations."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    entries = [float(e) for e in entries]
    for n, k in sizes:
        cells = n * k
        if len(entries) ** cells <= 256:
            for combo in itertools.product(entries, repeat=cells):
                yield np.asarray(combo).reshape(n, k)
        else:
            for _ in range(n_random):
                yield rng.choice(entries, size=(n, k))


def _run_moments(sc: ScenarioConfig):
    sizes = [tuple(sz) for sz in sc.params.get("sizes", [[2, 2], [2, 3], [3, 2], [3, 3]])]
    entries = sc.params.get("entries", [0.5, 1.0, 2.0, 3.5])
    n_random = int(sc.params.get("n_random", 30))
    max_total = int(sc.params.get("max_total_order", 5))
    rtol = float(sc.params.get("rtol", 1e-9))

    tests = []
    for n, k in sizes:
        worst = 0.0
        checked = 0
        for mat in _spec_grid([(n, k)], entries, n_random, sc.seed):
            spec = RwaSpec(mat)
            for s in moment_indices(k, max_total):
                idx = MomentIndex(s)
                a = rwa_moment_expansion(spec, idx)
                b = rwa_moment_closed_form(spec, idx)
                worst = max(worst, abs(a - b) / abs(b))
                checked += 1
        tests.append(
            {
                "kind": "moment-equality",
                "n": n,
                "k": k,
                "checked": checked,
                "max_rel_error": worst,
                "rtol": rtol,
                "pass": worst < rtol,
            }
        )
    return tests, []


def _run_dirmult(sc: ScenarioConfig):
    max_trials = int(sc.params.get("max_trials", 10))
    max_k = int(sc.params.get("max_k", 4))
    entries = [float(e) for e in sc.params.get("entries", [0.5, 1.0, 2.0, 5.0])]
    tol = float(sc.params.get("tol", 1e-10))

    worst = 0.0
    checked = 0
    for k in range(2, max_k + 1):
        for alpha in itertools.product(entries, repeat=k):
            p = DirichletParams(alpha)
            for trials in range(max_trials + 1):
                total = dirmult_normalization_check(DirMultParams(p, trials))
                worst = max(worst, abs(total - 1.0))
                checked += 1
    tests = [
        {
            "kind": "dirmult-normalization",
            "checked": checked,
            "max_abs_error": worst,
            "tol": tol,
            "pass": worst < tol,
        }
    ]
    return tests, []


_COEFFICIENT_NOTE = (
    "power-semicircle coefficient set to (n-1)/2: the (n-2)/2 variant seen in "
    "the source prose fails the z*S(z)->1 normalization (it vanishes at n=2)"
)


def _run_stieltjes(sc: ScenarioConfig):
    orders = [int(n) for n in sc.params.get("orders", [2, 3, 4])]
    grid = [float(z) for z in sc.params.get("grid", [1.5, 2.0, 3.0, 5.0])]
    tol_exact = float(sc.params.get("tol_exact", 1e-8))
    tol_numeric = float(sc.params.get("tol_numeric", 1e-6))

    tests = []
    for n in orders:
        tol = tol_exact if n <= 3 else tol_numeric
        g = [z for z in grid] if n <= 3 else [z for z in grid if z >= 2.0]
        r3 = equation3_residual(n, g)
        r1 = equation1_check(n, g)
        tests.append(
            {
                "kind": "derivative-identity",
                "form": "transform",
                "n": n,
                "grid": g,
                "residuals": [float(v) for v in r3],
                "tol": tol,
                "pass": bool(np.max(r3) < tol),
            }
        )
        tests.append(
            {
                "kind": "derivative-identity",
                "form": "integral",
                "n": n,
                "grid": g,
                "residuals": [float(v) for v in r1],
                "tol": tol,
                "pass": bool(np.max(r1) < tol),
            }
        )
        p = PowerSemicircleParams(n)
        norm_pass = True
        norm_vals = []
        for z in (10.0, 1e3, 1e6):
            val = float(abs(z * power_semicircle_transform(p, z) - 1.0))
            norm_vals.append(val)
            norm_pass = norm_pass and val <= 2.0 / z
        tests.append(
            {
                "kind": "normalization",
                "n": n,
                "values": norm_vals,
                "pass": norm_pass,
            }
        )
    return tests, [_COEFFICIENT_NOTE]


def _run_kerov_tsilevich(sc: ScenarioConfig):
    alphas = sc.params["alphas"]
    t_values = sc.params.get(
        "t_values",
        [[0.5, 0.5], [0.5, -0.5], [-0.5, -0.5], [0.25, 0.4], [-0.3, 0.1]],
    )
    order = int(sc.params.get("order", 12))
    tol = float(sc.params.get("tol", 1e-6))

    tests = []
    for alpha in alphas:
        for t in t_values:
            series, product, tail = kerov_tsilevich_check(alpha, t, order)
            resid = abs(series - product)
            tests.append(
                {
                    "kind": "product-mgf-identity",
                    "alpha": list(alpha),
                    "t": list(t),
                    "series": series,
                    "product": product,
                    "tail_bound": tail,
                    "residual": resid,
                    "pass": resid <= tail + tol,
                }
            )
    return tests, []


_RUNNERS = {
    "theorem": _run_theorem,
    "variant": _run_variant,
    "moments": _run_moments,
    "dirmult": _run_dirmult,
    "stieltjes": _run_stieltjes,
    "kerov_tsilevich": _run_kerov_tsilevich,
}


def run_scenario(sc: ScenarioConfig, config_hash: str) -> dict:
    start = time.perf_counter()
    tests, notes = _RUNNERS[sc.kind](sc)
    elapsed = time.perf_counter() - start
    return {
        "format_version": 1,
        "scenario_id": sc.id,
        "kind": sc.kind,
        "seed": sc.seed,
        "config_hash": config_hash,
        "tool_version": __version__,
        "tests": tests,
        "overall_pass": all(t["pass"] for t in tests),
        "notes": notes,
        "timing": {"wall_clock_seconds": elapsed},
    }


def write_report(report: dict, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{report['scenario_id']}.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def run_config(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> int:
    """Execute every scenario, write one report each; 0 iff all pass."""
    out = Path(out_dir) if out_dir is not None else Path(cfg.output_dir)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(
                pool.map(lambda sc: run_scenario(sc, cfg.config_hash), cfg.scenarios)
            )
    else:
        reports = [run_scenario(sc, cfg.config_hash) for sc in cfg.scenarios]
    all_pass = True
    for report in sorted(reports, key=lambda r: r["scenario_id"]):
        write_report(report, out)
        all_pass = all_pass and report["overall_pass"]
    return 0 if all_pass else 1
