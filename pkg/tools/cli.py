"""Command-line front end: ``python main.py <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error or unknown preset, 3 depth
cap exceeded, 4 swept pair does not cross (or is not separated) at t = 0.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config import LOG_LEVEL
from tools import cache, export
from tools.experiment import ConfigError, ExperimentConfig, RunManifest, load_config
from tools.grp import (
    PRESETS,
    DepthCap,
    Representation,
    UnknownPreset,
    evaluate,
    preset,
    subgroup_rep,
)
from tools.hypgeom import angle_cross_ratio, axis, crossing, random_isometry
from tools.spectra import (
    angle_spectrum,
    axes_set,
    collar_check,
    isoaxial_compare,
    length_spectrum,
    multiplicity_profile,
    value_multiplicity,
)
from tools.twist import (
    NoCrossingAtBase,
    NotSeparated,
    TwistFamily,
    angle_sweep,
    difference_sweep,
    separation_sweep,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEPTH_CAP = 3
EXIT_NO_CROSSING = 4


def _outdir(config: ExperimentConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _prime_cache(config: ExperimentConfig, rep: Representation, *depths: int) -> None:
    if not config.use_cache:
        return
    for d in sorted(set(depths)):
        cache.cached_ball(d, rep.rank, unsafe=config.unsafe_depth)


def _generator_angle(rep: Representation) -> Optional[float]:
    """Crossing angle of the generator axes, when they cross."""
    a, b = axis(evaluate(rep, "a")), axis(evaluate(rep, "b"))
    if crossing(a, b) is None:
        return None
    return angle_cross_ratio(a, b)


def cmd_presets(config: ExperimentConfig) -> List[Path]:
    catalogue = {}
    for name, info in sorted(PRESETS.items()):
        rep = info.builder()
        catalogue[name] = {"params": list(info.params), "description": info.description, "default": rep.describe()}
    print(json.dumps(export.jsonable(catalogue), sort_keys=True, indent=2))
    return []


def cmd_spectrum(config: ExperimentConfig) -> List[Path]:
    out = _outdir(config)
    manifest = RunManifest.start("spectrum", config)
    rep = config.rep()
    with manifest.phase("enumerate"):
        _prime_cache(config, rep, config.depth)
        entries = length_spectrum(rep, config.depth, config.tol, unsafe=config.unsafe_depth)
    digest = config.digest()
    with manifest.phase("write"):
        rows = ((e.length, e.multiplicity, " ".join(c.word for c in e.witnesses)) for e in entries)
        csv_path = export.write_csv(out / "length_spectrum.csv", ("length", "multiplicity", "witnesses"), rows, digest, config.tol)
        json_path = export.write_json(out / "length_spectrum.json", {
            "meta": config.meta(),
            "representation": rep.describe(),
            "depth": config.depth,
            "entries": [e.to_dict() for e in entries],
        })
    paths = [manifest.record(csv_path), manifest.record(json_path)]
    manifest.write(out)
    print(f"spectrum: {len(entries)} lengths written to {csv_path}")
    return paths


def _angle_run(config: ExperimentConfig, rep: Representation) -> Dict[str, object]:
    _prime_cache(config, rep, config.depth, config.effective_conj_depth)
    spectrum = angle_spectrum(
        rep,
        config.depth,
        config.effective_conj_depth,
        config.tol,
        config.reduce_depth,
        workers=config.workers,
        unsafe=config.unsafe_depth,
    )
    profile = multiplicity_profile(spectrum)
    ab = _generator_angle(rep)
    return {
        "rep": rep,
        "spectrum": spectrum,
        "profile": profile,
        "generator_angle": ab,
        "generator_angle_multiplicity": None if ab is None else value_multiplicity(spectrum, ab, config.tol),
    }


def _profile_block(run: Dict[str, object]) -> Dict[str, object]:
    rep = run["rep"]
    return {
        "label": rep.label,
        "params": dict(rep.params),
        "profile": run["profile"].to_dict(),
        "max_multiplicity": run["profile"].max_multiplicity,
        "generator_angle": run["generator_angle"],
        "generator_angle_multiplicity": run["generator_angle_multiplicity"],
    }


def cmd_angles(config: ExperimentConfig) -> List[Path]:
    out = _outdir(config)
    manifest = RunManifest.start("angles", config)
    with manifest.phase("enumerate"):
        primary = _angle_run(config, config.rep())
    companion = None
    if config.companion:
        with manifest.phase("companion"):
            companion = _angle_run(config, config.companion_rep())
    digest = config.digest()
    with manifest.phase("write"):
        spectrum = primary["spectrum"]
        rows = ((e.angle, e.acute, e.multiplicity) for e in spectrum)
        csv_path = export.write_csv(out / "angle_spectrum.csv", ("angle", "acute", "multiplicity"), rows, digest, config.tol)
        json_path = export.write_json(out / "angle_spectrum.json", {
            "meta": config.meta(),
            "representation": primary["rep"].describe(),
            "depth": config.depth,
            "conj_depth": config.effective_conj_depth,
            "conventions": {
                "angle": "counter-clockwise from the first line to the second, in (0, pi)",
                "acute": "min(angle, pi - angle)",
                "pairs": "unordered, canonical class order",
            },
            "entries": [e.to_dict() for e in spectrum],
        })
        multiplicity = {"meta": config.meta(), "primary": _profile_block(primary)}
        if companion is not None:
            multiplicity["companion"] = _profile_block(companion)
        mult_path = export.write_json(out / "multiplicity.json", multiplicity)
    manifest.summary = {
        role: {"label": block["label"], "max_multiplicity": block["max_multiplicity"]}
        for role, block in multiplicity.items()
        if role != "meta"
    }
    paths = [manifest.record(p) for p in (csv_path, json_path, mult_path)]
    manifest.write(out)
    print(f"angles: {len(spectrum)} values, max multiplicity {primary['profile'].max_multiplicity}")
    return paths


def cmd_twist_sweep(config: ExperimentConfig) -> List[Path]:
    out = _outdir(config)
    manifest = RunManifest.start("twist_sweep", config)
    rep = config.rep()
    fam = TwistFamily.for_rep(rep, config.curve)
    grid = config.t_grid()
    reports = []
    with manifest.phase("sweeps"):
        for pair in config.pairs:
            reports.append(angle_sweep(fam, pair, grid, workers=config.workers))
    separation = None
    if config.separation:
        with manifest.phase("separation"):
            g1, g2 = config.separation
            distances = separation_sweep(fam, g1, g2, grid, workers=config.workers)
            separation = {"words": [g1, g2], "distances": distances, **_separation_tail(grid, distances)}
    differences = []
    with manifest.phase("differences"):
        for p1, p2 in config.differences:
            differences.append(difference_sweep(fam, p1, p2, grid, workers=config.workers).to_dict())
    full = [r for r in reports if r.pair[0] == config.curve and not r.pair[2]]
    generic = [r for r in reports if not (r.pair[0] == config.curve and not r.pair[2])]
    summary = {
        "full_range_pass": all(r.full_range_pass and r.tail_monotone for r in full),
        "generic_pass": all(r.generic_pass for r in generic),
        "margin": (min(r.delta for r in generic) - max(r.delta for r in full)) if full and generic else None,
        "separation_pass": (separation["increasing_tail"] and separation["doubles"]) if separation else None,
    }
    digest = config.digest()
    with manifest.phase("write"):
        rows = ((" ".join(r.pair).strip(), t, a) for r in reports for t, a in r.rows())
        csv_path = export.write_csv(out / "twist_sweep.csv", ("pair", "t", "angle"), rows, digest, config.tol)
        json_path = export.write_json(out / "twist_sweep.json", {
            "meta": config.meta(),
            "representation": rep.describe(),
            "curve": {"generator": fam.curve.generator, "incidence": dict(fam.curve.incidence)},
            "grid": list(config.grid),
            "reports": [r.to_dict() for r in reports],
            "separation": separation,
            "differences": differences,
            "summary": summary,
        })
    manifest.summary = summary
    paths = [manifest.record(csv_path), manifest.record(json_path)]
    manifest.write(out)
    print(f"twist-sweep: {len(reports)} sweeps, full range {'pass' if summary['full_range_pass'] else 'FAIL'}, generic {'pass' if summary['generic_pass'] else 'FAIL'}")
    return paths


def _separation_tail(grid: Sequence[float], distances: Sequence[float]) -> Dict[str, bool]:
    """The t >= 0 tail must increase strictly and end above twice its start."""
    tail = [d for t, d in zip(grid, distances) if t >= 0.0]
    return {
        "increasing_tail": all(b > a for a, b in zip(tail, tail[1:])),
        "doubles": len(tail) > 1 and tail[-1] > 2.0 * tail[0],
    }


def _comparison_target(config: ExperimentConfig, rep: Representation, kind: str, argument: str):
    """Return (rep1, rep2) for a comparison; the first is the one tested for containment."""
    if kind == "self":
        return rep, rep
    if kind == "conjugate":
        return rep, rep.conjugate(evaluate(rep, argument or "a"), label=f"{rep.label}^{argument or 'a'}")
    if kind == "subgroup":
        return subgroup_rep(rep, config.subgroup_words(argument)), rep
    if kind == "preset":
        return rep, preset(argument)
    rng = np.random.default_rng(config.seed)
    return rep, rep.conjugate(random_isometry(rng), label=f"{rep.label}^random")


def cmd_isoaxial(config: ExperimentConfig) -> List[Path]:
    out = _outdir(config)
    manifest = RunManifest.start("isoaxial", config)
    rep = config.rep()
    if config.use_cache:
        provider = partial(_cached_axes, config)
    else:
        provider = lambda r, d: axes_set(r, d, config.axis_tol, unsafe=config.unsafe_depth)
    results = []
    with manifest.phase("compare"):
        for kind, argument in config.comparisons:
            rep1, rep2 = _comparison_target(config, rep, kind, argument)
            report = isoaxial_compare(rep1, rep2, config.depth1, config.effective_depth2, config.axis_tol, provider)
            results.append((kind, argument, rep1.label, rep2.label, report))
    digest = config.digest()
    with manifest.phase("write"):
        rows = (
            (kind, argument, l1, l2, r.verdict, r.forward, r.backward, r.forward_missing, r.backward_missing)
            for kind, argument, l1, l2, r in results
        )
        header = ("kind", "argument", "first", "second", "verdict", "forward", "backward", "forward_missing", "backward_missing")
        csv_path = export.write_csv(out / "isoaxial.csv", header, rows, digest, config.axis_tol)
        json_path = export.write_json(out / "isoaxial.json", {
            "meta": config.meta(),
            "comparisons": [
                dict(kind=kind, argument=argument, first=l1, second=l2, **r.to_dict())
                for kind, argument, l1, l2, r in results
            ],
        })
    paths = [manifest.record(csv_path), manifest.record(json_path)]
    manifest.write(out)
    for kind, argument, _, _, r in results:
        print(f"isoaxial {kind}({argument}): {r.verdict}")
    return paths


def _cached_axes(config: ExperimentConfig, rep: Representation, depth: int):
    return cache.cached_axes_set(rep, depth, config.axis_tol, unsafe=config.unsafe_depth)


def cmd_collar_check(config: ExperimentConfig) -> List[Path]:
    out = _outdir(config)
    manifest = RunManifest.start("collar_check", config)
    reps = [config.rep()]
    if config.companion:
        reps.append(config.companion_rep())
    reports = {}
    with manifest.phase("check"):
        for rep in reps:
            _prime_cache(config, rep, config.depth, config.effective_conj_depth)
            report = collar_check(rep, config.depth, config.effective_conj_depth, workers=config.workers, unsafe=config.unsafe_depth)
            reports[rep.label] = report.to_dict()
    with manifest.phase("write"):
        json_path = export.write_json(out / "collar.json", {"meta": config.meta(), "depth": config.depth, "reports": reports})
    paths = [manifest.record(json_path)]
    manifest.write(out)
    for label, report in reports.items():
        print(f"collar-check {label}: min product {report['min_product']}, holds {report['holds']}")
    return paths


COMMANDS: Dict[str, Callable[[ExperimentConfig], List[Path]]] = {
    "presets": cmd_presets,
    "spectrum": cmd_spectrum,
    "angles": cmd_angles,
    "twist-sweep": cmd_twist_sweep,
    "isoaxial": cmd_isoaxial,
    "collar-check": cmd_collar_check,
}


def _grid(value: str) -> List[float]:
    try:
        parts = [float(x) for x in value.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be min,max,step: {value!r}") from exc
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be min,max,step: {value!r}")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="main.py", description="Length, axes and angle spectra of two-generator Fuchsian groups")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--preset", help="preset name, optionally with parameters: perturbed_torus(0.1)")
        p.add_argument("--companion", help="second preset for paired runs")
        p.add_argument("--depth", type=int)
        p.add_argument("--conj-depth", dest="conj_depth", type=int)
        p.add_argument("--reduce-depth", dest="reduce_depth", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--axis-tol", dest="axis_tol", type=float)
        p.add_argument("--grid", type=_grid, help="min,max,step")
        p.add_argument("--depth1", type=int)
        p.add_argument("--depth2", type=int)
        p.add_argument("--out", dest="output_dir")
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--log-level", dest="log_level", default=None)
        p.add_argument("--unsafe-depth", dest="unsafe_depth", action="store_const", const=True, default=None)
        p.add_argument("--no-cache", dest="use_cache", action="store_const", const=False, default=None)
    return parser


_NOT_CONFIG = ("command", "config", "log_level")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(
        level=(args.log_level or LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        config = load_config(args.config, overrides)
        COMMANDS[args.command](config)
    except DepthCap as exc:
        logger.error("%s", exc)
        return EXIT_DEPTH_CAP
    except (NoCrossingAtBase, NotSeparated) as exc:
        logger.error("%s", exc)
        return EXIT_NO_CROSSING
    except (ConfigError, UnknownPreset) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


__all__ = [
    "COMMANDS",
    "EXIT_CONFIG",
    "EXIT_DEPTH_CAP",
    "EXIT_NO_CROSSING",
    "EXIT_OK",
    "build_parser",
    "cmd_angles",
    "cmd_collar_check",
    "cmd_isoaxial",
    "cmd_presets",
    "cmd_spectrum",
    "cmd_twist_sweep",
    "main",
]


if __name__ == "__main__":
    sys.exit(main())
