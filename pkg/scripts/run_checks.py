#!/usr/bin/env python3
"""
Run the full check workflow: every subcommand over the sample configs,
plus a cross-check of the trace and cross-ratio angle formulas.
"""

import argparse
import sys
import os

# Add parent directory to path to import tools
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import FORMULA_TOL
from tools import cli
from tools.export import load_json, write_json
from tools.hypgeom import angle_formula_gap

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")


def run(command, config, out, *extra):
    argv = [command, "--config", os.path.join(CONFIGS, config), "--out", out, *extra]
    print(f"$ python main.py {' '.join(argv)}")
    code = cli.main(argv)
    print(f"  exit {code}")
    return code


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=os.path.join(ROOT, "output", "checks"))
    parser.add_argument("--workers", default="1")
    parser.add_argument("--samples", type=int, default=1000)
    args = parser.parse_args()
    workers = ("--workers", args.workers)
    results = {}

    print("Listing presets...")
    results["presets"] = cli.main(["presets"])

    print("Computing length spectra...")
    torus = os.path.join(args.out, "modular_torus")
    results["spectrum"] = run("spectrum", "modular_torus.json", torus, "--depth", "6")
    results["spectrum_schottky"] = run("spectrum", "schottky.json", os.path.join(args.out, "schottky"))

    print("Computing angle spectra (perturbed vs arithmetic)...")
    paired = os.path.join(args.out, "perturbed_pair")
    results["angles"] = run("angles", "perturbed_pair.json", paired, *workers)

    print("Sweeping the twist flow...")
    results["twist_sweep"] = run("twist-sweep", "modular_torus.json", torus, *workers)

    print("Comparing axes sets...")
    results["isoaxial"] = run("isoaxial", "modular_torus.json", torus)
    results["isoaxial_schottky"] = run("isoaxial", "schottky.json", os.path.join(args.out, "schottky"))

    print("Checking the collar inequality...")
    results["collar"] = run("collar-check", "perturbed_pair.json", paired, *workers)

    print(f"Cross-checking angle formulas on {args.samples} random pairs...")
    worst = angle_formula_gap(args.samples)
    print(f"  worst disagreement {worst:.3e}")

    summary = {"exit_codes": results, "formula_worst": worst, "formula_ok": worst < FORMULA_TOL}
    sweep = os.path.join(torus, "twist_sweep.json")
    if os.path.exists(sweep):
        summary["sweep"] = load_json(sweep)["summary"]
    write_json(os.path.join(args.out, "checks.json"), summary)

    failed = [name for name, code in results.items() if code != 0]
    if failed or not summary["formula_ok"]:
        print(f"FAILED: {', '.join(failed) or 'formula cross-check'}")
        sys.exit(1)
    print("Done!")


if __name__ == "__main__":
    main()
