"""Run the desk-scale sweep and write the four bench outputs.

    python scripts/desk_sweep.py --out out/desk
    python scripts/desk_sweep.py --config my.json --threads 4
"""

import argparse
from pathlib import Path

from qwmvc.bench import EnsembleConfig, family_summary_lines, load_config, run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("out/desk"))
    ap.add_argument("--threads", type=int, default=None, help="default: QWMVC_THREADS or all cores")
    args = ap.parse_args()

    config = load_config(args.config) if args.config else EnsembleConfig()
    run, paths, elapsed = run_bench(config, args.out, args.threads)
    for line in family_summary_lines(run.records):
        print(line)
    print(f"{run.instances} instances, {run.substituted} WS substitutions, "
          f"{len(run.failures)} generation failures, {elapsed:.1f}s")
    print(paths["heatmap.csv"].read_text(), end="")


if __name__ == "__main__":
    main()
