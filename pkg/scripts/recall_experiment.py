"""Multi-run minority recall for every model x augmenter pair.

Defaults reproduce the full five-augmenter grid on the built-in cohort;
pass --runs and --augmenters to shrink it.
"""

import argparse
import sys

from bgcs.augment import AUGMENTERS
from bgcs.baselines import SmoteConfig
from bgcs.cohort import generate_synthetic_cohort
from bgcs.data import SeedSpec, load_csv
from bgcs.models import MODELS, multi_run_eval


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input")
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--runs", type=int, default=25)
    ap.add_argument("--models", default=",".join(MODELS))
    ap.add_argument("--augmenters", default=",".join(AUGMENTERS))
    ap.add_argument("--smote-mode", default="fractional", choices=("fractional", "binarized"))
    ap.add_argument("--latent", default="pearson", choices=("pearson", "tetrachoric"))
    ap.add_argument("--json", help="write the full summary here")
    ap.add_argument("--csv", help="write one row per (run, model, augmenter)")
    args = ap.parse_args()

    seed = SeedSpec(args.seed)
    table = (load_csv(args.input, label_column="label") if args.input
             else generate_synthetic_cohort(seed=seed)[0])
    options = {"smote": {"smote": SmoteConfig(output_mode=args.smote_mode)},
               "bgcs": {"latent": args.latent}}

    def progress(run, aug):
        print(f"run {run + 1}/{args.runs} {aug}", file=sys.stderr)

    summary = multi_run_eval(table, args.models.split(","), args.augmenters.split(","),
                             args.runs, seed=seed, augment_options=options, progress=progress)
    print(f"{'model':22}{'augmenter':20}{'median':>8}{'q1':>8}{'q3':>8}{'change %':>10}")
    for m in summary.models:
        for a in summary.augmenters:
            c = summary.cell(m, a)
            imp = summary.improvement(m, a)
            if c["median"] is None:
                print(f"{m:22}{a:20}{'failed':>8}")
                continue
            print(f"{m:22}{a:20}{c['median']:8.3f}{c['q1']:8.3f}{c['q3']:8.3f}"
                  f"{'' if imp is None else f'{imp:10.1f}'}")
    if summary.errors():
        print(f"{len(summary.errors())} failed cells", file=sys.stderr)
    if args.json:
        summary.write_json(args.json)
    if args.csv:
        summary.write_csv(args.csv)


if __name__ == "__main__":
    main()
