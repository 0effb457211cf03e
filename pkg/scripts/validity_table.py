"""Per-augmenter proportion-test summary on the minority rows of a cohort.

Prints one column per augmenter with the z/p summary rows and the
similar/dissimilar scenario counts, and optionally writes it as JSON.
"""

import argparse
import json

from bgcs.augment import generate_minority, synthetic_count
from bgcs.baselines import SmoteConfig
from bgcs.cohort import generate_synthetic_cohort
from bgcs.data import SeedSpec, class_balance, load_csv
from bgcs.statval import DEFAULT_ALPHAS, feature_test_suite

METHODS = ("bgcs", "smote", "gaussian-copula", "random-oversample")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", help="labelled CSV; default is the built-in synthetic cohort")
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--methods", default=",".join(METHODS))
    ap.add_argument("--smote-mode", default="fractional", choices=("fractional", "binarized"))
    ap.add_argument("--latent", default="pearson", choices=("pearson", "tetrachoric"))
    ap.add_argument("--json")
    args = ap.parse_args()

    seed = SeedSpec(args.seed)
    if args.input:
        table = load_csv(args.input, label_column="label")
    else:
        table, _ = generate_synthetic_cohort(seed=seed)
    minority = table.class_rows(1)
    bal = class_balance(table)
    m = synthetic_count(bal.n_positive, bal.n_negative, 1.0)

    columns = {}
    for method in args.methods.split(","):
        opts = {"smote": SmoteConfig(output_mode=args.smote_mode)} if method == "smote" else {}
        if method == "bgcs":
            opts = {"latent": args.latent}
        synth = generate_minority(method, minority, m, seed, **opts)
        summary = feature_test_suite(minority, synth, DEFAULT_ALPHAS)
        columns[method] = summary.table_rows()

    print(f"{minority.n_rows} real vs {m} synthetic minority rows, "
          f"{table.n_features} features x {len(DEFAULT_ALPHAS)} alphas")
    rows = next(iter(columns.values())).keys()
    print(f"{'':32}" + "".join(f"{k:>22}" for k in columns))
    for row in rows:
        cells = []
        for col in columns.values():
            v = col[row]
            if isinstance(v, list):
                cells.append("n/a" if v[0] is None else f"[{v[0]:.2f}, {v[1]:.2f}]")
            elif isinstance(v, float):
                cells.append(f"{v:.4f}")
            else:
                cells.append(str(v))
        print(f"{row:32}" + "".join(f"{c:>22}" for c in cells))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(columns, fh, indent=2)


if __name__ == "__main__":
    main()
