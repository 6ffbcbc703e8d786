"""U0 versus optimal gain over random real and complex Gram matrices.

--dim sets the dimension of the random internal states; the fraction of
negative U0 gains grows with it.
"""
import argparse
import json
from pathlib import Path

from photodistill.baselines import compare_u0, write_comparison_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--samples", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=2025)
    ap.add_argument("--dim", type=int, default=3)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind in ("real", "complex"):
        records, summary = compare_u0(args.samples, kind, args.seed, dim=args.dim)
        stem = f"compare_u0_{kind}_d{args.dim}"
        with open(out / f"{stem}.csv", "w", newline="") as fh:
            write_comparison_csv(records, fh)
        (out / f"{stem}.json").write_text(json.dumps(summary, indent=2) + "\n")
        lo, hi = summary["fraction_u0_negative_ci95"]
        print(f"{kind}: U0 negative in {summary['fraction_u0_negative']:.3f} [{lo:.3f}, {hi:.3f}], "
              f"optimal better in {summary['fraction_opt_better']:.3f}")


if __name__ == "__main__":
    main()
