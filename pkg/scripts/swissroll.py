"""Swiss-roll embedding comparison: mst_le vs euclidean_le vs none.

Writes per-seed coordinate files and prints the median trustworthiness table.

    python scripts/swissroll.py --n-points 1500 --out-dir runs/swissroll
"""
import argparse
import json

from mstae.experiments import run_swissroll_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-points", type=int, default=1500)
    ap.add_argument("--seeds", default="0,1,2,3,4")
    ap.add_argument("--trust-k", type=int, default=10)
    ap.add_argument("--out-dir", default=None)
    args = ap.parse_args()
    seeds = tuple(int(s) for s in args.seeds.split(","))
    rep = run_swissroll_demo(args.n_points, seeds=seeds, out_dir=args.out_dir, trust_k=args.trust_k)
    for mode, t in rep.summary["median_trustworthiness"].items():
        print(f"{mode:14s} {t:.4f}")
    print(json.dumps({"mst_le_minus_none": rep.summary["mst_le_minus_none"]}))


if __name__ == "__main__":
    main()
