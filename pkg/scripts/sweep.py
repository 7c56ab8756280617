"""Hyperparameter sweep over every axis for one detection dataset.

    python scripts/sweep.py data/WBC.csv --out runs/wbc_sweep.jsonl
"""
import argparse
import json

from mstae.experiments import SWEEP_AXES, RunConfig, run_sweep
from mstae.regularizer import RegularizerConfig
from mstae.trainer import TrainConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data")
    ap.add_argument("--reg", default="mst_le")
    ap.add_argument("--seeds", default="0,1,2,3,4")
    ap.add_argument("--axes", default=",".join(SWEEP_AXES))
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    seeds = tuple(int(s) for s in args.seeds.split(","))
    lines = []
    for axis in args.axes.split(","):
        cfg = RunConfig(data=args.data, train=TrainConfig(regularizer=RegularizerConfig(args.reg)), seeds=seeds)
        rep = run_sweep(cfg, axis)
        for row in rep.select("sweep_row"):
            print(json.dumps(row))
        lines.extend(rep.lines())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
