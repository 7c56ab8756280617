"""Learning-rate grid used to pick the TrainConfig default.

Two tables: the rank-1 reconstruction check (final/initial loss, lower is
better, must stay < 0.1) and the swiss-roll trustworthiness margin
mst_le - none. The default was chosen from the first table only.

    python scripts/lr_grid.py --epochs 500
"""
import argparse

import numpy as np

from mstae.data_io import SyntheticSpec, make_synthetic, standardize
from mstae.evaluation import trustworthiness
from mstae.regularizer import RegularizerConfig
from mstae.trainer import TrainConfig, train


def rank_one_ratios(lr, epochs):
    out = []
    for fixture in (1, 2):
        rng = np.random.default_rng(fixture)
        t = rng.uniform(-1, 1, size=(60, 1))
        x = t @ rng.normal(size=(1, 4))
        x = (x - x.mean(0)) / x.std(0)
        for seed in range(5):
            rec = train(x, TrainConfig(epochs=epochs, learning_rate=lr, dropout_rate=0.0, latent_dim=1, seed=seed,
                                       regularizer=RegularizerConfig("none")))
            out.append(rec.recon_loss[-1] / rec.recon_loss[0])
    return np.array(out)


def swissroll_margin(lr, epochs, n=1500, seeds=range(5)):
    med = {}
    for mode in ("mst_le", "none"):
        ts = []
        for s in seeds:
            x, _ = make_synthetic(SyntheticSpec("swiss_roll", n, seed=s))
            xs = standardize(x).values
            rec = train(xs, TrainConfig(epochs=epochs, learning_rate=lr, latent_dim=2, seed=s,
                                        regularizer=RegularizerConfig(mode)))
            ts.append(trustworthiness(xs, rec.latent, 10))
        med[mode] = float(np.median(ts))
    return med["mst_le"] - med["none"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epochs", type=int, default=500)
    ap.add_argument("--lrs", default="0.05,0.1,0.25,0.5")
    ap.add_argument("--skip-swissroll", action="store_true")
    args = ap.parse_args()
    for lr in (float(v) for v in args.lrs.split(",")):
        r = rank_one_ratios(lr, args.epochs)
        line = f"lr={lr:<5} rank1 ratio min={r.min():.3f} max={r.max():.3f}"
        if not args.skip_swissroll:
            line += f"  swissroll margin={swissroll_margin(lr, args.epochs):+.3f}"
        print(line, flush=True)


if __name__ == "__main__":
    main()
