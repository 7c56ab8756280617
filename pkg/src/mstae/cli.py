"""Command line: ``mstae {detect,sweep,estimate-dim,swissroll,cluster}``.

Every flag can also come from ``--config FILE.json`` whose keys are the flag
destinations (``lr``, ``reg``, ``seeds``, ...); explicit flags win. Failures
print one line ``error: <Kind>: <message>`` to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data_io import DataError, SyntheticSpec, load_dataset, make_synthetic, standardize
from .experiments import (SWEEP_AXES, MemoryGuardError, RunConfig, run_cluster, run_detect, run_sweep,
                          run_swissroll_demo)
from .intrinsic_dim import estimate_dimension
from .regularizer import RegularizerConfig
from .trainer import TrainConfig, TrainingError

REG_NAMES = {
    "mst-mds": "mst_mds",
    "mst-le": "mst_le",
    "gae": "gae",
    "euc-mds": "euclidean_mds",
    "euc-le": "euclidean_le",
    "none": "none",
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"usage: {message}")


def _seeds(text):
    text = str(text)
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}") from None


def _add_data_flags(p):
    g = p.add_argument_group("input")
    g.add_argument("--data", help="delimited text file with a header row")
    g.add_argument("--label-col", help="label column name or index (default: last column)")
    g.add_argument("--synthetic", choices=["swiss_roll", "hypercube"], help="use a generated data set instead")
    g.add_argument("--n-points", type=int, default=1000)
    g.add_argument("--ambient-dim", type=int, default=3)
    g.add_argument("--intrinsic-dim", type=int, default=2)
    g.add_argument("--synth-noise", type=float, default=0.0)
    g.add_argument("--synth-seed", type=int, default=0)


def _add_train_flags(p):
    g = p.add_argument_group("training")
    g.add_argument("--reg", choices=list(REG_NAMES), default="mst-le")
    g.add_argument("--lambda", dest="lam", type=float, default=1.0, help="GAE regularizer weight")
    g.add_argument("--reg-weight", type=float, default=1.0, help="coefficient of non-GAE regularizers")
    g.add_argument("--gae-k", type=int, default=5, help="k of the GAE k-NN graph")
    g.add_argument("--bandwidth", type=float, default=None, help="GAE heat-kernel bandwidth")
    g.add_argument("--zero-clamp", type=float, default=1e-6)
    g.add_argument("--epochs", type=int, default=500)
    g.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    g.add_argument("--dropout", type=float, default=0.5)
    g.add_argument("--denoise", choices=["none", "gaussian", "neighbor"], default="none")
    g.add_argument("--noise-std", type=float, default=0.3)
    g.add_argument("--denoise-k", type=int, default=5)
    g.add_argument("--n-hidden", type=int, default=4)
    g.add_argument("--latent-dim", type=int, default=None, help="bottleneck width (default: two-NN estimate)")
    g.add_argument("--seeds", type=_seeds, default=(0, 1, 2, 3, 4))


def _add_run_flags(p):
    g = p.add_argument_group("scoring and output")
    g.add_argument("--method", choices=["recon", "lomst", "cof"], default="recon")
    g.add_argument("--knn-k", type=int, default=15, help="neighborhood size for LoMST/COF")
    g.add_argument("--flag-n", type=int, default=None, help="number flagged (default: true anomaly count)")
    g.add_argument("--score-on-corrupted", action="store_true")
    g.add_argument("--out", help="report path (JSON lines)")
    g.add_argument("--max-rows", type=int, default=20_000)
    g.add_argument("--emit-matrices", help="directory for M, W, L as .npy")
    g.add_argument("--save-params", help="directory for per-seed parameter checkpoints")
    g.add_argument("--jobs", type=int, default=1)


def build_parser():
    parser = _Parser(prog="mstae", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="train and flag anomalies")
    _add_data_flags(p)
    _add_train_flags(p)
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="repeat detect over one hyperparameter axis")
    _add_data_flags(p)
    _add_train_flags(p)
    _add_run_flags(p)
    p.add_argument("--axis", choices=list(SWEEP_AXES), required=True)
    p.add_argument("--values", help="comma-separated values (default: the standard grid)")

    p = sub.add_parser("estimate-dim", help="two-NN intrinsic dimension of standardized data")
    _add_data_flags(p)

    p = sub.add_parser("swissroll", help="structure preservation on a swiss roll")
    _add_train_flags(p)
    p.add_argument("--n-points", type=int, default=1500)
    p.add_argument("--trust-k", type=int, default=10)
    p.add_argument("--coords-dir", help="directory for latent coordinate files")
    p.add_argument("--out", help="report path (JSON lines)")

    p = sub.add_parser("cluster", help="k-means on latent codes, NMI/ACC against class labels")
    _add_data_flags(p)
    _add_train_flags(p)
    _add_run_flags(p)
    p.add_argument("--n-clusters", type=int, default=None)
    p.add_argument("--restarts", type=int, default=10)
    for p in sub.choices.values():
        p.add_argument("--config", help="JSON file of flag defaults")
    return parser


def parse_args(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        path = Path(known.config)
        if not path.is_file():
            raise CliError(f"no such config file: {path}")
        defaults = json.loads(path.read_text())
        if "seeds" in defaults:
            defaults["seeds"] = _seeds(",".join(str(s) for s in defaults["seeds"])
                                       if isinstance(defaults["seeds"], list) else defaults["seeds"])
        for action in parser._subparsers._group_actions:
            for subparser in action.choices.values():
                subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def train_config(a) -> TrainConfig:
    reg = RegularizerConfig(mode=REG_NAMES[a.reg], lam=a.lam, weight=a.reg_weight, knn_k=a.gae_k,
                            bandwidth=a.bandwidth, zero_clamp=a.zero_clamp)
    return TrainConfig(epochs=a.epochs, learning_rate=a.lr, dropout_rate=a.dropout, regularizer=reg,
                       denoise=a.denoise, noise_std=a.noise_std, denoise_k=a.denoise_k, n_hidden=a.n_hidden,
                       latent_dim=a.latent_dim, seed=a.seeds[0] if a.seeds else 0)


def synthetic_spec(a):
    if not a.synthetic:
        return None
    if a.synthetic == "swiss_roll":
        return SyntheticSpec("swiss_roll", a.n_points, 3, 2, a.synth_noise, a.synth_seed)
    return SyntheticSpec("hypercube", a.n_points, a.ambient_dim, a.intrinsic_dim, a.synth_noise, a.synth_seed)


def run_config(a) -> RunConfig:
    return RunConfig(data=a.data, label_col=a.label_col, synthetic=synthetic_spec(a), train=train_config(a),
                     method=a.method, score_k=a.knn_k, flag_n=a.flag_n, seeds=a.seeds, out=a.out,
                     max_rows=a.max_rows, score_on_corrupted=a.score_on_corrupted,
                     emit_matrices=a.emit_matrices, save_params=a.save_params, jobs=a.jobs)


def _print(obj):
    print(json.dumps(obj, sort_keys=True))


def main(argv=None) -> int:
    try:
        a = parse_args(argv)
        if a.command == "detect":
            _print(run_detect(run_config(a)).summary)
        elif a.command == "sweep":
            values = None
            if a.values:
                values = [float(v) if a.axis != "n_hidden" else int(v) for v in a.values.split(",")]
            for row in run_sweep(run_config(a), a.axis, values).select("sweep_row"):
                _print(row)
        elif a.command == "estimate-dim":
            if a.data:
                raw, _ = load_dataset(a.data, a.label_col)
            elif a.synthetic:
                raw, _ = make_synthetic(synthetic_spec(a))
            else:
                raise CliError("give --data or --synthetic")
            stats = estimate_dimension(standardize(raw))
            _print({"slope": stats.slope, "p_hat": stats.p_hat, "m_used": int(stats.mu.size)})
        elif a.command == "swissroll":
            rep = run_swissroll_demo(a.n_points, a.seeds, a.coords_dir, train_config(a), a.trust_k)
            if a.out:
                rep.write(a.out)
            _print(rep.summary)
        elif a.command == "cluster":
            if not a.data:
                raise CliError("cluster needs --data with a class column")
            _print(run_cluster(run_config(a), a.n_clusters, a.restarts).summary)
        return 0
    except (CliError, DataError, MemoryGuardError, TrainingError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2 if isinstance(exc, CliError) else 1


if __name__ == "__main__":
    sys.exit(main())
