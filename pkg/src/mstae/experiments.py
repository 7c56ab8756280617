"""End-to-end runs behind the command line: detection, sweeps, swiss roll, clustering.

Reports are JSON lines. Every line is one object carrying a ``record`` key
naming its kind (``meta``, ``config``, ``data``, ``train``, ``scores``,
``metrics``, ``timing``, ``summary``, ``sweep_row``, ``trust``,
``clustering``, ``artifact``). Floats are written with ``repr`` precision so
two reports from the same inputs compare byte-for-byte outside ``timing``.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, graph, nn_core
from .data_io import SyntheticSpec, load_classes, load_dataset, make_synthetic, standardize
from .evaluation import clustering_metrics, detection_metrics, kmeans, trustworthiness
from .intrinsic_dim import estimate_dimension
from .regularizer import RegularizerConfig, build_target
from .scoring import flag_top_n, score
from .trainer import TrainConfig, corrupt, train

DENSE_MODES = ("mst_mds", "mst_le", "gae", "euclidean_mds", "euclidean_le")


class MemoryGuardError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    data: Optional[str] = None
    label_col: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    method: str = "recon"
    score_k: int = 15
    flag_n: Optional[int] = None  # None: ground-truth anomaly count
    seeds: tuple = (0, 1, 2, 3, 4)
    out: Optional[str] = None
    max_rows: int = 20_000
    score_on_corrupted: bool = False
    emit_matrices: Optional[str] = None
    save_params: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if (self.data is None) == (self.synthetic is None):
            raise ValueError("give exactly one of a data file or a synthetic spec")
        if self.data is not None and not Path(self.data).is_file():
            raise FileNotFoundError(f"no such data file: {self.data}")
        if self.method not in ("recon", "lomst", "cof"):
            raise ValueError(f"unknown scoring method {self.method!r}")


@dataclass
class RunReport:
    records: list = field(default_factory=list)

    def add(self, record, /, **fields):
        self.records.append({"record": record, **fields})

    def select(self, kind):
        return [r for r in self.records if r["record"] == kind]

    def lines(self):
        return [json.dumps(r, sort_keys=True, default=_jsonable) for r in self.records]

    def write(self, path):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text("\n".join(self.lines()) + "\n")

    @property
    def summary(self):
        s = self.select("summary")
        return s[-1] if s else None


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def config_echo(cfg) -> dict:
    return json.loads(json.dumps(dataclasses.asdict(cfg), default=_jsonable))


def load_input(cfg: RunConfig):
    if cfg.data is not None:
        return load_dataset(cfg.data, cfg.label_col)
    return make_synthetic(cfg.synthetic)


def check_memory(m: int, mode: str, max_rows: int):
    if mode in DENSE_MODES and m > max_rows:
        raise MemoryGuardError(
            f"m={m} rows exceeds the dense-matrix cap max_rows={max_rows} for regularizer {mode}; "
            f"an m x m float64 matrix needs {m * m * 8 / 1e9:.1f} GB"
        )


def epochs_to_fraction(curve, frac=0.9) -> int:
    """First epoch at which ``frac`` of the total loss decrease has been achieved."""
    curve = np.asarray(curve, dtype=float)
    drop = curve[0] - curve[-1]
    if drop <= 0:
        return 0
    reached = np.flatnonzero(curve[0] - curve >= frac * drop)
    return int(reached[0])


def _one_seed(x, labels, cfg: RunConfig, p: int, target, seed: int):
    tcfg = replace(cfg.train, seed=seed, latent_dim=p)
    t0 = time.perf_counter()
    rec = train(x, tcfg, reg_target=target)
    t1 = time.perf_counter()
    if cfg.method == "recon":
        x_in = x
        if cfg.score_on_corrupted and tcfg.denoise != "none":
            knn = graph.knn_index(x, tcfg.denoise_k) if tcfg.denoise == "neighbor" else None
            x_in = corrupt(x, tcfg.denoise, tcfg.noise_std, knn, seed)
        sv = score("recon", x, nn_core.reconstruct(rec.params, x_in))
    else:
        sv = score(cfg.method, rec.latent, k=cfg.score_k)
    t2 = time.perf_counter()
    return rec, sv, t1 - t0, t2 - t1


def run_detect(cfg: RunConfig, report: Optional[RunReport] = None) -> RunReport:
    """Load, standardize, size the bottleneck, build the target once, then train and score per seed."""
    report = report if report is not None else RunReport()
    report.add("meta", command="detect", version=__version__)
    report.add("config", **config_echo(cfg))

    raw, labels = load_input(cfg)
    check_memory(raw.m, cfg.train.regularizer.mode, cfg.max_rows)
    x = standardize(raw).values
    if cfg.train.latent_dim is not None:
        p, source, slope = min(cfg.train.latent_dim, raw.d), "flag", None
    else:
        stats = estimate_dimension(x)
        p, source, slope = min(stats.p_hat, raw.d), "two_nn", stats.slope
    n_flag = cfg.flag_n if cfg.flag_n is not None else labels.anomaly_count
    if n_flag < 1:
        raise ValueError("no ground-truth anomalies; pass --flag-n")
    report.add("data", m=raw.m, d=raw.d, anomalies=labels.anomaly_count, latent_dim=p,
               latent_dim_source=source, two_nn_slope=slope, flag_n=n_flag)

    t0 = time.perf_counter()
    target = build_target(x, cfg.train.regularizer)
    report.add("timing", stage="regularizer_target", seconds=time.perf_counter() - t0)
    if cfg.emit_matrices:
        _emit_matrices(report, x, cfg)

    seeds = list(cfg.seeds)
    if cfg.jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_one_seed, *zip(*[(x, labels, cfg, p, target, s) for s in seeds])))
    else:
        results = [_one_seed(x, labels, cfg, p, target, s) for s in seeds]

    f1s = []
    for seed, (rec, sv, t_train, t_score) in zip(seeds, results):
        flags = flag_top_n(sv, n_flag)
        report.add("train", seed=seed, recon_loss=rec.recon_loss, embed_loss=rec.embed_loss,
                   total_loss=rec.total_loss, epochs_to_90=epochs_to_fraction(rec.recon_loss))
        report.add("scores", seed=seed, method=sv.method,
                   triples=[[i, float(s), bool(f)] for i, (s, f) in enumerate(zip(sv.scores, flags.labels))])
        if labels.anomaly_count:
            met = detection_metrics(flags, labels)
            f1s.append(met.f1)
            report.add("metrics", seed=seed, **dataclasses.asdict(met))
        report.add("timing", stage="seed", seed=seed, train_seconds=t_train, score_seconds=t_score)
        if cfg.save_params:
            Path(cfg.save_params).mkdir(parents=True, exist_ok=True)
            path = Path(cfg.save_params) / f"params_seed{seed}.npz"
            nn_core.save_params(path, rec.params)
            report.add("artifact", kind="params", seed=seed, path=str(path))

    report.add("summary", seeds=seeds, f1_per_seed=f1s,
               median_f1=float(np.median(f1s)) if f1s else None,
               final_recon_median=float(np.median([r[0].recon_loss[-1] for r in results])),
               epochs_to_90_median=float(np.median([epochs_to_fraction(r[0].recon_loss) for r in results])))
    if cfg.out:
        report.write(cfg.out)
    return report


def _emit_matrices(report, x, cfg: RunConfig):
    out = Path(cfg.emit_matrices)
    out.mkdir(parents=True, exist_ok=True)
    m_dist = graph.mst_distance_matrix(x)
    sim = graph.mst_similarity(m_dist, cfg.train.regularizer.zero_clamp)
    for name, arr in (("M", m_dist), ("W", sim.w), ("L", sim.laplacian)):
        np.save(out / f"{name}.npy", arr)
        report.add("artifact", kind=f"matrix_{name}", path=str(out / f"{name}.npy"))


SWEEP_AXES = {
    "n_hidden": (2, 4, 6, 8, 10, 12),
    "dropout": (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "noise_std": (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),
}


def run_sweep(cfg: RunConfig, axis: str, values=None) -> RunReport:
    """Repeat :func:`run_detect` for each value on one hyperparameter axis."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {tuple(SWEEP_AXES)}")
    values = tuple(values) if values is not None else SWEEP_AXES[axis]
    report = RunReport()
    report.add("meta", command="sweep", version=__version__, axis=axis, values=list(values))
    for v in values:
        if axis == "n_hidden":
            tcfg = replace(cfg.train, n_hidden=int(v))
        elif axis == "dropout":
            tcfg = replace(cfg.train, dropout_rate=float(v))
        else:
            denoise = cfg.train.denoise if cfg.train.denoise == "gaussian" else "gaussian"
            tcfg = replace(cfg.train, noise_std=float(v), denoise=denoise)
        sub = run_detect(replace(cfg, train=tcfg, out=None))
        s = sub.summary
        report.add("sweep_row", axis=axis, value=v, median_f1=s["median_f1"], f1_per_seed=s["f1_per_seed"],
                   final_recon_median=s["final_recon_median"], epochs_to_90_median=s["epochs_to_90_median"])
    if cfg.out:
        report.write(cfg.out)
    return report


SWISSROLL_MODES = ("mst_le", "euclidean_le", "none")


def run_swissroll_demo(n_points=1500, seeds=(0, 1, 2, 3, 4), out_dir=None, train_cfg: Optional[TrainConfig] = None,
                       trust_k: int = 10) -> RunReport:
    """Train each mode to a 2-d latent space and report trustworthiness per seed.

    When ``out_dir`` is given, one tab-separated coordinate file per (seed,
    mode) is written with columns ``z1 z2 roll_t`` (``roll_t`` is the roll
    parameter, for coloring).
    """
    base = train_cfg or TrainConfig()
    report = RunReport()
    report.add("meta", command="swissroll", version=__version__)
    report.add("config", n_points=n_points, seeds=list(seeds), trust_k=trust_k, train=config_echo(base))
    trust = {mode: [] for mode in SWISSROLL_MODES}
    for seed in seeds:
        raw, _ = make_synthetic(SyntheticSpec("swiss_roll", n_points, seed=seed))
        x = standardize(raw).values
        roll_t = np.hypot(raw.values[:, 0], raw.values[:, 2])
        for mode in SWISSROLL_MODES:
            tcfg = replace(base, latent_dim=2, seed=seed, regularizer=replace(base.regularizer, mode=mode))
            rec = train(x, tcfg)
            t = trustworthiness(x, rec.latent, trust_k)
            trust[mode].append(t)
            report.add("trust", seed=seed, mode=mode, trustworthiness=t)
            if out_dir is not None:
                out = Path(out_dir)
                out.mkdir(parents=True, exist_ok=True)
                path = out / f"swissroll_seed{seed}_{mode}.tsv"
                np.savetxt(path, np.column_stack([rec.latent, roll_t]), delimiter="\t",
                           header="z1\tz2\troll_t", comments="", fmt="%.17g")
                report.add("artifact", kind="coordinates", seed=seed, mode=mode, path=str(path))
    med = {mode: float(np.median(v)) for mode, v in trust.items()}
    report.add("summary", median_trustworthiness=med, mst_le_minus_none=med["mst_le"] - med["none"])
    return report


def run_cluster(cfg: RunConfig, n_clusters: Optional[int] = None, n_restarts: int = 10) -> RunReport:
    """Train per seed, k-means the latent codes, and score against class labels."""
    report = RunReport()
    report.add("meta", command="cluster", version=__version__)
    report.add("config", **config_echo(cfg))
    raw, classes = load_classes(cfg.data, cfg.label_col)
    check_memory(raw.m, cfg.train.regularizer.mode, cfg.max_rows)
    x = standardize(raw).values
    k = n_clusters or int(np.unique(classes).size)
    p = min(cfg.train.latent_dim or estimate_dimension(x).p_hat, raw.d)
    report.add("data", m=raw.m, d=raw.d, n_classes=int(np.unique(classes).size), n_clusters=k, latent_dim=p)
    target = build_target(x, cfg.train.regularizer)
    nmis, accs = [], []
    for seed in cfg.seeds:
        rec = train(x, replace(cfg.train, seed=seed, latent_dim=p), reg_target=target)
        assign = kmeans(rec.latent, k, seed=seed, n_restarts=n_restarts)
        met = clustering_metrics(assign, classes)
        nmis.append(met.nmi)
        accs.append(met.acc)
        report.add("clustering", seed=seed, nmi=met.nmi, acc=met.acc, assignment=assign)
    report.add("summary", nmi_mean=float(np.mean(nmis)), nmi_std=float(np.std(nmis)),
               acc_mean=float(np.mean(accs)), acc_std=float(np.std(accs)),
               median_nmi=float(np.median(nmis)), median_acc=float(np.median(accs)))
    if cfg.out:
        report.write(cfg.out)
    return report
