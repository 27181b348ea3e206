"""
Constitutive-law learning experiment
Train each model variant over a grid of training-set sizes and seeds
"""

import time
import numpy as np
import pandas as pd
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple
from config.env_loader import resolve_workers
from config.settings import EXPERIMENT_CONFIG, PARALLEL_CONFIG
from equilearn.constitutive import sample_dataset, dump_dataset_jsonl
from equilearn.mlp import MLPParams
from equilearn.model import StressModel, init_model, loss_and_gradients, model_forward, mse
from equilearn.optim import adam_init, adam_step, cosine_lr
from utils.errors import TrainingDiverged
from utils.logger import ProgressLogger, banner, get_logger, CHECK
from utils.validators import TensorValidator

logger = get_logger(__name__)

RUN_COLUMNS = ['variant', 'train_size', 'seed', 'test_mse', 'val_mse', 'wall_seconds']
AGGREGATE_COLUMNS = ['variant', 'train_size', 'mse_mean', 'mse_std']


@dataclass
class TrainConfig:
    train_sizes: List[int] = field(default_factory=lambda: list(EXPERIMENT_CONFIG['train_sizes']))
    val_size: int = EXPERIMENT_CONFIG['val_size']
    test_size: int = EXPERIMENT_CONFIG['test_size']
    runs: int = EXPERIMENT_CONFIG['runs']
    seed: int = EXPERIMENT_CONFIG['seed']
    variant: str = EXPERIMENT_CONFIG['variant']
    law: str = EXPERIMENT_CONFIG['law']
    mu: float = EXPERIMENT_CONFIG['mu']
    lam: float = EXPERIMENT_CONFIG['lam']
    amplitude: float = EXPERIMENT_CONFIG['amplitude']
    det_floor: float = EXPERIMENT_CONFIG['det_floor']
    hidden: List[int] = field(default_factory=lambda: list(EXPERIMENT_CONFIG['hidden']))
    activation: str = EXPERIMENT_CONFIG['activation']
    lr: float = EXPERIMENT_CONFIG['lr']
    weight_decay: float = EXPERIMENT_CONFIG['weight_decay']
    betas: Tuple[float, float] = EXPERIMENT_CONFIG['betas']
    eps: float = EXPERIMENT_CONFIG['eps']
    epochs_small: int = EXPERIMENT_CONFIG['epochs_small']
    epochs_large: int = EXPERIMENT_CONFIG['epochs_large']
    small_threshold: int = EXPERIMENT_CONFIG['small_threshold']
    batch_size: Optional[int] = EXPERIMENT_CONFIG['batch_size']
    eval_every: int = EXPERIMENT_CONFIG['eval_every']
    workers: Optional[int] = None

    def steps_for(self, train_size: int) -> int:
        return self.epochs_small if train_size <= self.small_threshold else self.epochs_large

    def with_overrides(self, **overrides) -> 'TrainConfig':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass
class Metrics:
    runs: pd.DataFrame
    aggregate: pd.DataFrame

    def to_csv(self, out_dir) -> Tuple[Path, Path]:
        """Write runs.csv and aggregate.csv; returns both paths"""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        runs_path = out_dir / 'runs.csv'
        aggregate_path = out_dir / 'aggregate.csv'
        self.runs.to_csv(runs_path, index=False, float_format='%.10e')
        self.aggregate.to_csv(aggregate_path, index=False, float_format='%.10e')
        return runs_path, aggregate_path


@dataclass
class RunResult:
    variant: str
    train_size: int
    seed: int
    test_mse: float
    val_mse: float
    wall_seconds: float
    losses: List[float]


def aggregate_runs(runs: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of test MSE per (variant, train_size)"""
    if runs.empty:
        return pd.DataFrame(columns=AGGREGATE_COLUMNS)
    grouped = runs.groupby(['variant', 'train_size'], sort=True)['test_mse']
    out = grouped.agg(mse_mean='mean', mse_std='std').reset_index()
    out['mse_std'] = out['mse_std'].fillna(0.0)
    return out[AGGREGATE_COLUMNS]


def _batches(n: int, batch_size: Optional[int], rng: np.random.Generator) -> List[np.ndarray]:
    if batch_size is None or batch_size >= n:
        return [np.arange(n)]
    order = rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def train_model(
    cfg: TrainConfig,
    train: Tuple[np.ndarray, np.ndarray],
    val: Tuple[np.ndarray, np.ndarray],
    rng: np.random.Generator,
    seed: int = 0
) -> Tuple[StressModel, float, List[float]]:
    """
    Adam with cosine annealing, keeping the best validation checkpoint (the initial model included)

    Args:
        cfg: Training configuration
        train: (F, P) training arrays
        val: (F, P) validation arrays
        rng: Generator for initialization and minibatch order
        seed: Reported in TrainingDiverged

    Returns:
        Tuple: (best model, best validation MSE, training loss per step)

    Raises:
        TrainingDiverged: the training loss became non-finite
    """
    F_train, P_train = train
    n = len(F_train)
    model = init_model(cfg.variant, cfg.hidden, rng, F_train, P_train, cfg.activation)
    state = adam_init(
        model.params.arrays(), lr=cfg.lr, betas=tuple(cfg.betas), eps=cfg.eps,
        weight_decay=cfg.weight_decay,
    )
    total = cfg.steps_for(n)
    best_val = mse(model_forward(model, val[0]), val[1])
    best_params: MLPParams = model.params.copy()
    losses: List[float] = []

    step = 0
    while step < total:
        for idx in _batches(n, cfg.batch_size, rng):
            if step >= total:
                break
            loss, grads = loss_and_gradients(model, F_train[idx], P_train[idx])
            if not np.isfinite(loss):
                raise TrainingDiverged(seed, n, step)
            losses.append(loss)
            state = adam_step(state, grads, cosine_lr(step, total, cfg.lr))
            model.params = MLPParams.from_arrays(state.params, model.params.activation)
            step += 1

            if step % cfg.eval_every == 0 or step == total:
                val_mse = mse(model_forward(model, val[0]), val[1])
                if val_mse < best_val:
                    best_val = val_mse
                    best_params = model.params.copy()

    model.params = best_params
    return model, float(best_val), losses


def run_single(cfg: TrainConfig, train_size: int, run: int) -> RunResult:
    """One (train size, run) cell of the grid with its own generator"""
    started = time.perf_counter()
    seed = cfg.seed + run
    rng = np.random.default_rng((cfg.seed, run, train_size))
    law = dict(amplitude=cfg.amplitude, law=cfg.law, mu=cfg.mu, lam=cfg.lam, det_floor=cfg.det_floor)
    train = sample_dataset(rng, train_size, **law)
    val = sample_dataset(rng, cfg.val_size, **law)
    test = sample_dataset(rng, cfg.test_size, **law)

    model, val_mse, losses = train_model(cfg, train, val, rng, seed)
    test_mse = mse(model_forward(model, test[0]), test[1])
    elapsed = time.perf_counter() - started
    logger.info(f"{cfg.variant} N={train_size} run={run}: test MSE {test_mse:.3e} ({elapsed:.1f}s)")
    return RunResult(cfg.variant, train_size, seed, test_mse, val_mse, elapsed, losses)


def run_experiment(cfg: TrainConfig) -> Metrics:
    """
    Train the configured variant for every train size and run

    Returns:
        Metrics: Per-run table and aggregate table; all columns except
            wall_seconds are identical for identical configurations

    Raises:
        ValueError: invalid configuration
        TrainingDiverged: a run produced a non-finite loss
    """
    ok, message = TensorValidator.validate_train_config(cfg)
    if not ok:
        raise ValueError(message)

    jobs = [(n, run) for n in cfg.train_sizes for run in range(cfg.runs)]
    progress = ProgressLogger(len(jobs), f"Training {cfg.variant}", logger)
    results: Dict[Tuple[int, int], RunResult] = {}

    if len(jobs) < PARALLEL_CONFIG['sequential_below']:
        for job in jobs:
            results[job] = run_single(cfg, *job)
            progress.update()
    else:
        with ThreadPoolExecutor(max_workers=resolve_workers(len(jobs), cfg.workers)) as executor:
            futures = {job: executor.submit(run_single, cfg, *job) for job in jobs}
            for job in jobs:
                results[job] = futures[job].result()
                progress.update()
    progress.complete()

    runs = pd.DataFrame(
        [{c: getattr(results[job], c) for c in RUN_COLUMNS} for job in jobs],
        columns=RUN_COLUMNS,
    )
    return Metrics(runs, aggregate_runs(runs))


class ConstitutiveExperiment:
    """
    Step-by-step driver for the constitutive-law study

    Each step logs a banner; run() chains them and returns the Metrics.
    """

    def __init__(self, cfg: TrainConfig, out_dir=None):
        self.cfg = cfg
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.metrics: Optional[Metrics] = None

    def step1_validate(self) -> bool:
        banner(logger, "STEP 1: Validating experiment configuration")
        ok, message = TensorValidator.validate_train_config(self.cfg)
        if not ok:
            logger.error(message)
            return False
        logger.info(f"{CHECK} {self.cfg.variant} on {self.cfg.law}, sizes {self.cfg.train_sizes}, "
                    f"{self.cfg.runs} runs, seed {self.cfg.seed}")
        return True

    def step2_dump_sample(self, n: int = 100) -> Optional[Path]:
        """Write a small dataset drawn like the training data"""
        if self.out_dir is None:
            return None
        banner(logger, "STEP 2: Writing sample dataset")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng((self.cfg.seed, n))
        F, P = sample_dataset(rng, n, self.cfg.amplitude, self.cfg.law, self.cfg.mu, self.cfg.lam, self.cfg.det_floor)
        return dump_dataset_jsonl(self.out_dir / 'sample.jsonl', F, P)

    def step3_train(self) -> Metrics:
        banner(logger, "STEP 3: Training over the size grid")
        self.metrics = run_experiment(self.cfg)
        return self.metrics

    def step4_report(self) -> None:
        banner(logger, "STEP 4: Summary")
        for row in self.metrics.aggregate.itertuples(index=False):
            logger.info(f"{row.variant:>6} N={row.train_size:<6} MSE {row.mse_mean:.3e} ± {row.mse_std:.1e}")
        if self.out_dir is not None:
            runs_path, aggregate_path = self.metrics.to_csv(self.out_dir)
            logger.info(f"{CHECK} Wrote {runs_path} and {aggregate_path}")

    def run(self) -> Metrics:
        if not self.step1_validate():
            raise ValueError("invalid experiment configuration")
        self.step2_dump_sample()
        self.step3_train()
        self.step4_report()
        return self.metrics
