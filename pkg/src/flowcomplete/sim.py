"""Monte-Carlo harness: seeded noise trials over a fixed observation pattern.

One experiment fixes the pattern and the latent truth, redraws the noise
per trial, runs the configured estimator, and accumulates per-entry squared
errors.  The per-entry mean squared error is compared against the effective
resistance (or the control+treatment sum for panels): their ratio should
concentrate at the noise variance.  A seed fully determines the experiment;
trials draw from spawned substreams so results are reproducible.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import patterns
from .additive import EfeSolver
from .errors import DegenerateDenominatorError
from .graph import ObservationMask, build_graph
from .maxflow import max_disjoint_paths
from .panel import PanelData, split_masks
from .rank1 import rank1_entry

PATTERNS = ("staircase", "staggered_exposure", "uniform_bernoulli",
            "extreme_sparsity", "dense_submatrix")
MODELS = ("additive", "rank1", "panel")
_PANEL_PATTERNS = ("staircase", "staggered_exposure")


@dataclass(frozen=True)
class SimConfig:
    """Experiment description; the seed pins all randomness."""

    pattern: str
    model: str
    n_rows: int
    n_cols: int
    noise_sigma: float
    trials: int
    seed: int
    groups: int | None = None
    bernoulli_p: float | None = None
    block_rows: int | None = None
    block_cols: int | None = None
    base_density: float = 1.0
    thinning: float = 0.5
    target_row: int | None = None
    target_col: int | None = None
    histogram_bins: int = 40

    def __post_init__(self) -> None:
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if (self.model == "panel") != (self.pattern in _PANEL_PATTERNS):
            raise ValueError(
                "panel model pairs exactly with the staircase and "
                "staggered_exposure patterns")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("dimensions must be positive")
        if (self.target_row is None) != (self.target_col is None):
            raise ValueError("target_row and target_col go together")

    @property
    def target(self) -> tuple[int, int] | None:
        if self.target_row is None:
            return None
        return self.target_row, self.target_col


@dataclass(frozen=True)
class GeneratedPattern:
    """Pattern realization: observation mask, optional treatment, parameters."""

    omega: np.ndarray
    treatment: np.ndarray | None
    metadata: dict


@dataclass(frozen=True)
class SimResult:
    """Per-entry error summary of one experiment."""

    per_entry_mse: np.ndarray
    resistance_reference: np.ndarray
    ratio: np.ndarray
    identifiable: np.ndarray
    histogram_bin_edges: np.ndarray
    histogram_counts: np.ndarray
    config: SimConfig
    metadata: dict
    runtime_stats: dict = field(repr=False, default_factory=dict)


def _substreams(config: SimConfig):
    children = np.random.SeedSequence(config.seed).spawn(2 + config.trials)
    pattern_rng = np.random.default_rng(children[0])
    effects_rng = np.random.default_rng(children[1])
    trial_rngs = [np.random.default_rng(c) for c in children[2:]]
    return pattern_rng, effects_rng, trial_rngs


def generate_pattern(config: SimConfig) -> GeneratedPattern:
    """Realize the configured pattern (deterministic given the seed)."""
    pattern_rng, _, _ = _substreams(config)
    meta: dict = {"pattern": config.pattern}
    if config.pattern == "extreme_sparsity":
        if config.n_rows != config.n_cols:
            raise ValueError("extreme_sparsity is a square pattern")
        omega = patterns.extreme_sparsity_mask(config.n_rows).to_dense()
        treatment = None
    elif config.pattern == "dense_submatrix":
        block_rows = config.block_rows or max(1, config.n_rows - 1)
        block_cols = config.block_cols or max(1, config.n_cols - 1)
        omega = patterns.dense_submatrix_mask(
            config.n_rows, config.n_cols, block_rows, block_cols).to_dense()
        treatment = None
        meta.update(block_rows=block_rows, block_cols=block_cols)
    elif config.pattern == "uniform_bernoulli":
        if config.bernoulli_p is None:
            raise ValueError("uniform_bernoulli needs bernoulli_p")
        omega = patterns.uniform_bernoulli_mask(
            config.n_rows, config.n_cols, config.bernoulli_p,
            pattern_rng).to_dense()
        treatment = None
        meta.update(bernoulli_p=config.bernoulli_p)
    elif config.pattern == "staggered_exposure":
        if config.groups is None:
            raise ValueError("staggered_exposure needs groups")
        if config.n_rows != config.n_cols:
            raise ValueError("staggered_exposure is a square pattern")
        omega, treatment = patterns.staggered_exposure_pattern(
            config.n_rows, config.groups)
        omega = omega.astype(float)
        meta.update(groups=config.groups)
    else:  # staircase
        if config.groups is None:
            raise ValueError("staircase needs groups")
        omega, treatment = patterns.staircase_pattern(
            config.n_rows, config.n_cols, config.groups, pattern_rng,
            base_density=config.base_density, thinning=config.thinning)
        omega = omega.astype(float)
        meta.update(groups=config.groups, base_density=config.base_density,
                    thinning=config.thinning)
    if treatment is not None:
        meta["treated_cells"] = int(np.sum(treatment))
    meta["observed_cells"] = int(np.sum(omega != 0))
    return GeneratedPattern(omega=np.asarray(omega, dtype=float),
                            treatment=treatment, metadata=meta)


def run_experiment(config: SimConfig) -> SimResult:
    """Run the configured Monte-Carlo experiment."""
    started = time.perf_counter()
    _, effects_rng, trial_rngs = _substreams(config)
    realized = generate_pattern(config)
    if config.model == "panel":
        mse, reference, identifiable = _run_panel(config, realized,
                                                  effects_rng, trial_rngs)
    elif config.model == "additive":
        mse, reference, identifiable = _run_additive(config, realized,
                                                     effects_rng, trial_rngs)
    else:
        mse, reference, identifiable = _run_rank1(config, realized, trial_rngs)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(identifiable, mse / reference, np.nan)
    finite = ratio[np.isfinite(ratio)]
    if finite.size:
        counts, edges = np.histogram(finite, bins=config.histogram_bins)
    else:
        counts, edges = np.histogram([], bins=config.histogram_bins,
                                     range=(0.0, 1.0))
    elapsed = time.perf_counter() - started
    runtime = {"seconds": elapsed,
               "trials_per_second": config.trials / elapsed if elapsed else None}
    return SimResult(per_entry_mse=mse, resistance_reference=reference,
                     ratio=ratio, identifiable=identifiable,
                     histogram_bin_edges=edges, histogram_counts=counts,
                     config=config, metadata=realized.metadata,
                     runtime_stats=runtime)


def _run_additive(config, realized, effects_rng, trial_rngs):
    mask = ObservationMask.from_dense(realized.omega)
    solver = EfeSolver(mask)
    truth = (effects_rng.standard_normal(config.n_rows)[:, None]
             + effects_rng.standard_normal(config.n_cols)[None, :])
    identifiable = solver.identifiable
    accum = np.zeros_like(truth)
    for rng in trial_rngs:
        noise = rng.normal(0.0, config.noise_sigma, truth.shape)
        estimate = solver.estimates(truth + noise)
        err = np.where(identifiable, estimate - truth, 0.0)
        accum += err ** 2
    mse = np.where(identifiable, accum / config.trials, np.nan)
    return mse, solver.resistances, identifiable


def _run_panel(config, realized, effects_rng, trial_rngs):
    panel_shape = (config.n_rows, config.n_cols)
    unit_effects = effects_rng.standard_normal(config.n_rows)
    time_effects = effects_rng.standard_normal(config.n_cols)
    beta_rows = effects_rng.standard_normal(config.n_rows)
    beta_cols = effects_rng.standard_normal(config.n_cols)
    control_truth = unit_effects[:, None] + time_effects[None, :]
    beta_truth = beta_rows[:, None] + beta_cols[None, :]
    treated_truth = control_truth + beta_truth
    treatment = realized.treatment
    base_panel = PanelData(outcomes=np.zeros(panel_shape),
                           treatment=treatment,
                           observed=realized.omega.astype(np.int8))
    control_mask, treated_mask = split_masks(base_panel)
    control_solver = EfeSolver(control_mask)
    treated_solver = EfeSolver(treated_mask)
    reference = control_solver.resistances + treated_solver.resistances
    identifiable = np.isfinite(reference)
    accum = np.zeros(panel_shape)
    signal = np.where(treatment == 1, treated_truth, control_truth)
    for rng in trial_rngs:
        outcomes = signal + rng.normal(0.0, config.noise_sigma, panel_shape)
        beta_hat = (treated_solver.estimates(outcomes)
                    - control_solver.estimates(outcomes))
        err = np.where(identifiable, beta_hat - beta_truth, 0.0)
        accum += err ** 2
    mse = np.where(identifiable, accum / config.trials, np.nan)
    return mse, reference, identifiable


def _run_rank1(config, realized, trial_rngs):
    mask = ObservationMask.from_dense(realized.omega)
    graph = build_graph(mask)
    solver = EfeSolver(mask)
    truth = np.ones((config.n_rows, config.n_cols))  # unit factors
    if config.target is not None:
        entries = [config.target]
    else:
        entries = [(i, j) for i in range(config.n_rows)
                   for j in range(config.n_cols)]
    path_sets = {entry: max_disjoint_paths(graph, *entry) for entry in entries}
    accum = np.zeros_like(truth)
    counts = np.zeros_like(truth)
    for rng in trial_rngs:
        data = truth + rng.normal(0.0, config.noise_sigma, truth.shape)
        for (i, j), path_set in path_sets.items():
            if path_set.k == 0:
                continue
            try:
                estimate = rank1_entry(mask, data, i, j, path_set)
            except DegenerateDenominatorError:
                continue
            accum[i, j] += (estimate - truth[i, j]) ** 2
            counts[i, j] += 1
    identifiable = np.zeros(truth.shape, dtype=bool)
    for (i, j), path_set in path_sets.items():
        identifiable[i, j] = path_set.k > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        mse = np.where(counts > 0, accum / counts, np.nan)
    return mse, solver.resistances, identifiable


def export_result(result: SimResult, out_dir) -> list[Path]:
    """Write heatmap and histogram CSVs plus a metadata JSON.

    Heatmaps are full grids with ``inf`` on unidentifiable entries; the
    histogram rows are ``bin_left, bin_right, count``.  Output bytes depend
    only on the configuration (runtime statistics are not exported).
    """
    import json

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def grid(values):
        return np.where(result.identifiable, values, np.inf)

    for name, values in (("mse", grid(result.per_entry_mse)),
                         ("resistance", grid(result.resistance_reference)),
                         ("ratio", grid(result.ratio))):
        path = out / f"{name}.csv"
        np.savetxt(path, values, fmt="%.17g", delimiter=",")
        written.append(path)

    histogram_path = out / "histogram.csv"
    with open(histogram_path, "w") as handle:
        handle.write("bin_left,bin_right,count\n")
        edges = result.histogram_bin_edges
        for k, count in enumerate(result.histogram_counts):
            handle.write(f"{edges[k]:.17g},{edges[k + 1]:.17g},{int(count)}\n")
    written.append(histogram_path)

    metadata_path = out / "metadata.json"
    payload = {"config": asdict(result.config), "pattern": result.metadata}
    with open(metadata_path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    written.append(metadata_path)
    return written
