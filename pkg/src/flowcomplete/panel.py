"""Heterogeneous two-way fixed-effects estimation from panel data.

Observed cells split by treatment status into a control pattern and a
treatment pattern; the closed-form flow estimator runs on each, and the
per-entry effect estimate is the difference of the two predictions.  The
classical difference-in-differences contrast is the special case of a
single length-3 donor path.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .additive import EfeSolver
from .electrical import effective_resistance
from .errors import TargetNotObservedError
from .graph import ObservationMask, build_graph
from .patterns import staggered_exposure_pattern
from .spectral import build_core


class NoLengthThreePath:
    """Marker value: no length-3 donor path exists for the requested entry."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "NoLengthThreePath"


NO_LENGTH_THREE_PATH = NoLengthThreePath()


@dataclass(frozen=True)
class PanelData:
    """Outcomes with binary treatment and observation indicators."""

    outcomes: np.ndarray
    treatment: np.ndarray
    observed: np.ndarray | None = None

    def __post_init__(self) -> None:
        outcomes = np.asarray(self.outcomes, dtype=float)
        treatment = np.asarray(self.treatment)
        observed = (np.ones_like(treatment, dtype=np.int8)
                    if self.observed is None
                    else np.asarray(self.observed))
        if treatment.shape != outcomes.shape or observed.shape != outcomes.shape:
            raise ValueError("outcomes, treatment and observed shapes differ")
        consulted = treatment[observed != 0]
        if consulted.size and not np.isin(consulted, (0, 1)).all():
            raise ValueError("treatment must be binary where observed")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "treatment", treatment.astype(np.int8))
        object.__setattr__(self, "observed", observed.astype(np.int8))

    @property
    def n_units(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_periods(self) -> int:
        return self.outcomes.shape[1]


@dataclass(frozen=True)
class CausalReport:
    """Per-entry effect estimates with identifiability and certificates."""

    beta_hat: np.ndarray
    control_estimates: np.ndarray
    treatment_estimates: np.ndarray
    resistance_sum: np.ndarray
    identifiable: np.ndarray
    high_prob_bounds: np.ndarray | None = None


@dataclass(frozen=True)
class StaggeredExposureCertificate:
    """Exact effective resistances against their closed-form bounds."""

    r1_exact: float
    r1_bound: float
    r0_exact: float
    r0_bound: float
    degenerate: bool


def split_masks(panel: PanelData) -> tuple[ObservationMask, ObservationMask]:
    """Disjoint control and treatment patterns partitioning the observed cells."""
    control = panel.observed * (1 - panel.treatment)
    treated = panel.observed * panel.treatment
    return ObservationMask.from_dense(control), ObservationMask.from_dense(treated)


def estimate_effects(panel: PanelData, sigma: float | None = None,
                     delta: float | None = None, bound_multiplier: float = 2.0,
                     threads: int | None = None) -> CausalReport:
    """Per-entry treatment effects from the control and treatment graphs.

    An entry is identifiable exactly when its row and column are connected
    in both graphs.  With ``sigma`` and ``delta`` supplied, the report
    carries ``bound_multiplier * sigma**2 * (R0 + R1) * log(N*T/delta)``;
    the default multiplier 2 covers the two single-graph bounds combined.
    """
    control_mask, treated_mask = split_masks(panel)
    if threads and threads >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            control_future = pool.submit(EfeSolver, control_mask)
            treated_future = pool.submit(EfeSolver, treated_mask)
            control_solver = control_future.result()
            treated_solver = treated_future.result()
    else:
        control_solver = EfeSolver(control_mask)
        treated_solver = EfeSolver(treated_mask)
    control_fit = control_solver.estimates(panel.outcomes)
    treated_fit = treated_solver.estimates(panel.outcomes)
    beta_hat = treated_fit - control_fit
    resistance_sum = control_solver.resistances + treated_solver.resistances
    identifiable = np.isfinite(resistance_sum)
    high_prob = None
    if sigma is not None and delta is not None:
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        cells = panel.n_units * panel.n_periods
        high_prob = (bound_multiplier * sigma ** 2 * resistance_sum
                     * math.log(cells / delta))
    return CausalReport(beta_hat=beta_hat, control_estimates=control_fit,
                        treatment_estimates=treated_fit,
                        resistance_sum=resistance_sum,
                        identifiable=identifiable,
                        high_prob_bounds=high_prob)


def did_estimate(panel: PanelData, i: int, t: int):
    """Difference-in-differences estimate of the effect at ``(i, t)``.

    The observed arm of the target anchors the contrast; the other arm is
    predicted through a length-3 path ``u_i -> v_t' -> u_j -> v_t`` in that
    arm's graph, choosing the lexicographically smallest ``(t', j)`` donor.
    Returns :data:`NO_LENGTH_THREE_PATH` when no such donor exists; raises
    :class:`TargetNotObservedError` when the target cell is unobserved.
    """
    if panel.observed[i, t] == 0:
        raise TargetNotObservedError(f"cell {(i, t)} is not observed")
    anchored_on_treated = panel.treatment[i, t] == 1
    control, treated = split_masks(panel)
    donor_mask = control if anchored_on_treated else treated
    outcomes = panel.outcomes
    for t_prime in range(panel.n_periods):
        if t_prime == t:
            continue
        if not donor_mask.is_observed(i, t_prime):
            continue
        for j in range(panel.n_units):
            if j == i:
                continue
            if donor_mask.is_observed(j, t_prime) and donor_mask.is_observed(j, t):
                contrast = ((outcomes[i, t] - outcomes[j, t])
                            - (outcomes[i, t_prime] - outcomes[j, t_prime]))
                return float(contrast if anchored_on_treated else -contrast)
    return NO_LENGTH_THREE_PATH


def twfe_beta(panel: PanelData) -> np.ndarray:
    """Effect matrix of the heterogeneous two-way fixed-effects regression.

    Computed through the flow estimator, which coincides with the least
    squares solution of the regression on every identifiable entry.
    """
    return estimate_effects(panel).beta_hat


def staggered_exposure_certificate(n_units: int, n_groups: int) -> StaggeredExposureCertificate:
    """Exact (1, T) resistances of the staggered pattern against their bounds.

    The treatment-graph bound ``2 * G**2 / N`` comes from routing the unit
    current over the group-size many disjoint chain paths; the control
    bound ``6 / (N - H)`` comes from the dense control block around (1, T).
    With fewer than three groups the control side is empty or disconnects
    the pair, so the certificate is returned as degenerate (no bound check).
    """
    observed, treatment = staggered_exposure_pattern(n_units, n_groups)
    panel = PanelData(outcomes=np.zeros_like(observed, dtype=float),
                      treatment=treatment, observed=observed)
    control_mask, treated_mask = split_masks(panel)
    target = (0, n_units - 1)
    r1_exact = _pair_resistance(treated_mask, *target)
    r0_exact = _pair_resistance(control_mask, *target)
    group_size = n_units // n_groups
    r1_bound = 2.0 * n_groups ** 2 / n_units
    degenerate = n_groups < 3
    r0_bound = math.inf if n_units == group_size else 6.0 / (n_units - group_size)
    if not degenerate:
        if r1_exact > r1_bound + 1e-9:
            raise ArithmeticError(
                f"treatment-graph resistance {r1_exact} exceeds bound {r1_bound}")
        if r0_exact > r0_bound + 1e-9:
            raise ArithmeticError(
                f"control-graph resistance {r0_exact} exceeds bound {r0_bound}")
    return StaggeredExposureCertificate(r1_exact=r1_exact, r1_bound=r1_bound,
                                        r0_exact=r0_exact, r0_bound=r0_bound,
                                        degenerate=degenerate)


def _pair_resistance(mask: ObservationMask, i: int, j: int) -> float:
    if mask.n_observed == 0:
        return math.inf
    core = build_core(build_graph(mask))
    return effective_resistance(core, i, j)
