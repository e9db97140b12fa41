"""Similar-shape predictor: kernel weights over the history and the forecast.

The prediction for the next day is a convex combination of all past shape
segments, weighted by kernel-smoothed distance to the reference segment. The
weighting runs on shape form (daily-max rescaled) throughout; the megawatt
curve is recovered at the end by multiplying with the provided next-day
maximum.
"""

from __future__ import annotations

import datetime as dt
import json
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .calendars import CalendarMeta, DayGroup
from .errors import EmptyCandidateError, InsufficientHistoryError, ShapecastError
from .history import HistoryWindow, shape_matrix
from .reference import ReferenceConfig, ReferenceResult, candidate_set, select_reference
from .segments import DistanceSpec, LoadSegment, TemperatureSegment, distance


class KernelKind(str, Enum):
    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"


def kernel_value(u: np.ndarray, kind: KernelKind) -> np.ndarray:
    """Evaluate the kernel density at scaled distances u >= 0."""
    u = np.asarray(u, dtype=float)
    if kind is KernelKind.GAUSSIAN:
        return np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    if kind is KernelKind.EPANECHNIKOV:
        return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)
    return np.where(np.abs(u) <= 1.0, 0.5, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.GAUSSIAN
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if not self.bandwidth > 0:
            raise ShapecastError("bandwidth must be positive")


@dataclass(frozen=True)
class PredictorConfig:
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    shape_distance: DistanceSpec = field(default_factory=DistanceSpec)
    same_group_only: bool = False  # restrict the weighted sum to same-group days
    rescale: bool = True  # weight daily-max rescaled shapes (production default)


@dataclass(frozen=True)
class Prediction:
    target_date: dt.date
    shape: LoadSegment
    scaled: LoadSegment | None
    weights: np.ndarray
    reference: ReferenceResult
    config: PredictorConfig


def compute_weights(
    shapes: np.ndarray,
    reference: np.ndarray,
    kernel: KernelSpec,
    dist: DistanceSpec = DistanceSpec(),
) -> np.ndarray:
    """Normalized kernel weights of every history shape against the reference.

    Falls back to a one-hot weight on the nearest shape (with a warning) when
    a compact kernel at a tiny bandwidth kills all mass.
    """
    shapes = np.atleast_2d(np.asarray(shapes, dtype=float))
    if shapes.shape[0] < 1:
        raise InsufficientHistoryError("need at least one history segment")
    dists = np.array([distance(row, reference, dist) for row in shapes])
    mass = kernel_value(dists / kernel.bandwidth, kernel.kind)
    total = mass.sum()
    if total == 0.0:
        warnings.warn(
            "no segment within bandwidth; falling back to the nearest segment",
            stacklevel=2,
        )
        weights = np.zeros(len(dists))
        weights[int(np.argmin(dists))] = 1.0
        return weights
    return mass / total


def predict_shape(shapes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Coordinate-wise convex combination of history shapes."""
    shapes = np.atleast_2d(np.asarray(shapes, dtype=float))
    weights = np.asarray(weights, dtype=float)
    if shapes.shape[0] != weights.shape[0]:
        raise ShapecastError(
            f"{shapes.shape[0]} shapes but {weights.shape[0]} weights"
        )
    return weights @ shapes


def _candidates_with_fallback(
    history: HistoryWindow, target_group: DayGroup, cfg: ReferenceConfig
):
    n_l = cfg.n_L(target_group)
    try:
        candidates = candidate_set(history, target_group, n_l)
    except EmptyCandidateError:
        candidates = []
    if (
        target_group is DayGroup.HOLIDAY
        and cfg.holiday_fallback
        and len(candidates) < 2
    ):
        # holidays behave most like Sundays; widen the pool with G4 days
        n_l = max(n_l, cfg.n_L(DayGroup.G4))
        tail = history.records[-n_l:]
        candidates = [
            r for r in tail if r.meta.group in (DayGroup.HOLIDAY, DayGroup.G4)
        ]
    if not candidates:
        raise EmptyCandidateError(
            f"no usable candidate for group {target_group.value}"
        )
    return candidates


def predict_day(
    history: HistoryWindow,
    target: CalendarMeta,
    temp_forecast: TemperatureSegment,
    next_day_max: float | None = None,
    cfg: PredictorConfig = PredictorConfig(),
) -> Prediction:
    """Full pipeline: candidates -> reference -> weights -> shape (-> megawatts)."""
    if not len(history):
        raise InsufficientHistoryError("cannot predict from an empty history")
    candidates = _candidates_with_fallback(history, target.group, cfg.reference)
    reference = select_reference(
        candidates, temp_forecast, cfg.reference, rescale=cfg.rescale
    )
    if cfg.rescale:
        shapes = shape_matrix(history)
    else:
        shapes = np.array([r.load.values for r in history.records])
    weights = compute_weights(
        shapes, reference.reference.values, cfg.kernel, cfg.shape_distance
    )
    if cfg.same_group_only:
        in_group = np.array(
            [r.meta.group is target.group for r in history.records], dtype=float
        )
        masked = weights * in_group
        if masked.sum() == 0.0:
            raise EmptyCandidateError(
                "same_group_only left no weight mass in the target group"
            )
        weights = masked / masked.sum()
    shape_values = predict_shape(shapes, weights)
    shape_seg = LoadSegment(history.grid, shape_values, scale=None)
    scaled = None
    if next_day_max is not None:
        if next_day_max <= 0:
            raise ShapecastError("next_day_max must be positive")
        scaled = LoadSegment(
            history.grid, shape_values * next_day_max, scale=float(next_day_max)
        )
    return Prediction(
        target_date=target.date,
        shape=shape_seg,
        scaled=scaled,
        weights=weights,
        reference=reference,
        config=cfg,
    )


def default_bandwidth_grid(
    history: HistoryWindow,
    dist: DistanceSpec = DistanceSpec(),
    n: int = 25,
    span: tuple[float, float] = (0.01, 10.0),
    max_pairs: int = 2000,
) -> np.ndarray:
    """Log-spaced bandwidth grid anchored at the median pairwise shape distance."""
    shapes = shape_matrix(history)
    L = shapes.shape[0]
    if L < 2:
        raise InsufficientHistoryError("need at least two days for a bandwidth grid")
    rng = np.random.default_rng(0)
    pairs = [(i, j) for i in range(L) for j in range(i + 1, L)]
    if len(pairs) > max_pairs:
        idx = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[i] for i in sorted(idx)]
    dists = [distance(shapes[i], shapes[j], dist) for i, j in pairs]
    med = float(np.median(dists))
    if med <= 0:
        med = 1e-6
    return med * np.logspace(np.log10(span[0]), np.log10(span[1]), n)


def select_bandwidth(
    history: HistoryWindow,
    cfg: PredictorConfig,
    h_grid,
    validation_days: int = 30,
) -> tuple[float, list[tuple[float, float]]]:
    """One-day-ahead empirical risk over the trailing validation window.

    For each bandwidth, each of the last `validation_days` days is predicted
    from strictly prior data, with the realized temperature standing in for
    the forecast; mean relative absolute error decides, ties go to the
    smaller bandwidth.
    """
    from .metrics import score_day

    h_grid = [float(h) for h in h_grid]
    if not h_grid:
        raise ShapecastError("bandwidth grid is empty")
    if len(history) <= validation_days + 1:
        raise InsufficientHistoryError(
            f"need more than {validation_days + 1} days of history"
        )
    records = history.records
    risks = []
    for h in sorted(h_grid):
        kernel = KernelSpec(cfg.kernel.kind, h)
        day_cfg = PredictorConfig(
            cfg.reference, kernel, cfg.shape_distance, cfg.same_group_only, cfg.rescale
        )
        errs = []
        for i in range(len(records) - validation_days, len(records)):
            target = records[i]
            if target.temperature is None:
                raise ShapecastError(
                    f"{target.meta.date.isoformat()}: no realized temperature to "
                    "stand in for the forecast"
                )
            prior = HistoryWindow(records[:i])
            pred = predict_day(
                prior,
                target.meta,
                target.temperature,
                next_day_max=float(np.max(target.load.values)),
                cfg=day_cfg,
            )
            rmae, _, _ = score_day(pred.scaled, target.load)
            errs.append(rmae)
        risks.append((h, float(np.mean(errs))))
    best_h, _ = min(risks, key=lambda hr: (hr[1], hr[0]))
    return best_h, risks


def prediction_to_dict(pred: Prediction, include_weights: bool = False) -> dict:
    d = {
        "date": pred.target_date.isoformat(),
        "grid": list(pred.shape.grid.labels),
        "shape": [float(v) for v in pred.shape.values],
        "scaled": [float(v) for v in pred.scaled.values] if pred.scaled else None,
        "reference_dates": [day.isoformat() for day in pred.reference.c_star],
        "config": config_snapshot(pred.config),
    }
    if include_weights:
        d["weights"] = [float(w) for w in pred.weights]
    return d


def config_snapshot(cfg: PredictorConfig) -> dict:
    ref = cfg.reference
    return {
        "reference": {
            "n_L_by_group": {g.value: n for g, n in ref.n_L_by_group.items()},
            "mode": ref.mode.value,
            "delta_rule": {
                "kind": ref.delta_rule.kind.value,
                "value": ref.delta_rule.value,
            },
            "temp_distance": {
                "kind": ref.temp_distance.kind.value,
                "point_subset": list(ref.temp_distance.point_subset)
                if ref.temp_distance.point_subset
                else None,
            },
            "holiday_fallback": ref.holiday_fallback,
        },
        "kernel": {"kind": cfg.kernel.kind.value, "bandwidth": cfg.kernel.bandwidth},
        "shape_distance": {
            "kind": cfg.shape_distance.kind.value,
            "point_subset": list(cfg.shape_distance.point_subset)
            if cfg.shape_distance.point_subset
            else None,
        },
        "same_group_only": cfg.same_group_only,
        "rescale": cfg.rescale,
    }


def prediction_to_json(pred: Prediction, include_weights: bool = False) -> str:
    return json.dumps(
        prediction_to_dict(pred, include_weights), sort_keys=True, indent=2
    )
