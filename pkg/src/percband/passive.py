"""Passive-learning conversion: identical epoch structure, labeled draws only.

The passive learner cannot query; it draws full labeled pairs (x, y) from the
data distribution and discards pairs whose instance falls outside the current
band. Every drawn pair costs one label, so the passive labeled-example count
follows exactly the law of the active learner's unlabeled-draw count (the
band acceptance events are the same), while the accepted pairs have the same
conditional distribution as in the active mode.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import geometry
from .geometry import Band
from .learner import (
    EpochTrace,
    RunReport,
    Schedule,
    angle_or_nan,
    default_draw_budget,
    modified_perceptron_step,
)
from .oracles import LabelingOracle


class LabeledExampleSource:
    """Labeled-pair stream: uniform sphere instances labeled by an oracle.

    Rejected pairs are charged against the oracle's label counter but their
    labels are never consumed, so they are not materialized; the accepted
    pair's label is a real oracle query. Draw counts therefore follow the
    same law as literal pair-by-pair sampling.
    """

    def __init__(self, oracle: LabelingOracle):
        self.oracle = oracle

    @property
    def dimension(self) -> int:
        return self.oracle.dimension

    def draw_in_band(
        self,
        band: Band,
        rng: np.random.Generator,
        draw_budget: int,
        sample_method: str = "auto",
        mass: float | None = None,
    ) -> tuple[np.ndarray, int, int]:
        """Draw labeled pairs until one lands in the band.

        Returns (x, y, pairs_drawn) where pairs_drawn includes the accepted
        pair and every rejected one.
        """
        x, pairs = geometry.rejection_sample_band(
            band, rng, draw_budget, method=sample_method, mass=mass
        )
        self.oracle.charge_queries(pairs - 1)
        y = self.oracle.query(x)
        return x, y, pairs


def passive_mod_perceptron(
    source: LabeledExampleSource,
    w0,
    m: int,
    b: float,
    rng: np.random.Generator,
    draw_budget: int | None = None,
    sample_method: str = "auto",
) -> tuple[np.ndarray, int]:
    """One halving stage on drawn pairs; returns (w, labeled pairs drawn)."""
    w = geometry.check_unit(w0, "w0")
    if m < 0:
        raise ValueError(f"iteration count must be >= 0, got {m}")
    if not (0.0 < b <= 1.0):
        raise ValueError(f"band width must lie in (0, 1], got {b}")
    if m == 0:
        return w, 0
    p = geometry.band_mass(source.dimension, b / 2.0, b)
    if draw_budget is None:
        draw_budget = default_draw_budget(m, p)
    remaining = draw_budget
    drawn = 0
    for _ in range(m):
        if remaining < 1:
            raise geometry.DrawBudgetExceeded(
                f"epoch draw budget {draw_budget} exhausted", draws_used=draw_budget
            )
        band = Band(normal=w, lower=b / 2.0, upper=b)
        x, y, pairs = source.draw_in_band(band, rng, remaining, sample_method, mass=p)
        remaining -= pairs
        drawn += pairs
        w = modified_perceptron_step(w, x, y)
    return w, drawn


def passive_perceptron(
    source: LabeledExampleSource,
    v0,
    epsilon: float,
    delta: float,
    schedule: Schedule,
    rng: np.random.Generator,
    target=None,
    sample_method: str = "auto",
) -> RunReport:
    """Epoch loop over passive halving stages.

    In the returned report both total_labels and total_unlabeled equal the
    number of labeled pairs drawn: every draw consumes one label and one
    instance from the distribution.
    """
    start = time.perf_counter()
    v = geometry.check_unit(v0, "v0")
    if target is not None:
        target = geometry.check_unit(target, "target")
        geometry.check_same_dimension(v, target)
    if not (0.0 < epsilon < 1.0) or not (0.0 < delta < 1.0):
        raise ValueError("epsilon and delta must lie in (0, 1)")

    traces: list[EpochTrace] = []
    total = 0
    for k in range(1, schedule.epochs + 1):
        theta_before = angle_or_nan(v, target)
        v, drawn = passive_mod_perceptron(
            source,
            v,
            schedule.m[k - 1],
            schedule.b[k - 1],
            rng,
            sample_method=sample_method,
        )
        total += drawn
        traces.append(
            EpochTrace(
                epoch=k,
                theta_before=theta_before,
                theta_after=angle_or_nan(v, target),
                labels=drawn,
                unlabeled_draws=drawn,
            )
        )
    succeeded = None
    if target is not None:
        succeeded = bool(geometry.angle(v, target) <= math.pi * epsilon)
    return RunReport(
        final=v,
        total_labels=total,
        total_unlabeled=total,
        traces=traces,
        succeeded=succeeded,
        wall_time=time.perf_counter() - start,
    )
