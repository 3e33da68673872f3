"""Environmental selection: non-dominated sorting, crowding distance, and
reference-point distance, plus the capacity-N truncation built on them.

The two survival policies differ only in how the critical front is ordered:
crowding distance keeps the most isolated solutions (descending), the
reference-point policy keeps the solutions closest to the target vector
(ascending). Whole fronts are admitted as long as they fit; only the first
front that does not fit is truncated, and its key is computed exactly once.
All ties break on birth_index, so selection is fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import euclidean_distance


@dataclass(eq=False)
class Individual:
    """A candidate solution with cached objectives and survival bookkeeping.

    rank is the 1-based front index from the last sort; survival_key holds
    the last truncation key computed for this individual (crowding distance,
    larger is better, or distance to the reference point, smaller is better).
    birth_index increases monotonically with creation order and is the
    universal tie-breaker.
    """

    genome: np.ndarray
    objectives: tuple
    birth_index: int
    rank: Optional[int] = None
    survival_key: Optional[float] = None


@dataclass(frozen=True)
class CrowdingDistance:
    """Order the critical front by crowding distance, descending."""


@dataclass(frozen=True)
class ReferencePointDistance:
    """Order the critical front by Euclidean distance to a reference point, ascending."""

    reference: tuple


SurvivalPolicy = Union[CrowdingDistance, ReferencePointDistance]


def fast_nondominated_sort(population) -> list:
    """Partition individuals into fronts F1, F2, ... and set their ranks.

    F1 holds everything non-dominated in the input; each later front is
    non-dominated once the earlier fronts are removed. Individuals with
    equal objective vectors always share a front. Returns a list of lists
    in front order; an empty input gives an empty partition.
    """
    population = list(population)
    if not population:
        return []
    objs = np.array([ind.objectives for ind in population], dtype=np.float64)
    if objs.ndim != 2:
        raise ValueError("all individuals must share one objective dimension")
    # dom[i, j]: i dominates j; the two-column form avoids a (P, P, m) temporary
    if objs.shape[1] == 2:
        f1, f2 = objs[:, 0], objs[:, 1]
        dom = ((f1[:, None] >= f1[None, :]) & (f2[:, None] >= f2[None, :])
               & ((f1[:, None] > f1[None, :]) | (f2[:, None] > f2[None, :])))
    else:
        weak = (objs[:, None, :] >= objs[None, :, :]).all(axis=2)
        strict = (objs[:, None, :] > objs[None, :, :]).any(axis=2)
        dom = weak & strict
    counts = dom.sum(axis=0)
    assigned = np.zeros(len(population), dtype=bool)
    fronts = []
    current = np.flatnonzero(counts == 0)
    rank = 1
    while current.size:
        for i in current:
            population[i].rank = rank
        assigned[current] = True
        fronts.append([population[i] for i in current])
        counts = counts - dom[current].sum(axis=0)
        current = np.flatnonzero((counts == 0) & ~assigned)
        rank += 1
    return fronts


def crowding_distance_assign(front) -> dict:
    """Crowding distance for one front, computed in a single pass.

    Per objective the front is sorted ascending (ties on birth_index), the
    two boundary individuals get infinity, and each interior individual
    accumulates the normalized gap between its sorted neighbours. When an
    objective is constant across the front it contributes nothing to the
    interior, but the boundary infinities still apply.
    """
    front = list(front)
    dist = {ind: 0.0 for ind in front}
    if not front:
        return dist
    size = len(front)
    for i in range(len(front[0].objectives)):
        order = sorted(front, key=lambda ind: (ind.objectives[i], ind.birth_index))
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        span = order[-1].objectives[i] - order[0].objectives[i]
        if span == 0:
            continue
        for j in range(1, size - 1):
            dist[order[j]] += (order[j + 1].objectives[i] - order[j - 1].objectives[i]) / span
    return dist


def reference_distances(front, reference) -> dict:
    """Euclidean distance from each individual's objectives to the reference point."""
    return {ind: euclidean_distance(ind.objectives, reference) for ind in front}


def survival_select(combined, capacity: int, policy: SurvivalPolicy) -> list:
    """Pick the next population of exactly `capacity` from the combined pool.

    Fronts are admitted whole while they fit (filling to exactly capacity
    counts as complete admission); the first front that does not fit is
    ordered by the policy key with birth_index breaking ties, and only the
    remaining slots are taken from it.
    """
    combined = list(combined)
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    if len(combined) < capacity:
        raise ValueError(
            f"need at least {capacity} individuals to select from, got {len(combined)}")
    for ind in combined:
        ind.survival_key = None
    survivors = []
    for front in fast_nondominated_sort(combined):
        if len(survivors) + len(front) <= capacity:
            survivors.extend(front)
            if len(survivors) == capacity:
                break
            continue
        slots = capacity - len(survivors)
        if isinstance(policy, CrowdingDistance):
            keys = crowding_distance_assign(front)
            ordered = sorted(front, key=lambda ind: (-keys[ind], ind.birth_index))
        elif isinstance(policy, ReferencePointDistance):
            keys = reference_distances(front, policy.reference)
            ordered = sorted(front, key=lambda ind: (keys[ind], ind.birth_index))
        else:
            raise TypeError(f"unknown survival policy: {policy!r}")
        for ind in front:
            ind.survival_key = keys[ind]
        survivors.extend(ordered[:slots])
        break
    return survivors
