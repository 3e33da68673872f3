"""The generation loop shared by NSGA-II and R-NSGA-II.

Both algorithms mutate every parent exactly once per generation (no parent
selection, no crossover), evaluate the N offspring, and keep the best N of
parents plus offspring under the configured survival policy. They stop when
some evaluated solution's objective vector equals the reference point, or
when the evaluation budget is exhausted.

Counting conventions: the N initialization evaluations count towards the
total; the target check happens as each solution is evaluated, so
evaluations_to_hit has mid-generation precision even though generations
themselves are atomic; the cap is checked at generation boundaries, so a
capped run may overshoot max_evaluations by at most N - 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

from .core import RngStream, bitwise_mutate, euclidean_distance, random_bitstring, stream
from .problems import (
    ClosedFormUnavailableError,
    ParetoFront,
    ProblemSpec,
    enumerate_pareto_front,
    evaluate,
    pareto_front_closed_form,
)
from .survival import Individual, SurvivalPolicy, survival_select


@dataclass(frozen=True)
class AlgorithmConfig:
    """Everything that defines one algorithm run besides the problem and seed.

    mutation_rate of None means the standard 1/n. A zero rate is accepted
    as a degenerate setting for tests. max_evaluations of None runs without
    a budget.
    """

    policy: SurvivalPolicy
    pop_size: int
    reference_point: tuple
    mutation_rate: Optional[float] = None
    max_evaluations: Optional[int] = None

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("population size must be at least 1")
        if len(self.reference_point) != 2:
            raise ValueError("reference point must have exactly 2 objectives")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation rate must lie in [0, 1]")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive when set")


@dataclass
class RunState:
    """Mutable snapshot of a run between generations."""

    population: list
    generation: int
    evaluations: int
    hit: bool
    evaluations_to_hit: Optional[int]
    rng: RngStream
    next_birth_index: int


@dataclass(frozen=True)
class RunResult:
    hit: bool
    evaluations_to_hit: Optional[int]
    evaluations: int
    generations: int
    seed: int


def target_hit(objectives, reference) -> bool:
    """Exact componentwise equality with the reference point."""
    return tuple(objectives) == tuple(reference)


def initialize(problem: ProblemSpec, config: AlgorithmConfig, seed: int) -> RunState:
    """Draw and evaluate the N uniform random starting solutions."""
    rng = stream(seed)
    reference = config.reference_point
    population = []
    hit = False
    hit_at = None
    for i in range(config.pop_size):
        genome = random_bitstring(problem.n, rng)
        objectives = evaluate(problem, genome)
        population.append(Individual(genome=genome, objectives=objectives, birth_index=i))
        if not hit and target_hit(objectives, reference):
            hit = True
            hit_at = i + 1
    return RunState(
        population=population,
        generation=0,
        evaluations=config.pop_size,
        hit=hit,
        evaluations_to_hit=hit_at,
        rng=rng,
        next_birth_index=config.pop_size,
    )


def step_generation(state: RunState, problem: ProblemSpec, config: AlgorithmConfig) -> RunState:
    """Mutate every parent once, evaluate the offspring, keep the best N."""
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / problem.n
    reference = config.reference_point
    evaluations = state.evaluations
    hit = state.hit
    hit_at = state.evaluations_to_hit
    birth = state.next_birth_index
    offspring = []
    for parent in state.population:
        genome = bitwise_mutate(parent.genome, rate, state.rng)
        objectives = evaluate(problem, genome)
        evaluations += 1
        offspring.append(Individual(genome=genome, objectives=objectives, birth_index=birth))
        birth += 1
        if not hit and target_hit(objectives, reference):
            hit = True
            hit_at = evaluations
    survivors = survival_select(state.population + offspring, config.pop_size, config.policy)
    return RunState(
        population=survivors,
        generation=state.generation + 1,
        evaluations=evaluations,
        hit=hit,
        evaluations_to_hit=hit_at,
        rng=state.rng,
        next_birth_index=birth,
    )


def run(
    problem: ProblemSpec,
    config: AlgorithmConfig,
    seed: int,
    on_generation: Optional[Callable[[RunState], None]] = None,
) -> RunResult:
    """Run until the reference point is found or the budget is exhausted.

    on_generation, when given, is called on the initialized state and after
    every completed generation; it is how traces and invariant checks
    observe the population.
    """
    state = initialize(problem, config, seed)
    if on_generation is not None:
        on_generation(state)
    cap = config.max_evaluations
    while not state.hit and (cap is None or state.evaluations < cap):
        state = step_generation(state, problem, config)
        if on_generation is not None:
            on_generation(state)
    return RunResult(
        hit=state.hit,
        evaluations_to_hit=state.evaluations_to_hit,
        evaluations=state.evaluations,
        generations=state.generation,
        seed=int(seed),
    )


class GenerationTrace:
    """Collects one row per generation: distance to target and front coverage.

    Rows are (generation, min distance to the reference point, number of
    distinct true-front objective vectors present in the population). Pass
    an instance as on_generation, then inspect .rows or write_csv().
    """

    def __init__(self, problem: ProblemSpec, reference, front: Optional[ParetoFront] = None):
        self.reference = tuple(reference)
        if front is None:
            try:
                front = pareto_front_closed_form(problem)
            except ClosedFormUnavailableError:
                front = enumerate_pareto_front(problem)
        self.front_points = front.points
        self.rows = []

    def __call__(self, state: RunState) -> None:
        vectors = {ind.objectives for ind in state.population}
        min_dist = min(euclidean_distance(v, self.reference) for v in vectors)
        covered = len(vectors & self.front_points)
        self.rows.append((state.generation, min_dist, covered))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["generation", "min_distance", "front_points"])
            writer.writerows(self.rows)
