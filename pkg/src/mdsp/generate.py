"""Seeded random MDSP instances.

Randomness comes from SplitMix64, fully defined by its recurrence so any
implementation can reproduce the same stream::

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output z ^ (z >> 31)

``below(k)`` draws an unbiased integer in ``[0, k)`` by rejecting outputs at or
above ``floor(2^64 / k) * k`` and reducing the rest modulo ``k``.

All generated numbers lie on a grid of ``1/8`` (exact in binary floating
point). Per job, values are drawn in this order: duration, start, cost (skipped
for unit cost), profit. Job ids run from 1 to n. When ``require_delta_le_m``
is set, whole instances are redrawn from the continuing stream until the
conflict graph's max degree is at most ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .conflicts import build_conflict_graph, max_degree_delta
from .errors import GenerationInfeasibleError
from .model import Instance, Job

MASK64 = (1 << 64) - 1
GRID = 8


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // bound) * bound
        while True:
            x = self.next()
            if x < limit:
                return x % bound

    def grid(self, lo: float, hi: float) -> float:
        """Uniform value on the 1/8 grid inside ``[lo, hi]``."""
        k_lo, k_hi = math.ceil(lo * GRID), math.floor(hi * GRID)
        return (k_lo + self.below(k_hi - k_lo + 1)) / GRID


def mix_seed(*parts: int) -> int:
    """Derive a child seed from integers by chaining SplitMix64 outputs."""
    state = 0
    for p in parts:
        state = SplitMix64(state ^ (p & MASK64)).next()
    return state


@dataclass(frozen=True)
class GenParams:
    n: int
    m: int
    budget: float
    horizon: float
    duration_range: tuple[float, float] = (1.0, 4.0)
    cost_range: tuple[float, float] = (1.0, 4.0)
    profit_range: tuple[float, float] = (1.0, 10.0)
    unit_cost: bool = False
    require_delta_le_m: bool = False
    seed: int = 0
    max_retries: int = 10_000

    def check(self) -> None:
        def rng(name, pair, positive=False):
            lo, hi = pair
            if lo < 0 or hi < lo or (positive and lo <= 0):
                raise ValueError(f"{name} range {pair} must be non-negative with min <= max")
            if math.ceil(lo * GRID) > math.floor(hi * GRID):
                raise ValueError(f"{name} range {pair} holds no multiple of 1/{GRID}")

        if self.n < 0 or self.m < 1:
            raise ValueError("need n >= 0 and m >= 1")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.unit_cost and not float(self.budget).is_integer():
            raise ValueError("unit-cost instances need an integer budget")
        rng("duration", self.duration_range, positive=True)
        if not self.unit_cost:
            rng("cost", self.cost_range)
        rng("profit", self.profit_range)
        if self.horizon < self.duration_range[1]:
            raise ValueError("horizon must be at least the maximum duration")


def _draw(params: GenParams, rng: SplitMix64) -> Instance:
    jobs = []
    for jid in range(1, params.n + 1):
        dur = rng.grid(*params.duration_range)
        start = rng.grid(0.0, params.horizon - dur)
        cost = 1.0 if params.unit_cost else min(rng.grid(*params.cost_range), float(params.budget))
        profit = rng.grid(*params.profit_range)
        jobs.append(Job(jid, start, start + dur, cost, profit))
    return Instance(tuple(jobs), params.m, float(params.budget))


def generate(params: GenParams) -> Instance:
    params.check()
    rng = SplitMix64(params.seed)
    for _ in range(max(params.max_retries, 1)):
        inst = _draw(params, rng)
        if not params.require_delta_le_m:
            return inst
        if max_degree_delta(build_conflict_graph(inst)) <= params.m:
            return inst
    raise GenerationInfeasibleError(
        f"no instance with max degree <= m={params.m} after {params.max_retries} draws; "
        "try fewer jobs, shorter durations or a longer horizon"
    )
