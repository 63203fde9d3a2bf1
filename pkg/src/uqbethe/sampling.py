"""Seeded generation of generic rational sample points."""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Callable, TypeVar

from .exact import Resample

log = logging.getLogger(__name__)

T = TypeVar("T")

BOUND = 10**4
DEFAULT_RETRIES = 50


class SamplingExhausted(RuntimeError):
    """Every retry of a sampled check hit a pole."""


class Sampler:
    """Draws positive rationals with numerator and denominator in [1, BOUND]."""

    def __init__(self, seed: int, bound: int = BOUND):
        self.seed = seed
        self.bound = bound
        self.rng = random.Random(seed)

    def scalar(self) -> Fraction:
        return Fraction(self.rng.randint(1, self.bound), self.rng.randint(1, self.bound))

    def scalars(self, k: int) -> list[Fraction]:
        return [self.scalar() for _ in range(k)]

    def q(self) -> Fraction:
        """A deformation parameter away from 0 and 1."""
        while True:
            x = self.scalar()
            if x != 1:
                return x

    def distinct(self, k: int) -> list[Fraction]:
        out: list[Fraction] = []
        while len(out) < k:
            x = self.scalar()
            if x not in out:
                out.append(x)
        return out

    def randint(self, lo: int, hi: int) -> int:
        return self.rng.randint(lo, hi)


def with_resampling(draw: Callable[[Sampler], T], sampler: Sampler,
                    retries: int = DEFAULT_RETRIES) -> T:
    """Call ``draw`` until it does not raise :class:`Resample`.

    All draws share the sampler's stream, so the sequence of points is fixed
    by the seed.
    """
    for attempt in range(retries):
        try:
            return draw(sampler)
        except (Resample, ZeroDivisionError) as exc:
            log.info("resampling (attempt %d, seed %d): %s", attempt + 1, sampler.seed, exc)
    raise SamplingExhausted(f"no pole-free sample after {retries} attempts (seed {sampler.seed})")
