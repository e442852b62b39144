"""Seeded random monomials and elements for randomized verification runs.

All randomness flows through an explicit :class:`random.Random` so that
test reruns and CLI invocations with ``--seed`` are byte-reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .algebra import AlgebraElement, Monomial
from .scalars import Scalar


def random_monomial(rng: random.Random, max_degree: int = 4) -> Monomial:
    """A uniform-ish basis monomial of total degree <= max_degree."""
    degree = rng.randint(0, max_degree)
    cuts = sorted(rng.randint(0, degree) for _ in range(2))
    e1, e2, e3 = cuts[0], cuts[1] - cuts[0], degree - cuts[1]
    if rng.random() < 0.5:
        return Monomial(e1, e2, e3, 0)
    return Monomial(0, e2, e3, e1)


def random_coefficient(rng: random.Random) -> Scalar:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    den = rng.choice([1, 1, 2, 3])
    vexp = rng.randint(-2, 2)
    return Scalar.from_fraction(Fraction(num, den)) * Scalar.v_pow(vexp)


def random_element(rng: random.Random, max_degree: int = 4,
                   max_terms: int = 3) -> AlgebraElement:
    out = AlgebraElement.zero()
    for _ in range(rng.randint(1, max_terms)):
        term = AlgebraElement.from_mono(random_monomial(rng, max_degree),
                                        random_coefficient(rng))
        out = out + term
    return out


def make_rng(seed: Optional[int]) -> random.Random:
    return random.Random(0 if seed is None else seed)
