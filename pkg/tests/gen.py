"""Random generators for test instances."""

from __future__ import annotations

import random
from fractions import Fraction

from eqiwasawa.grp import AbGroup
from eqiwasawa.motive import PadicOneMotive


def random_motive(rng: random.Random, p: int | None = None, max_rank: int = 4) -> PadicOneMotive:
    """A motive with r + s <= max_rank, either trivial G or G = Z/2 acting diagonally by signs."""
    p = p or rng.choice([3, 5])
    r = rng.randint(0, max_rank)
    s = rng.randint(0, max_rank - r)
    if r + s == 0:
        r = 1
    equivariant = rng.random() < 0.5
    eps = [rng.choice([1, -1]) for _ in range(r)] if equivariant else [1] * r
    eta = [rng.choice([1, -1]) for _ in range(s)] if equivariant else [1] * s
    delta = []
    for i in range(r):
        row = []
        for k in range(s):
            if eps[i] == eta[k]:
                e = rng.randint(0, 3)
                row.append(Fraction(rng.randrange(p ** e), p ** e))
            else:
                row.append(Fraction(0))
        delta.append(row)
    if not equivariant:
        return PadicOneMotive(p, r, s, delta)
    G = AbGroup([2], j=[1])
    AL = [[eps[i] if i == k else 0 for k in range(r)] for i in range(r)]
    AJ = [[eta[i] if i == k else 0 for k in range(s)] for i in range(s)]
    return PadicOneMotive(p, r, s, delta, G, [AL], [AJ])
