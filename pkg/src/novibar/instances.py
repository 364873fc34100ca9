"""Reproducible random instances for the cone and deformation checks.

Instances are built in normal form in orthonormal coordinates: the
differential is a block supported on (cycle rows) x (pairing columns),
which squares to zero for any entries, and chain maps are assembled
block-wise so that they commute with it exactly.  Everything is then
conjugated by a random product of elementary matrices over the
valuation ring (an orthonormality-preserving change of basis) and
finally expressed over a random filtration, so the emitted complexes
look nothing like their normal forms while their invariants are known
by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .scalars import NovikovScalar
from .spaces import FilteredMap, FilteredSpace


def default_exponent_pool(max_value: int = 3) -> list[Fraction]:
    """Rationals in [0, max_value] with denominator dividing 12."""
    pool = sorted({Fraction(k, 12) for k in range(0, 12 * max_value + 1)})
    return pool


@dataclass
class Instance:
    """One generated test case with its construction parameters."""

    space: FilteredSpace
    d_before: FilteredMap  # unperturbed differential
    d_after: FilteredMap  # d_before + perturbation of valuation >= low_bound
    map_before: FilteredMap  # chain map for d_before
    map_after: FilteredMap  # chain map for d_after
    params: dict = field(default_factory=dict)


def _rand_scalar(
    rng: random.Random,
    pool: Sequence[Fraction],
    floor: Fraction = Fraction(0),
    terms: int = 2,
    allow_zero: bool = True,
) -> NovikovScalar:
    """Sparse polynomial scalar with exponents floor + pool values."""
    if allow_zero and rng.random() < 0.35:
        return NovikovScalar.zero()
    count = rng.randint(1, terms)
    exps = {floor + rng.choice(pool) for _ in range(count)}
    return NovikovScalar.of(*exps)


def _rand_unit(rng: random.Random, pool: Sequence[Fraction]) -> NovikovScalar:
    """Valuation-zero scalar: 1 plus an optional higher term."""
    extra = [e for e in pool if e > 0]
    if extra and rng.random() < 0.5:
        return NovikovScalar.of(0, rng.choice(extra))
    return NovikovScalar.one()


def _matrix(n: int, m: int) -> list[list[NovikovScalar]]:
    zero = NovikovScalar.zero()
    return [[zero for _ in range(m)] for _ in range(n)]


def _mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = _matrix(n, m)
    for i in range(n):
        for t in range(k):
            if a[i][t].is_zero():
                continue
            for j in range(m):
                if not b[t][j].is_zero():
                    out[i][j] = out[i][j] + a[i][t] * b[t][j]
    return out


def _conjugate_all(
    rng: random.Random,
    pool: Sequence[Fraction],
    matrices: list,
    n: int,
    ops: int,
) -> None:
    """Apply a shared random unimodular conjugation, elementary op by op."""
    for _ in range(ops):
        kind = rng.random()
        if kind < 0.3 and n >= 2:
            i, j = rng.sample(range(n), 2)
            for m in matrices:
                m[i], m[j] = m[j], m[i]
                for row in m:
                    row[i], row[j] = row[j], row[i]
        elif n >= 2:
            i, j = rng.sample(range(n), 2)
            lam = _rand_scalar(rng, pool, terms=1, allow_zero=False)
            # M <- E M E with E = I + lam*E_{ij}: self-inverse in char 2.
            for m in matrices:
                for c in range(n):
                    if not m[j][c].is_zero():
                        m[i][c] = m[i][c] + lam * m[j][c]
                for r in range(n):
                    if not m[r][i].is_zero():
                        m[r][j] = m[r][j] + lam * m[r][i]


def random_instance(
    seed: int,
    dims: int = 6,
    exponent_pool: Optional[Sequence[Fraction]] = None,
    tight_low_bound: bool = False,
) -> Instance:
    """Deterministic instance satisfying the deformation hypotheses.

    The differential perturbation has valuation >= low_bound and the
    chain-map perturbation valuation >= high_bound > low_bound.  With
    `tight_low_bound` the low bound may dip below the boundary depth,
    which exercises partial-prefix conclusions (and may legitimately
    break the extra hypotheses of the high-spectrum case).
    """
    rng = random.Random(seed)
    pool = list(exponent_pool) if exponent_pool is not None else default_exponent_pool()
    positive = [e for e in pool if e > 0]
    if dims <= 0:
        space = FilteredSpace((), (), None)
        empty = FilteredMap.zero(space, space)
        return Instance(
            space, empty, empty, empty, empty,
            params={"seed": seed, "low_bound": Fraction(1), "high_bound": Fraction(2)},
        )
    pairs = rng.randint(0, dims // 2)
    homology = rng.randint(0, dims - 2 * pairs)
    if pairs == 0 and homology == 0:
        homology = 1
    n = homology + 2 * pairs
    betas = sorted(rng.choice(positive) for _ in range(pairs))
    depth = max(betas, default=Fraction(0))
    if tight_low_bound and betas:
        low_bound = rng.choice([b for b in positive if b <= depth] or positive)
    else:
        low_bound = depth + rng.choice(positive)
    high_bound = low_bound + rng.choice(positive)

    # Slots: homology block first, then pairing sources, then their targets.
    y0, z0 = homology, homology + pairs
    d_before = _matrix(n, n)
    for j, beta in enumerate(betas):
        d_before[z0 + j][y0 + j] = NovikovScalar.monomial(beta)
    d_after = [row[:] for row in d_before]
    for i in range(pairs):
        for j in range(pairs):
            if rng.random() < 0.4:
                bump = _rand_scalar(
                    rng, pool, floor=low_bound, terms=2, allow_zero=False
                )
                d_after[z0 + i][y0 + j] = d_after[z0 + i][y0 + j] + bump

    def free_block_map() -> list[list[NovikovScalar]]:
        block = _matrix(n, n)
        for i in range(homology):
            for j in range(homology):
                block[i][j] = _rand_scalar(rng, pool)
        for i in range(homology):
            for j in range(pairs):
                block[i][y0 + j] = _rand_scalar(rng, pool)
        for i in range(pairs):
            for j in range(homology):
                block[z0 + i][j] = _rand_scalar(rng, pool)
            for j in range(pairs):
                block[z0 + i][y0 + j] = _rand_scalar(rng, pool)
        return block

    shared = free_block_map()
    map_after = [row[:] for row in shared]
    map_before = [row[:] for row in shared]
    # Perturb only the structurally free blocks so both stay chain maps.
    free_cells = (
        [(i, j) for i in range(homology) for j in range(homology)]
        + [(i, y0 + j) for i in range(homology) for j in range(pairs)]
        + [(z0 + i, j) for i in range(pairs) for j in range(homology)]
        + [(z0 + i, y0 + j) for i in range(pairs) for j in range(pairs)]
    )
    for i, j in free_cells:
        if rng.random() < 0.4:
            bump = _rand_scalar(rng, pool, floor=high_bound, terms=1, allow_zero=False)
            map_before[i][j] = map_before[i][j] + bump
    # Commuting blocks: a polynomial in the pairing block commutes with it.
    c0 = _rand_unit(rng, pool) if rng.random() < 0.7 else _rand_scalar(rng, pool)
    c1 = (
        _rand_scalar(rng, pool, floor=high_bound - low_bound, terms=1, allow_zero=False)
        if rng.random() < 0.6
        else NovikovScalar.zero()
    )

    def fill_commuting(block, diff) -> None:
        delta = [
            [diff[z0 + i][y0 + j] for j in range(pairs)] for i in range(pairs)
        ]
        poly = [
            [c0 if i == j else NovikovScalar.zero() for j in range(pairs)]
            for i in range(pairs)
        ]
        if not c1.is_zero():
            for i in range(pairs):
                for j in range(pairs):
                    poly[i][j] = poly[i][j] + c1 * delta[i][j]
        for i in range(pairs):
            for j in range(pairs):
                block[y0 + i][y0 + j] = poly[i][j]
                block[z0 + i][z0 + j] = poly[i][j]

    fill_commuting(map_after, d_after)
    fill_commuting(map_before, d_before)

    matrices = [d_before, d_after, map_before, map_after]
    _conjugate_all(rng, pool, matrices, n, ops=max(2, n))

    filtration = tuple(rng.choice(pool) for _ in range(n))
    names = tuple(f"g{k}" for k in range(n))
    space = FilteredSpace(names, filtration, None)

    def raw(matrix) -> FilteredMap:
        rows = []
        for i in range(n):
            rows.append(
                tuple(
                    matrix[i][j].shift(filtration[i] - filtration[j])
                    for j in range(n)
                )
            )
        return FilteredMap(space, space, tuple(rows))

    return Instance(
        space,
        raw(d_before),
        raw(d_after),
        raw(map_before),
        raw(map_after),
        params={
            "seed": seed,
            "low_bound": low_bound,
            "high_bound": high_bound,
            "betas": betas,
            "homology": homology,
            "pairs": pairs,
        },
    )
