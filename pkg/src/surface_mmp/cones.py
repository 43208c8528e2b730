"""Exact halfspace intersection for small polyhedral cones.

A cone {x : n . x >= 0 for all normals n} is maintained as a lineality
basis plus a generating set of rays and cut by one halfspace at a time
(double description).  Everything is exact over rationals; rays are
normalized to primitive integer vectors.  The generating set is correct
but not guaranteed irredundant, which is all the callers need: the
degenerate-cone certificates only use membership and the is-zero test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .linalg import as_rational

__all__ = ["ConeDescription", "cone_from_inequalities"]

Vec = tuple[Fraction, ...]


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum(x * y for x, y in zip(a, b))


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...] | None:
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return None
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class ConeDescription:
    """A cone as lineality basis + generating rays (primitive integer vectors)."""

    dim: int
    lineality: tuple[tuple[int, ...], ...]
    rays: tuple[tuple[int, ...], ...]

    @property
    def is_zero(self) -> bool:
        return not self.lineality and not self.rays

    def contains(self, point: Sequence[int | Fraction], normals: Iterable[Sequence[Fraction]]) -> bool:
        """Membership test against the defining inequalities."""
        p = [as_rational(x) for x in point]
        return all(_dot(n, p) >= 0 for n in normals)


def cone_from_inequalities(normals: Iterable[Sequence[int | Fraction]], dim: int) -> ConeDescription:
    """Intersect the halfspaces {n . x >= 0} in Q^dim, exactly.

    With no normals the result is the whole space (full lineality); the
    zero cone comes out with empty lineality and no rays.
    """
    lineality: list[Vec] = [
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(dim)) for i in range(dim)
    ]
    rays: list[Vec] = []

    for raw in normals:
        n = tuple(as_rational(x) for x in raw)
        if len(n) != dim:
            raise ValueError("normal has wrong dimension")
        if all(x == 0 for x in n):
            continue

        products = [_dot(n, l) for l in lineality]
        pivot = next((k for k, p in enumerate(products) if p != 0), None)
        if pivot is not None:
            # the lineality space sticks out of the halfspace: split off a
            # pivot direction, keep the orthogonal part lineal, shift every
            # ray into the hyperplane, and keep the pivot as a new ray
            l_star = lineality[pivot]
            p_star = products[pivot]
            if p_star < 0:
                l_star = tuple(-x for x in l_star)
                p_star = -p_star
            new_lineality = []
            for k, l in enumerate(lineality):
                if k == pivot:
                    continue
                coef = products[k] / p_star
                new_lineality.append(tuple(x - coef * y for x, y in zip(l, l_star)))
            new_rays = []
            for r in rays:
                coef = _dot(n, r) / p_star
                new_rays.append(tuple(x - coef * y for x, y in zip(r, l_star)))
            lineality = new_lineality
            rays = new_rays + [l_star]
            continue

        # lineality already inside the hyperplane: split the rays
        pos = [(r, _dot(n, r)) for r in rays if _dot(n, r) > 0]
        zero = [r for r in rays if _dot(n, r) == 0]
        neg = [(r, _dot(n, r)) for r in rays if _dot(n, r) < 0]
        combos: list[Vec] = []
        for rp, vp in pos:
            for rm, vm in neg:
                combo = tuple(vp * xm - vm * xp for xp, xm in zip(rp, rm))
                combos.append(combo)
        rays = [r for r, _ in pos] + zero + combos

        # normalize and deduplicate
        seen = set()
        cleaned: list[Vec] = []
        for r in rays:
            prim = _primitive(r)
            if prim is None or prim in seen:
                continue
            seen.add(prim)
            cleaned.append(tuple(Fraction(x) for x in prim))
        rays = cleaned

    lin_out = []
    seen_lin = set()
    for l in lineality:
        prim = _primitive(l)
        if prim is not None and prim not in seen_lin:
            seen_lin.add(prim)
            lin_out.append(prim)
    ray_out = []
    seen_ray = set()
    for r in rays:
        prim = _primitive(r)
        if prim is not None and prim not in seen_ray:
            seen_ray.add(prim)
            ray_out.append(prim)
    return ConeDescription(dim=dim, lineality=tuple(lin_out), rays=tuple(ray_out))
