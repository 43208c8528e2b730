"""Mumford intersection theory on normal surfaces.

Divisors on X are represented by their strict transforms, i.e. by rational
coefficients on the non-exceptional curves of the smooth model.  The
pull-back extends a divisor by rational multiples of exceptional curves so
that it pairs to zero with every exceptional curve; since clusters are
disjoint the linear system is block diagonal and each negative definite
block is solved independently and exactly.  Intersection numbers of
divisors on X are pairings of their pull-backs on the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .linalg import as_rational, is_negative_definite, solve_unique
from .model import Boundary, InvalidClusterError, NormalSurface, SmoothModel

__all__ = [
    "WeilDivisor",
    "PullbackResult",
    "mumford_pullback",
    "mumford_intersection",
    "canonical_intersection",
]


@dataclass(frozen=True)
class WeilDivisor:
    """A finitely supported rational divisor, keyed by model curve index."""

    coeffs: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        canon: dict[int, Fraction] = {}
        for i, c in self.coeffs:
            c = as_rational(c)
            if i in canon:
                raise ValueError(f"duplicate coefficient for curve index {i}")
            if c != 0:
                canon[i] = c
        object.__setattr__(self, "coeffs", tuple(sorted(canon.items())))

    @classmethod
    def zero(cls) -> "WeilDivisor":
        return cls(())

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int | Fraction]) -> "WeilDivisor":
        return cls(tuple((i, as_rational(c)) for i, c in mapping.items()))

    @classmethod
    def from_labels(cls, model: SmoothModel, mapping: Mapping[str, int | Fraction]) -> "WeilDivisor":
        return cls.from_dict({model.index(lbl): c for lbl, c in mapping.items()})

    @classmethod
    def single(cls, i: int, c: int | Fraction = 1) -> "WeilDivisor":
        return cls.from_dict({i: c})

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def coefficient(self, i: int) -> Fraction:
        for j, c in self.coeffs:
            if j == i:
                return c
        return Fraction(0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WeilDivisor") -> "WeilDivisor":
        total = self.as_dict()
        for i, c in other.coeffs:
            total[i] = total.get(i, Fraction(0)) + c
        return WeilDivisor.from_dict(total)

    def __sub__(self, other: "WeilDivisor") -> "WeilDivisor":
        return self + (-1) * other

    def __rmul__(self, scalar: int | Fraction) -> "WeilDivisor":
        s = as_rational(scalar)
        return WeilDivisor.from_dict({i: s * c for i, c in self.coeffs})

    def __neg__(self) -> "WeilDivisor":
        return (-1) * self

    def drop(self, i: int) -> "WeilDivisor":
        return WeilDivisor(tuple((j, c) for j, c in self.coeffs if j != i))


@dataclass(frozen=True)
class PullbackResult:
    """A Mumford pull-back split into strict and exceptional parts.

    The defining property, checked after solving, is that the sum pairs to
    zero with every exceptional curve.
    """

    strict: tuple[tuple[int, Fraction], ...]
    exceptional: tuple[tuple[int, Fraction], ...]

    def full_vector(self, n: int) -> tuple[Fraction, ...]:
        vec = [Fraction(0)] * n
        for i, c in self.strict:
            vec[i] = c
        for i, c in self.exceptional:
            vec[i] = c
        return tuple(vec)

    def exceptional_dict(self) -> dict[int, Fraction]:
        return dict(self.exceptional)

    def strict_dict(self) -> dict[int, Fraction]:
        return dict(self.strict)


def _check_divisor_on_x(surface: NormalSurface, d: WeilDivisor) -> None:
    for i in d.support:
        if i >= surface.model.n:
            raise ValueError(f"divisor index {i} out of range")
        if surface.is_exceptional(i):
            raise ValueError(
                f"divisor has a coefficient on exceptional curve {surface.model.label(i)}; "
                "divisors on X live on non-exceptional curves"
            )


def mumford_pullback(surface: NormalSurface, d: WeilDivisor) -> PullbackResult:
    """Pull a divisor on X back to the smooth model in the sense of Mumford.

    For each cluster the exceptional coefficients are the unique exact
    solution of the orthogonality system; negative definiteness of the
    cluster matrix guarantees solvability and is re-checked here so that a
    bad cluster surfaces as :class:`InvalidClusterError` rather than a
    mysterious singular solve.
    """
    _check_divisor_on_x(surface, d)
    q = surface.model.matrix
    exceptional: dict[int, Fraction] = {}
    for cl in surface.clusters:
        members = cl.members
        rhs = []
        for j in members:
            pairing = sum(c * q[i, j] for i, c in d.coeffs)
            rhs.append(-pairing)
        if all(x == 0 for x in rhs):
            for i in members:
                exceptional[i] = Fraction(0)
            continue
        sub = q.submatrix(members)
        if not is_negative_definite(sub):
            labels = ", ".join(surface.model.label(i) for i in members)
            raise InvalidClusterError(f"cluster {{{labels}}} is not negative definite")
        alphas = solve_unique(sub, rhs)
        for i, a in zip(members, alphas):
            exceptional[i] = a
    return PullbackResult(strict=d.coeffs, exceptional=tuple(sorted(exceptional.items())))


def mumford_intersection(surface: NormalSurface, d1: WeilDivisor, d2: WeilDivisor) -> Fraction:
    """Exact intersection number of two divisors on X: pair the pull-backs on the model."""
    n = surface.model.n
    v = mumford_pullback(surface, d1).full_vector(n)
    w = mumford_pullback(surface, d2).full_vector(n)
    return surface.model.matrix.pair(v, w)


def canonical_intersection(surface: NormalSurface, boundary: Boundary, d: WeilDivisor) -> Fraction:
    """(K_X + Delta) . D in the sense of Mumford.

    Computed as (K_Y + strict transform of Delta) paired with the
    pull-back of D: the discrepancy correction term drops out because the
    pull-back is orthogonal to every exceptional curve.  K_Y degrees come
    from adjunction on the model.
    """
    model = surface.model
    v = mumford_pullback(surface, d).full_vector(model.n)
    total = Fraction(0)
    for i, vi in enumerate(v):
        if vi != 0:
            total += vi * model.k_degree(i)
    for j, c in boundary.coeffs:
        row = model.matrix.row(j)
        total += c * sum(row[i] * v[i] for i in range(model.n) if v[i] != 0)
    return total
