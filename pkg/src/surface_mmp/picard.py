"""Picard-group bookkeeping through contractions over a symbolic base ledger.

Pic of the base curve is modeled as a free abelian group with
degree-tagged generators; a degree-zero free generator stands for a
non-torsion degree-zero class, which is exactly the freeness the descent
arguments use.  Divisor classes are integer vectors over the ledger
generators plus designated curve generators of the smooth model.  A class
descends through a contraction precisely when its restriction to every
contracted curve is trivial: the zero ledger element on curves identified
with the base, degree zero on rational curves.  The group of descending
classes is the integer kernel of the stacked restriction homomorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cones import ConeDescription, cone_from_inequalities
from .linalg import integer_kernel
from .model import NormalSurface, SmoothModel
from .mumford import WeilDivisor, mumford_intersection

__all__ = [
    "MissingRestrictionError",
    "PicLedger",
    "PicClass",
    "RestrictionTable",
    "PicPresentation",
    "descends_through",
    "picard_of_contraction",
    "q_factorial_via_ledger",
    "NefConeResult",
    "nef_cone_in_span",
    "PositiveSectionReport",
    "check_positive_section",
]


class MissingRestrictionError(Exception):
    """A contracted curve has no restriction row in the table."""


@dataclass(frozen=True)
class PicLedger:
    """A free abelian group of degree-tagged generators modeling Pic of the base curve.

    ``generators`` is an ordered tuple of (name, degree) pairs.  Freeness
    is structural: there are no relations, so a degree-zero generator is
    automatically non-torsion.
    """

    generators: tuple[tuple[str, int], ...]
    name: str = "C"

    def __post_init__(self) -> None:
        names = [g for g, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate ledger generator names")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.generators)

    def degree(self, name: str) -> int:
        for g, d in self.generators:
            if g == name:
                return d
        raise KeyError(f"no ledger generator {name!r}")

    def degree_of(self, element: Mapping[str, int]) -> int:
        return sum(c * self.degree(g) for g, c in element.items())


def _canon_int_map(mapping: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((k, int(v)) for k, v in mapping.items() if v != 0))


@dataclass(frozen=True)
class PicClass:
    """An integer divisor class: base part over the ledger, curve part over designated generators."""

    base: tuple[tuple[str, int], ...] = ()
    curves: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", _canon_int_map(dict(self.base)))
        object.__setattr__(self, "curves", _canon_int_map(dict(self.curves)))

    @classmethod
    def make(cls, base: Mapping[str, int] | None = None, curves: Mapping[str, int] | None = None) -> "PicClass":
        return cls(tuple((base or {}).items()), tuple((curves or {}).items()))

    def coefficient(self, kind: str, name: str) -> int:
        pairs = self.base if kind == "base" else self.curves
        for g, c in pairs:
            if g == name:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self.base and not self.curves

    def __add__(self, other: "PicClass") -> "PicClass":
        base = dict(self.base)
        for g, c in other.base:
            base[g] = base.get(g, 0) + c
        curves = dict(self.curves)
        for g, c in other.curves:
            curves[g] = curves.get(g, 0) + c
        return PicClass.make(base, curves)

    def __rmul__(self, k: int) -> "PicClass":
        return PicClass.make({g: k * c for g, c in self.base}, {g: k * c for g, c in self.curves})

    def __neg__(self) -> "PicClass":
        return (-1) * self


@dataclass(frozen=True)
class RestrictionTable:
    """Restriction homomorphisms for the contracted curves.

    ``sections`` maps a contracted curve identified with the base to the
    ledger images of every class generator (ledger element per generator);
    ``degrees`` maps a contracted rational curve to the integer degree of
    every class generator.  Z-linearity is automatic because the maps are
    stored on generators; generator keys are pairs (kind, name) with kind
    "base" or "curve".
    """

    sections: tuple[tuple[str, tuple[tuple[tuple[str, str], tuple[tuple[str, int], ...]], ...]], ...] = ()
    degrees: tuple[tuple[str, tuple[tuple[tuple[str, str], int], ...]], ...] = ()

    @classmethod
    def make(
        cls,
        sections: Mapping[str, Mapping[tuple[str, str], Mapping[str, int]]] | None = None,
        degrees: Mapping[str, Mapping[tuple[str, str], int]] | None = None,
    ) -> "RestrictionTable":
        sec = tuple(
            sorted(
                (curve, tuple(sorted((gen, _canon_int_map(elt)) for gen, elt in rows.items())))
                for curve, rows in (sections or {}).items()
            )
        )
        deg = tuple(
            sorted(
                (curve, tuple(sorted((gen, int(v)) for gen, v in rows.items())))
                for curve, rows in (degrees or {}).items()
            )
        )
        return cls(sec, deg)

    def section_rows(self) -> dict[str, dict[tuple[str, str], dict[str, int]]]:
        return {curve: {gen: dict(elt) for gen, elt in rows} for curve, rows in self.sections}

    def degree_rows(self) -> dict[str, dict[tuple[str, str], int]]:
        return {curve: dict(rows) for curve, rows in self.degrees}

    @property
    def covered(self) -> frozenset[str]:
        return frozenset(c for c, _ in self.sections) | frozenset(c for c, _ in self.degrees)

    def restrict_to_section(self, curve: str, cls_: PicClass, ledger: PicLedger) -> dict[str, int]:
        rows = self.section_rows()[curve]
        out: dict[str, int] = {}
        for kind, pairs in (("base", cls_.base), ("curve", cls_.curves)):
            for gen, coeff in pairs:
                image = rows.get((kind, gen))
                if image is None:
                    raise MissingRestrictionError(
                        f"no restriction of generator ({kind}, {gen}) to curve {curve}"
                    )
                for name, v in image.items():
                    out[name] = out.get(name, 0) + coeff * v
        return {k: v for k, v in out.items() if v != 0}

    def restrict_to_degree(self, curve: str, cls_: PicClass) -> int:
        rows = self.degree_rows()[curve]
        total = 0
        for kind, pairs in (("base", cls_.base), ("curve", cls_.curves)):
            for gen, coeff in pairs:
                if (kind, gen) not in rows:
                    raise MissingRestrictionError(
                        f"no degree restriction of generator ({kind}, {gen}) to curve {curve}"
                    )
                total += coeff * rows[(kind, gen)]
        return total


def _contracted_curves(surface: NormalSurface) -> tuple[str, ...]:
    return tuple(surface.model.label(i) for i in surface.exceptional_indices)


def descends_through(
    surface: NormalSurface, cls_: PicClass, table: RestrictionTable, ledger: PicLedger
) -> bool:
    """True iff every restriction of the class to a contracted curve is trivial.

    Positive-genus contracted curves must carry a ledger-valued section
    row (there is no way to restrict to an abstract elliptic curve without
    one); rational contracted curves only need their degree functional.
    """
    sections = table.section_rows()
    degrees = table.degree_rows()
    for i in surface.exceptional_indices:
        label = surface.model.label(i)
        curve = surface.model.curves[i]
        if curve.p_a > 0 or curve.base_link is not None:
            if label not in sections:
                raise MissingRestrictionError(f"contracted curve {label} has no section restriction row")
            if table.restrict_to_section(label, cls_, ledger):
                return False
        else:
            if label not in degrees:
                raise MissingRestrictionError(f"contracted rational curve {label} has no degree row")
            if table.restrict_to_degree(label, cls_) != 0:
                return False
    return True


@dataclass(frozen=True)
class PicPresentation:
    """Rank and explicit generators of the subgroup of descending classes."""

    rank: int
    generators: tuple[PicClass, ...]
    kernel_vectors: tuple[tuple[int, ...], ...]
    generator_names: tuple[tuple[str, str], ...]


def picard_of_contraction(
    surface: NormalSurface,
    ledger: PicLedger,
    generator_classes: Sequence[tuple[tuple[str, str], PicClass]],
    table: RestrictionTable,
) -> PicPresentation:
    """Solve the integer descent conditions for the given generating classes.

    Stacks one integer row per (contracted curve, condition) and returns a
    basis of the kernel lattice, i.e. of the image of Pic of the
    contracted surface inside the span of the generators.  Freeness of the
    ledger makes the kernel torsion-free automatically.
    """
    names = tuple(name for name, _ in generator_classes)
    classes = tuple(c for _, c in generator_classes)
    rows: list[list[int]] = []
    sections = table.section_rows()
    degrees = table.degree_rows()
    for i in surface.exceptional_indices:
        label = surface.model.label(i)
        curve = surface.model.curves[i]
        if curve.p_a > 0 or curve.base_link is not None:
            if label not in sections:
                raise MissingRestrictionError(f"contracted curve {label} has no section restriction row")
            for ledger_name in ledger.names:
                rows.append(
                    [table.restrict_to_section(label, c, ledger).get(ledger_name, 0) for c in classes]
                )
        else:
            if label not in degrees:
                raise MissingRestrictionError(f"contracted rational curve {label} has no degree row")
            rows.append([table.restrict_to_degree(label, c) for c in classes])
    kernel = integer_kernel(rows, len(classes))
    gens = []
    for vec in kernel:
        total = PicClass.make()
        for coeff, c in zip(vec, classes):
            if coeff != 0:
                total = total + coeff * c
        gens.append(total)
    return PicPresentation(
        rank=len(kernel),
        generators=tuple(gens),
        kernel_vectors=tuple(kernel),
        generator_names=names,
    )


def q_factorial_via_ledger(
    surface: NormalSurface,
    ledger: PicLedger,
    table: RestrictionTable,
    curve_pullback_classes: Mapping[str, PicClass],
) -> bool | None:
    """Decide Q-factoriality through the ledger, when enough data is attached.

    ``curve_pullback_classes`` expresses, for listed curves of X, a
    positive multiple of the Mumford pull-back as an integer class over
    the generators.  A curve is Q-Cartier exactly when some multiple of
    that class descends, and over the free ledger a multiple descends iff
    the class itself does.  One failing curve decides False; a full set of
    passing curves decides True; anything less stays unknown (None).
    """
    if not surface.clusters:
        return True
    listed = [surface.model.label(i) for i in surface.nonexceptional_indices]
    any_missing = False
    for label in listed:
        cls_ = curve_pullback_classes.get(label)
        if cls_ is None:
            any_missing = True
            continue
        if not descends_through(surface, cls_, table, ledger):
            return False
    return None if any_missing else True


@dataclass(frozen=True)
class NefConeResult:
    """The nef cone inside a chosen rational span, as an exact halfspace intersection."""

    cone: ConeDescription
    pairings: tuple[tuple[Fraction, ...], ...]

    @property
    def is_zero(self) -> bool:
        return self.cone.is_zero


def nef_cone_in_span(
    surface: NormalSurface,
    span: Sequence[WeilDivisor],
    test_curves: Sequence[WeilDivisor],
) -> NefConeResult:
    """{D in the span : D . C >= 0 for every test curve C}, exactly.

    With an empty test set the whole span comes back.  The verdict is
    relative to the supplied test curves, which stand in for "every curve
    on X"; presets ship explicit witness curves for exactly this purpose.
    """
    pairings = tuple(
        tuple(mumford_intersection(surface, d, c) for d in span) for c in test_curves
    )
    cone = cone_from_inequalities(pairings, len(span))
    return NefConeResult(cone=cone, pairings=pairings)


@dataclass(frozen=True)
class PositiveSectionReport:
    """Numerical shadow of the positive-section contraction on a ruled surface.

    For P(O + A) with deg A = d the positive section has self-intersection
    d and meets the negative section in 0; the positive-section class is
    degree zero on the negative section and strictly positive on every
    other listed curve exactly when d > 0.
    """

    d: Fraction
    sections_orthogonal: bool
    degrees: tuple[tuple[str, Fraction], ...]
    positive_on_others: bool

    @property
    def ok(self) -> bool:
        return self.sections_orthogonal and self.positive_on_others


def check_positive_section(model: SmoothModel) -> PositiveSectionReport:
    """Check the section and fiber numerics of a ruled-surface model.

    Expects the labels C1 (negative section), C2 (positive section), and at
    least one fiber; d is read off as C2^2.
    """
    i_neg = model.index("C1")
    i_pos = model.index("C2")
    q = model.matrix
    d = q[i_pos, i_pos]
    degrees = []
    positive = True
    for i in range(model.n):
        if i == i_neg:
            continue
        value = q[i_pos, i]
        degrees.append((model.label(i), value))
        if value <= 0:
            positive = False
    return PositiveSectionReport(
        d=d,
        sections_orthogonal=(q[i_pos, i_neg] == 0),
        degrees=tuple(degrees),
        positive_on_others=positive,
    )
