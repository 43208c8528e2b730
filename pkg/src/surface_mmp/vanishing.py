"""Hypothesis predicates for relative vanishing under a prospective contraction.

Given a line bundle by its degrees on the curves a bimeromorphic morphism
would contract, a Q-Cartier Weil divisor D, and the boundary, this module
evaluates, per contracted curve C, the quantity

    L . C + (D - (K+Delta)) . C

and the boundary-coefficient conditions, and reports which hypothesis
variant holds: variant 1 needs strict positivity with all boundary
coefficients at most one, variant 2 nonnegativity with all coefficients
strictly below one.  The vanishing of higher direct images is reported as
a cited consequence (relative Kawamata-Viehweg vanishing), never computed.
A companion report states which coefficient range holds for the induced
boundary on the smooth model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import Boundary, NormalSurface
from .mumford import WeilDivisor, canonical_intersection, mumford_intersection
from .singularities import discrepancies

__all__ = ["VanishingRow", "SmoothLevelRow", "VanishingReport", "check_vanishing_hypotheses"]

CONCLUSION = (
    "higher direct images of L(D) under the indicated contraction vanish "
    "(relative Kawamata-Viehweg vanishing, cited, not computed)"
)


@dataclass(frozen=True)
class VanishingRow:
    label: str
    l_degree: Fraction
    d_degree: Fraction
    kdelta_degree: Fraction

    @property
    def quantity(self) -> Fraction:
        return self.l_degree + self.d_degree - self.kdelta_degree


@dataclass(frozen=True)
class SmoothLevelRow:
    """One exceptional curve of the composite resolution, with its boundary coefficient."""

    label: str
    coefficient: Fraction
    n_degree: Fraction


@dataclass(frozen=True)
class VanishingReport:
    rows: tuple[VanishingRow, ...]
    max_boundary_coeff: Fraction
    variant1: bool
    variant2: bool
    verdict: str
    conclusion: str | None
    smooth_rows: tuple[SmoothLevelRow, ...]
    smooth_cases: tuple[bool, bool, bool]


def check_vanishing_hypotheses(
    surface: NormalSurface,
    boundary: Boundary,
    l_degrees: Mapping[int, int | Fraction],
    d_divisor: WeilDivisor,
    variant: int | None = None,
) -> VanishingReport:
    """Evaluate the vanishing hypotheses for the contraction of the given curves.

    ``l_degrees`` maps the indices of the curves to be contracted to the
    degrees of the line bundle on them.  When ``variant`` is 1 or 2 the
    verdict states whether that variant holds; otherwise the strongest
    applicable variant is reported, or "no conclusion".
    """
    model = surface.model
    rows = []
    for i, l_deg in sorted(l_degrees.items()):
        if surface.is_exceptional(i):
            raise ValueError(f"curve {model.label(i)} is already exceptional on the surface")
        c_div = WeilDivisor.single(i)
        rows.append(
            VanishingRow(
                label=model.label(i),
                l_degree=Fraction(l_deg),
                d_degree=mumford_intersection(surface, d_divisor, c_div),
                kdelta_degree=canonical_intersection(surface, boundary, c_div),
            )
        )
    max_coeff = max((c for _, c in boundary.coeffs), default=Fraction(0))
    variant1 = all(r.quantity > 0 for r in rows) and max_coeff <= 1
    variant2 = all(r.quantity >= 0 for r in rows) and max_coeff < 1

    if variant == 1:
        verdict = "variant 1 holds" if variant1 else "variant 1 fails"
        concluded = variant1
    elif variant == 2:
        verdict = "variant 2 holds" if variant2 else "variant 2 fails"
        concluded = variant2
    elif variant1:
        verdict, concluded = "variant 1 holds", True
    elif variant2:
        verdict, concluded = "variant 2 holds", True
    else:
        verdict, concluded = "no conclusion", False

    smooth_rows = _smooth_level_rows(surface, boundary, l_degrees, rows)
    coeffs = [r.coefficient for r in smooth_rows]
    n_positive = any(r.n_degree > 0 for r in smooth_rows)
    case1 = all(0 <= b < 1 for b in coeffs)
    case2 = all(0 < b <= 1 for b in coeffs) and any(b != 1 for b in coeffs)
    case3 = all(0 < b <= 1 for b in coeffs) and n_positive

    return VanishingReport(
        rows=tuple(rows),
        max_boundary_coeff=max_coeff,
        variant1=variant1,
        variant2=variant2,
        verdict=verdict,
        conclusion=CONCLUSION if concluded else None,
        smooth_rows=tuple(smooth_rows),
        smooth_cases=(case1, case2, case3),
    )


def _smooth_level_rows(
    surface: NormalSurface,
    boundary: Boundary,
    l_degrees: Mapping[int, int | Fraction],
    rows: tuple[VanishingRow, ...] | list[VanishingRow],
) -> list[SmoothLevelRow]:
    """Exceptional curves of the composite resolution over the contraction.

    Strict transforms of the contracted curves carry their boundary
    coefficients and the evaluated quantity as their nef part degree;
    members of clusters meeting a contracted curve carry minus their
    discrepancy and degree zero (pull-backs pair to zero with them).
    """
    model = surface.model
    q = model.matrix
    contracted = sorted(l_degrees)
    out = []
    quantity_by_index = {model.index(r.label): r.quantity for r in rows}
    for i in contracted:
        out.append(
            SmoothLevelRow(
                label=model.label(i),
                coefficient=boundary.coefficient(i),
                n_degree=quantity_by_index[i],
            )
        )
    seen = set()
    for cl in surface.clusters:
        if cl in seen:
            continue
        if any(q[i, j] > 0 for i in contracted for j in cl.members):
            seen.add(cl)
            a = discrepancies(surface, boundary, cl)
            for j, aj in zip(cl.members, a):
                out.append(SmoothLevelRow(label=model.label(j), coefficient=-aj, n_degree=Fraction(0)))
    return out
