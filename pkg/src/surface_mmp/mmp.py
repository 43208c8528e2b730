"""The minimal model program loop with ledger-certified termination.

Each step contracts a listed curve with negative (K+Delta)-degree and
negative self-intersection, always the most negative degree with ties
broken by label order, so identical inputs produce identical traces.  The
pulled-back class of every contracted curve is appended to a ledger of
vectors on the original smooth model and checked for linear independence,
which bounds the number of steps by the Picard number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import rational_rank
from .model import Boundary, NormalSurface
from .mumford import WeilDivisor, canonical_intersection, mumford_intersection, mumford_pullback
from .contraction import ContractionCertificate, contract

ENDPOINT_MINIMAL = "minimal_nef_on_list"
ENDPOINT_MORI_FIBER = "mori_fiber_indicated"
ENDPOINT_EXHAUSTED = "exhausted_candidates"

STRATEGY = "most-negative (K+Delta)-degree, ties by curve label"

__all__ = [
    "ENDPOINT_MINIMAL",
    "ENDPOINT_MORI_FIBER",
    "ENDPOINT_EXHAUSTED",
    "STRATEGY",
    "LedgerDependenceError",
    "NefRow",
    "NefReport",
    "MMPTrace",
    "nef_report",
    "run_mmp",
]


class LedgerDependenceError(Exception):
    """Pulled-back contracted classes became linearly dependent.

    This is an internal consistency failure that valid surface data cannot
    produce, so it is raised as a hard error rather than reported.
    """


@dataclass(frozen=True)
class NefRow:
    index: int
    label: str
    degree: Fraction
    self_int: Fraction


@dataclass(frozen=True)
class NefReport:
    """Exact (K+Delta)-degrees of every listed curve, with min and argmin.

    The verdict is curve-list relative: it says nothing about curves the
    model does not name.
    """

    rows: tuple[NefRow, ...]

    @property
    def all_nonnegative(self) -> bool:
        return all(r.degree >= 0 for r in self.rows)

    @property
    def min_degree(self) -> Fraction | None:
        return min((r.degree for r in self.rows), default=None)

    @property
    def argmin(self) -> NefRow | None:
        if not self.rows:
            return None
        return min(self.rows, key=lambda r: (r.degree, r.label))


@dataclass(frozen=True)
class MMPTrace:
    """Ordered record of contraction steps and the endpoint verdict."""

    steps: tuple[ContractionCertificate, ...]
    endpoint: str
    ledger: tuple[tuple[Fraction, ...], ...]
    final_surface: NormalSurface
    final_boundary: Boundary
    strategy: str = STRATEGY


def nef_report(surface: NormalSurface, boundary: Boundary) -> NefReport:
    rows = []
    for i in surface.nonexceptional_indices:
        d = WeilDivisor.single(i)
        rows.append(
            NefRow(
                index=i,
                label=surface.model.label(i),
                degree=canonical_intersection(surface, boundary, d),
                self_int=mumford_intersection(surface, d, d),
            )
        )
    return NefReport(tuple(rows))


def run_mmp(
    surface: NormalSurface,
    boundary: Boundary,
    candidate_support: frozenset[int] | set[int] | None = None,
) -> MMPTrace:
    """Run the contraction loop to one of the three endpoint verdicts.

    ``candidate_support``, when given, plays the role of the support of an
    effective pluricanonical member: only curves in it are contracted.
    Endpoints: ``minimal_nef_on_list`` when every listed curve has
    nonnegative degree; ``mori_fiber_indicated`` when a negative-degree
    curve with nonnegative self-intersection remains and no contractible
    negative curve is left anywhere on the list; ``exhausted_candidates``
    when contractible negative curves remain only outside the allowed
    support (a curve-list-relative verdict).
    """
    if candidate_support is not None:
        candidate_support = frozenset(candidate_support)
    current = surface
    current_boundary = boundary
    steps: list[ContractionCertificate] = []
    ledger: list[tuple[Fraction, ...]] = []
    n = surface.model.n

    while True:
        report = nef_report(current, current_boundary)
        negative = [r for r in report.rows if r.degree < 0]
        contractible = [r for r in negative if r.self_int < 0]
        in_scope = [
            r for r in contractible if candidate_support is None or r.index in candidate_support
        ]
        if not in_scope:
            if not negative:
                endpoint = ENDPOINT_MINIMAL
            elif any(r.self_int >= 0 for r in negative) and not contractible:
                endpoint = ENDPOINT_MORI_FIBER
            else:
                endpoint = ENDPOINT_EXHAUSTED
            return MMPTrace(
                steps=tuple(steps),
                endpoint=endpoint,
                ledger=tuple(ledger),
                final_surface=current,
                final_boundary=current_boundary,
            )

        pick = min(in_scope, key=lambda r: (r.degree, r.label))
        pulled = mumford_pullback(current, WeilDivisor.single(pick.index)).full_vector(n)
        current, current_boundary, cert = contract(current, current_boundary, pick.index)
        steps.append(cert)
        ledger.append(pulled)
        if rational_rank(ledger) != len(ledger):
            raise LedgerDependenceError(
                f"ledger became dependent after contracting {pick.label} at step {len(steps)}"
            )
        if len(steps) > n:
            raise LedgerDependenceError("step count exceeded the curve count; termination violated")
