"""A single contraction step, with certificate checking and class descent.

A curve C on X with C^2 < 0 and (K+Delta).C < 0 (both Mumford numbers) can
be contracted; the resulting point is presented by the cluster consisting
of the strict transform of C together with every existing cluster meeting
it.  The step ships a certificate (the numbers that justified it plus the
classification of the new point) and propagates the global flags, which
transfer in both directions across such a contraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import is_negative_definite
from .model import Boundary, Cluster, NormalSurface, SurfaceFlags
from .mumford import WeilDivisor, canonical_intersection, mumford_intersection, mumford_pullback
from .singularities import DLT_RATIONAL, PointRecord, classify_point

__all__ = [
    "ContractionError",
    "RejectNonNegativeSelfInt",
    "RejectKDeltaNonNegative",
    "RejectClusterDegenerate",
    "UnrealizableContraction",
    "NotOrthogonalError",
    "ContractionCertificate",
    "validate_contraction",
    "contract",
    "descend_class",
]


class ContractionError(Exception):
    """Base class for contraction rejections."""

    code = "contraction_error"


class RejectNonNegativeSelfInt(ContractionError):
    """The candidate curve has Mumford self-intersection >= 0."""

    code = "self_intersection_nonnegative"


class RejectKDeltaNonNegative(ContractionError):
    """The candidate curve has (K+Delta)-degree >= 0."""

    code = "kdelta_degree_nonnegative"


class RejectClusterDegenerate(ContractionError):
    """Absorbing the candidate into the touched clusters degenerates the form."""

    code = "cluster_degenerate"


class UnrealizableContraction(ContractionError):
    """Numeric hypotheses hold but the conclusions of the contraction theorem fail.

    The theorem guarantees that the contracted curve is rational and the
    new point numerically dlt; input lattices violating that cannot come
    from an actual surface, so they are rejected rather than silently
    breaking downstream invariants.  This signals inconsistent model data,
    not an engine bug.
    """

    code = "unrealizable_contraction"


class NotOrthogonalError(ContractionError):
    """Class descent requires zero pairing with the contracted curve."""

    code = "not_orthogonal"


@dataclass(frozen=True)
class ContractionCertificate:
    """Everything that justified one contraction step."""

    curve: int
    label: str
    self_int: Fraction
    kdelta_deg: Fraction
    new_point: PointRecord
    flags_before: SurfaceFlags
    flags_after: SurfaceFlags


def _merged_cluster(surface: NormalSurface, c_index: int) -> tuple[Cluster, tuple[Cluster, ...]]:
    """The prospective cluster over the new point, plus the untouched clusters."""
    q = surface.model.matrix
    touched = []
    untouched = []
    for cl in surface.clusters:
        if any(q[c_index, j] > 0 for j in cl.members):
            touched.append(cl)
        else:
            untouched.append(cl)
    members = (c_index,) + tuple(i for cl in touched for i in cl.members)
    return Cluster(members), tuple(untouched)


def _theorem_guard(curve_p_a: int, label: str, new_point: PointRecord) -> None:
    if curve_p_a > 0:
        raise UnrealizableContraction(
            f"curve {label} satisfies the contraction hypotheses but has arithmetic genus {curve_p_a}; "
            "a contractible negative curve must be rational"
        )
    if new_point.status != DLT_RATIONAL:
        raise UnrealizableContraction(
            f"contracting {label} would produce a point classified {new_point.status}; "
            "the contraction theorem guarantees a numerically dlt point"
        )


def validate_contraction(surface: NormalSurface, boundary: Boundary, c_index: int) -> ContractionCertificate:
    """Check the contraction hypotheses for one curve and certify the step.

    Raises one of the Reject* errors when a hypothesis fails, or
    :class:`UnrealizableContraction` when the hypotheses hold but the
    theorem's conclusions do not (which coherent surface data can never
    trigger).
    """
    model = surface.model
    if c_index >= model.n:
        raise ValueError(f"curve index {c_index} out of range")
    if surface.is_exceptional(c_index):
        raise ValueError(f"curve {model.label(c_index)} is already exceptional")
    label = model.label(c_index)
    c_div = WeilDivisor.single(c_index)
    self_int = mumford_intersection(surface, c_div, c_div)
    merged, untouched = _merged_cluster(surface, c_index)
    if self_int > 0:
        raise RejectNonNegativeSelfInt(f"{label}^2 = {self_int} >= 0")
    if self_int == 0:
        # by the Schur complement, a zero Mumford self-intersection through
        # existing clusters is exactly a degenerate merged form
        if len(merged) > 1:
            raise RejectClusterDegenerate(
                f"absorbing {label} into its adjacent clusters degenerates the intersection form"
            )
        raise RejectNonNegativeSelfInt(f"{label}^2 = 0")
    kdelta = canonical_intersection(surface, boundary, c_div)
    if kdelta >= 0:
        raise RejectKDeltaNonNegative(f"(K+Delta).{label} = {kdelta} >= 0")

    # with self_int < 0 and negative definite blocks the merged form is
    # automatically negative definite; keep the check as a hard invariant
    if not is_negative_definite(model.matrix.submatrix(merged.members)):
        raise RejectClusterDegenerate(
            f"merged cluster around {label} is not negative definite"
        )

    new_boundary = boundary.drop(c_index)
    new_point = classify_point(surface, new_boundary, merged)
    _theorem_guard(model.curves[c_index].p_a, label, new_point)

    return ContractionCertificate(
        curve=c_index,
        label=label,
        self_int=self_int,
        kdelta_deg=kdelta,
        new_point=new_point,
        flags_before=surface.flags,
        flags_after=surface.flags,
    )


def contract(
    surface: NormalSurface, boundary: Boundary, c_index: int
) -> tuple[NormalSurface, Boundary, ContractionCertificate]:
    """Contract one curve and return the new surface, boundary, and certificate.

    The boundary is pushed forward by dropping the contracted coefficient.
    Projectivity, rational singularities, and Q-factoriality transfer in
    both directions across such a step, so all flags are carried over
    unchanged; point records of untouched clusters stay valid because
    clusters are disjoint and the dropped coefficient sat on the contracted
    curve only.
    """
    cert = validate_contraction(surface, boundary, c_index)
    merged, untouched = _merged_cluster(surface, c_index)
    new_boundary = boundary.drop(c_index)

    new_clusters = untouched + (merged,)
    new_records = None
    if surface.point_records is not None:
        by_cluster = {rec.cluster: rec for rec in surface.point_records}
        new_records = tuple(by_cluster[cl] for cl in untouched) + (cert.new_point,)

    new_surface = NormalSurface(
        model=surface.model,
        clusters=new_clusters,
        point_records=new_records,
        flags=cert.flags_after,
    )
    return new_surface, new_boundary, cert


def descend_class(surface: NormalSurface, cert: ContractionCertificate, divisor: WeilDivisor) -> WeilDivisor:
    """Push a numerical class orthogonal to the contracted curve down the step.

    The pull-back of the result on the contracted surface equals the
    pull-back of the input on the original surface, which is the round
    trip property tests pin down.
    """
    pairing = mumford_intersection(surface, divisor, WeilDivisor.single(cert.curve))
    if pairing != 0:
        raise NotOrthogonalError(
            f"class pairs to {pairing} with contracted curve {cert.label}; descent needs 0"
        )
    return divisor.drop(cert.curve)
