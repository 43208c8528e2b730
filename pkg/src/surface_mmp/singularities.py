"""Discrepancies and classification of the singular points of a surface.

For a cluster with members E_j, the discrepancies a_i solve

    sum_i a_i (E_i . E_j) = (K_Y + strict transform of Delta) . E_j

for every member E_j, where the K_Y degrees come from adjunction.  The
classification distinguishes exactly what the minimal model program needs:
numerically dlt points (rational), simple elliptic points and cusps (the
two non-rational log canonical classes), a rational catch-all for the
remaining log canonical combinatorics, and non log canonical points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import is_negative_definite, solve_unique
from .model import Boundary, Cluster, InvalidClusterError, NormalSurface

DLT_RATIONAL = "dlt_rational"
LC_SIMPLE_ELLIPTIC = "lc_simple_elliptic"
LC_CUSP = "lc_cusp"
LC_RATIONAL_OTHER = "lc_rational_other"
NOT_LC = "not_lc"

STATUSES = (DLT_RATIONAL, LC_SIMPLE_ELLIPTIC, LC_CUSP, LC_RATIONAL_OTHER, NOT_LC)

__all__ = [
    "DLT_RATIONAL",
    "LC_SIMPLE_ELLIPTIC",
    "LC_CUSP",
    "LC_RATIONAL_OTHER",
    "NOT_LC",
    "STATUSES",
    "PointRecord",
    "BoundaryViolation",
    "discrepancies",
    "classify_point",
    "classify_all",
    "check_boundary_compatibility",
]


@dataclass(frozen=True)
class PointRecord:
    """Classification of one singular point: cluster, discrepancies, status.

    ``discrepancies`` is aligned with ``cluster.members``.
    ``gorenstein_hint`` is true when all discrepancies are integers.
    """

    cluster: Cluster
    discrepancies: tuple[Fraction, ...]
    status: str
    gorenstein_hint: bool

    def __post_init__(self) -> None:
        if len(self.discrepancies) != len(self.cluster.members):
            raise ValueError("discrepancy vector length does not match cluster size")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        has_below = any(a < -1 for a in self.discrepancies)
        if (self.status == NOT_LC) != has_below:
            raise ValueError("status not_lc must hold exactly when some discrepancy is below -1")
        if self.status in (LC_SIMPLE_ELLIPTIC, LC_CUSP) and any(a != -1 for a in self.discrepancies):
            raise ValueError("simple elliptic and cusp points have all discrepancies equal to -1")

    def discrepancy_of(self, index: int) -> Fraction:
        return self.discrepancies[self.cluster.members.index(index)]


@dataclass(frozen=True)
class BoundaryViolation:
    boundary_index: int
    cluster: Cluster
    status: str
    message: str


def _cluster_system(surface: NormalSurface, boundary: Boundary, cluster: Cluster):
    model = surface.model
    q = model.matrix
    sub = q.submatrix(cluster.members)
    if not is_negative_definite(sub):
        labels = ", ".join(model.label(i) for i in cluster.members)
        raise InvalidClusterError(f"cluster {{{labels}}} is not negative definite")
    rhs = []
    for j in cluster.members:
        val = model.k_degree(j)
        for b, c in boundary.coeffs:
            val += c * q[b, j]
        rhs.append(val)
    return sub, rhs


def discrepancies(surface: NormalSurface, boundary: Boundary, cluster: Cluster) -> tuple[Fraction, ...]:
    """Exact discrepancy vector of the point contracted from ``cluster``."""
    sub, rhs = _cluster_system(surface, boundary, cluster)
    return solve_unique(sub, rhs)


def _is_rational_cycle(surface: NormalSurface, cluster: Cluster) -> bool:
    # cycle of rational curves: connected (cluster precondition), every
    # member meets the rest of the cluster with total multiplicity 2;
    # two curves meeting twice count as a cycle of length two
    members = cluster.members
    if len(members) < 2:
        return False
    model = surface.model
    if any(model.curves[i].p_a != 0 for i in members):
        return False
    q = model.matrix
    for i in members:
        if sum(q[i, j] for j in members if j != i) != 2:
            return False
    return True


def classify_point(surface: NormalSurface, boundary: Boundary, cluster: Cluster) -> PointRecord:
    """Classify the point obtained by contracting ``cluster``.

    Rules in order: any discrepancy below -1 means not log canonical; all
    strictly above -1 means numerically dlt, hence a rational point; all
    equal to -1 with a single smooth elliptic curve is a simple elliptic
    point; all equal to -1 with a cycle of rational curves or a single
    nodal rational curve is a cusp; anything else log canonical falls into
    the rational catch-all.
    """
    a = discrepancies(surface, boundary, cluster)
    model = surface.model
    if any(x < -1 for x in a):
        status = NOT_LC
    elif all(x > -1 for x in a):
        status = DLT_RATIONAL
    elif all(x == -1 for x in a):
        members = cluster.members
        single = len(members) == 1
        curve = model.curves[members[0]] if single else None
        if single and curve.p_a == 1 and curve.g_geom == 1:
            status = LC_SIMPLE_ELLIPTIC
        elif (single and curve.p_a == 1 and curve.g_geom == 0) or _is_rational_cycle(surface, cluster):
            status = LC_CUSP
        else:
            status = LC_RATIONAL_OTHER
    else:
        # log canonical, some (but not all) discrepancies equal to -1:
        # the dlt side conditions cannot be certified combinatorially,
        # and such points are rational
        status = LC_RATIONAL_OTHER
    gorenstein = all(x.denominator == 1 for x in a)
    return PointRecord(cluster=cluster, discrepancies=a, status=status, gorenstein_hint=gorenstein)


def classify_all(surface: NormalSurface, boundary: Boundary) -> NormalSurface:
    """Return the surface with ``point_records`` populated (in cluster order)."""
    records = tuple(classify_point(surface, boundary, cl) for cl in surface.clusters)
    return NormalSurface(
        model=surface.model,
        clusters=surface.clusters,
        point_records=records,
        flags=surface.flags,
    )


def check_boundary_compatibility(surface: NormalSurface, boundary: Boundary) -> tuple[BoundaryViolation, ...]:
    """Flag boundary components whose strict transform meets a non-rational point.

    A boundary curve with positive coefficient through a simple elliptic or
    cusp point is impossible on a log canonical pair, so such incidence is
    reported as a violation.  The simple elliptic / cusp statuses are
    intrinsic to the surface, so they are recomputed here with the zero
    boundary; classifying with the offending boundary would push the
    discrepancies below -1 and mask the point.
    """
    intrinsic = classify_all(surface, Boundary.zero())
    q = surface.model.matrix
    out = []
    for rec in intrinsic.point_records:
        if rec.status not in (LC_SIMPLE_ELLIPTIC, LC_CUSP):
            continue
        for b, c in boundary.coeffs:
            if c > 0 and any(q[b, j] > 0 for j in rec.cluster.members):
                labels = ", ".join(surface.model.label(j) for j in rec.cluster.members)
                out.append(
                    BoundaryViolation(
                        boundary_index=b,
                        cluster=rec.cluster,
                        status=rec.status,
                        message=(
                            f"boundary curve {surface.model.label(b)} meets the "
                            f"{rec.status} point over {{{labels}}}"
                        ),
                    )
                )
    return tuple(out)
