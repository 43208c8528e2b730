"""Data model for normal surfaces presented by resolution lattices.

A surface X is given by a smooth model Y (labeled curves with genera and a
symmetric integer intersection matrix) together with the disjoint clusters
of curves that the resolution Y -> X contracts.  Curves of X are the
non-exceptional curves of the model, represented by their strict
transforms.  Global analytic properties that the lattice cannot see
(projectivity, Moishezon-ness, and so on) live in tri-state flags, with
``None`` meaning "unknown".
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import SymMatrix, as_rational, is_negative_definite

TriState = bool | None

KODAIRA_NEG_INF = "-inf"
_KODAIRA_VALUES = (KODAIRA_NEG_INF, 0, 1, 2, None)

__all__ = [
    "TriState",
    "KODAIRA_NEG_INF",
    "InvalidSurfaceError",
    "InvalidClusterError",
    "InconsistentFlagsError",
    "Curve",
    "SurfaceFlags",
    "SmoothModel",
    "Cluster",
    "NormalSurface",
    "Boundary",
    "Violation",
    "ValidationReport",
    "validate",
    "validate_boundary",
    "infer_flags",
]


class InvalidSurfaceError(Exception):
    """Surface data violates a structural invariant needed by an operation."""


class InvalidClusterError(InvalidSurfaceError):
    """A contraction cluster is not negative definite or not connected."""


class InconsistentFlagsError(Exception):
    """Flag inference derived both true and false for the same flag."""


@dataclass(frozen=True)
class Curve:
    """A labeled curve on the smooth model.

    ``p_a`` is the arithmetic genus and ``g_geom`` the geometric genus
    (defaults to ``p_a``); they differ for singular curves, e.g. a nodal
    rational curve has p_a = 1, g_geom = 0.  ``base_link`` names a ledger
    identity when the curve is identified with the base curve of a ruling,
    which is what makes Picard restrictions to it meaningful.
    """

    label: str
    p_a: int = 0
    g_geom: int | None = None
    base_link: str | None = None

    def __post_init__(self) -> None:
        if self.g_geom is None:
            object.__setattr__(self, "g_geom", self.p_a)
        if not self.label:
            raise ValueError("curve label must be nonempty")
        if self.p_a < 0 or self.g_geom < 0:
            raise ValueError(f"curve {self.label}: genera must be nonnegative")
        if self.g_geom > self.p_a:
            raise ValueError(f"curve {self.label}: geometric genus exceeds arithmetic genus")


@dataclass(frozen=True)
class SurfaceFlags:
    """Tri-state global flags plus the declared Kodaira dimension.

    The flags record one-directional knowledge, so "unknown" is an honest
    state.  Construction closes the upward implications that are always
    valid: projective forces Moishezon and Fujiki class, Moishezon forces
    Fujiki class.  ``kodaira_dim`` is declared metadata and never computed
    by the engine (section rings are out of scope).
    """

    projective: TriState = None
    moishezon: TriState = None
    fujiki: TriState = None
    q_factorial: TriState = None
    rational_sings: TriState = None
    kodaira_dim: int | str | None = None

    def __post_init__(self) -> None:
        if self.kodaira_dim not in _KODAIRA_VALUES:
            raise ValueError(f"kodaira_dim must be one of {_KODAIRA_VALUES}")
        if self.projective is True:
            if self.moishezon is False or self.fujiki is False:
                raise InconsistentFlagsError("projective surface declared non-Moishezon or non-Fujiki")
            object.__setattr__(self, "moishezon", True)
            object.__setattr__(self, "fujiki", True)
        if self.moishezon is True:
            if self.fujiki is False:
                raise InconsistentFlagsError("Moishezon surface declared outside Fujiki class")
            object.__setattr__(self, "fujiki", True)

    def replace(self, **kw) -> "SurfaceFlags":
        return replace(self, **kw)


@dataclass(frozen=True)
class SmoothModel:
    """The resolution-level ground truth: curves and their intersection matrix."""

    curves: tuple[Curve, ...]
    matrix: SymMatrix
    flags: SurfaceFlags = field(default_factory=SurfaceFlags)

    def __post_init__(self) -> None:
        object.__setattr__(self, "curves", tuple(self.curves))
        if self.matrix.n != len(self.curves):
            raise ValueError("matrix dimension does not match curve count")
        labels = [c.label for c in self.curves]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate curve labels")

    @property
    def n(self) -> int:
        return len(self.curves)

    def index(self, label: str) -> int:
        for i, c in enumerate(self.curves):
            if c.label == label:
                return i
        raise KeyError(f"no curve labeled {label!r}")

    def label(self, i: int) -> str:
        return self.curves[i].label

    def k_degree(self, i: int) -> Fraction:
        """K_Y . C_i by adjunction: 2 p_a - 2 - C_i^2.

        The canonical class is never stored as a divisor; this derived
        degree is the only way K_Y enters any computation.
        """
        return Fraction(2 * self.curves[i].p_a - 2) - self.matrix[i, i]


@dataclass(frozen=True)
class Cluster:
    """A prospective exceptional fiber: a nonempty set of curve indices.

    Validity (connected dual graph, negative definite intersection form)
    is checked by :func:`validate`, not at construction.
    """

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(sorted(set(self.members)))
        if not members:
            raise ValueError("cluster must be nonempty")
        if any(i < 0 for i in members):
            raise ValueError("cluster indices must be nonnegative")
        object.__setattr__(self, "members", members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class NormalSurface:
    """A smooth model plus the disjoint clusters its resolution contracts.

    ``point_records`` caches per-cluster singularity classifications in
    cluster order; it is populated by the singularities module and carried
    along immutably.
    """

    model: SmoothModel
    clusters: tuple[Cluster, ...] = ()
    point_records: tuple | None = None
    flags: SurfaceFlags = field(default_factory=SurfaceFlags)

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if self.point_records is not None:
            object.__setattr__(self, "point_records", tuple(self.point_records))

    @property
    def exceptional_indices(self) -> tuple[int, ...]:
        return tuple(sorted(i for cl in self.clusters for i in cl.members))

    @property
    def nonexceptional_indices(self) -> tuple[int, ...]:
        exc = set(self.exceptional_indices)
        return tuple(i for i in range(self.model.n) if i not in exc)

    def cluster_of(self, i: int) -> Cluster | None:
        for cl in self.clusters:
            if i in cl:
                return cl
        return None

    def is_exceptional(self, i: int) -> bool:
        return self.cluster_of(i) is not None


@dataclass(frozen=True)
class Boundary:
    """Rational coefficients in [0, 1] on non-exceptional curves (the divisor Delta)."""

    coeffs: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        canon = []
        seen = set()
        for i, c in self.coeffs:
            c = as_rational(c)
            if i in seen:
                raise ValueError(f"duplicate boundary coefficient for curve index {i}")
            seen.add(i)
            if not (0 <= c <= 1):
                raise ValueError(f"boundary coefficient {c} at index {i} outside [0, 1]")
            if c != 0:
                canon.append((i, c))
        object.__setattr__(self, "coeffs", tuple(sorted(canon)))

    @classmethod
    def zero(cls) -> "Boundary":
        return cls(())

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int | Fraction]) -> "Boundary":
        return cls(tuple((i, as_rational(c)) for i, c in mapping.items()))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def coefficient(self, i: int) -> Fraction:
        for j, c in self.coeffs:
            if j == i:
                return c
        return Fraction(0)

    def drop(self, i: int) -> "Boundary":
        return Boundary(tuple((j, c) for j, c in self.coeffs if j != i))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coeffs)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _connected(matrix: SymMatrix, members: Sequence[int]) -> bool:
    # dual graph: vertices = members, edge when the intersection number is positive
    if not members:
        return True
    remaining = set(members)
    stack = [members[0]]
    remaining.discard(members[0])
    while stack:
        i = stack.pop()
        for j in list(remaining):
            if matrix[i, j] > 0:
                remaining.discard(j)
                stack.append(j)
    return not remaining


def validate(surface: NormalSurface) -> ValidationReport:
    """Check every structural invariant of a surface presentation.

    Violations are returned, not raised; callers decide severity.  The
    checks are curve-list relative: whatever is not represented in the
    lattice cannot be checked here.
    """
    out: list[Violation] = []
    model = surface.model
    q = model.matrix

    for i in range(model.n):
        for j in range(model.n):
            if q[i, j].denominator != 1:
                out.append(Violation("nonintegral", f"matrix entry ({i},{j}) is not an integer", (i, j)))
            if i != j and q[i, j] < 0:
                out.append(
                    Violation(
                        "negative_offdiag",
                        f"distinct curves {model.label(i)}, {model.label(j)} have negative intersection",
                        (i, j),
                    )
                )

    seen: dict[int, int] = {}
    for k, cl in enumerate(surface.clusters):
        for i in cl.members:
            if i >= model.n:
                out.append(Violation("index_range", f"cluster {k} references curve index {i} out of range", (i,)))
            elif i in seen:
                out.append(
                    Violation(
                        "overlap",
                        f"curve {model.label(i)} appears in clusters {seen[i]} and {k}",
                        (i,),
                    )
                )
            else:
                seen[i] = k

    clusters = [cl for cl in surface.clusters if all(i < model.n for i in cl.members)]
    for k, cl in enumerate(clusters):
        if not _connected(q, cl.members):
            out.append(
                Violation(
                    "disconnected",
                    "cluster {" + ", ".join(model.label(i) for i in cl.members) + "} has a disconnected dual graph",
                    cl.members,
                )
            )
        if not is_negative_definite(q.submatrix(cl.members)):
            out.append(
                Violation(
                    "not_negative_definite",
                    "cluster {" + ", ".join(model.label(i) for i in cl.members) + "} fails negative definiteness",
                    cl.members,
                )
            )
    # distinct exceptional fibers live over distinct points, so they cannot meet
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            for i in clusters[a].members:
                for j in clusters[b].members:
                    if q[i, j] != 0:
                        out.append(
                            Violation(
                                "clusters_meet",
                                f"curves {model.label(i)} and {model.label(j)} of different clusters intersect",
                                (i, j),
                            )
                        )
    return ValidationReport(tuple(out))


def validate_boundary(surface: NormalSurface, boundary: Boundary) -> tuple[Violation, ...]:
    """Boundary must be supported on non-exceptional curves of the model."""
    out = []
    for i, _ in boundary.coeffs:
        if i >= surface.model.n:
            out.append(Violation("index_range", f"boundary index {i} out of range", (i,)))
        elif surface.is_exceptional(i):
            out.append(
                Violation(
                    "boundary_on_exceptional",
                    f"boundary coefficient on exceptional curve {surface.model.label(i)}",
                    (i,),
                )
            )
    return tuple(out)


# Statuses that certify rational singularities; the two non-rational
# log canonical classes; see the singularities module for how records
# are produced.
_RATIONAL_STATUSES = ("dlt_rational", "lc_rational_other")
_NON_RATIONAL_STATUSES = ("lc_simple_elliptic", "lc_cusp")


def _merge_flag(name: str, old: TriState, new: bool) -> bool:
    if old is not None and old != new:
        raise InconsistentFlagsError(f"rule derives {name}={new} but {name}={old} is already known")
    return new


def infer_flags(surface: NormalSurface, boundary: Boundary) -> SurfaceFlags:
    """Run the monotone flag-inference rules to a fixpoint.

    Rules (each a one-directional implication, so known flags are never
    downgraded):

    * rational singularities imply Q-factoriality;
    * Q-factorial and Moishezon imply projective;
    * Q-factorial, Fujiki class, and Kodaira dimension -inf imply projective;
    * log canonical, Fujiki class, and Kodaira dimension -inf imply projective;
    * Q-factorial with Kodaira dimension 2 implies projective.

    Rationality of the singularities is read off the point records when
    they are present: the two non-rational log canonical classes are the
    simple elliptic and cusp points, everything else classified log
    canonical is rational.
    """
    flags = surface.flags
    records = surface.point_records

    derived: dict[str, TriState] = {
        "projective": flags.projective,
        "moishezon": flags.moishezon,
        "fujiki": flags.fujiki,
        "q_factorial": flags.q_factorial,
        "rational_sings": flags.rational_sings,
    }
    kodaira = flags.kodaira_dim

    surface_lc: bool | None = None
    if records is not None:
        statuses = [rec.status for rec in records]
        surface_lc = all(s != "not_lc" for s in statuses)
        if any(s in _NON_RATIONAL_STATUSES for s in statuses):
            derived["rational_sings"] = _merge_flag("rational_sings", derived["rational_sings"], False)
        elif all(s in _RATIONAL_STATUSES for s in statuses):
            derived["rational_sings"] = _merge_flag("rational_sings", derived["rational_sings"], True)
    elif not surface.clusters:
        # no singular points at all
        derived["rational_sings"] = _merge_flag("rational_sings", derived["rational_sings"], True)
        surface_lc = True

    changed = True
    while changed:
        changed = False

        def fire(name: str, value: bool) -> None:
            nonlocal changed
            if derived[name] is None:
                derived[name] = value
                changed = True
            else:
                _merge_flag(name, derived[name], value)

        if derived["rational_sings"] is True:
            fire("q_factorial", True)
        if derived["q_factorial"] is True and derived["moishezon"] is True:
            fire("projective", True)
        if derived["q_factorial"] is True and derived["fujiki"] is True and kodaira == KODAIRA_NEG_INF:
            fire("projective", True)
        if surface_lc is True and derived["fujiki"] is True and kodaira == KODAIRA_NEG_INF:
            fire("projective", True)
        if derived["q_factorial"] is True and kodaira == 2:
            fire("projective", True)
        # closure rules
        if derived["projective"] is True:
            fire("moishezon", True)
            fire("fujiki", True)
        if derived["moishezon"] is True:
            fire("fujiki", True)

    return SurfaceFlags(kodaira_dim=kodaira, **derived)
