"""Constructors for ruled-surface models, blow-ups, and the shipped presets.

The presets all start from the same geometry: a ruled surface over an
elliptic base curve twisted by a non-torsion degree-zero class, with both
sections and the fiber over one point blown up twice.  Contracting the two
elliptic sections and the resulting (-2)-fiber in various combinations
produces complete non-projective surfaces with trivial Picard group, with
Picard group of rank one, and (after extra general blow-ups) of any rank,
each shipped with its Picard ledger, restriction table, witness curves,
and expected results for golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .linalg import SymMatrix
from .model import Boundary, Cluster, Curve, NormalSurface, SmoothModel, SurfaceFlags, KODAIRA_NEG_INF
from .mumford import WeilDivisor
from .picard import PicClass, PicLedger, RestrictionTable
from .singularities import classify_all

__all__ = [
    "BadSiteError",
    "OnCurve",
    "AtIntersection",
    "GeneralPoint",
    "Preset",
    "ruled_over_curve",
    "blow_up",
    "blow_up_surface",
    "preset_pic_zero",
    "preset_pic_rank_one",
    "preset_pic_rank_n",
    "preset_smooth_model",
    "PRESET_NAMES",
    "build_preset",
]


class BadSiteError(Exception):
    """The requested blow-up center does not exist on the model."""


@dataclass(frozen=True)
class OnCurve:
    """A general point of one named curve, away from the other named curves."""

    label: str


@dataclass(frozen=True)
class AtIntersection:
    """A transverse intersection point of two named curves."""

    label_a: str
    label_b: str


@dataclass(frozen=True)
class GeneralPoint:
    """A point away from every named curve."""


BlowUpSite = OnCurve | AtIntersection | GeneralPoint


def ruled_over_curve(
    g: int,
    ledger: PicLedger,
    l_name: str,
    extra_fibers: tuple[str, ...] = (),
) -> SmoothModel:
    """The projectivized rank-two bundle O + L over a genus-g base curve.

    Sections C1 and C2 have self-intersections -d and d for d the ledger
    degree of ``l_name`` and are disjoint; F is the fiber over the marked
    point, and ``extra_fibers`` names fibers over further points (used by
    presets that blow up general points later).
    """
    d = ledger.degree(l_name)
    labels = ["C1", "C2", "F", *extra_fibers]
    curves = [
        Curve("C1", p_a=g, g_geom=g, base_link=ledger.name),
        Curve("C2", p_a=g, g_geom=g, base_link=ledger.name),
        Curve("F"),
    ] + [Curve(lbl) for lbl in extra_fibers]
    n = len(labels)
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = -d
    rows[1][1] = d
    for fi in range(2, n):
        rows[fi][fi] = 0
        rows[0][fi] = rows[fi][0] = 1
        rows[1][fi] = rows[fi][1] = 1
    return SmoothModel(curves=tuple(curves), matrix=SymMatrix(rows))


def blow_up(model: SmoothModel, site: BlowUpSite, new_label: str | None = None) -> SmoothModel:
    """Blow up one point and return the refined model.

    The exceptional curve E gets E^2 = -1 and p_a = 0; strict transforms
    lose 1 from their self-intersection for each passage through the
    center, and an intersection-point center separates the two curves.
    """
    if new_label is None:
        k = 1
        existing = {c.label for c in model.curves}
        while f"E{k}" in existing:
            k += 1
        new_label = f"E{k}"
    if any(c.label == new_label for c in model.curves):
        raise BadSiteError(f"label {new_label!r} already in use")

    n = model.n
    rows = [[model.matrix[i, j] for j in range(n)] for i in range(n)]
    new_row = [Fraction(0)] * n

    if isinstance(site, OnCurve):
        i = _index_or_bad(model, site.label)
        rows[i][i] -= 1
        new_row[i] = Fraction(1)
    elif isinstance(site, AtIntersection):
        i = _index_or_bad(model, site.label_a)
        j = _index_or_bad(model, site.label_b)
        if i == j:
            raise BadSiteError("intersection site needs two distinct curves")
        if model.matrix[i, j] < 1:
            raise BadSiteError(f"curves {site.label_a} and {site.label_b} do not meet")
        rows[i][i] -= 1
        rows[j][j] -= 1
        rows[i][j] -= 1
        rows[j][i] -= 1
        new_row[i] = Fraction(1)
        new_row[j] = Fraction(1)
    elif isinstance(site, GeneralPoint):
        pass
    else:
        raise BadSiteError(f"unknown site {site!r}")

    for r, extra in zip(rows, new_row):
        r.append(extra)
    rows.append(new_row + [Fraction(-1)])
    curves = model.curves + (Curve(new_label),)
    return SmoothModel(curves=curves, matrix=SymMatrix(rows), flags=model.flags)


def _index_or_bad(model: SmoothModel, label: str) -> int:
    try:
        return model.index(label)
    except KeyError as exc:
        raise BadSiteError(str(exc)) from None


def blow_up_surface(
    surface: NormalSurface, site: BlowUpSite, new_label: str | None = None
) -> NormalSurface:
    """Refine the resolution of a normal surface by one blow-up.

    The surface X itself is unchanged; the new exceptional curve joins the
    cluster it sits over, or forms a singleton cluster over a smooth point
    of X when the center avoids the existing exceptional set.  Point
    records are dropped (the caller reclassifies if needed).
    """
    new_model = blow_up(surface.model, site, new_label)
    e_index = new_model.n - 1

    touched: list[int] = []
    if isinstance(site, OnCurve):
        touched = [surface.model.index(site.label)]
    elif isinstance(site, AtIntersection):
        touched = [surface.model.index(site.label_a), surface.model.index(site.label_b)]

    host = None
    for t in touched:
        cl = surface.cluster_of(t)
        if cl is not None:
            if host is not None and host != cl:
                raise BadSiteError("center claims to lie on two distinct exceptional fibers")
            host = cl
    if host is not None:
        clusters = tuple(cl for cl in surface.clusters if cl != host) + (
            Cluster(host.members + (e_index,)),
        )
    else:
        clusters = surface.clusters + (Cluster((e_index,)),)
    return NormalSurface(model=new_model, clusters=clusters, flags=surface.flags)


@dataclass
class Preset:
    """A fully populated example surface with its Picard apparatus.

    ``generator_names`` orders the class generators as (kind, name) pairs
    with kind "base" or "curve"; ``realization`` sends each generator to
    its numerical class on the smooth model (degree-zero ledger classes
    realize to zero, which is exactly what numerical equivalence forgets).
    ``expectations`` holds the declared results the golden tests pin.
    """

    name: str
    surface: NormalSurface
    boundary: Boundary
    ledger: PicLedger
    table: RestrictionTable
    generator_names: tuple[tuple[str, str], ...]
    realization: dict[tuple[str, str], dict[str, int]] = field(default_factory=dict)
    witnesses: dict[str, WeilDivisor] = field(default_factory=dict)
    curve_pullback_classes: dict[str, PicClass] = field(default_factory=dict)
    expectations: dict[str, object] = field(default_factory=dict)

    @property
    def generator_classes(self) -> tuple[tuple[tuple[str, str], PicClass], ...]:
        out = []
        for kind, name in self.generator_names:
            cls_ = PicClass.make({name: 1}, None) if kind == "base" else PicClass.make(None, {name: 1})
            out.append(((kind, name), cls_))
        return tuple(out)

    def divisor(self, mapping: Mapping[str, int | Fraction]) -> WeilDivisor:
        return WeilDivisor.from_labels(self.surface.model, mapping)

    def realize(self, cls_: PicClass) -> dict[str, Fraction]:
        """Numerical class of a PicClass on the smooth model, as label -> coefficient."""
        out: dict[str, Fraction] = {}
        for kind, pairs in (("base", cls_.base), ("curve", cls_.curves)):
            for gen, coeff in pairs:
                vec = self.realization.get((kind, gen))
                if vec is None:
                    raise KeyError(f"no realization for generator ({kind}, {gen})")
                for lbl, v in vec.items():
                    out[lbl] = out.get(lbl, Fraction(0)) + coeff * v
        return {k: v for k, v in out.items() if v != 0}


def _standard_ledger() -> PicLedger:
    # P: the marked base point (degree 1); L: a non-torsion degree-zero class
    return PicLedger(generators=(("P", 1), ("L", 0)), name="C")


def _w_model(extra_fibers: tuple[str, ...] = ()) -> SmoothModel:
    """The twice-blown-up ruled surface: elliptic sections C1, C2; F becomes a (-2)-curve."""
    ledger = _standard_ledger()
    v = ruled_over_curve(1, ledger, "L", extra_fibers=extra_fibers)
    w = blow_up(v, AtIntersection("C1", "F"), "E1")
    w = blow_up(w, AtIntersection("C2", "F"), "E2")
    return w


def _w_restriction_table(extra_curve_gens: tuple[str, ...] = ()) -> RestrictionTable:
    """Restriction homomorphisms for the contractions of C1, C2, and F.

    Derived from the ruling: a pulled-back base class restricts to itself
    on either section; the bundle class pC1 restricts to -L on C1 and
    trivially on C2; each exceptional curve Ei meets the section Ci in the
    single point over P.  On the rational curve F only degrees survive:
    pulled-back classes of base degree m have degree m on the fiber, pC1
    and each Ei meet F once.
    """
    zero: dict[str, int] = {}
    sections = {
        "C1": {
            ("base", "P"): {"P": 1},
            ("base", "L"): {"L": 1},
            ("curve", "pC1"): {"L": -1},
            ("curve", "E1"): {"P": 1},
            ("curve", "E2"): zero,
            **{("curve", b): zero for b in extra_curve_gens},
        },
        "C2": {
            ("base", "P"): {"P": 1},
            ("base", "L"): {"L": 1},
            ("curve", "pC1"): zero,
            ("curve", "E1"): zero,
            ("curve", "E2"): {"P": 1},
            **{("curve", b): zero for b in extra_curve_gens},
        },
    }
    degrees = {
        "F": {
            ("base", "P"): 1,
            ("base", "L"): 0,
            ("curve", "pC1"): 1,
            ("curve", "E1"): 1,
            ("curve", "E2"): 1,
            **{("curve", b): 0 for b in extra_curve_gens},
        }
    }
    return RestrictionTable.make(sections=sections, degrees=degrees)


def _w_realization(extra_curve_gens: tuple[str, ...] = ()) -> dict[tuple[str, str], dict[str, int]]:
    real = {
        ("base", "P"): {"F": 1, "E1": 1, "E2": 1},  # total transform of the fiber over P
        ("base", "L"): {},  # degree zero: numerically trivial
        ("curve", "pC1"): {"C1": 1, "E1": 1},  # total transform of the section
        ("curve", "E1"): {"E1": 1},
        ("curve", "E2"): {"E2": 1},
    }
    for b in extra_curve_gens:
        real[("curve", b)] = {b: 1}
    return real


_W_GENS: tuple[tuple[str, str], ...] = (
    ("base", "P"),
    ("base", "L"),
    ("curve", "pC1"),
    ("curve", "E1"),
    ("curve", "E2"),
)

# class of the (-2)-fiber F as a combination of the generators
_CLASS_F = PicClass.make({"P": 1}, {"E1": -1, "E2": -1})
# class of the total transform C2 + E2 of the second section
_CLASS_PC2 = PicClass.make({"L": 1}, {"pC1": 1})


def _nonprojective_flags() -> SurfaceFlags:
    return SurfaceFlags(
        projective=False,
        moishezon=True,
        fujiki=True,
        q_factorial=False,
        rational_sings=False,
        kodaira_dim=0,
    )


def preset_pic_zero() -> Preset:
    """Contract both elliptic sections and the (-2)-fiber: Pic becomes trivial.

    The result has two simple elliptic points, one A1 point, numerically
    trivial canonical class, and trivial Picard group, hence is a complete
    non-projective surface.
    """
    model = _w_model()
    surface = NormalSurface(
        model=model,
        clusters=(
            Cluster((model.index("C1"),)),
            Cluster((model.index("C2"),)),
            Cluster((model.index("F"),)),
        ),
        flags=_nonprojective_flags(),
    )
    boundary = Boundary.zero()
    surface = classify_all(surface, boundary)
    ledger = _standard_ledger()
    preset = Preset(
        name="pic-zero",
        surface=surface,
        boundary=boundary,
        ledger=ledger,
        table=_w_restriction_table(),
        generator_names=_W_GENS,
        realization=_w_realization(),
        witnesses={"Ebar1": WeilDivisor.from_labels(model, {"E1": 1})},
        curve_pullback_classes={
            # twice the Mumford pull-back of each image curve, expressed in the generators
            "E1": PicClass.make({"P": 1}, {"pC1": 2, "E1": -1, "E2": -1}),
            "E2": PicClass.make({"P": 1, "L": 2}, {"pC1": 2, "E1": -1, "E2": -1}),
        },
        expectations={
            "cluster_status": {"C1": "lc_simple_elliptic", "C2": "lc_simple_elliptic", "F": "dlt_rational"},
            "cluster_discrepancies": {"C1": (Fraction(-1),), "C2": (Fraction(-1),), "F": (Fraction(0),)},
            "pic_rank": 0,
            "canonical_degree": Fraction(0),
            "q_factorial_via_ledger": False,
        },
    )
    return preset


def preset_pic_rank_one() -> Preset:
    """Resolve only the A1 point: Pic is generated by the (-2)-curve.

    Two simple elliptic points remain; the exceptional (-2)-curve E (the
    old fiber F) generates the Picard group, and the nef cone inside its
    span is the origin.
    """
    model = _w_model()
    surface = NormalSurface(
        model=model,
        clusters=(
            Cluster((model.index("C1"),)),
            Cluster((model.index("C2"),)),
        ),
        flags=_nonprojective_flags(),
    )
    boundary = Boundary.zero()
    surface = classify_all(surface, boundary)
    preset = Preset(
        name="pic-rank-one",
        surface=surface,
        boundary=boundary,
        ledger=_standard_ledger(),
        table=_w_restriction_table(),
        generator_names=_W_GENS,
        realization=_w_realization(),
        witnesses={"Ebar1": WeilDivisor.from_labels(model, {"E1": 1})},
        curve_pullback_classes={
            "E1": PicClass.make(None, {"pC1": 1}),
            "E2": _CLASS_PC2,
            "F": _CLASS_F,
        },
        expectations={
            "cluster_status": {"C1": "lc_simple_elliptic", "C2": "lc_simple_elliptic"},
            "pic_rank": 1,
            "pic_generator": _CLASS_F,
            "e_self_intersection": Fraction(-2),
            "nef_cone_is_zero": True,
            "mmp_steps": 0,
            "mmp_endpoint": "minimal_nef_on_list",
            "q_factorial_via_ledger": False,
        },
    )
    return preset


def preset_pic_rank_n(rho: int) -> Preset:
    """Blow up rho - 1 general points of the rank-one surface.

    Picard rank becomes rho, the nef cone degenerates to the origin, and
    running the contraction loop with empty boundary undoes exactly the
    rho - 1 general blow-ups.
    """
    if rho < 2:
        raise ValueError("rho must be at least 2")
    k = rho - 1
    fiber_labels = tuple(f"F{i}" for i in range(1, k + 1))
    b_labels = tuple(f"B{i}" for i in range(1, k + 1))
    model = _w_model(extra_fibers=fiber_labels)
    for fl, bl in zip(fiber_labels, b_labels):
        # the blown-up point lies on the fiber through it and off every other named curve
        model = blow_up(model, OnCurve(fl), bl)
    surface = NormalSurface(
        model=model,
        clusters=(
            Cluster((model.index("C1"),)),
            Cluster((model.index("C2"),)),
        ),
        flags=_nonprojective_flags(),
    )
    boundary = Boundary.zero()
    surface = classify_all(surface, boundary)
    witnesses = {"Ebar1": WeilDivisor.from_labels(model, {"E1": 1})}
    for fl in fiber_labels:
        witnesses[f"{fl}bar"] = WeilDivisor.from_labels(model, {fl: 1})
    pullbacks = {
        "E1": PicClass.make(None, {"pC1": 1}),
        "E2": _CLASS_PC2,
        "F": _CLASS_F,
    }
    for bl in b_labels:
        pullbacks[bl] = PicClass.make(None, {bl: 1})
    preset = Preset(
        name="pic-rank-n",
        surface=surface,
        boundary=boundary,
        ledger=_standard_ledger(),
        table=_w_restriction_table(extra_curve_gens=b_labels),
        generator_names=_W_GENS + tuple(("curve", bl) for bl in b_labels),
        realization=_w_realization(extra_curve_gens=b_labels),
        witnesses=witnesses,
        curve_pullback_classes=pullbacks,
        expectations={
            "pic_rank": rho,
            "nef_cone_is_zero": True,
            "mmp_steps": k,
            "mmp_endpoint": "minimal_nef_on_list",
            "mmp_contracted": b_labels,
            "k_degrees": {
                **{bl: Fraction(-1) for bl in b_labels},
                **{fl: Fraction(1) for fl in fiber_labels},
                "F": Fraction(0),
                "E1": Fraction(0),
                "E2": Fraction(0),
            },
            "q_factorial_via_ledger": False,
        },
    )
    return preset


def preset_smooth_model() -> Preset:
    """The smooth projective model itself, with no contractions.

    Useful as the projective starting point: running the contraction loop
    with empty boundary undoes the two exceptional curves and then stops
    at the ruling, whose fiber class is negative for K with vanishing
    self-intersection.
    """
    model = _w_model()
    surface = NormalSurface(
        model=model,
        clusters=(),
        flags=SurfaceFlags(
            projective=True,
            q_factorial=True,
            rational_sings=True,
            kodaira_dim=KODAIRA_NEG_INF,
        ),
    )
    boundary = Boundary.zero()
    surface = classify_all(surface, boundary)
    preset = Preset(
        name="smooth-model",
        surface=surface,
        boundary=boundary,
        ledger=_standard_ledger(),
        table=_w_restriction_table(),
        generator_names=_W_GENS,
        realization=_w_realization(),
        witnesses={"Ebar1": WeilDivisor.from_labels(model, {"E1": 1})},
        expectations={
            "mmp_endpoint": "mori_fiber_indicated",
            "mmp_contracted": ("E1", "E2"),
            "k_degrees": {
                "C1": Fraction(1),
                "C2": Fraction(1),
                "E1": Fraction(-1),
                "E2": Fraction(-1),
                "F": Fraction(0),
            },
        },
    )
    return preset


PRESET_NAMES = ("pic-zero", "pic-rank-one", "pic-rank-n", "smooth-model")


def build_preset(name: str, rho: int | None = None) -> Preset:
    if name == "pic-zero":
        return preset_pic_zero()
    if name == "pic-rank-one":
        return preset_pic_rank_one()
    if name == "pic-rank-n":
        return preset_pic_rank_n(rho if rho is not None else 3)
    if name == "smooth-model":
        return preset_smooth_model()
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
