"""The built-in systems: the hat monotile family and the hexagon family.

The hat prototile is a 13-vertex polygon interpolating linearly between a
chevron (c = 0) and a comet (c = 1); its substitution is driven by an
8-map level at depth 1 and 7-map levels above, all contracting by the
inverse square of the golden mean.  The hexagon system surrounds a central
half-scale copy with six radial copies whose offsets shrink dyadically.

All constructors return exact data; closed forms for the recurring anchor
points come with brute-force counterparts so they can be cross-checked
address by address.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import (
    GOLDEN_CONTRACTION,
    GOLDEN_MEAN,
    P_I,
    P_ZERO,
    PlanePoint,
    Q_ONE,
    QuarticScalar,
    ROT,
    SQRT3,
    SQRT5,
    fib,
)
from .geometry import Polygon, point_in_polygon
from .sifs import (
    AddressedTile,
    IFSLevel,
    PlaneMap,
    SIFSFamily,
    apply_ifs,
    family_distance,
    supertile,
    tile_transform,
)

#: the classic hat parameter 1 / (1 + sqrt3), exactly (sqrt3 - 1) / 2
DEFAULT_HAT_C = QuarticScalar(Fraction(-1, 2), Fraction(1, 2))

_PHI = GOLDEN_CONTRACTION


def _pt(re: QuarticScalar | int, im: QuarticScalar | int = 0) -> PlanePoint:
    return PlanePoint(re, im)


def hat_vertices(c: QuarticScalar) -> tuple[PlanePoint, ...]:
    """The 13 published hat vertices, in order, duplicates retained."""
    u = Q_ONE - c
    s3 = SQRT3
    v3 = _pt(u * s3, u * 3)
    crown = _pt(c * 3, c * 3 * s3)
    right = _pt(c * 3, c * s3)
    return (
        P_ZERO,
        _pt(0, 2),
        v3,
        v3 + _pt(-c, c * s3),
        v3 + _pt(c, c * 3 * s3),
        v3 + crown,
        _pt(u * s3, u) + crown,
        _pt(u * 2 * s3, 0) + crown,
        _pt(u * 2 * s3, 0) + _pt(c * 2, c * 2 * s3),
        _pt(u * 2 * s3, 0) + right,
        _pt(u * s3, -u) + right,
        right,
        _pt(c * 2, 0),
    )


def hat_prototile(c: QuarticScalar) -> Polygon:
    """Hat tile for the homotopy parameter c in [0, 1].

    At the endpoints coinciding consecutive vertices collapse, so the
    vertex count of the returned polygon may be below 13.
    """
    if c.sign() < 0 or (c - Q_ONE).sign() > 0:
        raise ValueError("hat parameter must lie in [0, 1]")
    return Polygon(hat_vertices(c))


# Translation templates for the hat levels.  Each entry gives the rotation
# sextant and the real/imaginary parts of the translation of f_i at level n
# as a sum of terms coeff * fib(2n + offset), with offset None marking a
# plain constant; the whole sum is then scaled by phi**n.
def _hat_terms(c: QuarticScalar) -> dict[int, tuple[int, list, list]]:
    u = Q_ONE - c
    s3u = SQRT3 * u
    s3c = SQRT3 * c
    return {
        1: (0, [], []),
        2: (
            5,
            [(s3u, 2), (s3u * -2, None), (c * 3, -1), (c * -3, None)],
            [(u * 3, -1), (s3c * 2, 1), (s3c, -1), (-s3c, None)],
        ),
        3: (
            4,
            [(s3u * 3, 1), (s3u * -3, None), (c * 6, -1), (c * 3, 1), (c * -6, None)],
            [(u * -3, -2), (u * 3, None), (s3c * 3, 1)],
        ),
        4: (
            2,
            [(s3u * 2, 1), (c * 6, 2), (c * -3, None)],
            [(u * -6, 1), (u * 6, None), (s3c * -2, -1), (s3c * 3, None)],
        ),
        5: (
            1,
            [(s3u, 0), (s3u, None), (c * 9, 0)],
            [(u * -3, -1), (u * -3, 1), (u * 3, None), (-s3c, -1), (-s3c, 1), (s3c * 2, None)],
        ),
        6: (
            0,
            [(s3u, 0), (s3u, -2), (c * 3, 0), (c * 3, -2)],
            [(u * -3, -1), (s3c, -1)],
        ),
        7: (
            0,
            [(s3u, 1), (s3u, -1), (c * 3, 1), (c * 3, -1)],
            [(u * -3, 0), (s3c, 0)],
        ),
    }


def _eval_terms(terms: list, n: int) -> QuarticScalar:
    total = QuarticScalar()
    for coeff, offset in terms:
        if offset is None:
            total = total + coeff
        else:
            total = total + coeff * fib(2 * n + offset)
    return total


def _fib_limit(offset: int) -> QuarticScalar:
    """Limit of phi**n * fib(2n + offset): golden mean ** offset / sqrt5."""
    return GOLDEN_MEAN**offset * SQRT5 * Fraction(1, 5)


def _eval_terms_limit(terms: list) -> QuarticScalar:
    total = QuarticScalar()
    for coeff, offset in terms:
        if offset is not None:
            total = total + coeff * _fib_limit(offset)
    return total


def hat_level(n: int, c: QuarticScalar) -> IFSLevel:
    """Level n of the hat system, exact.

    The reflected eighth map exists only at depth 1; above it index 8
    aliases index 6 and is excluded from enumeration.
    """
    if n < 1:
        raise ValueError("levels are indexed from 1")
    terms = _hat_terms(c)
    phi_n = _PHI**n
    maps = []
    for i in range(1, 8):
        sextant, re_terms, im_terms = terms[i]
        trans = PlanePoint(_eval_terms(re_terms, n), _eval_terms(im_terms, n)) * phi_n
        maps.append(PlaneMap(_PHI, sextant, False, trans))
    if n == 1:
        u = Q_ONE - c
        t8 = PlanePoint(SQRT3 * u * 2 + c * 6, SQRT3 * c * 4) * _PHI
        maps.append(PlaneMap(_PHI, 0, True, t8))
        effective = tuple(range(1, 9))
    else:
        maps.append(maps[5])
        effective = tuple(range(1, 8))
    return IFSLevel(tuple(maps), _PHI, effective)


def hat_limit(c: QuarticScalar) -> IFSLevel:
    """Uniform limit of the hat levels, exact in the field.

    Fibonacci terms converge through the golden-mean power rule and the
    constant terms vanish with phi**n.
    """
    terms = _hat_terms(c)
    maps = []
    for i in range(1, 8):
        sextant, re_terms, im_terms = terms[i]
        trans = PlanePoint(_eval_terms_limit(re_terms), _eval_terms_limit(im_terms))
        maps.append(PlaneMap(_PHI, sextant, False, trans))
    maps.append(maps[5])
    return IFSLevel(tuple(maps), _PHI, tuple(range(1, 8)))


def _hat_bound_coefficient(c: QuarticScalar) -> float:
    """B such that the level-to-limit map distance is at most B * phi**n."""
    worst = 0.0
    inv_s5 = 1.0 / float(SQRT5)
    for sextant, re_terms, im_terms in _hat_terms(c).values():
        total = 0.0
        for terms in (re_terms, im_terms):
            for coeff, offset in terms:
                magnitude = abs(float(coeff))
                if offset is None:
                    total += magnitude
                else:
                    total += magnitude * float(GOLDEN_MEAN) ** (-offset) * inv_s5
        worst = max(worst, total)
    return worst


@lru_cache(maxsize=None)
def hat_family(c: QuarticScalar = DEFAULT_HAT_C) -> SIFSFamily:
    """The hat SIFS family at parameter c, memoised per exact parameter."""
    prototile = hat_prototile(c)
    limit = hat_limit(c)
    coefficient = _hat_bound_coefficient(c)
    phi = float(_PHI)
    level_one_gap: list[float] = []

    def bound(n: int) -> float:
        if n < 1:
            raise ValueError("levels are indexed from 1")
        if n == 1:
            # the reflected map makes the analytic template inapplicable;
            # the exact distance itself is the tightest valid bound
            if not level_one_gap:
                level_one_gap.append(
                    family_distance(hat_level(1, c), limit) + 1e-9
                )
            return max(level_one_gap[0], coefficient * phi)
        return coefficient * phi**n

    return SIFSFamily(
        name="hat",
        arity=8,
        prototiles=(prototile,),
        level_fn=lambda n: hat_level(n, c),
        limit=limit,
        bound_fn=bound,
        param_label=f"c={c}",
    )


# -- anchor points and their closed forms -------------------------------------


def p_closed(n: int, c: QuarticScalar) -> PlanePoint:
    """Rightmost anchor of the all-sevens branch at depth n, closed form."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    u = Q_ONE - c
    f_re = fib(2 * n + 2) + fib(2 * n) - 1
    f_im = fib(2 * n + 1) - 1
    v8 = hat_vertices(c)[7]
    shift = PlanePoint(
        SQRT3 * u * f_re + c * 3 * f_re,
        u * -3 * f_im + SQRT3 * c * f_im,
    )
    return (v8 + shift) * _PHI**n


def q_closed(n: int, c: QuarticScalar) -> PlanePoint:
    """Base-corner anchor of the 4-then-ones branch at depth n, closed form."""
    if n < 1:
        raise ValueError("n must be at least 1")
    u = Q_ONE - c
    re = SQRT3 * u * 2 * fib(2 * n + 1) + c * 3 * (2 * fib(2 * n + 2) - 1)
    im = u * -6 * (fib(2 * n + 1) - 1) - SQRT3 * c * (2 * fib(2 * n - 1) - 3)
    return PlanePoint(re, im) * _PHI**n


def p_bruteforce(n: int, c: QuarticScalar) -> PlanePoint:
    """The same anchor evaluated through the composed tile map."""
    if n == 0:
        return hat_vertices(c)[7]
    return tile_transform(hat_family(c), (7,) * n).apply(hat_vertices(c)[7])


def q_bruteforce(n: int, c: QuarticScalar) -> PlanePoint:
    if n < 1:
        raise ValueError("n must be at least 1")
    return tile_transform(hat_family(c), (4,) + (1,) * (n - 1)).apply(P_ZERO)


def _mid45_offset(c: QuarticScalar) -> PlanePoint:
    """Midpoint of vertices 4 and 5 on the prototile, as an offset from 0."""
    verts = hat_vertices(c)
    half = QuarticScalar(Fraction(1, 2))
    return (verts[3] + verts[4]) * half


def derived_translations(n: int, c: QuarticScalar) -> dict[int, PlanePoint]:
    """Level-(n + 1) translations reconstructed from the anchor points.

    The chain walks the two anchor closed forms around the cluster contact
    points and the prototile midpoint geometry; it shares no coefficient
    tables with hat_level, so exact agreement is a genuine cross-check.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    phi = _PHI
    phi_n1 = phi ** (n + 1)
    p_n = p_closed(n, c)
    p_prev = p_closed(n - 1, c)
    q_n = q_closed(n, c)
    mid = _mid45_offset(c)

    t6 = p_n * phi - mid * phi_n1
    t7 = t6 + p_n * phi - p_prev * (phi * phi)
    corner_741 = q_n * phi + t7
    f4_at_p = corner_741 + (ROT[2] * mid) * phi_n1
    t4 = f4_at_p - (ROT[2] * p_n) * phi
    t5 = f4_at_p - (ROT[1] * q_n) * phi
    t2 = p_n * phi - (ROT[5] * q_n) * phi
    f2_at_p = (ROT[5] * p_n) * phi + t2
    t3 = f2_at_p - (ROT[4] * q_n) * phi
    return {2: t2, 3: t3, 4: t4, 5: t5, 6: t6, 7: t7}


def clusters(c: QuarticScalar) -> tuple[list[AddressedTile], list[AddressedTile]]:
    """The 8-tile cluster and the 7-tile cluster (without the index-1 tile)."""
    level = hat_level(1, c)
    root = AddressedTile((), PlaneMap.identity(), 0)
    h8 = apply_ifs(level, [root])
    h7 = [t for t in h8 if t.address != (1,)]
    return h8, h7


class IdentityReport:
    """Outcome of the exact contact-point identities at one depth."""

    def __init__(self):
        self.checks: list[tuple[str, bool]] = []

    def record(self, name: str, ok: bool):
        self.checks.append((name, ok))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def failures(self) -> list[str]:
        return [name for name, ok in self.checks if not ok]


def intersection_identities(
    n: int,
    c: QuarticScalar,
    family: SIFSFamily | None = None,
    check_supports: bool | None = None,
) -> IdentityReport:
    """Exact verification of the three forced contact-point identities.

    Each identity equates two images of the anchor points under adjacent
    level-(n + 1) maps.  When ``check_supports`` is enabled (automatic for
    small n) the named point is also located, at tile granularity, on each
    of the three sub-collections meeting there.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    fam = family or hat_family(c)
    level = fam.level(n + 1)
    p_n = p_closed(n, c)
    q_n = q_closed(n, c)
    report = IdentityReport()
    triples = (
        ("f1(p)=f2(q)", 1, 2, (1, 2, 6)),
        ("f4(p)=f5(q)", 4, 5, (4, 5, 7)),
        ("f2(p)=f3(q)", 2, 3, (2, 3, 6)),
    )
    points = []
    for name, ip, iq, prefixes in triples:
        lhs = level.maps[ip - 1].apply(p_n)
        rhs = level.maps[iq - 1].apply(q_n)
        report.record(name, lhs == rhs)
        points.append((lhs, prefixes))
    if check_supports is None:
        check_supports = n <= 3
    if check_supports:
        tiles = supertile(fam, n + 1)
        proto = fam.prototiles[0]
        proto_floats = proto.float_vertices()
        for (point, prefixes), (name, _, _, _) in zip(points, triples):
            target = point.approx()
            for prefix in prefixes:
                hit = False
                for t in tiles:
                    if t.address[0] != prefix:
                        continue
                    a, refl, tr = t.transform.affine_floats()
                    img = a * (np.conj(proto_floats) if refl else proto_floats) + tr
                    pad = 1e-9
                    if not (
                        img.real.min() - pad <= target.real <= img.real.max() + pad
                        and img.imag.min() - pad <= target.imag <= img.imag.max() + pad
                    ):
                        continue
                    poly = Polygon([t.transform.apply(v) for v in proto.vertices])
                    if point_in_polygon(point, poly) >= 0:
                        hit = True
                        break
                report.record(f"{name} on branch {prefix}", hit)
    return report


# -- the hexagon system --------------------------------------------------------


def hex_prototile() -> Polygon:
    """Regular hexagon, circumradius 1, one vertex on the positive x-axis.

    With this orientation the flat sides face the six radial directions of
    the level offsets, so adjacent half-scale copies are just touching.
    """
    return Polygon(list(ROT))


def _hex_steps(n: int) -> int:
    # floor(3 * 2**(n-2) - 1/2)
    return 1 if n == 1 else 3 * 2 ** (n - 2) - 1


_HALF_Q = QuarticScalar(Fraction(1, 2))


def hex_level(n: int) -> IFSLevel:
    """Level n of the hexagon system: one central and six radial copies."""
    if n < 1:
        raise ValueError("levels are indexed from 1")
    magnitude = SQRT3 * Fraction(_hex_steps(n), 2**n)
    maps = [PlaneMap(_HALF_Q, 0, False, P_ZERO)]
    for k in range(2, 8):
        direction = P_I * ROT[(k - 2) % 6]
        maps.append(PlaneMap(_HALF_Q, 0, False, direction * magnitude))
    return IFSLevel(tuple(maps), _HALF_Q)


def hex_limit() -> IFSLevel:
    magnitude = SQRT3 * Fraction(3, 4)
    maps = [PlaneMap(_HALF_Q, 0, False, P_ZERO)]
    for k in range(2, 8):
        direction = P_I * ROT[(k - 2) % 6]
        maps.append(PlaneMap(_HALF_Q, 0, False, direction * magnitude))
    return IFSLevel(tuple(maps), _HALF_Q)


@lru_cache(maxsize=None)
def hex_family() -> SIFSFamily:
    sqrt3 = float(SQRT3)
    return SIFSFamily(
        name="hex",
        arity=7,
        prototiles=(hex_prototile(),),
        level_fn=hex_level,
        limit=hex_limit(),
        bound_fn=lambda n: sqrt3 / 2**n,
    )


def hex_lattice_membership(center: PlanePoint, depth: int) -> bool:
    """Whether a tile center sits on the depth lattice, exactly.

    Centers must be integer combinations of the two unit steps at 90 and 30
    degrees scaled by sqrt3 / 2**depth: writing the center as
    unit * (alpha * i + beta * e^{i pi/6}), both coordinates must be
    integers.
    """
    unit = SQRT3 * Fraction(1, 2**depth)
    beta = center.re * 2 / (unit * SQRT3)
    if not beta.is_integer():
        return False
    alpha = center.im / unit - beta * Fraction(1, 2)
    return alpha.is_integer()


def hex_separation_ok(n: int) -> tuple[bool, str]:
    """Check the radial gap rule for the level-n placement.

    The nearest tile of the first radial supertile must be exactly
    max(0, n - 2) tile widths away from the central tile, measured on the
    common lattice.  Returns (ok, detail).
    """
    fam = hex_family()
    tiles = [t for t in supertile(fam, n) if t.address[0] == 2]
    centers = [t.transform.translation for t in tiles]
    expected_count = max(0, n - 2)
    unit = SQRT3 * Fraction(1, 2**n)
    expected = PlanePoint(QuarticScalar(), unit * (expected_count + 1))
    norms = [p.norm_sq() for p in centers]
    smallest = norms[0]
    for nn in norms[1:]:
        if (nn - smallest).sign() < 0:
            smallest = nn
    if (expected.norm_sq() - smallest).sign() != 0:
        return False, f"n={n}: nearest radial tile is not {expected_count} widths out"
    if expected not in centers:
        return False, f"n={n}: expected nearest center missing from the lattice axis"
    return True, f"n={n}: separation {expected_count} confirmed"


SYSTEM_NAMES = ("hat", "hex")


def get_family(name: str, c: QuarticScalar | None = None) -> SIFSFamily:
    """Registry lookup; the parameter applies to the hat system only."""
    if name == "hat":
        return hat_family(c if c is not None else DEFAULT_HAT_C)
    if name == "hex":
        if c is not None:
            raise ValueError("the hexagon system takes no parameter")
        return hex_family()
    raise ValueError(f"unknown system {name!r}; pick one of {SYSTEM_NAMES}")
