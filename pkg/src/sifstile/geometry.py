"""Exact polygon support: transforms, area, coincidence and overlap classes.

Tiles are simple polygons with field coordinates, so every predicate used by
overlap processing is decided by exact sign computations.  Floating point
appears only as a screening layer (bounding boxes, spatial hashing) whose
rejections are backed by a safety margin far above the conversion error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import PlanePoint, Q_HALF, QuarticScalar, point_key
from .sifs import AddressedTile, PlaneMap, compose, invert


class OverlapClass(enum.Enum):
    DISJOINT = "disjoint"
    BOUNDARY_ONLY = "boundary_only"
    COINCIDENT = "coincident"
    PARTIAL = "partial"


class Polygon:
    """Simple polygon, counterclockwise, vertices in the plane field.

    Consecutive duplicate vertices (including across the closing edge) are
    collapsed; a clockwise input is reversed.  Simplicity is the caller's
    contract except at degenerate parameter endpoints and can be checked
    explicitly with :meth:`is_simple`.
    """

    __slots__ = ("vertices", "area", "_canon", "_hash")

    def __init__(self, vertices: Sequence[PlanePoint]):
        verts: list[PlanePoint] = []
        for v in vertices:
            if not verts or v != verts[-1]:
                verts.append(v)
        while len(verts) > 1 and verts[0] == verts[-1]:
            verts.pop()
        if len(verts) < 3:
            raise ValueError("polygon needs at least three distinct vertices")
        twice = QuarticScalar()
        for i, a in enumerate(verts):
            b = verts[(i + 1) % len(verts)]
            twice = twice + (a.re * b.im - b.re * a.im)
        s = twice.sign()
        if s == 0:
            raise ValueError("degenerate polygon with zero area")
        if s < 0:
            verts.reverse()
            twice = -twice
        self.vertices: tuple[PlanePoint, ...] = tuple(verts)
        self.area: QuarticScalar = twice * Q_HALF
        self._canon: tuple | None = None
        self._hash: int | None = None

    def edges(self) -> Iterable[tuple[PlanePoint, PlanePoint]]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def canonical_cycle(self) -> tuple:
        """Vertex cycle rotated to start at the key-least vertex."""
        if self._canon is None:
            keys = [point_key(v) for v in self.vertices]
            start = keys.index(min(keys))
            cycle = self.vertices[start:] + self.vertices[:start]
            self._canon = tuple(point_key(v) for v in cycle)
        return self._canon

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.canonical_cycle() == other.canonical_cycle()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.canonical_cycle())
        return self._hash

    def float_vertices(self) -> np.ndarray:
        return np.array([v.approx() for v in self.vertices], dtype=np.complex128)

    def diameter_float(self) -> float:
        pts = self.float_vertices()
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    def contains_point(self, pt: PlanePoint) -> int:
        """+1 strictly inside, 0 on the boundary, -1 strictly outside."""
        return point_in_polygon(pt, self)

    def is_simple(self) -> bool:
        """Exact O(n^2) self-intersection test, meant for validation."""
        n = len(self.vertices)
        for i in range(n):
            a, b = self.vertices[i], self.vertices[(i + 1) % n]
            for j in range(i + 1, n):
                c, d = self.vertices[j], self.vertices[(j + 1) % n]
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    shared = b if j == i + 1 else a
                    other = (c, d) if j == i + 1 else (a, b)
                    far = d if j == i + 1 else b
                    del other, far
                    # adjacent edges may only meet at the shared vertex
                    pts = _segment_common_points(a, b, c, d)
                    if any(p != shared for p in pts) or _collinear_overlap(a, b, c, d):
                        return False
                    continue
                if _segment_common_points(a, b, c, d) or _collinear_overlap(a, b, c, d):
                    return False
        return True


def transform_polygon(m: PlaneMap, p: Polygon) -> Polygon:
    """Exact image polygon; orientation is re-normalised after a reflection."""
    return Polygon([m.apply(v) for v in p.vertices])


def area(p: Polygon) -> QuarticScalar:
    return p.area


def _orient(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> int:
    """Sign of the cross product (b - a) x (c - a)."""
    ab = b - a
    ac = c - a
    return (ab.re * ac.im - ab.im * ac.re).sign()


def _on_segment(pt: PlanePoint, a: PlanePoint, b: PlanePoint) -> bool:
    """Whether pt lies on the closed segment [a, b]."""
    if _orient(a, b, pt) != 0:
        return False
    d = b - a
    t = (pt - a).re * d.re + (pt - a).im * d.im
    if t.sign() < 0:
        return False
    return (d.norm_sq() - t).sign() >= 0


def _collinear_overlap(a, b, c, d) -> bool:
    """Whether collinear segments [a,b] and [c,d] share more than a point."""
    if _orient(a, b, c) != 0 or _orient(a, b, d) != 0:
        return False
    pts = [p for p in (c, d) if _on_segment(p, a, b)]
    pts += [p for p in (a, b) if _on_segment(p, c, d)]
    uniq = []
    for p in pts:
        if all(p != q for q in uniq):
            uniq.append(p)
    return len(uniq) >= 2


def _segment_common_points(a, b, c, d) -> list[PlanePoint]:
    """All isolated common points of [a,b] and [c,d], exact.

    A proper crossing yields the interior point, touches yield the touching
    endpoint, and collinear overlaps yield the two extreme shared points.
    """
    o1 = _orient(c, d, a)
    o2 = _orient(c, d, b)
    o3 = _orient(a, b, c)
    o4 = _orient(a, b, d)
    if o1 == o2 == 0:
        # collinear: shared endpoints of the overlap, if any
        pts = [p for p in (c, d) if _on_segment(p, a, b)]
        pts += [p for p in (a, b) if _on_segment(p, c, d)]
        uniq: list[PlanePoint] = []
        for p in pts:
            if all(p != q for q in uniq):
                uniq.append(p)
        return uniq
    if o1 * o2 < 0 and o3 * o4 < 0:
        dir_ab = b - a
        dir_cd = d - c
        denom = dir_ab.re * dir_cd.im - dir_ab.im * dir_cd.re
        t_num = (c - a).re * dir_cd.im - (c - a).im * dir_cd.re
        t = t_num / denom
        return [PlanePoint(a.re + dir_ab.re * t, a.im + dir_ab.im * t)]
    out = []
    for p, (u, v) in ((a, (c, d)), (b, (c, d)), (c, (a, b)), (d, (a, b))):
        if _on_segment(p, u, v) and all(p != q for q in out):
            out.append(p)
    return out


def point_in_polygon(pt: PlanePoint, poly: Polygon) -> int:
    """Exact location: +1 inside, 0 on the boundary, -1 outside.

    Crossing parity of the horizontal ray toward +x, with the half-open
    vertex rule; boundary membership is decided first.
    """
    crossings = 0
    for a, b in poly.edges():
        if _on_segment(pt, a, b):
            return 0
        ya = (a.im - pt.im).sign()
        yb = (b.im - pt.im).sign()
        if ya == yb:
            continue
        # orient the edge upward and count it when pt.im is in [low, high)
        lo, hi = (a, b) if ya < yb else (b, a)
        lo_side = (lo.im - pt.im).sign()
        hi_side = (hi.im - pt.im).sign()
        if lo_side > 0 or hi_side <= 0:
            continue
        if _orient(lo, hi, pt) > 0:
            crossings += 1
    return 1 if crossings % 2 else -1


def _edge_split_midpoints(edge_a, edge_b, other: Polygon) -> list[PlanePoint]:
    """Midpoints of the pieces of [edge_a, edge_b] cut by the other boundary."""
    params: list[QuarticScalar] = []
    d = edge_b - edge_a
    nsq = d.norm_sq()

    def param_of(p: PlanePoint) -> QuarticScalar:
        rel = p - edge_a
        return (rel.re * d.re + rel.im * d.im) / nsq

    cuts: list[PlanePoint] = []
    for c, e in other.edges():
        cuts.extend(_segment_common_points(edge_a, edge_b, c, e))
    for v in other.vertices:
        if _on_segment(v, edge_a, edge_b):
            cuts.append(v)
    params = [param_of(p) for p in cuts]
    zero = QuarticScalar()
    one = QuarticScalar(Fraction(1))
    params += [zero, one]
    params.sort()
    mids = []
    for t0, t1 in zip(params, params[1:]):
        if (t1 - t0).sign() <= 0:
            continue
        tm = (t0 + t1) * Q_HALF
        mids.append(PlanePoint(edge_a.re + d.re * tm, edge_a.im + d.im * tm))
    return mids


def classify_overlap(p: Polygon, q: Polygon) -> OverlapClass:
    """Exact classification of how two simple polygons meet.

    coincident: equal vertex cycles.  partial: the interiors share area.
    boundary_only: the boundaries touch but the interiors are disjoint.
    Interior sharing is witnessed by a vertex strictly inside the other
    polygon, a proper edge crossing, or a boundary piece whose midpoint is
    strictly interior once all mutual cut points are inserted; for tiles of
    a common prototile these cases are exhaustive.
    """
    if p == q:
        return OverlapClass.COINCIDENT
    for v in p.vertices:
        if point_in_polygon(v, q) > 0:
            return OverlapClass.PARTIAL
    for v in q.vertices:
        if point_in_polygon(v, p) > 0:
            return OverlapClass.PARTIAL
    touching = False
    for a, b in p.edges():
        for c, d in q.edges():
            o1 = _orient(c, d, a)
            o2 = _orient(c, d, b)
            o3 = _orient(a, b, c)
            o4 = _orient(a, b, d)
            if o1 * o2 < 0 and o3 * o4 < 0:
                return OverlapClass.PARTIAL
            if not touching and _segment_common_points(a, b, c, d):
                touching = True
    for a, b in p.edges():
        for mid in _edge_split_midpoints(a, b, q):
            side = point_in_polygon(mid, q)
            if side > 0:
                return OverlapClass.PARTIAL
            if side == 0:
                touching = True
    for c, d in q.edges():
        for mid in _edge_split_midpoints(c, d, p):
            side = point_in_polygon(mid, p)
            if side > 0:
                return OverlapClass.PARTIAL
            if side == 0:
                touching = True
    return OverlapClass.BOUNDARY_ONLY if touching else OverlapClass.DISJOINT


def vertex_cloud(
    tiles: Iterable[AddressedTile],
    prototile: Polygon | Sequence[Polygon],
) -> list[PlanePoint]:
    """All transformed prototile vertices, deduplicated exactly.

    Order is deterministic: first occurrence while walking tiles in the
    given order and vertices in cycle order.
    """
    protos = (prototile,) if isinstance(prototile, Polygon) else tuple(prototile)
    seen: set[PlanePoint] = set()
    out: list[PlanePoint] = []
    for t in tiles:
        for v in protos[t.prototile].vertices:
            img = t.transform.apply(v)
            if img not in seen:
                seen.add(img)
                out.append(img)
    return out


def float_vertex_cloud(
    tiles: Sequence[AddressedTile],
    prototile: Polygon | Sequence[Polygon],
) -> np.ndarray:
    """Floating transformed vertices for metric estimates, no dedup."""
    protos = (prototile,) if isinstance(prototile, Polygon) else tuple(prototile)
    groups = []
    by_proto: dict[int, list[AddressedTile]] = {}
    for t in tiles:
        by_proto.setdefault(t.prototile, []).append(t)
    for idx, members in sorted(by_proto.items()):
        verts = protos[idx].float_vertices()
        a = np.empty(len(members), dtype=np.complex128)
        tr = np.empty(len(members), dtype=np.complex128)
        refl = np.empty(len(members), dtype=bool)
        for i, t in enumerate(members):
            ai, ri, ti = t.transform.affine_floats()
            a[i], refl[i], tr[i] = ai, ri, ti
        base = np.where(refl[:, None], np.conj(verts)[None, :], verts[None, :])
        groups.append((a[:, None] * base + tr[:, None]).ravel())
    return np.concatenate(groups) if groups else np.empty(0, dtype=np.complex128)


def prototile_symmetries(poly: Polygon) -> tuple[PlaneMap, ...]:
    """All sextant-compatible similarities mapping the polygon onto itself.

    Only symmetries expressible as a PlaneMap matter: any relative map
    between two tiles of the built systems is itself sextant-rotational, so
    other isometries can never identify two generated tiles.
    """
    from .algebra import ROT

    verts = poly.vertices
    n = len(verts)
    found: list[PlaneMap] = []

    def cdiv(w: PlanePoint, z: PlanePoint) -> PlanePoint:
        # complex division inside the field: w / z = w * conj(z) / |z|^2
        return w * z.conjugate() * z.norm_sq().inverse()

    def try_candidate(linear: PlanePoint, reflect: bool, image_of_v0: PlanePoint):
        for k in range(6):
            if linear == ROT[k]:
                anchor = verts[0].conjugate() if reflect else verts[0]
                translation = image_of_v0 - anchor.rotate(k)
                cand = PlaneMap(QuarticScalar(Fraction(1)), k, reflect, translation)
                mapped = Polygon([cand.apply(v) for v in verts])
                if mapped == poly:
                    found.append(cand)
                return

    base = verts[1] - verts[0]
    conj_base = base.conjugate()
    for offset in range(n):
        img0 = verts[offset]
        try_candidate(cdiv(verts[(offset + 1) % n] - img0, base), False, img0)
        try_candidate(cdiv(verts[(offset - 1) % n] - img0, conj_base), True, img0)
    return tuple(found)


# -- relative-position classification with caching ---------------------------


def _relative_map(t1: PlaneMap, t2: PlaneMap) -> PlaneMap:
    return compose(invert(t1), t2)


def _relative_floats(a1, r1, tr1, a2, r2, tr2) -> tuple[complex, bool, complex]:
    quot = a2 / a1
    rel_t = (tr2 - tr1) / a1
    if r1:
        quot = quot.conjugate()
        rel_t = rel_t.conjugate()
    return quot, r1 != r2, rel_t


def _float_key(rel: tuple[complex, bool, complex]) -> tuple:
    a, r, t = rel
    return (
        round(a.real, 7),
        round(a.imag, 7),
        r,
        round(t.real, 7),
        round(t.imag, 7),
    )


class OverlapOracle:
    """Classifies tile pairs through their relative placement.

    The class of overlap between two tiles depends only on the relative map
    between their transforms, so classifications are cached against the
    exact relative map.  The float-keyed layer screens recurring local
    configurations; every new key is confirmed by one exact classification.
    """

    def __init__(self, prototiles: Sequence[Polygon]):
        self.prototiles = tuple(prototiles)
        self._exact: dict[tuple, OverlapClass] = {}
        self._screen: dict[tuple, OverlapClass] = {}

    def classify_exact(self, t1: PlaneMap, p1: int, t2: PlaneMap, p2: int) -> OverlapClass:
        rel = _relative_map(t1, t2)
        key = (rel, p1, p2)
        got = self._exact.get(key)
        if got is None:
            moved = transform_polygon(rel, self.prototiles[p2])
            got = classify_overlap(self.prototiles[p1], moved)
            self._exact[key] = got
        return got

    def classify_screened(
        self,
        t1: PlaneMap,
        p1: int,
        t2: PlaneMap,
        p2: int,
        floats1: tuple[complex, bool, complex],
        floats2: tuple[complex, bool, complex],
    ) -> OverlapClass:
        rel_f = _relative_floats(*floats1, *floats2)
        key = (_float_key(rel_f), p1, p2)
        got = self._screen.get(key)
        if got is None:
            got = self.classify_exact(t1, p1, t2, p2)
            self._screen[key] = got
        elif got in (OverlapClass.PARTIAL, OverlapClass.COINCIDENT):
            # positives are always re-confirmed exactly for this pair
            got = self.classify_exact(t1, p1, t2, p2)
        return got


@dataclass
class SweepResult:
    """Contacts found by a pairwise sweep (disjoint pairs are not listed)."""

    boundary: list[tuple[int, int]]
    coincident: list[tuple[int, int]]
    partial: list[tuple[int, int]]

    def counts(self) -> dict[str, int]:
        return {
            "boundary_only": len(self.boundary),
            "coincident": len(self.coincident),
            "partial": len(self.partial),
        }


def _tile_float_data(tiles: Sequence[AddressedTile], protos: Sequence[Polygon]):
    verts = [p.float_vertices() for p in protos]
    affines = []
    boxes = np.empty((len(tiles), 4))
    anchors = np.empty(len(tiles), dtype=np.complex128)
    for i, t in enumerate(tiles):
        a, r, tr = t.transform.affine_floats()
        affines.append((a, r, tr))
        base = np.conj(verts[t.prototile]) if r else verts[t.prototile]
        img = a * base + tr
        boxes[i] = (img.real.min(), img.imag.min(), img.real.max(), img.imag.max())
        anchors[i] = tr
    return affines, boxes, anchors


_BBOX_MARGIN = 1e-9


def sweep_pairs(
    tiles: Sequence[AddressedTile],
    prototiles: Polygon | Sequence[Polygon],
    exact: bool = False,
    oracle: OverlapOracle | None = None,
    workers: int = 1,
) -> SweepResult:
    """Classify every touching pair within one collection.

    Spatial hashing on float anchors proposes candidate pairs; bounding
    boxes expanded by a safety margin certify the skipped ones as disjoint.
    With ``exact`` set, each surviving pair is classified through its exact
    relative map; otherwise recurring configurations are screened by a
    float key and positives re-confirmed exactly.
    """
    protos = (prototiles,) if isinstance(prototiles, Polygon) else tuple(prototiles)
    if oracle is None:
        oracle = OverlapOracle(protos)
    n = len(tiles)
    result = SweepResult([], [], [])
    if n < 2:
        return result
    affines, boxes, anchors = _tile_float_data(tiles, protos)
    diam = max(
        abs(affines[i][0]) for i in range(n)
    ) * max(p.diameter_float() for p in protos)
    pitch = 2.0 * diam + 1e-12
    cells: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        key = (int(anchors[i].real // pitch), int(anchors[i].imag // pitch))
        cells.setdefault(key, []).append(i)

    def candidates():
        for (cx, cy), members in sorted(cells.items()):
            for dx in (0, 1):
                for dy in (-1, 0, 1):
                    if dx == 0 and dy < 0:
                        continue
                    other = cells.get((cx + dx, cy + dy))
                    if other is None:
                        continue
                    if dx == 0 and dy == 0:
                        for ii in range(len(members)):
                            for jj in range(ii + 1, len(members)):
                                yield members[ii], members[jj]
                    else:
                        for i in members:
                            for j in other:
                                yield (i, j) if i < j else (j, i)

    def handle(i: int, j: int):
        bi, bj = boxes[i], boxes[j]
        if (
            bi[2] + _BBOX_MARGIN < bj[0]
            or bj[2] + _BBOX_MARGIN < bi[0]
            or bi[3] + _BBOX_MARGIN < bj[1]
            or bj[3] + _BBOX_MARGIN < bi[1]
        ):
            return
        ti, tj = tiles[i], tiles[j]
        if exact:
            cls = oracle.classify_exact(ti.transform, ti.prototile, tj.transform, tj.prototile)
        else:
            cls = oracle.classify_screened(
                ti.transform, ti.prototile, tj.transform, tj.prototile,
                affines[i], affines[j],
            )
        if cls is OverlapClass.BOUNDARY_ONLY:
            result.boundary.append((i, j))
        elif cls is OverlapClass.COINCIDENT:
            result.coincident.append((i, j))
        elif cls is OverlapClass.PARTIAL:
            result.partial.append((i, j))

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        pair_list = sorted(set(candidates()))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda ij: handle(*ij), pair_list))
        result.boundary.sort()
        result.coincident.sort()
        result.partial.sort()
    else:
        seen = set()
        for i, j in candidates():
            if (i, j) not in seen:
                seen.add((i, j))
                handle(i, j)
    return result


def sweep_bipartite(
    tiles_a: Sequence[AddressedTile],
    tiles_b: Sequence[AddressedTile],
    prototiles: Polygon | Sequence[Polygon],
    oracle: OverlapOracle | None = None,
) -> set[int]:
    """Indices of tiles in the first collection sharing area with the second.

    A positive-area contact means the exact class is partial or coincident.
    """
    protos = (prototiles,) if isinstance(prototiles, Polygon) else tuple(prototiles)
    if oracle is None:
        oracle = OverlapOracle(protos)
    if not tiles_a or not tiles_b:
        return set()
    aff_a, box_a, anch_a = _tile_float_data(tiles_a, protos)
    aff_b, box_b, anch_b = _tile_float_data(tiles_b, protos)
    diam = max(
        max(abs(a[0]) for a in aff_a), max(abs(a[0]) for a in aff_b)
    ) * max(p.diameter_float() for p in protos)
    pitch = 2.0 * diam + 1e-12
    cells_b: dict[tuple[int, int], list[int]] = {}
    for j in range(len(tiles_b)):
        key = (int(anch_b[j].real // pitch), int(anch_b[j].imag // pitch))
        cells_b.setdefault(key, []).append(j)
    hits: set[int] = set()
    for i in range(len(tiles_a)):
        cx = int(anch_a[i].real // pitch)
        cy = int(anch_a[i].imag // pitch)
        bi = box_a[i]
        ti = tiles_a[i]
        for dx in (-1, 0, 1):
            if i in hits:
                break
            for dy in (-1, 0, 1):
                if i in hits:
                    break
                for j in cells_b.get((cx + dx, cy + dy), ()):
                    bj = box_b[j]
                    if (
                        bi[2] + _BBOX_MARGIN < bj[0]
                        or bj[2] + _BBOX_MARGIN < bi[0]
                        or bi[3] + _BBOX_MARGIN < bj[1]
                        or bj[3] + _BBOX_MARGIN < bi[1]
                    ):
                        continue
                    tj = tiles_b[j]
                    cls = oracle.classify_exact(
                        ti.transform, ti.prototile, tj.transform, tj.prototile
                    )
                    if cls in (OverlapClass.PARTIAL, OverlapClass.COINCIDENT):
                        hits.add(i)
                        break
    return hits
