"""Plane similarity maps, IFS levels, sequential IFS families and supertiles.

A level is an ordered list of equally contracting similarities; a family is
the rule assigning a level to each depth together with its uniform limit.
Depth-k tiles carry addresses whose first symbol selects a map from the
deepest level, so collections satisfy the one-step recursion
S_{k+1} = union of f_i(S_k) over the level k+1 maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    P_ZERO,
    PlanePoint,
    Q_ONE,
    QuarticScalar,
    ROT,
    float_approx,
)

Address = tuple[int, ...]


def parse_address(text: str) -> Address:
    """Address from a digit string, or dot-separated symbols above 9."""
    if not text:
        return ()
    if "." in text:
        return tuple(int(part) for part in text.split("."))
    return tuple(int(ch) for ch in text)


def format_address(address: Address) -> str:
    if any(s > 9 for s in address):
        return ".".join(str(s) for s in address)
    return "".join(str(s) for s in address)


def top_key(address: Address):
    """Sort key for the tile order in which symbol 1 is greatest.

    max(addresses, key=top_key) picks the survivor among coincident tiles.
    """
    return tuple(-s for s in address)


@dataclass(frozen=True, slots=True)
class PlaneMap:
    """Similarity z -> scale * e**(i*sextant*pi/3) * (conj z if reflect) + t.

    The rotation is restricted to multiples of pi/3 so compositions and
    inverses stay inside the field.
    """

    scale: QuarticScalar
    sextant: int = 0
    reflect: bool = False
    translation: PlanePoint = P_ZERO

    def __post_init__(self):
        object.__setattr__(self, "sextant", self.sextant % 6)
        if self.scale.sign() <= 0:
            raise ValueError("map scale must be positive")

    @classmethod
    def identity(cls) -> "PlaneMap":
        return cls(Q_ONE)

    def apply(self, z: PlanePoint) -> PlanePoint:
        w = z.conjugate() if self.reflect else z
        return w.rotate(self.sextant) * self.scale + self.translation

    def linear_part(self) -> PlanePoint:
        """The complex number multiplying z (or conj z), exact."""
        return ROT[self.sextant] * self.scale

    def affine_floats(self) -> tuple[complex, bool, complex]:
        """(a, reflect, t) such that the map is z -> a*(z or conj z) + t."""
        a = self.linear_part().approx()
        return a, self.reflect, self.translation.approx()

    def __repr__(self) -> str:
        tag = "~" if self.reflect else ""
        return f"Map({self.scale}*e{tag}[{self.sextant}] + {self.translation})"


def compose(outer: PlaneMap, inner: PlaneMap) -> PlaneMap:
    """Exact composition outer(inner(z)).

    Scales multiply, sextants add with a sign flip under the outer
    reflection, reflect flags combine by xor, and the translation is the
    outer image of the inner translation.
    """
    sextant = outer.sextant + (-inner.sextant if outer.reflect else inner.sextant)
    return PlaneMap(
        outer.scale * inner.scale,
        sextant,
        outer.reflect != inner.reflect,
        outer.apply(inner.translation),
    )


def invert(m: PlaneMap) -> PlaneMap:
    """Exact inverse; compose(m, invert(m)) is the identity."""
    inv_scale = m.scale.inverse()
    if m.reflect:
        t = -(m.translation.conjugate().rotate(m.sextant) * inv_scale)
        return PlaneMap(inv_scale, m.sextant, True, t)
    t = -(m.translation.rotate(-m.sextant) * inv_scale)
    return PlaneMap(inv_scale, -m.sextant, False, t)


def apply_map(m: PlaneMap, z: PlanePoint) -> PlanePoint:
    return m.apply(z)


@dataclass(frozen=True, slots=True)
class IFSLevel:
    """One equicontracting IFS: ordered maps sharing a common ratio.

    ``effective`` lists the 1-based indices enumerated when generating
    collections; an index left out must alias (equal) an effective map, so
    address generation never emits duplicate tiles for padded indices.
    """

    maps: tuple[PlaneMap, ...]
    ratio: QuarticScalar
    effective: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.maps:
            raise ValueError("a level needs at least one map")
        if not (self.ratio.sign() > 0 and (Q_ONE - self.ratio).sign() > 0):
            raise ValueError("ratio must lie strictly between 0 and 1")
        for i, m in enumerate(self.maps, start=1):
            if m.scale != self.ratio:
                raise ValueError(f"map {i} breaks the common contraction ratio")
        if not self.effective:
            object.__setattr__(self, "effective", tuple(range(1, len(self.maps) + 1)))
        eff = set(self.effective)
        if not eff <= set(range(1, len(self.maps) + 1)):
            raise ValueError("effective indices out of range")
        for i in range(1, len(self.maps) + 1):
            if i not in eff and all(self.maps[i - 1] != self.maps[j - 1] for j in eff):
                raise ValueError(f"padded index {i} does not alias an effective map")

    @property
    def arity(self) -> int:
        return len(self.maps)

    def map_for(self, symbol: int) -> PlaneMap:
        if not 1 <= symbol <= len(self.maps):
            raise ValueError(f"symbol {symbol} outside 1..{len(self.maps)}")
        return self.maps[symbol - 1]

    def alias_table(self) -> dict[int, int]:
        """Padded index -> the effective index carrying the same map."""
        table: dict[int, int] = {}
        for i in range(1, len(self.maps) + 1):
            if i in self.effective:
                continue
            for j in self.effective:
                if self.maps[i - 1] == self.maps[j - 1]:
                    table[i] = j
                    break
        return table


@dataclass(frozen=True, slots=True)
class AddressedTile:
    """A depth-k tile: its address, composed transform and prototile id."""

    address: Address
    transform: PlaneMap
    prototile: int = 0


class SIFSFamily:
    """A sequential IFS: the rule depth -> level plus its uniform limit.

    ``bound_fn(n)`` must dominate the map-wise sup distance between level n
    and the limit, non-increasing with limit zero.
    """

    def __init__(
        self,
        name: str,
        arity: int,
        prototiles: Sequence,
        level_fn: Callable[[int], IFSLevel],
        limit: IFSLevel,
        bound_fn: Callable[[int], float],
        prototile_for: Callable[[int], int] | None = None,
        param_label: str = "",
    ):
        self.name = name
        self.arity = arity
        self.prototiles = tuple(prototiles)
        self.limit = limit
        self.bound_fn = bound_fn
        self.prototile_for = prototile_for or (lambda symbol: 0)
        self.param_label = param_label
        self._level_fn = level_fn
        self._levels: dict[int, IFSLevel] = {}
        self._collections: list[list[AddressedTile]] | None = None
        self._processed_cache: dict = {}
        self._symmetry_cache: dict = {}

    def level(self, n: int) -> IFSLevel:
        if n < 1:
            raise ValueError("levels are indexed from 1")
        got = self._levels.get(n)
        if got is None:
            got = self._level_fn(n)
            if got.arity != self.arity:
                raise ValueError("level arity differs from the family arity")
            self._levels[n] = got
        return got

    @property
    def ratio(self) -> QuarticScalar:
        return self.limit.ratio

    def __repr__(self) -> str:
        extra = f", {self.param_label}" if self.param_label else ""
        return f"SIFSFamily({self.name}{extra})"


def apply_ifs(level: IFSLevel, tiles: Iterable[AddressedTile]) -> list[AddressedTile]:
    """Image of a tile collection, addresses prefixed by the new symbol.

    Enumerates effective indices only, so padded aliases do not emit
    duplicate addresses.
    """
    out = []
    tiles = list(tiles)
    for i in level.effective:
        m = level.maps[i - 1]
        for t in tiles:
            out.append(AddressedTile((i,) + t.address, compose(m, t.transform), t.prototile))
    return out


def tile_transform(family: SIFSFamily, address: Address | str) -> PlaneMap:
    """Composition f_{j1}^{(k)} . f_{j2}^{(k-1)} ... f_{jk}^{(1)} for j1..jk."""
    if isinstance(address, str):
        address = parse_address(address)
    k = len(address)
    if k < 1:
        raise ValueError("address must be nonempty")
    result: PlaneMap | None = None
    for pos, symbol in enumerate(address):
        level = family.level(k - pos)
        if not 1 <= symbol <= level.arity:
            raise ValueError(
                f"symbol {symbol} at position {pos + 1} outside 1..{level.arity}"
            )
        m = level.maps[symbol - 1]
        result = m if result is None else compose(result, m)
    assert result is not None
    return result


def supertile(family: SIFSFamily, k: int) -> list[AddressedTile]:
    """All raw depth-k addressed tiles, overlaps retained.

    Built by the one-step recursion and cached per family; the depth-0
    collection is the prototile set itself under the identity map.
    """
    if k < 0:
        raise ValueError("depth must be nonnegative")
    if family._collections is None:
        roots = [
            AddressedTile((), PlaneMap.identity(), idx)
            for idx in range(len(family.prototiles))
        ]
        family._collections = [roots]
    cols = family._collections
    while len(cols) <= k:
        depth = len(cols)
        level = family.level(depth)
        prev = cols[depth - 1]
        if depth == 1:
            # the starting tile of each branch is chosen by the first symbol
            out = []
            for i in level.effective:
                m = level.maps[i - 1]
                proto = family.prototile_for(i)
                out.append(AddressedTile((i,), m, proto))
        else:
            out = apply_ifs(level, prev)
        out.sort(key=lambda t: t.address)
        cols.append(out)
    return list(cols[k])


def coding_point(
    source: IFSLevel | SIFSFamily,
    prefix: Address | str,
    seed: PlanePoint = P_ZERO,
) -> PlanePoint:
    """Image of the seed under the maps named by a finite address prefix.

    For a single level the composition uses that level throughout; for a
    family it uses the depth-graded composition, matching the tile map.
    An empty prefix returns the seed.
    """
    if isinstance(prefix, str):
        prefix = parse_address(prefix)
    if not prefix:
        return seed
    if isinstance(source, SIFSFamily):
        return tile_transform(source, prefix).apply(seed)
    z = seed
    for symbol in reversed(prefix):
        z = source.map_for(symbol).apply(z)
    return z


def attractor_radius_bound(level: IFSLevel) -> float:
    """Radius about the origin certainly containing the attractor."""
    t_max = max(abs(m.translation.approx()) for m in level.maps)
    return t_max / (1.0 - float(level.ratio)) + 1e-12


def attractor_cloud(
    level: IFSLevel,
    depth: int,
    seed: complex = 0j,
    cap: int = 1_000_000,
) -> np.ndarray:
    """Floating point cloud {f_j(seed)} over all depth-length addresses.

    One point per address over the effective maps, in address order, no
    deduplication.  Refuses to build more than ``cap`` points.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    m = len(level.effective)
    if m**depth > cap:
        raise ValueError(
            f"{m}**{depth} points exceed the cap of {cap}; lower the depth"
        )
    pts = np.array([seed], dtype=np.complex128)
    affines = [level.maps[i - 1].affine_floats() for i in level.effective]
    for _ in range(depth):
        parts = []
        for a, reflect, t in affines:
            src = np.conj(pts) if reflect else pts
            parts.append(a * src + t)
        pts = np.concatenate(parts)
    return pts


def family_distance(
    f: IFSLevel,
    g: IFSLevel,
    radius: float | None = None,
    samples: int = 720,
) -> float:
    """max over indices of sup |f_i(z) - g_i(z)| on the disk |z| <= radius.

    Affine maps drift apart linearly, so the sup norm is taken over a disk;
    the default radius is the attractor bound of the first level.  With
    matching reflect flags the supremum has the closed form
    |dt| + radius * |dlinear|; otherwise the boundary circle is sampled.
    """
    if f.arity != g.arity:
        raise ValueError("levels must share arity")
    if radius is None:
        radius = max(attractor_radius_bound(f), attractor_radius_bound(g))
    worst = 0.0
    for mf, mg in zip(f.maps, g.maps):
        af, rf, tf = mf.affine_floats()
        ag, rg, tg = mg.affine_floats()
        dt = tf - tg
        if rf == rg:
            value = abs(dt) + radius * abs(af - ag)
        else:
            theta = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
            z = radius * np.exp(1j * theta)
            value = float(np.max(np.abs(af * z - ag * np.conj(z) + dt)))
        worst = max(worst, value)
    return worst


def _as_point_array(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points
    else:
        pts = list(points)
        if pts and isinstance(pts[0], PlanePoint):
            arr = np.array([p.approx() for p in pts], dtype=np.complex128)
        else:
            arr = np.array(pts, dtype=np.complex128)
    if arr.size == 0:
        raise ValueError("hausdorff needs nonempty point sets")
    return np.column_stack([arr.real, arr.imag])


def hausdorff(xs, ys) -> float:
    """Two-sided Hausdorff distance between finite nonempty point sets."""
    a = _as_point_array(xs)
    b = _as_point_array(ys)
    if len(a) * len(b) <= 250_000:
        d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
        return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
    from scipy.spatial import cKDTree

    d_ab = cKDTree(b).query(a, workers=-1)[0].max()
    d_ba = cKDTree(a).query(b, workers=-1)[0].max()
    return float(max(d_ab, d_ba))


def tile_lines(tiles: Iterable[AddressedTile]) -> list[str]:
    """Tile-list export, one tab-separated line per tile."""
    lines = []
    for t in tiles:
        m = t.transform
        lines.append(
            "\t".join(
                (
                    format_address(t.address),
                    str(m.scale),
                    str(m.sextant),
                    str(int(m.reflect)),
                    str(m.translation),
                )
            )
        )
    return lines
