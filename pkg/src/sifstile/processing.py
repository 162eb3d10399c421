"""Overlap processing, tiling conditions, blowup patches and the limit tile.

Processing cuts a raw collection down to a just-touching one: coincident
tiles are grouped exactly and only the greatest address in the top order
survives.  Partial overlaps cannot be cut at tile granularity, so they are
reported as condition violations instead of being clipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import QuarticScalar
from .geometry import (
    OverlapClass,
    OverlapOracle,
    Polygon,
    prototile_symmetries,
    sweep_bipartite,
    sweep_pairs,
    transform_polygon,
)
from .sifs import (
    Address,
    AddressedTile,
    IFSLevel,
    PlaneMap,
    SIFSFamily,
    compose,
    format_address,
    hausdorff,
    invert,
    supertile,
    tile_lines,
    top_key,
)


class StabilizationError(RuntimeError):
    """Raised when the blowup search does not settle within its cap."""


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass
class ProcessedCollection:
    """Survivors of cutting a depth-k collection, plus the removal record."""

    depth: int
    tiles: tuple[AddressedTile, ...]
    removed: tuple[tuple[Address, Address], ...]  # (removed, surviving) pairs
    violations: tuple[Violation, ...] = ()

    @property
    def removed_addresses(self) -> tuple[Address, ...]:
        return tuple(r for r, _ in self.removed)

    def addresses(self) -> frozenset[Address]:
        return frozenset(t.address for t in self.tiles)

    def __len__(self) -> int:
        return len(self.tiles)


def _family_symmetries(family: SIFSFamily) -> list[tuple[PlaneMap, ...]]:
    got = family._symmetry_cache.get("syms")
    if got is None:
        got = [prototile_symmetries(p) for p in family.prototiles]
        family._symmetry_cache["syms"] = got
    return got


def _map_key(m: PlaneMap):
    t = m.translation
    return (
        m.scale.a, m.scale.b, m.scale.c, m.scale.d,
        m.sextant, m.reflect,
        t.re.a, t.re.b, t.re.c, t.re.d,
        t.im.a, t.im.b, t.im.c, t.im.d,
    )


def _coincidence_key(tile: AddressedTile, syms: Sequence[tuple[PlaneMap, ...]]):
    """Canonical key equal for two tiles exactly when their supports agree.

    With a trivial prototile symmetry group the transform itself is the
    key; otherwise the least transform over the symmetry group is taken.
    """
    group = syms[tile.prototile]
    if len(group) == 1:
        return (tile.prototile, _map_key(tile.transform))
    return (
        tile.prototile,
        min(_map_key(compose(tile.transform, s)) for s in group),
    )


def _oracle_for(family: SIFSFamily) -> OverlapOracle:
    got = family._symmetry_cache.get("oracle")
    if got is None:
        got = OverlapOracle(family.prototiles)
        family._symmetry_cache["oracle"] = got
    return got


def process(
    family: SIFSFamily,
    k: int,
    detect_partial: bool = True,
    exact_pairs: bool = False,
    workers: int = 1,
) -> ProcessedCollection:
    """Cut the depth-k collection to a just-touching one.

    Tiles with identical support are grouped exactly and the greatest
    address in the top order (symbol 1 greatest) is kept.  With
    ``detect_partial`` a pairwise sweep also reports any partial overlap as
    a first-condition violation; ``exact_pairs`` forces the sweep to
    classify through exact relative maps for every candidate pair.
    """
    if k < 1:
        raise ValueError("processing needs depth at least 1")
    cache_key = (k, detect_partial, exact_pairs)
    got = family._processed_cache.get(cache_key)
    if got is not None:
        return got
    base = family._processed_cache.get((k, False, False))
    if base is None:
        raw = supertile(family, k)
        syms = _family_symmetries(family)
        groups: dict = {}
        for t in raw:
            groups.setdefault(_coincidence_key(t, syms), []).append(t)
        survivors: list[AddressedTile] = []
        removed: list[tuple[Address, Address]] = []
        for members in groups.values():
            keeper = max(members, key=lambda t: top_key(t.address))
            survivors.append(keeper)
            for t in members:
                if t is not keeper:
                    removed.append((t.address, keeper.address))
        survivors.sort(key=lambda t: t.address)
        removed.sort()
        base = ProcessedCollection(k, tuple(survivors), tuple(removed))
        family._processed_cache[(k, False, False)] = base
    if not detect_partial:
        return base
    raw = supertile(family, k)
    sweep = sweep_pairs(
        raw,
        family.prototiles,
        exact=exact_pairs,
        oracle=_oracle_for(family),
        workers=workers,
    )
    violations = tuple(
        Violation(
            "partial-overlap",
            f"{format_address(raw[i].address)} vs {format_address(raw[j].address)}",
        )
        for i, j in sweep.partial
    )
    result = ProcessedCollection(k, base.tiles, base.removed, violations)
    family._processed_cache[cache_key] = result
    return result


def sigma_addresses(family: SIFSFamily, k: int) -> frozenset[Address]:
    """Addresses surviving processing at depth k."""
    return process(family, k, detect_partial=False).addresses()


@dataclass
class CheckLine:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class ConditionsReport:
    lines: list[CheckLine]

    @property
    def passed(self) -> bool:
        return all(line.passed for line in self.lines)

    def failures(self) -> list[CheckLine]:
        return [line for line in self.lines if not line.passed]


def check_conditions(family: SIFSFamily, k_max: int, workers: int = 1) -> ConditionsReport:
    """Verify the two tiling conditions up to depth k_max.

    First condition: no raw pair overlaps partially, so processing is pure
    keep-or-delete, and the survivors have pairwise disjoint interiors.
    Second condition, finite form: the survivor address sets are consistent
    across depths; dropping the newest (first) symbol of every survivor at
    depth k+1 recovers exactly the survivors at depth k, and every survivor
    extends by at least one new symbol.  An exact area identity rounds out
    the report: count times ratio**2k times prototile area equals the
    summed survivor area.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    lines: list[CheckLine] = []
    oracle = _oracle_for(family)
    collections = {}
    for k in range(1, k_max + 1):
        col = process(family, k, detect_partial=True, exact_pairs=True, workers=workers)
        collections[k] = col
        partial = [v.detail for v in col.violations if v.kind == "partial-overlap"]
        lines.append(
            CheckLine(
                f"{family.name} k={k} no-partial-overlaps",
                not partial,
                partial[0] if partial else "",
            )
        )
        sweep = sweep_pairs(
            col.tiles, family.prototiles, exact=True, oracle=oracle, workers=workers
        )
        bad = sweep.partial + sweep.coincident
        witness = ""
        if bad:
            i, j = bad[0]
            witness = (
                f"{format_address(col.tiles[i].address)} vs "
                f"{format_address(col.tiles[j].address)}"
            )
        lines.append(
            CheckLine(
                f"{family.name} k={k} survivors-interior-disjoint",
                not bad,
                witness,
            )
        )
        # exact area identity
        ratio_power = family.ratio ** (2 * k)
        protos = family.prototiles
        total = QuarticScalar()
        for t in col.tiles:
            total = total + transform_polygon(t.transform, protos[t.prototile]).area
        expected = QuarticScalar()
        for t in col.tiles:
            expected = expected + protos[t.prototile].area
        expected = expected * ratio_power
        lines.append(
            CheckLine(
                f"{family.name} k={k} exact-area-identity",
                total == expected,
                "" if total == expected else f"sum {total} vs {expected}",
            )
        )
    for k in range(1, k_max):
        sigma_k = collections[k].addresses()
        sigma_next = collections[k + 1].addresses()
        truncated = frozenset(addr[1:] for addr in sigma_next)
        ok_trunc = truncated == sigma_k
        witness = ""
        if not ok_trunc:
            diff = truncated.symmetric_difference(sigma_k)
            witness = format_address(sorted(diff)[0])
        lines.append(
            CheckLine(f"{family.name} k={k}->{k + 1} truncation-consistency", ok_trunc, witness)
        )
        extendable = all(
            any((i,) + addr in sigma_next for i in family.level(k + 1).effective)
            for addr in sigma_k
        )
        lines.append(
            CheckLine(f"{family.name} k={k}->{k + 1} every-address-extends", extendable)
        )
    return ConditionsReport(lines)


@dataclass
class BlowupPatch:
    """A stabilised patch: unit-scale congruent tiles around a blowup string."""

    prefix: tuple[int, ...]
    expansion: PlaneMap
    tiles: tuple[AddressedTile, ...]
    stabilization_depth: int
    depth: int

    def transform_set(self) -> frozenset:
        return frozenset((_map_key(t.transform), t.prototile) for t in self.tiles)

    def export_lines(self) -> list[str]:
        header = (
            f"blowup={format_address(self.prefix)} k={self.depth} "
            f"M={self.stabilization_depth}"
        )
        return [header] + tile_lines(self.tiles)


def _blowup_symbol(blowup: str | Sequence[int], index: int) -> int:
    """Symbol j_index of the blowup stream; finite inputs repeat cyclically."""
    if isinstance(blowup, str):
        seq = [int(ch) for ch in blowup if not ch.isspace()]
    else:
        seq = list(blowup)
    if not seq:
        raise ValueError("blowup stream must not be empty")
    return seq[(index - 1) % len(seq)]


def stabilized(
    family: SIFSFamily,
    k: int,
    blowup: str | Sequence[int] = "1",
    cap: int = 10,
) -> BlowupPatch:
    """Stable survivor set of the depth-k collection under the blowup stream.

    Deeper collections are processed with the stream symbols prepended;
    the kept depth-k address set is non-increasing and the search stops at
    the first depth M whose set repeats the previous one.  Tiles are
    returned in plain depth-k coordinates (the prepended maps and their
    inverses cancel exactly).
    """
    if k < 1:
        raise ValueError("blowups need depth at least 1")
    for idx in range(k + 1, k + cap + 2):
        symbol = _blowup_symbol(blowup, idx)
        if not 1 <= symbol <= family.arity:
            raise ValueError(f"blowup symbol {symbol} outside 1..{family.arity}")
    previous: frozenset[Address] | None = None
    stable_depth = None
    kept: frozenset[Address] = frozenset()
    for m in range(k, k + cap + 1):
        prefix = tuple(_blowup_symbol(blowup, idx) for idx in range(m, k, -1))
        survivors = sigma_addresses(family, m)
        current = frozenset(
            addr[m - k:] for addr in survivors if addr[: m - k] == prefix
        )
        if previous is not None and current == previous:
            stable_depth = m
            kept = current
            break
        previous = current
    if stable_depth is None:
        raise StabilizationError(
            f"no stabilisation for k={k} within {cap} extra levels"
        )
    by_address = {
        t.address: t for t in process(family, k, detect_partial=False).tiles
    }
    raw_by_address = {t.address: t for t in supertile(family, k)}
    tiles = []
    for addr in sorted(kept):
        tile = by_address.get(addr) or raw_by_address[addr]
        tiles.append(tile)
    inner_prefix = tuple(
        _blowup_symbol(blowup, idx) for idx in range(k + 1, stable_depth + 1)
    )
    expansion = PlaneMap.identity()
    for idx in range(stable_depth, k, -1):
        level = family.level(idx)
        expansion = compose(
            invert(level.maps[_blowup_symbol(blowup, idx) - 1]), expansion
        )
    return BlowupPatch(inner_prefix, expansion, tuple(tiles), stable_depth, k)


def blowup_tiling(
    family: SIFSFamily,
    blowup: str | Sequence[int],
    k: int,
    cap: int = 10,
) -> BlowupPatch:
    """Unit-scale patch: inverses of the first k stream maps applied to the
    stabilised depth-k collection.

    Successive patches along one stream are nested as tile sets, and every
    tile is a congruent unit-scale copy of its prototile.
    """
    stab = stabilized(family, k, blowup, cap=cap)
    expansion = PlaneMap.identity()
    for idx in range(k, 0, -1):
        level = family.level(idx)
        expansion = compose(
            invert(level.maps[_blowup_symbol(blowup, idx) - 1]), expansion
        )
    prefix = tuple(_blowup_symbol(blowup, idx) for idx in range(1, k + 1))
    tiles = tuple(
        AddressedTile(t.address, compose(expansion, t.transform), t.prototile)
        for t in stab.tiles
    )
    return BlowupPatch(prefix, expansion, tiles, stab.stabilization_depth, k)


def overlap_operator(
    level: IFSLevel,
    tiles: Sequence[AddressedTile],
    prototiles: Polygon | Sequence[Polygon],
    oracle: OverlapOracle | None = None,
) -> tuple[AddressedTile, ...]:
    """Tiles of the collection meeting any relative image with positive area.

    For every ordered pair of distinct effective maps the collection is
    pulled through f_i^-1 f_j and intersected with itself at tile
    granularity: a tile survives when some moved tile overlaps it beyond a
    shared boundary.
    """
    protos = (prototiles,) if isinstance(prototiles, Polygon) else tuple(prototiles)
    if oracle is None:
        oracle = OverlapOracle(protos)
    hits: set[int] = set()
    for i in level.effective:
        for j in level.effective:
            if i == j:
                continue
            g = compose(invert(level.maps[i - 1]), level.maps[j - 1])
            moved = [
                AddressedTile(t.address, compose(g, t.transform), t.prototile)
                for t in tiles
            ]
            remaining = [idx for idx in range(len(tiles)) if idx not in hits]
            subset = [tiles[idx] for idx in remaining]
            found = sweep_bipartite(subset, moved, protos, oracle=oracle)
            hits.update(remaining[idx] for idx in found)
    return tuple(tiles[idx] for idx in sorted(hits))


@dataclass
class LimitTileResult:
    tiles: tuple[AddressedTile, ...]
    distance_to_prototile: float


def limit_tile(
    family: SIFSFamily,
    n: int,
    attractor_depth: int,
    boundary_samples: int = 24,
) -> LimitTileResult:
    """Iterated overlap regions recovering the starting tile from the
    attractor approximation.

    The attractor is approximated by the processed depth collection; the
    overlap operator is composed from level n down to level 1 and the
    Hausdorff distance of the surviving region to the exact prototile is
    reported.  An empty intermediate region means the approximation depth
    is too small.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    region = tuple(process(family, attractor_depth, detect_partial=False).tiles)
    oracle = _oracle_for(family)
    for m in range(n, 0, -1):
        region = overlap_operator(family.level(m), region, family.prototiles, oracle)
        if not region:
            raise ValueError(
                f"overlap region emptied at level {m}; raise attractor_depth"
            )
    proto = family.prototiles[0]
    from .geometry import float_vertex_cloud
    import numpy as np

    cloud = float_vertex_cloud(region, family.prototiles)
    boundary = []
    verts = proto.float_vertices()
    for i in range(len(verts)):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        ts = np.linspace(0.0, 1.0, boundary_samples, endpoint=False)
        boundary.append(a + (b - a) * ts)
    target = np.concatenate(boundary)
    return LimitTileResult(region, hausdorff(cloud, target))
