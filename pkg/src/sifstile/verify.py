"""Verification suites behind the ``verify`` subcommand.

Each suite returns a list of check lines (name, pass flag, witness).  The
same functions back the acceptance test module, so the command line and
the test suite can never drift apart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    GOLDEN_CONTRACTION,
    GOLDEN_MEAN,
    PlanePoint,
    Q_ONE,
    QuarticScalar,
    SQRT15,
    SQRT3,
    SQRT5,
    fib,
    float_approx,
)
from .geometry import OverlapClass, classify_overlap, transform_polygon
from .paramexpr import parse_param
from .processing import blowup_tiling, check_conditions, process, sigma_addresses
from .sifs import attractor_cloud, compose, family_distance, hausdorff, supertile
from .systems import (
    DEFAULT_HAT_C,
    clusters,
    derived_translations,
    get_family,
    hat_family,
    hat_level,
    hex_family,
    hex_lattice_membership,
    hex_separation_ok,
    intersection_identities,
    p_bruteforce,
    p_closed,
    q_bruteforce,
    q_closed,
)

SUITES = ("algebra", "claims", "overlaps", "sigma", "convergence", "all")

#: hat parameters exercised by the exact identity suites
HAT_PARAMETERS = (
    QuarticScalar(),
    QuarticScalar(Fraction(1, 4)),
    DEFAULT_HAT_C,
    QuarticScalar(Fraction(1)),
)


@dataclass
class CheckLine:
    name: str
    passed: bool
    witness: str = ""


def _line(name: str, passed: bool, witness: str = "") -> CheckLine:
    return CheckLine(name, bool(passed), witness if not passed else "")


def _param_tag(c: QuarticScalar) -> str:
    return f"c={c}"


def suite_algebra() -> list[CheckLine]:
    lines = []
    lines.append(_line("basis-product sqrt3*sqrt5=sqrt15", SQRT3 * SQRT5 == SQRT15))
    lines.append(
        _line(
            "contraction-inverse phi*golden^2=1",
            GOLDEN_CONTRACTION * GOLDEN_MEAN**2 == Q_ONE,
        )
    )
    c = Q_ONE / (Q_ONE + SQRT3)
    lines.append(
        _line(
            "rationalize 1/(1+sqrt3)",
            c == QuarticScalar(Fraction(-1, 2), Fraction(1, 2)),
            str(c),
        )
    )
    combo = (Q_ONE - c) * SQRT3 + c * 3
    lines.append(
        _line("substitute (1-c)*sqrt3+3c", combo == QuarticScalar(-3, 3), str(combo))
    )
    lines.append(_line("sign zero element", QuarticScalar().sign() == 0))
    lines.append(_line("sign phi-1 negative", (GOLDEN_CONTRACTION - Q_ONE).sign() == -1))
    lines.append(_line("sign sqrt15-sqrt3*sqrt5", (SQRT15 - SQRT3 * SQRT5).sign() == 0))
    fib_ok = fib(1) == 1 and fib(2) == 1 and fib(0) == 0 and fib(18) == 2584
    lines.append(_line("fibonacci anchors", fib_ok))
    phi_float = float_approx(GOLDEN_CONTRACTION)
    lines.append(
        _line(
            "float phi",
            abs(phi_float - 0.3819660112501051) < 2**-50,
            repr(phi_float),
        )
    )
    roundtrip = parse_param(str(c)) == c
    lines.append(_line("serialisation round trip", roundtrip))
    return lines


def suite_claims(n_max: int = 8, identity_n_max: int = 6) -> list[CheckLine]:
    """Closed anchor forms versus brute-force composition, all parameters."""
    lines = []
    for c in HAT_PARAMETERS:
        tag = _param_tag(c)
        ok_p = all(p_closed(n, c) == p_bruteforce(n, c) for n in range(1, n_max + 1))
        lines.append(_line(f"anchor-p closed=bruteforce n<=8 {tag}", ok_p))
        ok_q = all(q_closed(n, c) == q_bruteforce(n, c) for n in range(1, n_max + 1))
        lines.append(_line(f"anchor-q closed=bruteforce n<=8 {tag}", ok_q))
        ok_q4 = all(
            q_closed(n + 1, c) == hat_level(n + 1, c).maps[3].translation
            for n in range(1, n_max)
        )
        lines.append(_line(f"anchor-q equals map-4 origin image {tag}", ok_q4))
        derived_ok = True
        witness = ""
        for n in range(1, n_max + 1):
            level = hat_level(n + 1, c)
            for idx, trans in derived_translations(n, c).items():
                if level.maps[idx - 1].translation != trans:
                    derived_ok = False
                    witness = f"map {idx} at level {n + 1}"
                    break
            if not derived_ok:
                break
        lines.append(_line(f"derived translation vectors {tag}", derived_ok, witness))
        identity_ok = True
        witness = ""
        for n in range(1, identity_n_max + 1):
            report = intersection_identities(n, c, check_supports=n <= 2)
            if not report.passed:
                identity_ok = False
                witness = f"n={n}: {report.failures()[0]}"
                break
        lines.append(_line(f"contact identities n<=6 {tag}", identity_ok, witness))
    return lines


def suite_overlaps(k_max: int = 4, workers: int = 1) -> list[CheckLine]:
    """Exact overlap structure: the branch identity, clusters, conditions."""
    lines = []
    for c in HAT_PARAMETERS:
        fam = hat_family(c)
        ok = all(
            compose(fam.level(k).maps[5], fam.level(k - 1).maps[6])
            == compose(fam.level(k).maps[6], fam.level(k - 1).maps[0])
            for k in range(2, 9)
        )
        lines.append(_line(f"branch-overlap identity k=2..8 {_param_tag(c)}", ok))
    h8, h7 = clusters(DEFAULT_HAT_C)
    lines.append(_line("cluster sizes 8 and 7", len(h8) == 8 and len(h7) == 7))
    proto = hat_family(DEFAULT_HAT_C).prototiles[0]
    polys = [transform_polygon(t.transform, proto) for t in h8]
    classes = {
        classify_overlap(polys[i], polys[j])
        for i, j in itertools.combinations(range(len(polys)), 2)
    }
    lines.append(
        _line(
            "8-cluster pairwise boundary or disjoint",
            classes <= {OverlapClass.BOUNDARY_ONLY, OverlapClass.DISJOINT},
            str(sorted(cl.value for cl in classes)),
        )
    )
    for name in ("hat", "hex"):
        report = check_conditions(get_family(name) if name == "hex" else hat_family(DEFAULT_HAT_C), k_max, workers=workers)
        for line in report.lines:
            lines.append(_line(line.name, line.passed, line.witness))
    hex_fam = hex_family()
    for k in range(1, k_max + 1):
        tiles = supertile(hex_fam, k)
        ok = all(
            hex_lattice_membership(t.transform.translation, k) for t in tiles
        )
        lines.append(_line(f"hex k={k} centers on lattice", ok))
    for n in range(1, 5):
        ok, detail = hex_separation_ok(n)
        lines.append(_line(f"hex separation rule {detail}", ok, detail))
    return lines


def _no_banned_factor(word: tuple[int, ...]) -> bool:
    return all(not (a == 7 and b == 1) for a, b in zip(word, word[1:]))


def expected_sigma_language(k: int) -> frozenset[tuple[int, ...]]:
    """Independent enumeration: words with no banned factor 71.

    Position alphabets follow the levels: the last symbol may use the
    reflected eighth map, every earlier one runs over 1..7.
    """
    alphabets = [range(1, 8)] * (k - 1) + [range(1, 9)]
    return frozenset(
        word for word in itertools.product(*alphabets) if _no_banned_factor(word)
    )


def suite_sigma(k_max: int = 5) -> list[CheckLine]:
    lines = []
    fam = hat_family(DEFAULT_HAT_C)
    expected_sizes = {1: 8, 2: 55, 3: 377, 4: 2584, 5: 17711}
    for k in range(1, k_max + 1):
        sigma = sigma_addresses(fam, k)
        language = expected_sigma_language(k)
        lines.append(
            _line(
                f"sigma k={k} equals banned-word language",
                sigma == language,
                f"sizes {len(sigma)} vs {len(language)}",
            )
        )
        lines.append(
            _line(
                f"sigma k={k} cardinality {expected_sizes[k]}",
                len(sigma) == expected_sizes[k],
                str(len(sigma)),
            )
        )
        lines.append(
            _line(
                f"sigma k={k} matches fib({4 * k + 2})",
                len(sigma) == fib(4 * k + 2),
            )
        )
    return lines


def convergence_distances(n_range=range(2, 11)) -> list[float]:
    fam = hat_family(DEFAULT_HAT_C)
    return [family_distance(fam.level(n), fam.limit) for n in n_range]


def convergence_hausdorff(
    n_max: int = 5, attractor_depth: int = 8, cap: int = 8_000_000
) -> tuple[list[float], float]:
    """Distances of processed collections to the limit attractor cloud.

    Returns the distance list for depths 1..n_max and the attractor cloud
    diameter estimate.
    """
    from .geometry import float_vertex_cloud

    fam = hat_family(DEFAULT_HAT_C)
    cloud = attractor_cloud(fam.limit, attractor_depth, cap=cap)
    pts = np.column_stack([cloud.real, cloud.imag])
    try:
        from scipy.spatial import ConvexHull

        hull = pts[ConvexHull(pts).vertices]
    except Exception:
        hull = pts
    diameter = 0.0
    for i in range(len(hull)):
        d = np.hypot(hull[i + 1:, 0] - hull[i, 0], hull[i + 1:, 1] - hull[i, 1])
        if d.size:
            diameter = max(diameter, float(d.max()))
    distances = []
    for n in range(1, n_max + 1):
        tiles = process(fam, n, detect_partial=False).tiles
        verts = float_vertex_cloud(tiles, fam.prototiles)
        distances.append(hausdorff(verts, cloud))
    return distances, diameter


#: half-width of the pinned ratio window around the squared contraction
RATIO_WINDOW = 0.01


def suite_convergence(attractor_depth: int = 8) -> list[CheckLine]:
    lines = []
    distances = convergence_distances()
    decreasing = all(b < a for a, b in zip(distances, distances[1:]))
    lines.append(
        _line(
            "family distance strictly decreasing n=2..10",
            decreasing,
            " ".join(f"{d:.6f}" for d in distances),
        )
    )
    phi_sq = float(GOLDEN_CONTRACTION) ** 2
    ratios = [b / a for a, b in zip(distances[2:], distances[3:])]
    in_window = all(phi_sq - RATIO_WINDOW <= r <= phi_sq + RATIO_WINDOW for r in ratios)
    lines.append(
        _line(
            "family distance ratios in squared-contraction window n>=4",
            in_window,
            "ratios " + " ".join(f"{r:.4f}" for r in ratios),
        )
    )
    h_dists, diameter = convergence_hausdorff(attractor_depth=attractor_depth)
    non_increasing = all(b <= a + 1e-12 for a, b in zip(h_dists, h_dists[1:]))
    lines.append(
        _line(
            "hausdorff to limit attractor non-increasing n=1..5",
            non_increasing,
            " ".join(f"{d:.4f}" for d in h_dists),
        )
    )
    lines.append(
        _line(
            "final hausdorff below 5% of attractor diameter",
            h_dists[-1] < 0.05 * diameter,
            f"{h_dists[-1]:.4f} vs diameter {diameter:.4f}",
        )
    )
    return lines


def suite_blowup() -> list[CheckLine]:
    lines = []
    for name in ("hat", "hex"):
        fam = get_family(name)
        patches = [blowup_tiling(fam, "1", k) for k in range(1, 5)]
        nested = all(
            patches[i].transform_set() <= patches[i + 1].transform_set()
            for i in range(3)
        )
        lines.append(_line(f"{name} blowup patches nested k=1..3", nested))
        unit = all(
            t.transform.scale == Q_ONE for p in patches for t in p.tiles
        )
        lines.append(_line(f"{name} blowup tiles unit scale", unit))
    return lines


def suite_determinism() -> list[CheckLine]:
    from .render import render_cloud, render_svg

    fam = hat_family(DEFAULT_HAT_C)
    tiles = process(fam, 2, detect_partial=False).tiles
    doc1 = render_svg(tiles, fam.prototiles)
    doc2 = render_svg(tiles, fam.prototiles)
    lines = [_line("render_svg byte-stable", doc1 == doc2)]
    cloud = attractor_cloud(fam.limit, 4)
    lines.append(_line("render_cloud byte-stable", render_cloud(cloud) == render_cloud(cloud)))
    from .sifs import tile_lines

    lines.append(
        _line("tile export byte-stable", tile_lines(tiles) == tile_lines(tiles))
    )
    return lines


def run_suite(selector: str, workers: int = 1) -> list[CheckLine]:
    if selector == "algebra":
        return suite_algebra()
    if selector == "claims":
        return suite_claims()
    if selector == "overlaps":
        return suite_overlaps(workers=workers)
    if selector == "sigma":
        return suite_sigma()
    if selector == "convergence":
        return suite_convergence()
    if selector == "all":
        out = []
        out.extend(suite_algebra())
        out.extend(suite_claims())
        out.extend(suite_overlaps(workers=workers))
        out.extend(suite_sigma())
        out.extend(suite_convergence())
        out.extend(suite_blowup())
        out.extend(suite_determinism())
        return out
    raise ValueError(f"unknown suite {selector!r}; pick one of {SUITES}")


def run_verify(selector: str, stream=None, workers: int = 1) -> int:
    """Print one line per check; exit status 0 only when everything passed."""
    import sys

    out = stream or sys.stdout
    lines = run_suite(selector, workers=workers)
    all_ok = True
    for line in lines:
        status = "PASS" if line.passed else "FAIL"
        suffix = f"  [{line.witness}]" if (line.witness and not line.passed) else ""
        print(f"{line.name}: {status}{suffix}", file=out)
        all_ok = all_ok and line.passed
    print(f"{'OK' if all_ok else 'FAILED'} ({len(lines)} checks)", file=out)
    return 0 if all_ok else 1
