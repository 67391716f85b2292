"""Fenchel-Nielsen twist flow along a generator curve, and the sweeps run on it.

The twist is algebraic: a generator x that crosses the curve generator a
with signed incidence k is sent to T^(k t) x, where T^s is the translation
by s along the axis of rho(a). The tile-by-tile recursion is kept as an
independent cross-check of the boundary extension.

Sweeps evaluate in the curve frame, where the curve axis is (0 -> inf):
twisted endpoints approach the lift endpoints at rate exp(-|t|), and the
frame keeps those approaches away from cancellation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import (
    DEFAULT_GRID,
    FOUR_EDGE_FLOOR,
    GENERIC_DELTA_MIN,
    POINT_KEY_TOL,
    SWEEP_TAIL,
    SWEEP_THRESHOLD,
    TILE_RECURSION_MAX_LENGTH,
)
from tools.grp import (
    DepthCap,
    Representation,
    Word,
    enumerate_ball,
    evaluate,
    evaluate_ball,
    inverse,
    reduce_word,
)
from tools.hypgeom import (
    BoundaryPoint,
    Geodesic,
    Isometry,
    NoCrossing,
    SharedEndpoint,
    angle_cross_ratio,
    apply,
    axis,
    boundary_distance,
    compose,
    cross_ratio,
    crossing,
    frame,
    geodesic_distance,
    is_left,
    translation,
    translation_length,
)
from tools.parallel import parallel_map

logger = logging.getLogger(__name__)

Pair = Tuple[Word, Word, Word]


class NoCrossingAtBase(ValueError):
    """The swept pair of axes does not cross at t = 0."""


class NotSeparated(ValueError):
    """No lift of the curve separates the two axes at t = 0."""


def make_grid(lo: float = DEFAULT_GRID[0], hi: float = DEFAULT_GRID[1], step: float = DEFAULT_GRID[2]) -> List[float]:
    """Closed grid lo, lo + step, ..., hi."""
    if step <= 0.0 or hi < lo:
        raise ValueError(f"bad grid ({lo}, {hi}, {step})")
    n = int(round((hi - lo) / step))
    return [float(x) for x in lo + step * np.arange(n + 1)]


def crossing_sign(curve_axis: Geodesic, g: Isometry) -> int:
    """+1 when the axis of g leaves from the left of the curve axis, -1 from the right, 0 if disjoint."""
    ax = axis(g)
    try:
        if crossing(curve_axis, ax) is None:
            return 0
    except SharedEndpoint:
        return 0
    return 1 if is_left(curve_axis, ax.repelling) else -1


@dataclass(frozen=True)
class TwistCurve:
    """Designated generator and the signed incidence of the other generators with it."""

    generator: str = "a"
    incidence: Tuple[Tuple[str, int], ...] = (("b", 1),)

    def __post_init__(self) -> None:
        if len(self.generator) != 1 or not self.generator.islower():
            raise ValueError(f"curve generator must be a lower-case letter, got {self.generator!r}")
        cleaned = {}
        for letter, k in dict(self.incidence).items():
            if len(letter) != 1 or not letter.islower() or letter == self.generator:
                raise ValueError(f"bad incidence letter {letter!r}")
            if int(k) != k:
                raise ValueError(f"incidence of {letter} must be an integer, got {k!r}")
            cleaned[letter] = int(k)
        object.__setattr__(self, "incidence", tuple(sorted(cleaned.items())))

    @classmethod
    def for_rep(cls, rep: Representation, generator: str = "a") -> "TwistCurve":
        """Incidence +-1 for generators whose axis crosses the curve axis, 0 otherwise."""
        curve_axis = axis(evaluate(rep, generator))
        incidence = [(x, crossing_sign(curve_axis, rep.image(x))) for x in rep.names if x != generator]
        return cls(generator, tuple(incidence))

    def crossings(self, letter: str) -> int:
        """Signed incidence of a letter; inverse letters report their generator's value."""
        return dict(self.incidence).get(letter.lower(), 0)

    def is_curve_letter(self, letter: str) -> bool:
        return letter.lower() == self.generator


@dataclass(frozen=True)
class TwistFamily:
    base: Representation
    curve: TwistCurve = field(default_factory=TwistCurve)

    def __post_init__(self) -> None:
        names = set(self.base.names)
        if self.curve.generator not in names:
            raise ValueError(f"curve generator {self.curve.generator} is not a generator of {self.base.label}")
        unknown = {x for x, _ in self.curve.incidence} - names
        if unknown:
            raise ValueError(f"incidence names unknown generators {sorted(unknown)}")

    @classmethod
    def for_rep(cls, rep: Representation, generator: str = "a") -> "TwistFamily":
        return cls(rep, TwistCurve.for_rep(rep, generator))

    @property
    def curve_image(self) -> Isometry:
        return self.base.image(self.curve.generator)

    @property
    def curve_axis(self) -> Geodesic:
        return axis(self.curve_image)

    def in_frame(self) -> "TwistFamily":
        """The same family conjugated so that the curve axis is (0 -> inf)."""
        f = frame(self.curve_axis)
        rep = self.base.conjugate(f, label=f"{self.base.label}@frame")
        # Conjugation leaves rounding off the diagonal; pin the curve to (0 -> inf) exactly.
        generators = list(rep.generators)
        index = rep.names.index(self.curve.generator)
        generators[index] = Isometry.diag(math.exp(translation_length(self.curve_image) / 2.0))
        return TwistFamily(rep.with_generators(generators), self.curve)

    def rebased(self, t: float) -> "TwistFamily":
        return TwistFamily(twist_rep(self, t), self.curve)


def translation_along(g: Isometry, t: float) -> Isometry:
    """Translation by t along the oriented axis of g; t = length(g) gives g."""
    return translation(axis(g), t)


def twist_rep(fam: TwistFamily, t: float) -> Representation:
    if t == 0.0:
        return fam.base
    curve = fam.curve_image
    images = []
    for name, g in zip(fam.base.names, fam.base.generators):
        k = 0 if name == fam.curve.generator else fam.curve.crossings(name)
        images.append(compose(translation_along(curve, k * t), g) if k else g)
    params = tuple(p for p in fam.base.params if p[0] != "t") + (("t", float(t)),)
    return Representation(tuple(images), fam.base.label, params)


def boundary_extension(fam: TwistFamily, w: Word, t: float) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """(repelling, attracting) endpoints of the twisted image of w."""
    return axis(evaluate(twist_rep(fam, t), w)).endpoints


def is_tile_stabilizer(fam: Union[TwistFamily, TwistCurve], w: Word) -> bool:
    """Formal check that the twisted image of w does not depend on t.

    Each letter x of incidence k becomes T^k x and x^-1 becomes x^-1 T^-k;
    curve letters commute with T. The image is t-free when every merged
    power of T between the remaining letters, and at both ends, vanishes.
    """
    curve = fam.curve if isinstance(fam, TwistFamily) else fam
    exponents = [0]
    for ch in reduce_word(w):
        if curve.is_curve_letter(ch):
            continue
        k = curve.crossings(ch)
        if ch.islower():
            exponents[-1] += k
            exponents.append(0)
        else:
            exponents.append(-k)
    return all(e == 0 for e in exponents)


def dehn_twist_word(w: Word, curve: TwistCurve, n: int = 1) -> Word:
    """Image of w under the n-th power of the Dehn twist: x -> a^(n k) x."""
    a = curve.generator
    out = []
    for ch in w:
        k = 0 if curve.is_curve_letter(ch) else n * curve.crossings(ch)
        power = a * k if k > 0 else a.upper() * (-k)
        out.append(power + ch if ch.islower() else ch + inverse(power))
    return reduce_word("".join(out))


def tile_recursion_check(fam: TwistFamily, w: Word, t: float, unsafe: bool = False) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """Twisted endpoints of w built letter by letter from the base tile.

    Crossing a letter x moves into the neighbouring tile through the lift
    E of the curve between them: the curve axis for x, and x^-1 of it for
    x^-1. Each crossing inserts the translation along E by +t or -t,
    according to the side of E the letter's axis leaves from.
    """
    if len(w) > TILE_RECURSION_MAX_LENGTH and not unsafe:
        raise DepthCap(f"tile recursion is limited to words of length {TILE_RECURSION_MAX_LENGTH}, got {len(w)}")
    base = fam.base
    curve_axis = fam.curve_axis
    for x, k in fam.curve.incidence:
        if abs(k) > 1:
            raise ValueError(f"tile recursion handles simple crossings only; {x} has incidence {k}")
        if k and crossing_sign(curve_axis, base.image(x)) != k:
            raise ValueError(f"declared incidence {k} of {x} disagrees with the crossing orientation")
    h = Isometry.identity()
    for ch in w:
        g = base.image(ch)
        if fam.curve.is_curve_letter(ch) or fam.curve.crossings(ch) == 0:
            h = compose(h, g)
            continue
        wall = curve_axis if ch.islower() else apply(base.image(ch.lower()).inverse(), curve_axis)
        sign = 1.0 if is_left(wall, axis(g).repelling) else -1.0
        h = compose(h, compose(translation(wall, sign * t), g))
    return axis(h).endpoints


def alpha_lift_endpoints(fam: TwistFamily, conj_depth: int = 2, t: float = 0.0) -> Tuple[BoundaryPoint, ...]:
    """Sorted endpoints of the curve lifts k . axis(a), k in the conjugator ball."""
    rep = twist_rep(fam, t)
    ball = enumerate_ball(conj_depth, rep.rank)
    images = evaluate_ball(rep, ball.words)
    curve_axis = axis(rep.image(fam.curve.generator))
    points: List[float] = []
    for k in ball.words:
        points.extend(apply(images[k], curve_axis).endpoints)
    points.sort()
    distinct: List[float] = []
    for p in points:
        if not distinct or boundary_distance(p, distinct[-1]) > 1e-12:
            distinct.append(p)
    return tuple(distinct)


def extension_limit_gaps(fam: TwistFamily, w: Word, ts: Sequence[float], conj_depth: int = 2) -> List[float]:
    """For each t, how far the twisted endpoints of w are from the nearest base lift endpoints."""
    targets = alpha_lift_endpoints(fam, conj_depth)
    gaps = []
    for t in ts:
        ends = boundary_extension(fam, w, t)
        gaps.append(max(min(boundary_distance(p, q) for q in targets) for p in ends))
    return gaps


# Sweeps


def _pair(pair: Sequence[Word]) -> Pair:
    if len(pair) == 2:
        return (pair[0], pair[1], "")
    if len(pair) == 3:
        return (pair[0], pair[1], pair[2])
    raise ValueError(f"a pair is (word, word[, conjugator]), got {pair!r}")


def _pair_axes(rep: Representation, pair: Pair) -> Tuple[Geodesic, Geodesic]:
    w1, w2, k = pair
    return axis(evaluate(rep, w1)), axis(evaluate(rep, reduce_word(k + w2 + inverse(k))))


@dataclass(frozen=True)
class _Sample:
    t: float
    angle: float
    raw: float
    gaps: Tuple[float, float, float, float]


def _sample(fam: TwistFamily, pair: Pair, t: float) -> Optional[_Sample]:
    g1, g2 = _pair_axes(twist_rep(fam, t), pair)
    try:
        psi = angle_cross_ratio(g1, g2, endpoint_tol=0.0)
    except NoCrossing:
        return None
    a_plus, a_minus = g1.attracting, g1.repelling
    b_plus, b_minus = g2.attracting, g2.repelling
    raw = 2.0 * math.atan(math.sqrt(abs(cross_ratio(a_plus, a_minus, b_plus, b_minus))))
    gaps = (
        boundary_distance(a_plus, b_minus),
        boundary_distance(a_minus, b_plus),
        boundary_distance(a_plus, b_plus),
        boundary_distance(a_minus, b_minus),
    )
    return _Sample(float(t), psi, raw, gaps)


def _monotone(values: Sequence[float], eps: float = 1e-12) -> bool:
    steps = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(steps >= -eps) or np.all(steps <= eps))


@dataclass(frozen=True)
class SweepReport:
    pair: Pair
    ts: Tuple[float, ...]
    angles: Tuple[float, ...]
    vanished_at: Tuple[float, ...]
    sup: float
    inf: float
    delta: float
    flipped: bool
    delta_2: float
    delta_4: float
    delta_bound: float
    delta_ratio: float
    four_edge: bool
    bound_2_ok: bool
    bound_4_ok: Optional[bool]
    full_range_pass: bool
    tail_monotone: bool
    generic_pass: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "pair": list(self.pair),
            "grid": [self.ts[0], self.ts[-1], len(self.ts)] if self.ts else [],
            "vanished_at": list(self.vanished_at),
            "sup": self.sup,
            "inf": self.inf,
            "delta": self.delta,
            "flipped": self.flipped,
            "delta_2": self.delta_2,
            "delta_4": self.delta_4,
            "delta_bound": self.delta_bound,
            "delta_ratio": self.delta_ratio,
            "four_edge": self.four_edge,
            "bound_2_ok": self.bound_2_ok,
            "bound_4_ok": self.bound_4_ok,
            "full_range_pass": self.full_range_pass,
            "tail_monotone": self.tail_monotone,
            "generic_pass": self.generic_pass,
        }

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.ts, self.angles))


def _evaluate_grid(fam: TwistFamily, pair: Pair, grid: Sequence[float], workers: Optional[int]) -> List[Optional[_Sample]]:
    return parallel_map(partial(_sample, fam, pair), list(grid), workers, desc="sweep")


def angle_sweep(
    fam: TwistFamily,
    pair: Sequence[Word],
    grid: Sequence[float],
    threshold: float = SWEEP_THRESHOLD,
    tail: float = SWEEP_TAIL,
    floor: float = FOUR_EDGE_FLOOR,
    framed: bool = True,
    workers: Optional[int] = None,
) -> SweepReport:
    """Crossing angle of the twisted pair over the grid, with the endpoint-gap bounds."""
    pair = _pair(pair)
    grid = sorted(float(t) for t in grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    work = fam.in_frame() if framed else fam
    if _sample(work, pair, 0.0) is None:
        raise NoCrossingAtBase(f"axes of {pair[0]} and {pair[2]}{pair[1]}{inverse(pair[2])} do not cross at t = 0")
    samples = _evaluate_grid(work, pair, grid, workers)
    kept = [s for s in samples if s is not None]
    vanished = tuple(t for t, s in zip(grid, samples) if s is None)
    if vanished:
        logger.warning("crossing of %s vanished at %d grid points", pair, len(vanished))
    if not kept:
        raise NoCrossingAtBase(f"pair {pair} crosses at no grid point")

    angles = [s.angle for s in kept]
    raws = [s.raw for s in kept]
    sup, inf = max(angles), min(angles)
    flipped = max(raws) > math.pi - min(raws)
    bounded = [math.pi - r if flipped else r for r in raws]
    opposite = [s.gaps[2:] if flipped else s.gaps[:2] for s in kept]
    delta_2 = min(min(o) for o in opposite)
    delta_4 = min(min(s.gaps) for s in kept)
    halves = [math.tan(b / 2.0) for b in bounded]
    bound_2_ok = all(h <= 2.0 / delta_2 * (1.0 + 1e-9) for h in halves)
    four_edge = delta_4 > floor
    bound_4_ok = None
    if four_edge:
        bound_4_ok = all(delta_4 / 2.0 * (1.0 - 1e-9) <= h <= 2.0 / delta_4 * (1.0 + 1e-9) for h in halves)
    delta = max(math.pi - sup, inf)
    delta_bound = math.pi - 2.0 * math.atan(2.0 / delta_2)
    # The endpoint-gap bound is one-sided, so the ratio is reported rather than held to a factor.
    delta_ratio = delta / delta_bound if delta_bound > 0.0 else math.inf

    ts = [s.t for s in kept]
    lo_tail = [a for t, a in zip(ts, angles) if t <= ts[0] + tail]
    hi_tail = [a for t, a in zip(ts, angles) if t >= ts[-1] - tail]

    full_range = angles[0] < threshold and angles[-1] > math.pi - threshold
    report = SweepReport(
        pair=pair,
        ts=tuple(ts),
        angles=tuple(angles),
        vanished_at=vanished,
        sup=sup,
        inf=inf,
        delta=delta,
        flipped=flipped,
        delta_2=delta_2,
        delta_4=delta_4,
        delta_bound=delta_bound,
        delta_ratio=delta_ratio,
        four_edge=four_edge,
        bound_2_ok=bound_2_ok,
        bound_4_ok=bound_4_ok,
        full_range_pass=full_range,
        tail_monotone=_monotone(lo_tail) and _monotone(hi_tail),
        generic_pass=delta > GENERIC_DELTA_MIN and bound_2_ok,
    )
    logger.info("sweep %s over %d points: inf %.6g, sup %.6g, delta %.6g", pair, len(ts), inf, sup, delta)
    return report


def _side(wall: Geodesic, g: Geodesic) -> Optional[bool]:
    """True/False when both endpoints of g lie left/right of wall, else None."""
    if any(x in wall.endpoints for x in g.endpoints):
        return None
    sides = {is_left(wall, x) for x in g.endpoints}
    return sides.pop() if len(sides) == 1 else None


def separating_lift(fam: TwistFamily, g1: Word, g2: Word, conj_depth: int = 2) -> Optional[Word]:
    """Conjugator k with k . axis(a) separating the axes of g1 and g2, if any."""
    rep = fam.base
    a1, a2 = axis(evaluate(rep, g1)), axis(evaluate(rep, g2))
    ball = enumerate_ball(conj_depth, rep.rank)
    images = evaluate_ball(rep, ball.words)
    curve_axis = fam.curve_axis
    for k in ball.words:
        wall = apply(images[k], curve_axis)
        s1, s2 = _side(wall, a1), _side(wall, a2)
        if s1 is not None and s2 is not None and s1 != s2:
            return k
    return None


def separation_sweep(fam: TwistFamily, g1: Word, g2: Word, grid: Sequence[float], conj_depth: int = 2, workers: Optional[int] = None) -> List[float]:
    """Distance between the twisted axes of g1 and g2 at each grid point."""
    work = fam.in_frame()
    a1, a2 = _pair_axes(work.base, (g1, g2, ""))
    try:
        if crossing(a1, a2, endpoint_tol=0.0) is not None:
            raise NotSeparated(f"axes of {g1} and {g2} cross at t = 0")
    except SharedEndpoint as exc:
        raise NotSeparated(str(exc)) from exc
    wall = separating_lift(work, g1, g2, conj_depth)
    if wall is None:
        raise NotSeparated(f"no lift of {fam.curve.generator} within depth {conj_depth} separates {g1} and {g2}")
    logger.info("%s and %s are separated by the lift %s.axis(%s)", g1, g2, wall or "1", fam.curve.generator)
    distances = parallel_map(partial(_separation, work, g1, g2), [float(t) for t in grid], workers, desc="separation")
    return distances


def _separation(fam: TwistFamily, g1: Word, g2: Word, t: float) -> float:
    a1, a2 = _pair_axes(twist_rep(fam, t), (g1, g2, ""))
    return geodesic_distance(a1, a2)


@dataclass(frozen=True)
class DifferenceReport:
    pairs: Tuple[Pair, Pair]
    ts: Tuple[float, ...]
    differences: Tuple[float, ...]
    min: float
    max: float
    varies: bool
    same_point: Optional[bool]
    vanished_at: Tuple[float, ...]

    def to_dict(self) -> Dict[str, object]:
        return {
            "pairs": [list(p) for p in self.pairs],
            "min": self.min,
            "max": self.max,
            "varies": self.varies,
            "same_point": self.same_point,
            "vanished_at": list(self.vanished_at),
        }


def _same_crossing_point(rep: Representation, p1: Pair, p2: Pair) -> bool:
    """Whether the two crossings on the shared first axis are one point of the quotient."""
    g = evaluate(rep, p1[0])
    base = axis(g)
    f = frame(base)
    length = 2.0 * math.acosh(abs(g.trace) / 2.0)
    positions = []
    for p in (p1, p2):
        _, other = _pair_axes(rep, p)
        z = crossing(base, other, endpoint_tol=0.0)
        if z is None:
            raise NoCrossingAtBase(f"pair {p} does not cross at t = 0")
        positions.append(math.log(apply(f, z).y) % length)
    gap = abs(positions[0] - positions[1])
    return min(gap, length - gap) <= POINT_KEY_TOL


def difference_sweep(
    fam: TwistFamily,
    pair1: Sequence[Word],
    pair2: Sequence[Word],
    grid: Sequence[float],
    tol: float = 1e-9,
    workers: Optional[int] = None,
) -> DifferenceReport:
    """angle(pair1) - angle(pair2) along the orbit."""
    p1, p2 = _pair(pair1), _pair(pair2)
    work = fam.in_frame()
    for p in (p1, p2):
        if _sample(work, p, 0.0) is None:
            raise NoCrossingAtBase(f"pair {p} does not cross at t = 0")
    grid = sorted(float(t) for t in grid)
    first = _evaluate_grid(work, p1, grid, workers)
    second = _evaluate_grid(work, p2, grid, workers)
    ts, diffs, vanished = [], [], []
    for t, s1, s2 in zip(grid, first, second):
        if s1 is None or s2 is None:
            vanished.append(t)
            continue
        ts.append(t)
        diffs.append(s1.angle - s2.angle)
    same = _same_crossing_point(work.base, p1, p2) if p1[0] == p2[0] and not p1[2] else None
    if not diffs:
        raise NoCrossingAtBase(f"pairs {p1} and {p2} never cross together on the grid")
    lo, hi = min(diffs), max(diffs)
    return DifferenceReport((p1, p2), tuple(ts), tuple(diffs), lo, hi, hi - lo > tol, same, tuple(vanished))


__all__ = [
    "DifferenceReport",
    "NoCrossingAtBase",
    "NotSeparated",
    "SweepReport",
    "TwistCurve",
    "TwistFamily",
    "alpha_lift_endpoints",
    "angle_sweep",
    "boundary_extension",
    "crossing_sign",
    "dehn_twist_word",
    "difference_sweep",
    "extension_limit_gaps",
    "is_tile_stabilizer",
    "make_grid",
    "separating_lift",
    "separation_sweep",
    "tile_recursion_check",
    "translation_along",
    "twist_rep",
]
