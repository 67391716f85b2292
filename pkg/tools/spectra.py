"""Truncated length, axes and angle spectra of a representation.

Angle multiplicity is counted over orbits of crossing configurations. A
configuration is a lift of the first class, fixed once and for all as the
axis of its canonical word, together with a lift of the second class
crossing it. Its orbit invariant is the position of the crossing along
the fixed lift, taken modulo the translation length, plus the angle.
Crossing points are also reduced towards the Dirichlet center i and kept
as witnesses.
"""
from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from config import (
    AXIS_MATCH_TOL,
    CLUSTER_TOL,
    CONJ_DEPTH_CAP,
    ENDPOINT_TOL,
    POINT_KEY_TOL,
    REDUCE_STEP_TOL,
    WORD_DEPTH_CAP,
)
from tools.axis_index import AxisIndex, dedupe
from tools.grp import (
    ConjClass,
    Representation,
    Word,
    check_depth,
    conjugacy_classes,
    enumerate_ball,
    evaluate,
    evaluate_ball,
    inverse,
    is_primitive,
    reduce_word,
    word_key,
)
from tools.hypgeom import (
    Geodesic,
    HPoint,
    Isometry,
    Kind,
    NoCrossing,
    SharedEndpoint,
    angle_cross_ratio,
    apply,
    axis,
    classify,
    crossing,
    distance,
    frame,
    interleaved,
    translation_length,
)
from tools.parallel import parallel_map

logger = logging.getLogger(__name__)

CENTER = HPoint(0.0, 1.0)

EQUAL = "equal-on-truncation"
CONTAINED = "contained"
DISTINCT = "distinct"

# Lengths


@dataclass(frozen=True)
class LengthEntry:
    length: float
    multiplicity: int
    witnesses: Tuple[ConjClass, ...]

    @property
    def trace(self) -> float:
        return 2.0 * math.cosh(self.length / 2.0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "length": self.length,
            "multiplicity": self.multiplicity,
            "witnesses": [c.word for c in self.witnesses],
        }


@dataclass(frozen=True)
class _ClassData:
    cls: ConjClass
    image: Isometry
    axis: Geodesic
    length: float
    frame: Isometry


def _hyperbolic_classes(rep: Representation, depth: int, unsafe: bool = False) -> List[_ClassData]:
    """Primitive unoriented classes to depth whose image is hyperbolic."""
    out = []
    for c in conjugacy_classes(depth, oriented=False, rank=rep.rank, unsafe=unsafe):
        if not is_primitive(c):
            continue
        g = evaluate(rep, c.word)
        if classify(g) is not Kind.HYPERBOLIC:
            logger.debug("class %s is %s; skipped", c.word, classify(g).value)
            continue
        ax = axis(g)
        out.append(_ClassData(c, g, ax, translation_length(g), frame(ax)))
    return out


def _cluster(values: Sequence[float], tol: float) -> List[List[int]]:
    """Anchor clustering of sorted values: a group spans at most tol."""
    groups: List[List[int]] = []
    anchor = None
    for i, v in enumerate(values):
        if anchor is None or v - anchor > tol:
            groups.append([i])
            anchor = v
        else:
            groups[-1].append(i)
    return groups


def length_spectrum(rep: Representation, depth: int, tol: float = CLUSTER_TOL, unsafe: bool = False) -> List[LengthEntry]:
    """Lengths of primitive closed geodesics to depth, clustered within tol."""
    classes = _hyperbolic_classes(rep, depth, unsafe)
    classes.sort(key=lambda d: (d.length, d.cls.sort_key))
    entries = []
    for group in _cluster([d.length for d in classes], tol):
        members = [classes[i] for i in group]
        entries.append(LengthEntry(members[0].length, len(members), tuple(d.cls for d in members)))
    logger.info("length spectrum of %s to depth %d: %d values from %d classes", rep.label, depth, len(entries), len(classes))
    return entries


# Axes


def _unoriented(g: Geodesic) -> Geodesic:
    lo, hi = g.unoriented()
    return Geodesic(lo, hi)


@dataclass(frozen=True)
class AxesSet:
    """Deduplicated unoriented axes, sorted by endpoints, with a witness word each."""

    depth: int
    geodesics: Tuple[Geodesic, ...]
    words: Tuple[Word, ...]
    tol: float = AXIS_MATCH_TOL

    def __len__(self) -> int:
        return len(self.geodesics)

    def __iter__(self):
        return iter(self.geodesics)

    @cached_property
    def index(self) -> AxisIndex:
        return AxisIndex(self.geodesics)

    def contains(self, g: Geodesic, tol: Optional[float] = None) -> bool:
        return self.index.contains(g, self.tol if tol is None else tol)

    def transformed(self, g: Isometry) -> "AxesSet":
        """Image under g, re-sorted."""
        moved = sorted(
            ((_unoriented(apply(g, geo)), w) for geo, w in zip(self.geodesics, self.words)),
            key=lambda item: item[0].unoriented(),
        )
        return AxesSet(self.depth, tuple(m for m, _ in moved), tuple(w for _, w in moved), self.tol)


def axes_set(rep: Representation, depth: int, tol: float = AXIS_MATCH_TOL, unsafe: bool = False) -> AxesSet:
    """Axes of every hyperbolic element of the ball, powers and lifts collapsed."""
    ball = enumerate_ball(depth, rep.rank, unsafe=unsafe)
    images = evaluate_ball(rep, ball.words)
    geodesics: List[Geodesic] = []
    words: List[Word] = []
    for w in ball.words[1:]:
        g = images[w]
        if classify(g) is Kind.HYPERBOLIC:
            geodesics.append(_unoriented(axis(g)))
            words.append(w)
    keep = dedupe(geodesics, tol)
    kept = sorted(keep, key=lambda i: geodesics[i].unoriented())
    logger.info("axes set of %s to depth %d: %d axes from %d hyperbolic words", rep.label, depth, len(kept), len(geodesics))
    return AxesSet(depth, tuple(geodesics[i] for i in kept), tuple(words[i] for i in kept), tol)


# Point reduction


def _moves(rep: Representation, depth: int) -> List[Tuple[Word, Isometry]]:
    ball = enumerate_ball(depth, rep.rank, unsafe=True)
    images = evaluate_ball(rep, ball.words)
    return [(w, images[w]) for w in ball.words[1:]]


def _reduce(p: HPoint, moves: Sequence[Tuple[Word, Isometry]], max_steps: int = 10_000) -> Tuple[HPoint, Word]:
    word = ""
    current = distance(p, CENTER)
    for _ in range(max_steps):
        best = None
        for w, g in moves:
            q = apply(g, p)
            d = distance(q, CENTER)
            if d < current - REDUCE_STEP_TOL and (best is None or d < best[0]):
                best = (d, w, q)
        if best is None:
            return p, word
        current, w, p = best
        word = reduce_word(w + word)
    logger.warning("point reduction stopped after %d steps at distance %.6g", max_steps, current)
    return p, word


def reduce_point(rep: Representation, p: HPoint, depth: int = 1) -> Tuple[HPoint, Word]:
    """Greedily pull p towards i by elements of the depth ball.

    Returns the reduced point and the word w with reduced = rho(w) p.
    """
    return _reduce(p, _moves(rep, depth))


@dataclass(frozen=True)
class DirichletDomain:
    """{z : d(z, center) <= d(z, g center)} over the nontrivial ball elements."""

    center: HPoint
    words: Tuple[Word, ...]
    images: Tuple[HPoint, ...]

    @classmethod
    def from_rep(cls, rep: Representation, depth: int, center: HPoint = CENTER) -> "DirichletDomain":
        words, images = [], []
        for w, g in _moves(rep, depth):
            q = apply(g, center)
            if distance(q, center) > REDUCE_STEP_TOL:
                words.append(w)
                images.append(q)
        return cls(center, tuple(words), tuple(images))

    def contains(self, p: HPoint, tol: float = 1e-9) -> bool:
        d = distance(p, self.center)
        return all(d <= distance(p, q) + tol for q in self.images)


# Angles


@dataclass(frozen=True)
class AngleWitness:
    first: ConjClass
    second: ConjClass
    conjugator: Word
    angle: float
    position: float
    point: HPoint
    reducer: Word

    @property
    def pair(self) -> Tuple[Word, Word]:
        return (self.first.word, self.second.word)

    @property
    def is_self(self) -> bool:
        return self.first == self.second

    def to_dict(self) -> Dict[str, object]:
        return {
            "pair": list(self.pair),
            "conjugator": self.conjugator,
            "angle": self.angle,
            "position": self.position,
            "point": [self.point.x, self.point.y],
            "reducer": self.reducer,
        }


@dataclass(frozen=True)
class AngleEntry:
    angle: float
    multiplicity: int
    witnesses: Tuple[AngleWitness, ...]

    @property
    def acute(self) -> float:
        return min(self.angle, math.pi - self.angle)

    def to_dict(self) -> Dict[str, object]:
        return {
            "angle": self.angle,
            "acute": self.acute,
            "multiplicity": self.multiplicity,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


@dataclass(frozen=True)
class _PairJob:
    first: _ClassData
    second: _ClassData
    lifts: Tuple[Tuple[Word, Isometry, Geodesic], ...]
    moves: Tuple[Tuple[Word, Isometry], ...]
    endpoint_tol: float


def _position(data: _ClassData, z: HPoint) -> float:
    """Signed distance of z along the fixed lift, reduced to [-tol, length - tol)."""
    s = math.log(apply(data.frame, z).y) % data.length
    if s > data.length - POINT_KEY_TOL:
        s -= data.length
    return s


def _pair_witnesses(job: _PairJob) -> List[AngleWitness]:
    found = []
    base = job.first.axis
    same = job.first.cls == job.second.cls
    for k, g, lift in job.lifts:
        if not interleaved(base, lift):
            continue
        try:
            z = crossing(base, lift, job.endpoint_tol)
            theta = angle_cross_ratio(base, lift, job.endpoint_tol)
        except (SharedEndpoint, NoCrossing):
            continue
        if z is None:
            continue
        s = _position(job.first, z)
        if same:
            # Both branches of a self-crossing see the same pair of
            # supplementary angles; keep the acute one on the branch whose
            # forward arc to its partner is the shorter.
            theta = min(theta, math.pi - theta)
            length = job.first.length
            partner = _position(job.first, apply(g.inverse(), z))
            gap = (partner - s) % length
            if gap > length - POINT_KEY_TOL:
                gap = 0.0
            if gap > length / 2.0 + POINT_KEY_TOL:
                continue
            if abs(gap - length / 2.0) <= POINT_KEY_TOL and partner < s:
                continue
        point, reducer = _reduce(z, job.moves)
        found.append(AngleWitness(job.first.cls, job.second.cls, k, theta, s, point, reducer))
    return found


def _dedupe_witnesses(witnesses: Sequence[AngleWitness]) -> List[AngleWitness]:
    """Merge witnesses of one pair that agree in position and angle to POINT_KEY_TOL."""
    groups: Dict[Tuple[Word, Word], List[AngleWitness]] = defaultdict(list)
    for w in witnesses:
        groups[w.pair].append(w)
    out = []
    for key in sorted(groups, key=lambda p: (word_key(p[0]), word_key(p[1]))):
        members = sorted(groups[key], key=lambda w: (w.position, w.angle, word_key(w.conjugator)))
        kept: List[AngleWitness] = []
        for w in members:
            duplicate = False
            for prior in reversed(kept):
                if w.position - prior.position > POINT_KEY_TOL:
                    break
                if abs(w.angle - prior.angle) <= POINT_KEY_TOL:
                    duplicate = True
                    break
            if not duplicate:
                kept.append(w)
        out.extend(kept)
    return out


def crossing_witnesses(
    rep: Representation,
    depth: int,
    conj_depth: Optional[int] = None,
    reduce_depth: int = 1,
    endpoint_tol: float = ENDPOINT_TOL,
    workers: Optional[int] = None,
    unsafe: bool = False,
) -> Tuple[List[AngleWitness], Dict[Word, float]]:
    """One witness per crossing configuration, plus the class lengths."""
    conj_depth = depth if conj_depth is None else conj_depth
    check_depth(depth, WORD_DEPTH_CAP, unsafe=unsafe)
    check_depth(conj_depth, CONJ_DEPTH_CAP, "conjugator depth", unsafe)
    classes = _hyperbolic_classes(rep, depth, unsafe)
    ball = enumerate_ball(conj_depth, rep.rank, unsafe=True)
    conj_images = evaluate_ball(rep, ball.words)
    moves = tuple(_moves(rep, reduce_depth))
    lifts = {
        d.cls.word: tuple((k, conj_images[k], apply(conj_images[k], d.axis)) for k in ball.words)
        for d in classes
    }
    jobs = [
        _PairJob(first, second, lifts[second.cls.word], moves, endpoint_tol)
        for i, first in enumerate(classes)
        for second in classes[i:]
    ]
    logger.info(
        "searching %d class pairs of %s (depth %d, conjugator depth %d)",
        len(jobs), rep.label, depth, conj_depth,
    )
    found = [w for batch in parallel_map(_pair_witnesses, jobs, workers, desc="crossings") for w in batch]
    witnesses = _dedupe_witnesses(found)
    logger.debug("kept %d of %d crossing witnesses", len(witnesses), len(found))
    return witnesses, {d.cls.word: d.length for d in classes}


def angle_spectrum(
    rep: Representation,
    depth: int,
    conj_depth: Optional[int] = None,
    tol: float = CLUSTER_TOL,
    reduce_depth: int = 1,
    workers: Optional[int] = None,
    unsafe: bool = False,
) -> List[AngleEntry]:
    """Crossing angles of primitive closed geodesics, counted with multiplicity."""
    witnesses, _ = crossing_witnesses(rep, depth, conj_depth, reduce_depth, workers=workers, unsafe=unsafe)
    witnesses.sort(key=lambda w: (w.angle, word_key(w.first.word), word_key(w.second.word), w.position))
    entries = []
    for group in _cluster([w.angle for w in witnesses], tol):
        members = tuple(witnesses[i] for i in group)
        entries.append(AngleEntry(members[0].angle, len(members), members))
    logger.info("angle spectrum of %s: %d values, %d configurations", rep.label, len(entries), len(witnesses))
    return entries


@dataclass(frozen=True)
class MultiplicityProfile:
    histogram: Tuple[Tuple[int, int], ...]
    max_multiplicity: int
    singles: int
    repeated: int
    total: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "histogram": {str(m): n for m, n in self.histogram},
            "max_multiplicity": self.max_multiplicity,
            "singles": self.singles,
            "repeated": self.repeated,
            "total": self.total,
        }


def multiplicity_profile(spectrum: Sequence[AngleEntry]) -> MultiplicityProfile:
    counts = Counter(e.multiplicity for e in spectrum)
    return MultiplicityProfile(
        histogram=tuple(sorted(counts.items())),
        max_multiplicity=max(counts, default=0),
        singles=counts.get(1, 0),
        repeated=sum(n for m, n in counts.items() if m >= 2),
        total=len(spectrum),
    )


def value_multiplicity(spectrum: Sequence[AngleEntry], angle: float, tol: float = CLUSTER_TOL) -> int:
    """Multiplicity of the entry within tol of angle, or 0."""
    return sum(e.multiplicity for e in spectrum if abs(e.angle - angle) <= tol)


def recompute_angle(rep: Representation, witness: AngleWitness) -> float:
    """Angle of a witness from a fresh word evaluation; self-crossings fold to the acute angle."""
    k = witness.conjugator
    g1 = axis(evaluate(rep, witness.first.word))
    g2 = axis(evaluate(rep, reduce_word(k + witness.second.word + inverse(k))))
    theta = angle_cross_ratio(g1, g2)
    if witness.is_self:
        return min(theta, math.pi - theta)
    return theta


# Isoaxiality


@dataclass(frozen=True)
class IsoaxialReport:
    verdict: str
    forward: bool
    backward: bool
    forward_missing: int
    backward_missing: int
    depths: Tuple[int, int]
    sizes: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict,
            "forward": self.forward,
            "backward": self.backward,
            "forward_missing": self.forward_missing,
            "backward_missing": self.backward_missing,
            "depths": list(self.depths),
            "sizes": dict(self.sizes),
        }


AxesProvider = Callable[[Representation, int], AxesSet]


def isoaxial_compare(
    rep1: Representation,
    rep2: Representation,
    depth1: int,
    depth2: int,
    tol: float = AXIS_MATCH_TOL,
    provider: Optional[AxesProvider] = None,
) -> IsoaxialReport:
    """Compare truncated axes sets in both directions.

    forward: axes(rep1, depth1) inside axes(rep2, depth2);
    backward: axes(rep2, depth1) inside axes(rep1, depth2).
    """
    if depth2 < depth1:
        raise ValueError(f"depth2 ({depth2}) must be at least depth1 ({depth1})")
    provider = provider or (lambda rep, d: axes_set(rep, d, tol))
    small1, large2 = provider(rep1, depth1), provider(rep2, depth2)
    small2, large1 = provider(rep2, depth1), provider(rep1, depth2)
    forward_missing = len(large2.index.missing(small1.geodesics, tol))
    backward_missing = len(large1.index.missing(small2.geodesics, tol))
    forward, backward = forward_missing == 0, backward_missing == 0
    if forward and backward:
        verdict = EQUAL
    elif forward or backward:
        verdict = CONTAINED
    else:
        verdict = DISTINCT
    logger.info("isoaxial %s vs %s at depths (%d, %d): %s", rep1.label, rep2.label, depth1, depth2, verdict)
    return IsoaxialReport(
        verdict,
        forward,
        backward,
        forward_missing,
        backward_missing,
        (depth1, depth2),
        {"first_small": len(small1), "second_large": len(large2), "second_small": len(small2), "first_large": len(large1)},
    )


# Collar


@dataclass(frozen=True)
class CollarReport:
    pairs_tested: int
    min_product: Optional[float]
    min_pair: Optional[Tuple[Word, Word]]
    violations: int
    holds: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "pairs_tested": self.pairs_tested,
            "min_product": self.min_product,
            "min_pair": list(self.min_pair) if self.min_pair else None,
            "violations": self.violations,
            "holds": self.holds,
        }


def collar_check(
    rep: Representation,
    depth: int,
    conj_depth: Optional[int] = None,
    slack: float = 1e-9,
    workers: Optional[int] = None,
    unsafe: bool = False,
) -> CollarReport:
    """sinh(l1/2) sinh(l2/2) >= 1 over every crossing configuration found."""
    witnesses, lengths = crossing_witnesses(rep, depth, conj_depth, workers=workers, unsafe=unsafe)
    best: Optional[Tuple[float, Tuple[Word, Word]]] = None
    violations = 0
    for w in witnesses:
        product = math.sinh(lengths[w.first.word] / 2.0) * math.sinh(lengths[w.second.word] / 2.0)
        if product < 1.0 - slack:
            violations += 1
            logger.warning("collar inequality fails for %s: %.12g", w.pair, product)
        if best is None or product < best[0]:
            best = (product, w.pair)
    report = CollarReport(
        pairs_tested=len(witnesses),
        min_product=best[0] if best else None,
        min_pair=best[1] if best else None,
        violations=violations,
        holds=violations == 0,
    )
    logger.info("collar check on %s: %d crossings, min product %s", rep.label, len(witnesses), report.min_product)
    return report


__all__ = [
    "AngleEntry",
    "AngleWitness",
    "AxesSet",
    "CENTER",
    "CONTAINED",
    "CollarReport",
    "DISTINCT",
    "DirichletDomain",
    "EQUAL",
    "IsoaxialReport",
    "LengthEntry",
    "MultiplicityProfile",
    "angle_spectrum",
    "axes_set",
    "collar_check",
    "crossing_witnesses",
    "isoaxial_compare",
    "length_spectrum",
    "multiplicity_profile",
    "recompute_angle",
    "reduce_point",
    "value_multiplicity",
]
