"""Upper half-plane geometry for Fuchsian group computations.

Isometries are real unimodular 2x2 matrices taken modulo sign. Boundary
points are plain floats with ``math.inf`` standing for the point at
infinity; the cross-ratio cancels infinite factors symbolically.

Every "endpoint within tol" comparison goes through ``boundary_distance``,
the chordal metric on the unit circle after the Cayley map, so that
endpoints near infinity compare sensibly with infinity itself.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import singledispatch
from typing import Optional, Tuple

import numpy as np

from config import CLASSIFY_TOL, ENDPOINT_TOL, FORMULA_TOL, NORMALIZE_TOL

logger = logging.getLogger(__name__)

INFINITY = math.inf

# A finite real or math.inf.
BoundaryPoint = float

_Matrix = Tuple[float, float, float, float]


class NotHyperbolic(ValueError):
    """Raised when an operation needs a hyperbolic isometry."""


class SharedEndpoint(ValueError):
    """Raised when two geodesics share an ideal endpoint."""


class NoCrossing(ValueError):
    """Raised when an angle is requested for geodesics that do not cross."""


class AxesDisjoint(ValueError):
    """Raised by the trace formula when the axes do not cross."""


class Kind(str, Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


def _unsigned_zero(value: float) -> float:
    return value + 0.0


@dataclass(frozen=True)
class Isometry:
    """Element of PSL(2,R) acting by z -> (a z + b) / (c z + d).

    Construction renormalises to determinant one when the drift exceeds
    ``NORMALIZE_TOL`` and flips the overall sign so that the first nonzero
    entry in row-major order is positive.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        entries = (float(self.a), float(self.b), float(self.c), float(self.d))
        det = entries[0] * entries[3] - entries[1] * entries[2]
        if not math.isfinite(det) or det <= 0.0:
            raise ValueError(f"isometry needs a positive finite determinant, got {det!r}")
        if abs(det - 1.0) > NORMALIZE_TOL:
            scale = math.sqrt(det)
            entries = tuple(x / scale for x in entries)
        lead = next((x for x in entries if x != 0.0), 1.0)
        if lead < 0.0:
            entries = tuple(-x for x in entries)
        for name, value in zip("abcd", entries):
            object.__setattr__(self, name, _unsigned_zero(value))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, scale: float) -> "Isometry":
        """Return diag(scale, 1/scale), the dilation z -> scale**2 * z."""
        return cls(scale, 0.0, 0.0, 1.0 / scale)

    @property
    def entries(self) -> _Matrix:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def is_identity(self, tol: float = NORMALIZE_TOL) -> bool:
        return self.close_to(Isometry.identity(), tol)

    def close_to(self, other: "Isometry", tol: float) -> bool:
        """Entrywise comparison modulo the overall sign."""
        same = all(abs(x - y) <= tol for x, y in zip(self.entries, other.entries))
        flipped = all(abs(x + y) <= tol for x, y in zip(self.entries, other.entries))
        return same or flipped

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)


@dataclass(frozen=True)
class HPoint:
    """Point x + iy of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"HPoint needs finite coordinates, got ({self.x!r}, {self.y!r})")
        if self.y <= 0.0:
            raise ValueError(f"HPoint needs y > 0, got {self.y!r}")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def _normalise_boundary(value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise ValueError("boundary point cannot be NaN")
    if math.isinf(value):
        return INFINITY
    return _unsigned_zero(value)


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``repelling`` to ``attracting``."""

    repelling: BoundaryPoint
    attracting: BoundaryPoint

    def __post_init__(self) -> None:
        repelling = _normalise_boundary(self.repelling)
        attracting = _normalise_boundary(self.attracting)
        if repelling == attracting:
            raise ValueError(f"geodesic endpoints must differ, got {repelling!r} twice")
        object.__setattr__(self, "repelling", repelling)
        object.__setattr__(self, "attracting", attracting)

    @property
    def endpoints(self) -> Tuple[BoundaryPoint, BoundaryPoint]:
        return (self.repelling, self.attracting)

    def reversed(self) -> "Geodesic":
        return Geodesic(self.attracting, self.repelling)

    def unoriented(self) -> Tuple[BoundaryPoint, BoundaryPoint]:
        """Endpoints in ascending order, infinity last."""
        lo, hi = sorted(self.endpoints)
        return (lo, hi)

    def close_to(self, other: "Geodesic", tol: float, oriented: bool = True) -> bool:
        if _pair_close(self.endpoints, other.endpoints, tol):
            return True
        return not oriented and _pair_close(self.endpoints, other.reversed().endpoints, tol)


def _pair_close(first: Tuple[float, float], second: Tuple[float, float], tol: float) -> bool:
    return all(boundary_distance(p, q) <= tol for p, q in zip(first, second))


def _cayley(x: BoundaryPoint) -> complex:
    if math.isinf(x):
        return 1.0 + 0.0j
    return (x - 1j) / (x + 1j)


def boundary_distance(p: BoundaryPoint, q: BoundaryPoint) -> float:
    """Chordal distance between boundary points on the unit circle."""
    if p == q:
        return 0.0
    return abs(_cayley(p) - _cayley(q))


def _mul(m: _Matrix, n: _Matrix) -> _Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _adjugate(m: _Matrix) -> _Matrix:
    a, b, c, d = m
    return (d, -b, -c, a)


def compose(g: Isometry, h: Isometry) -> Isometry:
    """Return g.h (apply h first)."""
    return Isometry(*_mul(g.entries, h.entries))


def commutator_trace(g: Isometry, h: Isometry) -> float:
    """Trace of g h g^-1 h^-1; independent of the sign representatives.

    The inverses stay as raw adjugates: renormalising them to the
    canonical sign could flip the sign of the result.
    """
    gi = _adjugate(g.entries)
    hi = _adjugate(h.entries)
    product = _mul(_mul(_mul(g.entries, h.entries), gi), hi)
    return product[0] + product[3]


def classify(g: Isometry) -> Kind:
    if g.is_identity():
        return Kind.IDENTITY
    trace = abs(g.trace)
    if trace > 2.0 + CLASSIFY_TOL:
        return Kind.HYPERBOLIC
    if trace < 2.0 - CLASSIFY_TOL:
        return Kind.ELLIPTIC
    return Kind.PARABOLIC


def _require_hyperbolic(g: Isometry) -> None:
    kind = classify(g)
    if kind is not Kind.HYPERBOLIC:
        raise NotHyperbolic(f"expected a hyperbolic isometry, got {kind.value} (trace {g.trace!r})")


def translation_length(g: Isometry) -> float:
    _require_hyperbolic(g)
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def axis(g: Isometry) -> Geodesic:
    """Return the oriented axis of a hyperbolic isometry.

    The fixed points solve c z^2 + (d - a) z - b = 0. The root without
    cancellation is computed first and the other from the product of
    roots; the attracting one is where |c z + d| > 1.
    """
    _require_hyperbolic(g)
    a, b, c, d = g.entries
    trace = a + d
    if c == 0.0:
        finite = b / (d - a)
        if abs(a) > abs(d):
            return Geodesic(finite, INFINITY)
        return Geodesic(INFINITY, finite)
    root = math.sqrt(trace * trace - 4.0)
    q = 0.5 * ((a - d) + math.copysign(root, a - d))
    first, second = q / c, -b / q
    if abs(c * first + d) > abs(c * second + d):
        return Geodesic(second, first)
    return Geodesic(first, second)


@singledispatch
def _act(p, g: Isometry):
    raise TypeError(f"cannot apply an isometry to {type(p).__name__}")


@_act.register
def _act_point(p: HPoint, g: Isometry) -> HPoint:
    z = p.z
    den = g.c * z + g.d
    w = (g.a * z + g.b) / den
    # Im w = y / |cz + d|^2 keeps full relative precision near the boundary.
    return HPoint(w.real, p.y / abs(den) ** 2)


@_act.register(float)
@_act.register(int)
def _act_boundary(p: float, g: Isometry) -> BoundaryPoint:
    if math.isinf(p):
        return INFINITY if g.c == 0.0 else g.a / g.c
    den = g.c * p + g.d
    if den == 0.0:
        return INFINITY
    return _unsigned_zero((g.a * p + g.b) / den)


@_act.register
def _act_geodesic(p: Geodesic, g: Isometry) -> Geodesic:
    return Geodesic(_act_boundary(p.repelling, g), _act_boundary(p.attracting, g))


def apply(g: Isometry, p):
    """Apply g to an HPoint, a boundary point or a Geodesic."""
    return _act(p, g)


def frame(geodesic: Geodesic) -> Isometry:
    """Return an isometry taking ``geodesic`` to the oriented axis (0 -> inf)."""
    r, q = geodesic.repelling, geodesic.attracting
    if math.isinf(q):
        return Isometry(1.0, -r, 0.0, 1.0)
    if math.isinf(r):
        return Isometry(0.0, 1.0, -1.0, q)
    if q > r:
        return Isometry(1.0, -r, -1.0, q)
    return Isometry(1.0, -r, 1.0, -q)


def translation(geodesic: Geodesic, t: float) -> Isometry:
    """Translation by signed distance t along the oriented geodesic."""
    if t == 0.0:
        return Isometry.identity()
    f = frame(geodesic)
    shift = Isometry.diag(math.exp(t / 2.0))
    return compose(f.inverse(), compose(shift, f))


def is_left(geodesic: Geodesic, x: BoundaryPoint) -> bool:
    """True when x lies to the left of the oriented geodesic.

    Increasing real coordinate is counter-clockwise on the circle, so the
    left side is where (repelling, attracting, x) is in cyclic order.
    """
    p, q = geodesic.repelling, geodesic.attracting
    return (p < q < x) or (q < x < p) or (x < p < q)


def cross_ratio(x1: BoundaryPoint, x2: BoundaryPoint, y1: BoundaryPoint, y2: BoundaryPoint) -> float:
    """(x1 - y1)(x2 - y2) / ((x1 - y2)(x2 - y1)) with infinity cancelled."""
    if math.isinf(x1):
        return (x2 - y2) / (x2 - y1)
    if math.isinf(x2):
        return (x1 - y1) / (x1 - y2)
    if math.isinf(y1):
        return (x2 - y2) / (x1 - y2)
    if math.isinf(y2):
        return (x1 - y1) / (x2 - y1)
    return ((x1 - y1) * (x2 - y2)) / ((x1 - y2) * (x2 - y1))


def _check_shared(g1: Geodesic, g2: Geodesic, endpoint_tol: float) -> None:
    for p in g1.endpoints:
        for q in g2.endpoints:
            if p == q or boundary_distance(p, q) <= endpoint_tol:
                raise SharedEndpoint(f"geodesics share the endpoint {p!r} ~ {q!r}")


def interleaved(g1: Geodesic, g2: Geodesic) -> bool:
    """True when exactly one endpoint of g2 separates the endpoints of g1."""
    lo, hi = g1.unoriented()
    inside = [lo < x < hi for x in g2.endpoints]
    return inside[0] != inside[1]


def crossing(g1: Geodesic, g2: Geodesic, endpoint_tol: float = ENDPOINT_TOL) -> Optional[HPoint]:
    """Return the intersection point of two geodesics, or None."""
    _check_shared(g1, g2, endpoint_tol)
    if not interleaved(g1, g2):
        return None
    f = frame(g1)
    u = _act_boundary(g2.repelling, f)
    v = _act_boundary(g2.attracting, f)
    # In the frame g1 is the imaginary axis and g2 a semicircle over [u, v].
    return _act_point(HPoint(0.0, math.sqrt(-u * v)), f.inverse())


def _cross_ratio_angle(g1: Geodesic, g2: Geodesic) -> float:
    value = abs(cross_ratio(g1.attracting, g1.repelling, g2.attracting, g2.repelling))
    return 2.0 * math.atan(math.sqrt(value))


def angle_cross_ratio(g1: Geodesic, g2: Geodesic, endpoint_tol: float = ENDPOINT_TOL) -> float:
    """Counter-clockwise angle in (0, pi) from the line of g1 to the line of g2.

    tan^2(theta/2) is the cross-ratio of the oriented endpoints; that angle
    is the counter-clockwise one when g2 heads to the left of g1 and its
    supplement otherwise.
    """
    try:
        _check_shared(g1, g2, endpoint_tol)
    except SharedEndpoint as exc:
        raise NoCrossing(str(exc)) from exc
    if not interleaved(g1, g2):
        raise NoCrossing(f"{g1} and {g2} do not cross")
    theta = _cross_ratio_angle(g1, g2)
    if is_left(g1, g2.attracting):
        return theta
    return math.pi - theta


def angle_trace(g: Isometry, h: Isometry) -> float:
    """Acute crossing angle of the axes of g and h from traces alone."""
    _require_hyperbolic(g)
    _require_hyperbolic(h)
    try:
        point = crossing(axis(g), axis(h))
    except SharedEndpoint as exc:
        raise AxesDisjoint(str(exc)) from exc
    if point is None:
        raise AxesDisjoint("axes do not cross")
    rhs = 4.0 * (2.0 - commutator_trace(g, h)) / ((g.trace ** 2 - 4.0) * (h.trace ** 2 - 4.0))
    if rhs < -CLASSIFY_TOL or rhs > 1.0 + CLASSIFY_TOL:
        raise AxesDisjoint(f"sin^2 of the angle out of range: {rhs!r}")
    return math.asin(math.sqrt(min(max(rhs, 0.0), 1.0)))


def distance(p: HPoint, q: HPoint) -> float:
    return 2.0 * math.asinh(abs(p.z - q.z) / (2.0 * math.sqrt(p.y * q.y)))


def geodesic_distance(g1: Geodesic, g2: Geodesic) -> float:
    """Length of the common perpendicular of two disjoint geodesics.

    With r the cross-ratio pairing the near endpoints, tanh(d/2)^2 = r.
    1 - r is itself a cross-ratio, so far-apart geodesics keep precision.
    """
    _check_shared(g1, g2, 0.0)
    if interleaved(g1, g2):
        raise ValueError("geodesics cross; their distance is zero")
    x1, x2 = g1.endpoints
    y1, y2 = g2.endpoints
    r = abs(cross_ratio(x1, x2, y2, y1))
    if r > 1.0:
        y1, y2 = y2, y1
        r = abs(cross_ratio(x1, x2, y2, y1))
    gap = abs(cross_ratio(x1, y2, x2, y1))
    return math.log((1.0 + math.sqrt(r)) ** 2 / gap)


def random_isometry(rng: np.random.Generator, spread: float = 1.0) -> Isometry:
    """Isometry with Gaussian entries, rescaled to determinant one."""
    while True:
        a, b, c, d = rng.normal(0.0, spread, size=4)
        det = a * d - b * c
        if abs(det) > 1e-3:
            break
    if det < 0.0:
        a, b = -a, -b
    return Isometry(float(a), float(b), float(c), float(d))


def random_hyperbolic(rng: np.random.Generator, spread: float = 1.0) -> Isometry:
    while True:
        g = random_isometry(rng, spread)
        if classify(g) is Kind.HYPERBOLIC and abs(g.trace) > 2.0 + 1e-3:
            return g


def angle_formula_gap(samples: int = 1000, seed: int = 0) -> float:
    """Largest gap between sin^2 of the cross-ratio angle and of the trace angle.

    Samples random crossing hyperbolic pairs with |trace| >= 2.5; agreement
    is expected within ``FORMULA_TOL``.
    """
    rng = np.random.default_rng(seed)
    worst, done = 0.0, 0
    while done < samples:
        g, h = random_hyperbolic(rng), random_hyperbolic(rng)
        if min(abs(g.trace), abs(h.trace)) < 2.5 or crossing(axis(g), axis(h)) is None:
            continue
        psi = angle_cross_ratio(axis(g), axis(h))
        worst = max(worst, abs(math.sin(psi) ** 2 - math.sin(angle_trace(g, h)) ** 2))
        done += 1
    if worst > FORMULA_TOL:
        logger.warning("angle formulas disagree by %.3e over %d samples", worst, samples)
    return worst


__all__ = [
    "AxesDisjoint",
    "BoundaryPoint",
    "Geodesic",
    "HPoint",
    "INFINITY",
    "Isometry",
    "Kind",
    "NoCrossing",
    "NotHyperbolic",
    "SharedEndpoint",
    "angle_cross_ratio",
    "angle_formula_gap",
    "angle_trace",
    "apply",
    "axis",
    "boundary_distance",
    "classify",
    "commutator_trace",
    "compose",
    "cross_ratio",
    "crossing",
    "distance",
    "frame",
    "geodesic_distance",
    "interleaved",
    "random_hyperbolic",
    "random_isometry",
    "is_left",
    "translation",
    "translation_length",
]
