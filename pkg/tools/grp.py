"""Free-group words, balls, conjugacy classes and representation presets.

Words are strings over the letters a, b, c, ...; the upper-case letter is
the inverse generator, so "aB" is a b^-1. Letters are ordered a < A < b < B
< ... for every lexicographic choice made here.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from config import PERTURBATION_DEFAULT, SCHOTTKY_DEFAULTS, WORD_DEPTH_CAP
from tools.hypgeom import (
    Geodesic,
    Isometry,
    NotHyperbolic,
    Kind,
    axis,
    classify,
    commutator_trace,
    compose,
    frame,
    translation,
)

logger = logging.getLogger(__name__)

Word = str


class DepthCap(ValueError):
    """Raised when an enumeration depth exceeds its configured cap."""


class UnknownPreset(ValueError):
    """Raised for a preset name that is not in the catalogue."""


# Letters


def letters(rank: int) -> Tuple[str, ...]:
    """Return the alphabet a, A, b, B, ... for the given rank."""
    if not 1 <= rank <= 26:
        raise ValueError(f"rank must be between 1 and 26, got {rank}")
    out: List[str] = []
    for i in range(rank):
        gen = chr(ord("a") + i)
        out.extend((gen, gen.upper()))
    return tuple(out)


def _letter_key(ch: str) -> int:
    return 2 * (ord(ch.lower()) - ord("a")) + (1 if ch.isupper() else 0)


def word_key(w: Word) -> Tuple[int, Tuple[int, ...]]:
    """Shortlex sort key."""
    return (len(w), tuple(_letter_key(ch) for ch in w))


def inverse(w: Word) -> Word:
    return "".join(ch.swapcase() for ch in reversed(w))


def reduce_word(w: Word) -> Word:
    stack: List[str] = []
    for ch in w:
        if stack and stack[-1] == ch.swapcase():
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def is_reduced(w: Word) -> bool:
    return all(x != y.swapcase() for x, y in zip(w, w[1:]))


def cyclic_reduce(w: Word) -> Word:
    w = reduce_word(w)
    while len(w) > 1 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    return w


def letter_exponent(w: Word, gen: str) -> int:
    """Total signed exponent of generator ``gen`` in w."""
    return w.count(gen.lower()) - w.count(gen.upper())


def _rotations(w: Word) -> List[Word]:
    return [w[i:] + w[:i] for i in range(len(w))] or [w]


def canonical_class(w: Word, oriented: bool = True) -> Word:
    """Least rotation of the cyclic reduction, also over the inverse when unoriented."""
    core = cyclic_reduce(w)
    candidates = _rotations(core)
    if not oriented:
        candidates += _rotations(cyclic_reduce(inverse(core)))
    return min(candidates, key=lambda c: tuple(_letter_key(ch) for ch in c))


@dataclass(frozen=True)
class ConjClass:
    word: Word
    oriented: bool = False

    def __post_init__(self) -> None:
        if canonical_class(self.word, self.oriented) != self.word:
            raise ValueError(f"{self.word!r} is not a canonical class representative")

    @classmethod
    def of(cls, w: Word, oriented: bool = False) -> "ConjClass":
        return cls(canonical_class(w, oriented), oriented)

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return word_key(self.word)

    def __str__(self) -> str:
        return self.word


def is_primitive(c: ConjClass) -> bool:
    """True unless the canonical word is a proper power."""
    w = c.word
    if not w:
        return False
    n = len(w)
    period = next(p for p in range(1, n + 1) if n % p == 0 and w[p:] + w[:p] == w)
    return period == n


# Balls


@dataclass(frozen=True)
class Ball:
    depth: int
    rank: int
    words: Tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)


_BALLS: Dict[Tuple[int, int], Ball] = {}


def ball_size(depth: int, rank: int = 2) -> int:
    if rank == 1:
        return 2 * depth + 1
    k = 2 * rank - 1
    return 1 + 2 * rank * (k ** depth - 1) // (k - 1)


def check_depth(depth: int, cap: int, what: str = "word depth", unsafe: bool = False) -> None:
    if depth < 1:
        raise ValueError(f"{what} must be at least 1, got {depth}")
    if depth > cap and not unsafe:
        raise DepthCap(f"{what} {depth} exceeds the cap {cap}; pass --unsafe-depth to override")


def remember_ball(ball: Ball) -> None:
    """Seed the in-process memo, e.g. from the on-disk cache."""
    if len(ball.words) != ball_size(ball.depth, ball.rank):
        raise ValueError(f"ball of depth {ball.depth} has {len(ball.words)} words")
    _BALLS[(ball.rank, ball.depth)] = ball


def enumerate_ball(depth: int, rank: int = 2, unsafe: bool = False) -> Ball:
    """All freely reduced words of length <= depth in shortlex order."""
    check_depth(depth, WORD_DEPTH_CAP, unsafe=unsafe)
    key = (rank, depth)
    if key in _BALLS:
        return _BALLS[key]
    alphabet = letters(rank)
    words: List[Word] = [""]
    level: List[Word] = [""]
    for _ in range(depth):
        level = [w + ch for w in level for ch in alphabet if not w or w[-1] != ch.swapcase()]
        words.extend(level)
    ball = Ball(depth=depth, rank=rank, words=tuple(words))
    _BALLS[key] = ball
    logger.debug("enumerated ball of depth %d, rank %d: %d words", depth, rank, len(ball))
    return ball


def conjugacy_classes(depth: int, oriented: bool = False, rank: int = 2, unsafe: bool = False) -> List[ConjClass]:
    """Classes with a cyclically reduced representative of length <= depth."""
    ball = enumerate_ball(depth, rank, unsafe=unsafe)
    found = set()
    for w in ball:
        if w and (len(w) == 1 or w[0] != w[-1].swapcase()):
            found.add(canonical_class(w, oriented))
    return [ConjClass(w, oriented) for w in sorted(found, key=word_key)]


# Representations


def jorgensen_value(a: Isometry, b: Isometry) -> float:
    return abs(a.trace ** 2 - 4.0) + abs(commutator_trace(a, b) - 2.0)


@dataclass(frozen=True)
class Representation:
    """Images of the free generators a, b, ... in PSL(2,R).

    ``jorgensen`` is advisory: below 1 the group cannot be discrete, but
    nothing is enforced.
    """

    generators: Tuple[Isometry, ...]
    label: str = "custom"
    params: Tuple[Tuple[str, float], ...] = ()
    jorgensen: Optional[float] = field(default=None, init=False, compare=False)

    def __post_init__(self) -> None:
        generators = tuple(self.generators)
        if not generators:
            raise ValueError("a representation needs at least one generator")
        for name, g in zip(letters(len(generators))[::2], generators):
            if classify(g) is not Kind.HYPERBOLIC:
                raise NotHyperbolic(f"generator {name} of {self.label} is not hyperbolic")
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "params", tuple(self.params))
        if len(generators) >= 2:
            object.__setattr__(self, "jorgensen", jorgensen_value(generators[0], generators[1]))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> Tuple[str, ...]:
        return letters(self.rank)[::2]

    @property
    def jorgensen_ok(self) -> Optional[bool]:
        return None if self.jorgensen is None else self.jorgensen >= 1.0

    def image(self, letter: str) -> Isometry:
        index = ord(letter.lower()) - ord("a")
        if not 0 <= index < self.rank:
            raise ValueError(f"letter {letter!r} is not a generator of a rank-{self.rank} group")
        g = self.generators[index]
        return g.inverse() if letter.isupper() else g

    def with_generators(self, generators: Sequence[Isometry], label: Optional[str] = None) -> "Representation":
        return Representation(tuple(generators), label or self.label, self.params)

    def conjugate(self, g: Isometry, label: Optional[str] = None) -> "Representation":
        """Return g rho g^-1."""
        gi = g.inverse()
        images = [compose(g, compose(x, gi)) for x in self.generators]
        return self.with_generators(images, label or f"{self.label}^g")

    def describe(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "params": dict(self.params),
            "generators": {name: list(g.entries) for name, g in zip(self.names, self.generators)},
            "jorgensen": self.jorgensen,
        }


def evaluate(rep: Representation, w: Word) -> Isometry:
    """Left-to-right product of the generator images."""
    return reduce(compose, (rep.image(ch) for ch in w), Isometry.identity())


def evaluate_ball(rep: Representation, words: Iterable[Word]) -> Dict[Word, Isometry]:
    """Evaluate shortlex-ordered words, reusing each word's prefix.

    Gives the same floats as ``evaluate`` since both multiply left to right.
    """
    images: Dict[Word, Isometry] = {"": Isometry.identity()}
    for w in words:
        if w in images:
            continue
        prefix = w[:-1]
        base = images[prefix] if prefix in images else evaluate(rep, prefix)
        images[w] = compose(base, rep.image(w[-1]))
    return images


def subgroup_rep(rep: Representation, words: Sequence[Word], label: Optional[str] = None) -> Representation:
    """Representation of the subgroup generated by ``words``."""
    images = [evaluate(rep, w) for w in words]
    return Representation(tuple(images), label or f"{rep.label}[{','.join(words)}]", rep.params)


INDEX_TWO_WORDS: Tuple[Word, ...] = ("aa", "b", "abA")


# Presets


def modular_torus() -> Representation:
    a = Isometry(1.0, 1.0, 1.0, 2.0)
    b = Isometry(1.0, -1.0, -1.0, 2.0)
    return Representation((a, b), "modular_torus")


def _fricke_pair(x: float, y: float, z: float) -> Tuple[Isometry, Isometry]:
    """Realise traces (tr a, tr b, tr ab) = (x, y, z) with a diagonal."""
    lam = 0.5 * (x + math.sqrt(x * x - 4.0))
    p = (z - y / lam) / (lam - 1.0 / lam)
    u = y - p
    off = p * u - 1.0
    if off <= 0.0:
        raise ValueError(f"trace triple ({x}, {y}, {z}) does not give crossing axes")
    q = math.sqrt(off)
    return Isometry.diag(lam), Isometry(p, q, q, u)


def perturbed_torus(s: float = PERTURBATION_DEFAULT) -> Representation:
    """Generic one-holed torus near the modular torus.

    The trace triple (3 + s*sqrt2, 3 + s*sqrt3, 3 + s*sqrt5) is realised in
    normal form and conjugated so that a sits where the modular a does;
    s = 0 gives a conjugate of the modular torus.
    """
    if s < 0.0:
        raise ValueError(f"perturbation must be non-negative, got {s}")
    a, b = _fricke_pair(3.0 + s * math.sqrt(2.0), 3.0 + s * math.sqrt(3.0), 3.0 + s * math.sqrt(5.0))
    f = frame(axis(modular_torus().generators[0]))
    rep = Representation((a, b), "perturbed_torus", (("s", float(s)),))
    return rep.conjugate(f.inverse(), label="perturbed_torus")


def schottky(lam: float = SCHOTTKY_DEFAULTS[0], mu: float = SCHOTTKY_DEFAULTS[1], offset: float = SCHOTTKY_DEFAULTS[2]) -> Representation:
    """Hyperbolics of lengths lam, mu on nested axes at distance ``offset``."""
    if min(lam, mu, offset) <= 0.0:
        raise ValueError("schottky lengths and offset must be positive")
    radius = math.exp(offset)
    a = translation(Geodesic(-1.0, 1.0), lam)
    b = translation(Geodesic(-radius, radius), mu)
    return Representation((a, b), "schottky", (("lam", float(lam)), ("mu", float(mu)), ("offset", float(offset))))


@dataclass(frozen=True)
class PresetInfo:
    builder: Callable[..., Representation]
    params: Tuple[str, ...]
    description: str


PRESETS: Mapping[str, PresetInfo] = {
    "modular_torus": PresetInfo(modular_torus, (), "arithmetic once-punctured torus, a=[[1,1],[1,2]], b=[[1,-1],[-1,2]]"),
    "perturbed_torus": PresetInfo(perturbed_torus, ("s",), "one-holed torus with traces 3+s*sqrt2, 3+s*sqrt3, tr ab 3+s*sqrt5"),
    "schottky": PresetInfo(schottky, ("lam", "mu", "offset"), "translation lengths lam, mu on disjoint axes at distance offset"),
}

_PRESET_CALL = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def parse_preset(spec: str) -> Tuple[str, Tuple[float, ...]]:
    """Split "name(1, 2)" into its name and positional parameters."""
    match = _PRESET_CALL.match(spec)
    if not match:
        raise UnknownPreset(f"cannot parse preset {spec!r}")
    name, args = match.group(1), match.group(2)
    try:
        values = tuple(float(x) for x in args.split(",") if x.strip()) if args else ()
    except ValueError as exc:
        raise UnknownPreset(f"bad parameters in {spec!r}") from exc
    return name, values


def preset(name: str, *args: float, **kwargs: float) -> Representation:
    """Build a catalogue preset, by plain name or "name(params)"."""
    if "(" in name:
        name, parsed = parse_preset(name)
        args = parsed + tuple(args)
    info = PRESETS.get(name)
    if info is None:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    if len(args) > len(info.params) or set(kwargs) - set(info.params):
        raise UnknownPreset(f"preset {name} takes parameters {info.params}")
    return info.builder(*args, **kwargs)


__all__ = [
    "Ball",
    "ConjClass",
    "DepthCap",
    "INDEX_TWO_WORDS",
    "PRESETS",
    "Representation",
    "UnknownPreset",
    "Word",
    "ball_size",
    "canonical_class",
    "check_depth",
    "conjugacy_classes",
    "cyclic_reduce",
    "enumerate_ball",
    "evaluate",
    "evaluate_ball",
    "inverse",
    "is_primitive",
    "is_reduced",
    "jorgensen_value",
    "letter_exponent",
    "letters",
    "modular_torus",
    "perturbed_torus",
    "preset",
    "reduce_word",
    "remember_ball",
    "schottky",
    "subgroup_rep",
    "word_key",
]
