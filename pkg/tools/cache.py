"""
On-disk cache for word balls and axes sets.

Files are JSON with a versioned header; a header that does not match the
request (format, rank, depth or representation key) is treated as a miss
and the entry is rebuilt and overwritten.
"""
from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Optional

from config import AXIS_MATCH_TOL, CACHE_DIR, CACHE_FORMAT_VERSION
from tools.export import config_digest, load_json, write_json
from tools.grp import Ball, Representation, ball_size, enumerate_ball, remember_ball
from tools.hypgeom import Geodesic
from tools.spectra import AxesSet, axes_set

logger = logging.getLogger(__name__)


def cache_root(root: Optional[str] = None) -> Path:
    """Explicit root, else $FUCHS_CACHE_DIR at call time, else the configured default."""
    return Path(root or os.getenv("FUCHS_CACHE_DIR") or CACHE_DIR)


def _ball_path(depth: int, rank: int, root: Optional[str]) -> Path:
    return cache_root(root) / f"ball_r{rank}_d{depth}.json"


def load_ball(depth: int, rank: int = 2, root: Optional[str] = None) -> Optional[Ball]:
    path = _ball_path(depth, rank, root)
    if not path.exists():
        return None
    try:
        data = load_json(path)
    except (OSError, ValueError) as exc:
        logger.warning("unreadable ball cache %s: %s", path, exc)
        return None
    header = (data.get("format"), data.get("kind"), data.get("rank"), data.get("depth"))
    words = data.get("words") or []
    if header != (CACHE_FORMAT_VERSION, "ball", rank, depth) or len(words) != ball_size(depth, rank):
        logger.info("stale ball cache %s; rebuilding", path)
        return None
    return Ball(depth=depth, rank=rank, words=tuple(words))


def save_ball(ball: Ball, root: Optional[str] = None) -> Path:
    payload = {
        "format": CACHE_FORMAT_VERSION,
        "kind": "ball",
        "rank": ball.rank,
        "depth": ball.depth,
        "size": len(ball),
        "words": list(ball.words),
    }
    return write_json(_ball_path(ball.depth, ball.rank, root), payload)


def cached_ball(depth: int, rank: int = 2, unsafe: bool = False, root: Optional[str] = None) -> Ball:
    """Ball from disk when present, seeded into the in-process memo."""
    ball = load_ball(depth, rank, root)
    if ball is not None:
        remember_ball(ball)
        logger.debug("ball of depth %d loaded from cache", depth)
        return ball
    ball = enumerate_ball(depth, rank, unsafe=unsafe)
    save_ball(ball, root)
    return ball


def rep_key(rep: Representation) -> str:
    """Digest of the generator matrices, so cached axes follow the actual group."""
    return config_digest({
        "label": rep.label,
        "params": [list(p) for p in rep.params],
        "generators": [[repr(x) for x in g.entries] for g in rep.generators],
    })


def _axes_path(rep: Representation, depth: int, root: Optional[str]) -> Path:
    return cache_root(root) / f"axes_{rep.label}_{rep_key(rep)}_d{depth}.json"


def _endpoint(x: Optional[float]) -> float:
    return math.inf if x is None else float(x)


def cached_axes_set(rep: Representation, depth: int, tol: float = AXIS_MATCH_TOL, unsafe: bool = False, root: Optional[str] = None) -> AxesSet:
    path = _axes_path(rep, depth, root)
    if path.exists():
        try:
            data = load_json(path)
            if (data.get("format"), data.get("key"), data.get("depth"), data.get("tol")) == (CACHE_FORMAT_VERSION, rep_key(rep), depth, tol):
                geodesics = tuple(Geodesic(_endpoint(p), _endpoint(q)) for p, q in data["axes"])
                logger.debug("axes set of %s at depth %d loaded from cache", rep.label, depth)
                return AxesSet(depth, geodesics, tuple(data["words"]), tol)
            logger.info("stale axes cache %s; rebuilding", path)
        except (OSError, ValueError, KeyError) as exc:
            logger.warning("unreadable axes cache %s: %s", path, exc)
    result = axes_set(rep, depth, tol, unsafe=unsafe)
    payload = {
        "format": CACHE_FORMAT_VERSION,
        "kind": "axes",
        "key": rep_key(rep),
        "label": rep.label,
        "depth": depth,
        "tol": tol,
        "axes": [[None if math.isinf(x) else x for x in g.endpoints] for g in result.geodesics],
        "words": list(result.words),
    }
    write_json(path, payload)
    return result


__all__ = [
    "cache_root",
    "cached_axes_set",
    "cached_ball",
    "load_ball",
    "rep_key",
    "save_ball",
]
