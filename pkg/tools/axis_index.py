"""
FAISS nearest-neighbour lookup over unoriented geodesics.

A geodesic with ideal endpoints p, q is embedded as the pair (u + v, u v)
of complex numbers, four reals in all, where u and v are the Cayley images
of p and q on the unit circle. The embedding is symmetric in the endpoints
and Lipschitz for the chordal metric, so every pair of geodesics whose
endpoints agree within tol lies within 2*sqrt(2)*tol in embedding space.
FAISS only proposes candidates; each one is confirmed with
``Geodesic.close_to`` in double precision.
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, List, Sequence

import numpy as np

try:
    import faiss
except ImportError:  # pragma: no cover - exercised only without faiss-cpu
    faiss = None

from config import AXIS_MATCH_TOL
from tools.hypgeom import Geodesic

logger = logging.getLogger(__name__)

# float32 distances carry ~1e-6 absolute error, so candidates are gathered
# from a generous radius and filtered exactly.
SEARCH_RADIUS = 1e-2


def _cayley(x: float) -> complex:
    if math.isinf(x):
        return 1.0 + 0.0j
    return (x - 1j) / (x + 1j)


def embed(geodesics: Iterable[Geodesic]) -> np.ndarray:
    """Return the (n, 4) float64 embedding of unoriented geodesics."""
    rows = []
    for g in geodesics:
        u = _cayley(g.repelling)
        v = _cayley(g.attracting)
        s, p = u + v, u * v
        rows.append((s.real, s.imag, p.real, p.imag))
    return np.asarray(rows, dtype=np.float64).reshape(-1, 4)


class AxisIndex:
    """Exact-verified neighbour search over a fixed list of geodesics."""

    def __init__(self, geodesics: Sequence[Geodesic], use_faiss: bool = True) -> None:
        self.geodesics: List[Geodesic] = list(geodesics)
        self.vectors = embed(self.geodesics)
        self._index = None
        if use_faiss and faiss is not None and len(self.geodesics):
            self._index = faiss.IndexFlatL2(4)
            self._index.add(self.vectors.astype("float32"))
        elif use_faiss and faiss is None:
            logger.warning("faiss is not installed; axis lookups fall back to numpy")

    def __len__(self) -> int:
        return len(self.geodesics)

    @property
    def backend(self) -> str:
        return "faiss" if self._index is not None else "numpy"

    def _candidates(self, queries: np.ndarray, radius: float) -> List[np.ndarray]:
        if not len(self.geodesics):
            return [np.empty(0, dtype=np.int64) for _ in range(len(queries))]
        if self._index is not None:
            lims, _, ids = self._index.range_search(queries.astype("float32"), radius * radius)
            return [np.sort(ids[lims[i]:lims[i + 1]]) for i in range(len(queries))]
        out = []
        for q in queries:
            d2 = np.sum((self.vectors - q) ** 2, axis=1)
            out.append(np.flatnonzero(d2 <= radius * radius))
        return out

    def matches(self, queries: Sequence[Geodesic], tol: float = AXIS_MATCH_TOL) -> List[List[int]]:
        """For each query, the indices of stored geodesics equal to it within tol."""
        queries = list(queries)
        if not queries:
            return []
        radius = max(SEARCH_RADIUS, 4.0 * tol)
        found = []
        for g, ids in zip(queries, self._candidates(embed(queries), radius)):
            found.append([int(i) for i in ids if self.geodesics[i].close_to(g, tol, oriented=False)])
        return found

    def contains(self, g: Geodesic, tol: float = AXIS_MATCH_TOL) -> bool:
        return bool(self.matches([g], tol)[0])

    def missing(self, queries: Sequence[Geodesic], tol: float = AXIS_MATCH_TOL) -> List[int]:
        """Positions of queries with no stored match."""
        return [i for i, hits in enumerate(self.matches(queries, tol)) if not hits]


def dedupe(geodesics: Sequence[Geodesic], tol: float = AXIS_MATCH_TOL, use_faiss: bool = True) -> List[int]:
    """Indices of the first member of every tol-cluster, in input order."""
    index = AxisIndex(geodesics, use_faiss=use_faiss)
    keep: List[int] = []
    taken = np.zeros(len(index), dtype=bool)
    for i, hits in enumerate(index.matches(index.geodesics, tol)):
        if taken[i]:
            continue
        keep.append(i)
        for j in hits:
            taken[j] = True
    logger.debug("deduplicated %d geodesics to %d (%s backend)", len(index), len(keep), index.backend)
    return keep


__all__ = ["AxisIndex", "SEARCH_RADIUS", "dedupe", "embed"]
