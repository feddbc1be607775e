"""Exact lattice geometry: integer linear algebra, simplicial fans, lattice
point enumeration and reduced cohomology of full subcomplexes of a fan.

Everything here works over the integers or :class:`fractions.Fraction`;
there is no floating point arithmetic in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class FanError(ValueError):
    """Raised for structurally invalid fans."""


LatticePoint = tuple  # tuple of ints, length = ambient rank


# ---------------------------------------------------------------------------
# integer / rational linear algebra
# ---------------------------------------------------------------------------

def integer_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(row) for row in matrix]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][c]
        for i in range(rank + 1, nrows):
            f = m[i][c]
            row = m[i]
            prow = m[rank]
            for j in range(c + 1, ncols):
                row[j] = (row[j] * p - f * prow[j]) // prev
            row[c] = 0
        prev = p
        rank += 1
    return rank


def integer_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (Bareiss)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``a x = b`` exactly. Raises ``ValueError`` if singular."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        m[c], m[pivot] = m[pivot], m[c]
        p = m[c][c]
        m[c] = [v / p for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vc for vi, vc in zip(m[i], m[c])]
    return [row[n] for row in m]


def dot(u: Sequence[int], v: Sequence[int]):
    return sum(x * y for x, y in zip(u, v))


def unimodular_completion(u: Sequence[int]) -> list[list[int]]:
    """Return an integer matrix ``B`` with ``det B = ±1`` and ``B u = e_1``.

    ``u`` must be primitive.
    """
    n = len(u)
    v = list(u)
    b = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(i, j, q):  # row_i -= q * row_j
        v[i] -= q * v[j]
        b[i] = [x - q * y for x, y in zip(b[i], b[j])]

    # Euclid on the entries, pushing the gcd into position 0.
    for i in range(1, n):
        while v[i] != 0:
            q = v[0] // v[i]
            combine(0, i, q)
            v[0], v[i] = v[i], v[0]
            b[0], b[i] = b[i], b[0]
    if abs(v[0]) != 1:
        raise ValueError(f"vector {tuple(u)} is not primitive")
    if v[0] == -1:
        v[0] = 1
        b[0] = [-x for x in b[0]]
    return b


# ---------------------------------------------------------------------------
# fans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    """A simplicial fan given by primitive rays and full-dimensional maximal cones.

    Cones are tuples of ray indices. Construction validates the structural
    invariants; smoothness and completeness are separate predicates.
    """

    rank: int
    rays: tuple
    max_cones: tuple

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(int(i) for i in c) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        if self.rank < 1:
            raise FanError("rank must be positive")
        for idx, r in enumerate(rays):
            if len(r) != self.rank:
                raise FanError(f"ray {idx} {list(r)} has length {len(r)}, expected {self.rank}")
            if not any(r):
                raise FanError(f"ray {idx} is zero")
            if gcd(*r) != 1:
                raise FanError(f"ray {idx} {list(r)} is not primitive")
        if len(set(rays)) != len(rays):
            raise FanError("duplicate rays")
        if not cones:
            raise FanError("fan has no maximal cones")
        used = set()
        for ci, c in enumerate(cones):
            if len(c) != self.rank:
                raise FanError(f"cone {ci} {list(c)} has {len(c)} rays, expected {self.rank}")
            if len(set(c)) != len(c):
                raise FanError(f"cone {ci} {list(c)} repeats a ray")
            if any(not 0 <= i < len(rays) for i in c):
                raise FanError(f"cone {ci} {list(c)} has a ray index out of range")
            if integer_det([rays[i] for i in c]) == 0:
                raise FanError(f"cone {ci} {list(c)} is not full-dimensional")
            used.update(c)
        if len(used) != len(rays):
            missing = sorted(set(range(len(rays))) - used)
            raise FanError(f"rays {missing} lie in no maximal cone")

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def cone_sets(self) -> list[frozenset]:
        return [frozenset(c) for c in self.max_cones]


def is_smooth(fan: Fan) -> bool:
    return all(abs(integer_det([fan.rays[i] for i in c])) == 1 for c in fan.max_cones)


def is_complete(fan: Fan) -> bool:
    """Wall-pairing test: every facet of every maximal cone lies on exactly two
    maximal cones, and the cone adjacency graph is connected."""
    walls: dict[frozenset, list[int]] = {}
    for ci, c in enumerate(fan.max_cones):
        for i in c:
            walls.setdefault(frozenset(c) - {i}, []).append(ci)
    if any(len(owners) != 2 for owners in walls.values()):
        return False
    adj: dict[int, set] = {i: set() for i in range(len(fan.max_cones))}
    for a, b in walls.values():
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(fan.max_cones)


# ---------------------------------------------------------------------------
# half-spaces, boxes, enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpaceSystem:
    """The set ``{m : <m, normals[i]> >= offsets[i] for all i}``."""

    normals: tuple
    offsets: tuple

    def __post_init__(self):
        normals = tuple(tuple(int(x) for x in v) for v in self.normals)
        offsets = tuple(self.offsets)
        if len(normals) != len(offsets):
            raise ValueError("normals and offsets differ in length")
        if any(not any(v) for v in normals):
            raise ValueError("zero normal")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    def contains(self, m: Sequence[int]) -> bool:
        return all(dot(m, v) >= b for v, b in zip(self.normals, self.offsets))


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(int(x) for x in self.lower)
        hi = tuple(int(x) for x in self.upper)
        if len(lo) != len(hi):
            raise ValueError("box corners differ in length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box lower {lo} exceeds upper {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def inflate(self, by: int = 1) -> "Box":
        return Box(tuple(x - by for x in self.lower), tuple(x + by for x in self.upper))

    def size(self) -> int:
        out = 1
        for a, b in zip(self.lower, self.upper):
            out *= b - a + 1
        return out

    def points(self) -> Iterable[tuple]:
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lower, self.upper)))


def enumerate_points(hs: HalfSpaceSystem, clip: Box) -> list[tuple]:
    """Integer points of ``clip`` satisfying every inequality, in lexicographic order."""
    return [p for p in clip.points() if hs.contains(p)]


def arrangement_box(normals: Sequence[Sequence[int]], offsets: Sequence) -> Box:
    """Smallest integer box containing every vertex of the hyperplane arrangement
    ``<m, normals[i]> = offsets[i]``.

    Every bounded cell of the arrangement lies in the convex hull of these
    vertices. Offsets may be rational.
    """
    n = len(normals[0])
    lo: list = [None] * n
    hi: list = [None] * n
    for subset in itertools.combinations(range(len(normals)), n):
        rows = [normals[i] for i in subset]
        if integer_det(rows) == 0:
            continue
        vertex = solve_rational(rows, [offsets[i] for i in subset])
        for i, x in enumerate(vertex):
            lo[i] = x if lo[i] is None or x < lo[i] else lo[i]
            hi[i] = x if hi[i] is None or x > hi[i] else hi[i]
    if lo[0] is None:
        raise ValueError("arrangement has no vertices (normals do not span)")
    return Box(tuple(_floor(x) for x in lo), tuple(_ceil(x) for x in hi))


def _floor(x) -> int:
    return Fraction(x).numerator // Fraction(x).denominator


def _ceil(x) -> int:
    return -_floor(-Fraction(x))


# ---------------------------------------------------------------------------
# reduced cohomology of full subcomplexes
# ---------------------------------------------------------------------------

def subcomplex_faces(fan: Fan, ray_subset: Iterable[int]) -> list[tuple]:
    """All faces (sorted index tuples, including the empty face) of the full
    subcomplex on ``ray_subset``; a set of rays is a face iff it lies in a cone."""
    subset = frozenset(ray_subset)
    faces = {()}
    for cone in fan.max_cones:
        inside = sorted(subset.intersection(cone))
        for size in range(1, len(inside) + 1):
            faces.update(itertools.combinations(inside, size))
    return sorted(faces, key=lambda f: (len(f), f))


def _coboundary(lower: list[tuple], upper: list[tuple]) -> list[list[int]]:
    """Matrix of the coboundary from cochains on ``lower`` to cochains on ``upper``."""
    index = {f: i for i, f in enumerate(lower)}
    rows = []
    for face in upper:
        row = [0] * len(lower)
        for pos in range(len(face)):
            row[index[face[:pos] + face[pos + 1:]]] = (-1) ** pos
        rows.append(row)
    return rows


def reduced_cohomology_dims(fan: Fan, ray_subset: Iterable[int]) -> list[int]:
    """Dimensions over Q of reduced cohomology, indexed by degree -1 .. rank-1."""
    return list(_reduced_cohomology(fan, frozenset(ray_subset)))


@lru_cache(maxsize=None)
def _reduced_cohomology(fan: Fan, subset: frozenset) -> tuple:
    faces = subcomplex_faces(fan, subset)
    by_dim = [[f for f in faces if len(f) == d + 1] for d in range(-1, fan.rank)]
    # by_dim[i] holds the faces of degree i - 1; ranks[i] is the rank of
    # the coboundary by_dim[i] -> by_dim[i + 1]
    ranks = []
    for i in range(fan.rank):
        lower, upper = by_dim[i], by_dim[i + 1]
        ranks.append(integer_rank(_coboundary(lower, upper)) if lower and upper else 0)
    ranks.append(0)
    return tuple(
        len(by_dim[i]) - ranks[i] - (ranks[i - 1] if i else 0) for i in range(fan.rank + 1)
    )


def reduced_euler_characteristic(fan: Fan, ray_subset: Iterable[int]) -> int:
    """Alternating face count, starting with ``-1`` for the empty face."""
    return sum((-1) ** (len(f) - 1) for f in subcomplex_faces(fan, ray_subset))
