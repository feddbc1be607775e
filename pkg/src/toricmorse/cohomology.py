"""Exact cohomology of torus-invariant line bundles.

For ``D = sum a_r D_r`` and a character ``m`` let ``V(m)`` be the full
subcomplex of the fan on the rays with ``<m, u_r> < -a_r``. Then

    h^p(X, O(D)) = sum over m of dim H~^{p-1}(V(m); Q).

Only finitely many ``m`` contribute. The contributing characters lie in
bounded cells of the arrangement ``<m, u_r> = -a_r - 1/2`` (a lattice point
in an unbounded cell could be translated along a recession direction
forever, giving infinite cohomology), so the bounding box of that
arrangement's vertices is a certified support region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .divisors import Divisor, ToricVariety, is_ample
from .lattice import Box, Fan, arrangement_box, reduced_cohomology_dims

MAX_EXPANSIONS = 4


class SupportRegionError(RuntimeError):
    def __init__(self, message, box):
        super().__init__(f"{message}; last box {box.lower}..{box.upper}")
        self.box = box


@dataclass(frozen=True)
class SupportRegion:
    box: Box
    shell_points: int
    shell_patterns: tuple  # ray-subset bitmasks seen on the shell, all acyclic
    expansions: int = 0


@dataclass(frozen=True)
class CohomologyProfile:
    dims: tuple
    divisor: Divisor
    variety: str = "X"
    region: SupportRegion = field(default=None, compare=False, repr=False)

    def __getitem__(self, q):
        return self.dims[q]

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    @property
    def euler(self) -> int:
        return sum((-1) ** i * h for i, h in enumerate(self.dims))


@lru_cache(maxsize=None)
def _pattern_dims(fan: Fan, mask: int) -> tuple:
    """Reduced cohomology (degrees -1..n-1) of the subcomplex encoded by ``mask``."""
    subset = [r for r in range(fan.nrays) if mask >> r & 1]
    return tuple(reduced_cohomology_dims(fan, subset))


def _mask_grid(fan: Fan, coeffs, box: Box) -> np.ndarray:
    """Bitmask of negative rays at every lattice point of ``box`` (n-d array)."""
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(box.lower, box.upper)]
    shape = tuple(len(a) for a in axes)
    mask = np.zeros(shape, dtype=np.int64)
    for r, u in enumerate(fan.rays):
        value = np.zeros(shape, dtype=np.int64)
        for i, (ui, axis) in enumerate(zip(u, axes)):
            if ui:
                view = [1] * len(shape)
                view[i] = len(axis)
                value = value + ui * axis.reshape(view)
        mask |= (value < -coeffs[r]).astype(np.int64) << r
    return mask


def _initial_box(X: ToricVariety, D: Divisor) -> Box:
    return arrangement_box(X.fan.rays, [-Fraction(a) - Fraction(1, 2) for a in D])


def _acyclic(fan: Fan, mask: int) -> bool:
    return not any(_pattern_dims(fan, mask))


def _counts(X: ToricVariety, D: Divisor, max_expansions: int = MAX_EXPANSIONS):
    fan = X.fan
    nmasks = 1 << fan.nrays
    box = _initial_box(X, D)
    limit = max(abs(c) for c in box.lower + box.upper) + 2
    if limit * max(abs(x) for u in fan.rays for x in u) * fan.rank > 2**60:
        raise OverflowError("support region too large for int64 arithmetic")
    for expansion in range(max_expansions + 1):
        grid = _mask_grid(fan, D.coeffs, box.inflate(1))
        inner = grid[(slice(1, -1),) * fan.rank]
        total = np.bincount(grid.ravel(), minlength=nmasks)
        inside = np.bincount(inner.ravel(), minlength=nmasks)
        shell = total - inside
        seen = [int(m) for m in np.nonzero(shell)[0]]
        if all(_acyclic(fan, m) for m in seen):
            region = SupportRegion(box, int(shell.sum()), tuple(seen), expansion)
            return inside, region
        box = box.inflate(max(1, max(b - a for a, b in zip(box.lower, box.upper)) // 2))
    raise SupportRegionError("support region not certified", box)


@lru_cache(maxsize=4096)
def _cohomology_cached(X: ToricVariety, coeffs: tuple) -> CohomologyProfile:
    D = Divisor(coeffs)
    counts, region = _counts(X, D)
    dims = [0] * (X.dim + 1)
    for mask in np.nonzero(counts)[0]:
        mask = int(mask)
        reduced = _pattern_dims(X.fan, mask)
        c = int(counts[mask])
        # reduced[p] is degree p - 1, which feeds h^p
        for p, dim in enumerate(reduced):
            if dim:
                dims[p] += c * dim
    return CohomologyProfile(tuple(dims), D, X.name, region)


def cohomology_dims(X: ToricVariety, D) -> CohomologyProfile:
    """``(h^0, ..., h^n)`` of ``O(D)``, exact."""
    D = X.check(D)
    return _cohomology_cached(X, D.coeffs)


def euler_char(X: ToricVariety, D) -> int:
    return cohomology_dims(X, D).euler


@dataclass(frozen=True)
class VanishingResult:
    k0: int | None
    K_max: int
    A_max: int
    nonvanishing: tuple  # (k, a, profile dims) with some h^q != 0, q >= 1

    @property
    def found(self) -> bool:
        return self.k0 is not None

    def __str__(self):
        if self.k0 is None:
            return f"none found <= {self.K_max}"
        return f"k0 = {self.k0}"


def vanishing_scan(X: ToricVariety, F, H, K_max: int, A_max: int) -> VanishingResult:
    """Least ``k0 <= K_max`` with ``h^q(kF + aH) = 0`` for all ``q >= 1``,
    ``k0 <= k <= K_max`` and ``0 <= a <= A_max``."""
    F, H = X.check(F), X.check(H)
    if not is_ample(X, F):
        raise ValueError(f"F = ({F}) is not ample on {X.name}")
    if not is_ample(X, H):
        raise ValueError(f"H = ({H}) is not ample on {X.name}")
    if K_max < 1 or A_max < 1:
        raise ValueError("K_max and A_max must be at least 1")
    bad = []
    for k in range(1, K_max + 1):
        for a in range(A_max + 1):
            dims = cohomology_dims(X, k * F + a * H).dims
            if any(dims[1:]):
                bad.append((k, a, dims))
    last_bad = max((k for k, _, _ in bad), default=0)
    k0 = last_bad + 1 if last_bad < K_max else None
    return VanishingResult(k0, K_max, A_max, tuple(bad))

