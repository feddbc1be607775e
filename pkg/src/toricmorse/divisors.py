"""Torus-invariant divisors on smooth complete toric varieties.

A divisor is stored as one integer coefficient per ray of the fan. The
polytope of ``D = sum a_r D_r`` is ``{m : <m, u_r> >= -a_r}``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

from .lattice import (
    Box,
    Fan,
    FanError,
    HalfSpaceSystem,
    arrangement_box,
    dot,
    is_complete,
    is_smooth,
    solve_rational,
    unimodular_completion,
)

AMPLE_SEARCH_BOUND = 10


class VarietyError(ValueError):
    """The fan does not define a smooth projective toric variety."""


@dataclass(frozen=True)
class Divisor:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __add__(self, other):
        other = as_divisor(other)
        _check_len(self, other)
        return Divisor(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        other = as_divisor(other)
        _check_len(self, other)
        return Divisor(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self):
        return Divisor(tuple(-a for a in self))

    def __mul__(self, k: int):
        return Divisor(tuple(k * a for a in self))

    __rmul__ = __mul__

    def __str__(self):
        return ",".join(str(a) for a in self)


def _check_len(a: Divisor, b: Divisor):
    if len(a) != len(b):
        raise ValueError(f"divisors of different lengths {len(a)} and {len(b)}")


def as_divisor(d) -> Divisor:
    return d if isinstance(d, Divisor) else Divisor(tuple(d))


@dataclass(frozen=True)
class ToricVariety:
    """A smooth complete projective toric variety; certified at construction."""

    fan: Fan
    name: str = "X"
    ample_witness: Divisor = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not is_smooth(self.fan):
            raise VarietyError(f"{self.name}: fan is not smooth")
        if not is_complete(self.fan):
            raise VarietyError(f"{self.name}: fan is not complete")
        witness = find_ample(self)
        if witness is None:
            raise VarietyError(f"{self.name}: no ample divisor found (not projective?)")
        object.__setattr__(self, "ample_witness", witness)

    @property
    def dim(self) -> int:
        return self.fan.rank

    @property
    def nrays(self) -> int:
        return self.fan.nrays

    def check(self, d) -> Divisor:
        d = as_divisor(d)
        if len(d) != self.nrays:
            raise ValueError(f"{self.name}: divisor needs {self.nrays} coefficients, got {len(d)}")
        return d

    def canonical(self) -> Divisor:
        return Divisor((-1,) * self.nrays)

    def prime(self, rho: int) -> Divisor:
        return Divisor(tuple(int(i == rho) for i in range(self.nrays)))


@dataclass(frozen=True)
class CartierData:
    """Per maximal cone, the integral ``m`` with ``<m, u_r> = -a_r`` on the cone's rays."""

    cones: tuple
    vectors: tuple

    def __getitem__(self, cone_index: int) -> tuple:
        return self.vectors[cone_index]


def cartier_data(X: ToricVariety, D) -> CartierData:
    D = X.check(D)
    vectors = []
    for cone in X.fan.max_cones:
        m = solve_rational([X.fan.rays[i] for i in cone], [-D[i] for i in cone])
        assert all(x.denominator == 1 for x in m), "non-integral Cartier data on a smooth cone"
        vectors.append(tuple(int(x) for x in m))
    return CartierData(X.fan.max_cones, tuple(vectors))


def _pairing_slacks(fan: Fan, coeffs: Sequence[int]):
    """Yield ``<m_sigma, u_r> + a_r`` for every maximal cone and ray outside it."""
    for cone in fan.max_cones:
        m = solve_rational([fan.rays[i] for i in cone], [-coeffs[i] for i in cone])
        for r in range(fan.nrays):
            if r not in cone:
                yield dot(m, fan.rays[r]) + coeffs[r]


def is_nef(X: ToricVariety, D) -> bool:
    D = X.check(D)
    return all(s >= 0 for s in _pairing_slacks(X.fan, D.coeffs))


def is_ample(X: ToricVariety, D) -> bool:
    D = X.check(D)
    return all(s > 0 for s in _pairing_slacks(X.fan, D.coeffs))


def find_ample(X: ToricVariety, bound: int = AMPLE_SEARCH_BOUND):
    """Search for an ample divisor; ``None`` if none is found.

    Classes are normalised to vanish on the first maximal cone (possible on a
    smooth fan), so an ample representative has positive coefficients on the
    remaining rays. Scan those up to ``bound``; otherwise ask an LP for a
    candidate and certify it exactly.
    """
    fan = X.fan
    base = set(fan.max_cones[0])
    free = [r for r in range(fan.nrays) if r not in base]
    # Low coefficient sums first, so the witness is small.
    grid = sorted(itertools.product(range(1, bound + 1), repeat=len(free)), key=lambda v: (sum(v), v))
    for values in grid:
        coeffs = [0] * fan.nrays
        for r, v in zip(free, values):
            coeffs[r] = v
        if all(s > 0 for s in _pairing_slacks(fan, coeffs)):
            return Divisor(coeffs)
    return _ample_by_lp(fan)


def _ample_by_lp(fan: Fan):
    import numpy as np
    from scipy.optimize import linprog

    # Variables: divisor coefficients a_r and one slack t; maximise t subject to
    # slack_{sigma,r}(a) >= t, with a vanishing on the first cone.
    nr = fan.nrays
    rows, rhs = [], []
    for cone in fan.max_cones:
        basis = [fan.rays[i] for i in cone]
        for r in range(nr):
            if r in cone:
                continue
            # <m_sigma, u_r> + a_r is linear in a; recover coefficients column by column
            coef = [0.0] * nr
            for j in range(nr):
                unit = [int(j == i) for i in range(nr)]
                m = solve_rational(basis, [-unit[i] for i in cone])
                coef[j] = float(dot(m, fan.rays[r]) + unit[r])
            rows.append([-c for c in coef] + [1.0])
            rhs.append(0.0)
    bounds = [(0, 0) if r in fan.max_cones[0] else (None, None) for r in range(nr)] + [(None, 1)]
    res = linprog(c=[0.0] * nr + [-1.0], A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds)
    if not res.success or res.x[-1] <= 1e-9:
        return None
    a = res.x[:nr] / res.x[-1]
    for scale in (1, 2, 5, 10, 100, 1000):
        coeffs = [int(round(x * scale)) for x in a]
        if all(s > 0 for s in _pairing_slacks(fan, coeffs)):
            return Divisor(coeffs)
    return None


def polytope_of(X: ToricVariety, D) -> HalfSpaceSystem:
    D = X.check(D)
    return HalfSpaceSystem(X.fan.rays, tuple(-a for a in D))


def polytope_box(X: ToricVariety, D) -> Box:
    """A box containing the (bounded) polytope of ``D``."""
    D = X.check(D)
    return arrangement_box(X.fan.rays, [-a for a in D])


def principal_divisor(X: ToricVariety, m: Sequence[int]) -> Divisor:
    return Divisor(tuple(dot(m, u) for u in X.fan.rays))


def linearly_equivalent(X: ToricVariety, D1, D2) -> bool:
    diff = X.check(D1) - X.check(D2)
    cone = X.fan.max_cones[0]
    m = solve_rational([X.fan.rays[i] for i in cone], [diff[i] for i in cone])
    if any(x.denominator != 1 for x in m):
        return False
    return principal_divisor(X, [int(x) for x in m]) == diff


@dataclass(frozen=True)
class PrimeRestriction:
    variety: ToricVariety
    divisor: Divisor
    source_ray: int
    ray_map: tuple  # ray index on the star variety -> ray index on the source


def _star_fan(fan: Fan, rho: int):
    basis = unimodular_completion(fan.rays[rho])
    neighbours = sorted({i for c in fan.max_cones if rho in c for i in c if i != rho})
    images = []
    for i in neighbours:
        w = [dot(row, fan.rays[i]) for row in basis]
        images.append(tuple(w[1:]))
    position = {r: k for k, r in enumerate(neighbours)}
    cones = [tuple(position[i] for i in c if i != rho) for c in fan.max_cones if rho in c]
    return Fan(fan.rank - 1, tuple(images), tuple(cones)), tuple(neighbours), basis


def restrict_to_prime(X: ToricVariety, D, rho: int) -> PrimeRestriction:
    """Restrict ``O(D)`` to the invariant prime divisor ``D_rho``.

    ``D`` is first moved within its class so that its coefficient at ``rho``
    vanishes; the coefficients at neighbouring rays then give the restriction.
    """
    D = X.check(D)
    if X.dim < 2:
        raise ValueError("restriction needs a variety of dimension at least 2")
    if not 0 <= rho < X.nrays:
        raise ValueError(f"ray index {rho} out of range")
    star, neighbours, basis = _star_fan(X.fan, rho)
    # <m, u_rho> = -a_rho with m = -a_rho * (first row of basis), since basis u_rho = e_1
    m = [-D[rho] * x for x in basis[0]]
    assert dot(m, X.fan.rays[rho]) == -D[rho]
    moved = D + principal_divisor(X, m)
    assert moved[rho] == 0
    variety = ToricVariety(star, name=f"D{rho}({X.name})")
    return PrimeRestriction(variety, Divisor(tuple(moved[i] for i in neighbours)), rho, neighbours)


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------

def _projective_space(n: int):
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [(-1,) * n]
    cones = list(itertools.combinations(range(n + 1), n))
    return rays, cones


def _product(a, b):
    rays_a, cones_a = a
    rays_b, cones_b = b
    na, nb = len(rays_a[0]), len(rays_b[0])
    rays = [tuple(r) + (0,) * nb for r in rays_a] + [(0,) * na + tuple(r) for r in rays_b]
    off = len(rays_a)
    cones = [tuple(ca) + tuple(off + i for i in cb) for ca in cones_a for cb in cones_b]
    return rays, cones


def _p1():
    return [(1,), (-1,)], [(0,), (1,)]


def builtin(name: str, *params: int) -> ToricVariety:
    """Standard fans: ``P`` (with n), ``P1xP1``, ``P1xP1xP1``, ``P1xP2``, ``Hirzebruch`` (with r).

    Compact spellings such as ``P2``, ``P(3)``, ``F1`` or ``Hirzebruch(2)`` are accepted.
    """
    key, params = _parse_name(name, params)
    if key == "P":
        (n,) = params or (2,)
        if not 1 <= n <= 4:
            raise ValueError(f"P(n) is available for 1 <= n <= 4, got {n}")
        rays, cones = _projective_space(n)
        label = f"P{n}"
    elif key == "P1xP1":
        rays, cones = _product(_p1(), _p1())
        label = key
    elif key == "P1xP1xP1":
        rays, cones = _product(_product(_p1(), _p1()), _p1())
        label = key
    elif key == "P1xP2":
        rays, cones = _product(_p1(), _projective_space(2))
        label = key
    elif key == "Hirzebruch":
        (r,) = params or (1,)
        if r < 0:
            raise ValueError("Hirzebruch parameter must be nonnegative")
        rays = [(1, 0), (0, 1), (-1, r), (0, -1)]
        cones = [(0, 1), (1, 2), (2, 3), (3, 0)]
        label = f"F{r}"
    else:
        raise ValueError(f"unknown builtin variety {name!r}")
    try:
        fan = Fan(len(rays[0]), tuple(rays), tuple(cones))
    except FanError as err:
        raise VarietyError(f"{label}: {err}") from err
    return ToricVariety(fan, label)


_NAME_RE = re.compile(r"^\s*([A-Za-z0-9x]+?)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")


def _parse_name(name: str, params):
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError(f"unknown builtin variety {name!r}")
    base, arg = m.group(1), m.group(2)
    params = tuple(params) + ((int(arg),) if arg is not None else ())
    if base in ("P1xP1", "P1xP1xP1", "P1xP2"):
        return base, params
    if base.lower() == "hirzebruch":
        return "Hirzebruch", params
    if re.fullmatch(r"[FH]\d+", base):
        return "Hirzebruch", params + (int(base[1:]),)
    if base == "P":
        return "P", params
    if re.fullmatch(r"P\d", base):
        return "P", params + (int(base[1:]),)
    raise ValueError(f"unknown builtin variety {name!r}")
