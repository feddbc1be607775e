"""Intersection numbers ``F^{n-i} . G^i`` from the Euler characteristic polynomial.

``chi(sF + tG)`` is a polynomial of total degree ``<= n`` in ``(s, t)`` whose
top homogeneous part is ``sum_i C(n,i) F^{n-i} G^i s^{n-i} t^i / n!``. The
polynomial is recovered by exact interpolation on the triangle
``s, t >= 0, s + t <= n`` (unisolvent for that degree) and checked on the
rest of the square grid and at a few off-grid points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .cohomology import euler_char
from .divisors import ToricVariety, is_nef, polytope_box, polytope_of
from .lattice import enumerate_points, solve_rational


class InterpolationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChiPolynomial:
    n: int
    coeffs: tuple  # ((i, j), Fraction) for the monomial s^i t^j

    def coefficient(self, i: int, j: int) -> Fraction:
        return dict(self.coeffs).get((i, j), Fraction(0))

    def __call__(self, s, t) -> Fraction:
        return sum((c * Fraction(s) ** i * Fraction(t) ** j for (i, j), c in self.coeffs), Fraction(0))

    def top_part(self) -> dict:
        return {(i, j): c for (i, j), c in self.coeffs if i + j == self.n}

    def __str__(self):
        terms = [f"{c}*s^{i}*t^{j}" for (i, j), c in self.coeffs if c]
        return " + ".join(terms) or "0"


def _monomials(n: int):
    return [(i, d - i) for d in range(n + 1) for i in range(d, -1, -1)]


def chi_polynomial(X: ToricVariety, F, G, seed: int = 0) -> ChiPolynomial:
    F, G = X.check(F), X.check(G)
    n = X.dim
    monos = _monomials(n)
    nodes = [(s, t) for s in range(n + 1) for t in range(n + 1 - s)]
    values = {(s, t): euler_char(X, s * F + t * G) for s, t in nodes}
    matrix = [[s**i * t**j for i, j in monos] for s, t in nodes]
    sol = solve_rational(matrix, [values[p] for p in nodes])
    poly = ChiPolynomial(n, tuple(zip(monos, sol)))

    rng = random.Random(seed)
    checks = [(s, t) for s in range(n + 1) for t in range(n + 1) if s + t > n]
    checks += [(rng.randint(n + 1, n + 3), rng.randint(n + 1, n + 3)) for _ in range(3)]
    for s, t in checks:
        expected = euler_char(X, s * F + t * G)
        if poly(s, t) != expected:
            raise InterpolationError(
                f"chi polynomial disagrees at (s, t) = ({s}, {t}): {poly(s, t)} != {expected}"
            )
    return poly


@dataclass(frozen=True)
class IntersectionTable:
    numbers: tuple  # entry i is F^{n-i} . G^i

    def __getitem__(self, i):
        return self.numbers[i]

    def __len__(self):
        return len(self.numbers)

    def __iter__(self):
        return iter(self.numbers)

    @property
    def n(self) -> int:
        return len(self.numbers) - 1


def table_from_polynomial(poly: ChiPolynomial) -> IntersectionTable:
    n = poly.n
    top = poly.top_part()
    numbers = []
    for i in range(n + 1):
        value = top.get((n - i, i), Fraction(0)) * factorial(n) / comb(n, i)
        if value.denominator != 1:
            raise InterpolationError(f"non-integral intersection number {value} at i = {i}")
        numbers.append(int(value))
    return IntersectionTable(tuple(numbers))


def intersection_table(X: ToricVariety, F, G) -> IntersectionTable:
    return table_from_polynomial(chi_polynomial(X, F, G))


def ehrhart_counts(X: ToricVariety, D, kmax: int) -> list[int]:
    """Lattice point counts of the polytopes of ``kD`` for ``k = 0..kmax``."""
    D = X.check(D)
    return [len(enumerate_points(polytope_of(X, k * D), polytope_box(X, k * D))) for k in range(kmax + 1)]


def volume_oracle(X: ToricVariety, D) -> Fraction:
    """``n!`` times the leading Ehrhart coefficient of the polytope of nef ``D``.

    Equals the ``n``-th forward difference of the counts at 0.
    """
    D = X.check(D)
    if not is_nef(X, D):
        raise ValueError(f"volume oracle needs a nef divisor, got ({D})")
    n = X.dim
    counts = ehrhart_counts(X, D, n)
    return Fraction(sum((-1) ** (n - k) * comb(n, k) * c for k, c in enumerate(counts)))
