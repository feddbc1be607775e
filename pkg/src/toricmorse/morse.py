"""Asymptotic Morse inequalities for ``L = F - G`` with ``F``, ``G`` ample.

Weak form:    h^q(kL)   <= k^n F^{n-q} G^q / ((n-q)! q!)                        + o(k^n)
Strong form:  chi_q(kL) <= k^n / n! * sum_{i<=q} (-1)^{q-i} C(n,i) F^{n-i} G^i  + o(k^n)

where ``chi_q(B) = sum_{i<=q} (-1)^{q-i} h^i(B)``. The intermediate forms
replace ``kL`` by ``kF - jaG`` and ``k^n`` by the mixed monomials
``k^{n-i} (ja)^i``.

An asymptotic inequality is judged on a finite window of ``k``: the exact
leading coefficient of the measured sequence (a quasi-polynomial in ``k``)
must not exceed the bound's, and either the inequality holds pointwise from
some ``k`` on, or the relative shortfall ``margin / k^n`` shrinks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, factorial
from typing import Iterable, Sequence

from .cohomology import CohomologyProfile, cohomology_dims
from .divisors import Divisor, ToricVariety, is_ample, restrict_to_prime
from .intersection import IntersectionTable, intersection_table

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
KINDS = ("weak", "strong", "intermediate-weak", "intermediate-strong")
DEFAULT_WINDOWS = {1: 24, 2: 24, 3: 14, 4: 8}
DEFAULT_DIAGONALS = (1, 2, 3)
MAX_PERIOD = 4


def default_window(n: int) -> range:
    return range(1, DEFAULT_WINDOWS.get(n, 8) + 1)


def default_diagonals(n: int, samples: int) -> tuple:
    """Diagonals whose quasi-period the window can resolve (``n + 2`` samples per class)."""
    return tuple(c for c in DEFAULT_DIAGONALS if (n + 2) * c <= samples) or (1,)


# ---------------------------------------------------------------------------
# elementary quantities
# ---------------------------------------------------------------------------

def chi_q(q: int, profile) -> int:
    """Truncated alternating sum ``sum_{i<=q} (-1)^{q-i} h^i``."""
    dims = tuple(profile)
    if not 0 <= q < len(dims):
        raise ValueError(f"q = {q} out of range 0..{len(dims) - 1}")
    return sum((-1) ** (q - i) * dims[i] for i in range(q + 1))


def _chi_q_padded(q: int, dims: Sequence[int]) -> int:
    # h^i = 0 above the dimension
    return sum((-1) ** (q - i) * dims[i] for i in range(min(q, len(dims) - 1) + 1))


def power_sum(j: int, i: int) -> int:
    return sum(l**i for l in range(j))


def binom_identity_check(n: int, i: int) -> bool:
    if not 0 <= i < n:
        raise ValueError("need 0 <= i < n")
    return Fraction(n, i + 1) * comb(n - 1, i) == comb(n, i + 1)


def weak_coefficient(table: IntersectionTable, q: int) -> Fraction:
    n = table.n
    return Fraction(table[q], factorial(n - q) * factorial(q))


def strong_coefficient(table: IntersectionTable, q: int) -> Fraction:
    n = table.n
    total = sum((-1) ** (q - i) * comb(n, i) * table[i] for i in range(q + 1))
    return Fraction(total, factorial(n))


def intermediate_bound(table: IntersectionTable, q: int, k: int, ja: int, strong: bool) -> Fraction:
    n = table.n
    if not strong:
        return Fraction(k ** (n - q) * ja**q * table[q], factorial(n - q) * factorial(q))
    total = sum((-1) ** (q - i) * k ** (n - i) * ja**i * comb(n, i) * table[i] for i in range(q + 1))
    return Fraction(total, factorial(n))


def diagonal_coefficient(table: IntersectionTable, q: int, a: int, c: int, strong: bool) -> Fraction:
    """Leading ``k^n`` coefficient of the intermediate bound along ``j = floor(k / c)``."""
    n = table.n
    ratio = Fraction(a, c)
    if not strong:
        return ratio**q * Fraction(table[q], factorial(n - q) * factorial(q))
    total = sum((-1) ** (q - i) * comb(n, i) * table[i] * ratio**i for i in range(q + 1))
    return total / factorial(n)


@dataclass(frozen=True)
class BoundSpec:
    n: int
    q: int
    kind: str
    coefficient: Fraction
    description: str = ""


def bound_spec(table: IntersectionTable, q: int, kind: str) -> BoundSpec:
    n = table.n
    if not 0 <= q <= n:
        raise ValueError(f"q = {q} out of range 0..{n}")
    if kind == "weak":
        return BoundSpec(n, q, kind, weak_coefficient(table, q),
                         f"h^{q}(kL) <= k^{n} F^{n - q}G^{q}/({n - q}!{q}!)")
    if kind == "strong":
        return BoundSpec(n, q, kind, strong_coefficient(table, q),
                         f"chi_{q}(kL) <= k^{n}/{n}! sum_i (-1)^({q}-i) C({n},i) F^({n}-i)G^i")
    raise ValueError(f"unknown bound kind {kind!r}")


# ---------------------------------------------------------------------------
# leading coefficient of a quasi-polynomial sample
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    coefficient: Fraction | None
    period: int | None
    start: int | None = None  # first k of the window used for the fit

    @property
    def conclusive(self) -> bool:
        return self.coefficient is not None


def _differences(values: list, order: int) -> list:
    for _ in range(order):
        values = [b - a for a, b in zip(values, values[1:])]
    return values


def fit_leading(values: Iterable[tuple], n: int, max_period: int = MAX_PERIOD) -> FitResult:
    """Exact ``k^n`` coefficient of samples that are eventually quasi-polynomial.

    For each period ``p`` the samples split into residue classes of ``k``. On
    the trailing window of each class (its last half, and at least ``n + 2``
    samples) the ``n``-th differences must be constant; the coefficient is
    that constant over ``n! p^n`` and must agree across classes.
    """
    points = sorted((int(k), Fraction(v)) for k, v in values)
    for p in range(1, max_period + 1):
        classes: dict[int, list] = {}
        for k, v in points:
            classes.setdefault(k % p, []).append((k, v))
        if len(classes) < p or min(len(c) for c in classes.values()) < n + 2:
            break
        coefficients, starts = set(), []
        for seq in classes.values():
            ks = [k for k, _ in seq]
            if any(b - a != p for a, b in zip(ks, ks[1:])):
                return FitResult(None, None)
            tail = seq[-max(n + 2, ceil(len(seq) / 2)):]
            top = _differences([v for _, v in tail], n)
            if len(set(top)) != 1:
                break
            coefficients.add(top[0] / (factorial(n) * p**n))
            starts.append(tail[0][0])
        else:
            if len(coefficients) == 1:
                return FitResult(coefficients.pop(), p, min(starts))
            # residue classes disagree on the leading term
            return FitResult(None, None)
    return FitResult(None, None)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    k: int
    j: int | None
    measured: int
    bound: Fraction

    @property
    def margin(self) -> Fraction:
        return self.bound - self.measured

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound


@dataclass(frozen=True)
class Decision:
    verdict: str
    fit: FitResult
    k_strict: int | None
    shrinking: bool


def strict_threshold(rows: Sequence[Row]) -> int | None:
    """Least ``k`` after which every row satisfies ``measured <= bound``."""
    threshold = None
    for row in sorted(rows, key=lambda r: r.k, reverse=True):
        if not row.ok:
            break
        threshold = row.k
    return threshold


def _shortfall_shrinks(rows: Sequence[Row], n: int, fit: FitResult) -> bool:
    classes: dict[int, list] = {}
    for row in sorted(rows, key=lambda r: r.k):
        if row.k >= fit.start:
            classes.setdefault(row.k % fit.period, []).append(min(row.margin, 0) / Fraction(row.k) ** n)
    return all(b >= a for seq in classes.values() for a, b in zip(seq, seq[1:]))


def decide(rows: Sequence[Row], n: int, coefficient: Fraction, max_period: int = MAX_PERIOD) -> Decision:
    """Verdict for ``measured <= coefficient * k^n + o(k^n)`` on the given rows."""
    fit = fit_leading(((r.k, r.measured) for r in rows), n, max_period)
    k_strict = strict_threshold(rows)
    if not fit.conclusive:
        return Decision(INCONCLUSIVE, fit, k_strict, False)
    shrinking = _shortfall_shrinks(rows, n, fit)
    if fit.coefficient > coefficient:
        verdict = FAIL
    elif k_strict is not None or shrinking:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return Decision(verdict, fit, k_strict, shrinking)


@dataclass(frozen=True)
class VerificationReport:
    variety: str
    kind: str
    q: int
    n: int
    coefficient: Fraction
    rows: tuple
    decision: Decision
    flags: tuple = ()
    label: str = ""
    parts: tuple = field(default=(), repr=False)

    @property
    def verdict(self) -> str:
        return self.decision.verdict

    @property
    def fit(self) -> FitResult:
        return self.decision.fit

    @property
    def k_strict(self) -> int | None:
        return self.decision.k_strict

    def row(self, k: int, j: int | None = None) -> Row:
        return next(r for r in self.rows if r.k == k and (j is None or r.j == j))

    def summary(self) -> str:
        fit = self.fit
        fitted = f"{fit.coefficient} (period {fit.period})" if fit.conclusive else "n/a"
        extra = f" [{', '.join(self.flags)}]" if self.flags else ""
        label = f" {self.label}" if self.label else ""
        return (f"{self.variety} {self.kind}{label} q={self.q}: bound coefficient {self.coefficient}, "
                f"fitted {fitted}, k_strict {self.k_strict} -> {self.verdict}{extra}")


def _require_ample(X: ToricVariety, F, G):
    F, G = X.check(F), X.check(G)
    if not is_ample(X, F):
        raise ValueError(f"F = ({F}) is not ample on {X.name}")
    if not is_ample(X, G):
        raise ValueError(f"G = ({G}) is not ample on {X.name}")
    return F, G


def _check_q(X: ToricVariety, q: int):
    if not 0 <= q <= X.dim:
        raise ValueError(f"q = {q} out of range 0..{X.dim}")


def verify_weak(X: ToricVariety, F, G, q: int, k_range: Iterable[int] | None = None,
                table: IntersectionTable | None = None) -> VerificationReport:
    F, G = _require_ample(X, F, G)
    _check_q(X, q)
    table = table or intersection_table(X, F, G)
    spec = bound_spec(table, q, "weak")
    n = X.dim
    L = F - G
    rows = tuple(
        Row(k, None, cohomology_dims(X, k * L)[q], spec.coefficient * k**n)
        for k in (k_range or default_window(n))
    )
    return VerificationReport(X.name, "weak", q, n, spec.coefficient, rows, decide(rows, n, spec.coefficient))


def verify_strong(X: ToricVariety, F, G, q: int, k_range: Iterable[int] | None = None,
                  table: IntersectionTable | None = None) -> VerificationReport:
    F, G = _require_ample(X, F, G)
    _check_q(X, q)
    table = table or intersection_table(X, F, G)
    spec = bound_spec(table, q, "strong")
    n = X.dim
    L = F - G
    rows = tuple(
        Row(k, None, chi_q(q, cohomology_dims(X, k * L)), spec.coefficient * k**n)
        for k in (k_range or default_window(n))
    )
    decision = decide(rows, n, spec.coefficient)
    flags = []
    if q == 0:
        flags.append("coincident")
    if q == n:
        # chi_n(kL) - bound must be o(k^n) from both sides
        gap = fit_leading(((r.k, r.measured - r.bound) for r in rows), n)
        if gap.conclusive and gap.coefficient == 0:
            flags.append("equality")
        else:
            flags.append("equality-missing")
            if decision.verdict == PASS:
                decision = Decision(FAIL, decision.fit, decision.k_strict, decision.shrinking)
    return VerificationReport(X.name, "strong", q, n, spec.coefficient, rows, decision, tuple(flags))


def verify_intermediate(X: ToricVariety, F, G, a: int, q: int, j_range: Iterable[int] | None = None,
                        k_range: Iterable[int] | None = None, kind: str = "weak",
                        diagonals: Sequence[int] | None = None,
                        table: IntersectionTable | None = None) -> VerificationReport:
    """Compare ``h^q(kF - jaG)`` (or ``chi_q`` for ``kind="strong"``) with the
    mixed-degree bound on a ``(k, j)`` grid.

    ``j_range=None`` means ``j = 0..k`` for each ``k``. The verdict is taken
    along each diagonal ``j = floor(k / c)``; by default every ``c`` in
    ``DEFAULT_DIAGONALS`` the window can resolve.
    """
    if kind not in ("weak", "strong"):
        raise ValueError(f"unknown kind {kind!r}")
    if a < 1:
        raise ValueError("a must be at least 1")
    F, G = _require_ample(X, F, G)
    _check_q(X, q)
    table = table or intersection_table(X, F, G)
    strong = kind == "strong"
    n = X.dim
    ks = list(k_range or default_window(n))
    diagonals = diagonals or default_diagonals(n, len(ks))

    def measure(k, j):
        profile = cohomology_dims(X, k * F - (j * a) * G)
        value = chi_q(q, profile) if strong else profile[q]
        return Row(k, j, value, intermediate_bound(table, q, k, j * a, strong))

    grid = tuple(measure(k, j) for k in ks for j in (j_range if j_range is not None else range(k + 1)))
    parts = []
    for c in diagonals:
        coefficient = diagonal_coefficient(table, q, a, c, strong)
        diag = tuple(measure(k, k // c) for k in ks)
        parts.append(VerificationReport(X.name, f"intermediate-{kind}", q, n, coefficient, diag,
                                        decide(diag, n, coefficient), label=f"c={c}"))
    verdicts = {p.verdict for p in parts}
    verdict = FAIL if FAIL in verdicts else INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS
    first = parts[0].decision
    decision = Decision(verdict, first.fit, strict_threshold(grid), first.shrinking)
    return VerificationReport(X.name, f"intermediate-{kind}", q, n, parts[0].coefficient, grid,
                              decision, label=f"a={a}", parts=tuple(parts))


@dataclass(frozen=True)
class SubadditivityRow:
    divisor: tuple
    ray: int
    q: int
    chi_b: int
    chi_a: int
    chi_c: int

    @property
    def ok(self) -> bool:
        return self.chi_b <= self.chi_a + self.chi_c

    @property
    def equality(self) -> bool:
        return self.chi_b == self.chi_a + self.chi_c


def verify_subadditivity(X: ToricVariety, B, rho: int, q: int) -> SubadditivityRow:
    """``chi_q(B) <= chi_q(B - D_rho) + chi_q(B restricted to D_rho)``."""
    B = X.check(B)
    _check_q(X, q)
    restriction = restrict_to_prime(X, B, rho)
    prof_b = cohomology_dims(X, B)
    prof_a = cohomology_dims(X, B - X.prime(rho))
    prof_c = cohomology_dims(restriction.variety, restriction.divisor)
    return SubadditivityRow(B.coeffs, rho, q, chi_q(q, prof_b), chi_q(q, prof_a),
                            _chi_q_padded(q, prof_c.dims))


def random_subadditivity(X: ToricVariety, draws: int, seed: int, bound: int = 5) -> list[SubadditivityRow]:
    """Subadditivity rows for random ``(B, rho, q)``, coefficients in ``[-bound, bound]``."""
    rng = random.Random(seed)
    rows = []
    for _ in range(draws):
        B = Divisor(rng.randint(-bound, bound) for _ in range(X.nrays))
        rho = rng.randrange(X.nrays)
        q = rng.randint(0, X.dim)
        rows.append(verify_subadditivity(X, B, rho, q))
    return rows


def signed_euler_identity(profile: CohomologyProfile, q: int) -> bool:
    """``chi_q = (-1)^q chi``, valid once ``h^i = 0`` for ``i > q``."""
    return chi_q(q, profile) == (-1) ** q * profile.euler
