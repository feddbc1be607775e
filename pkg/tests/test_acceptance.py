"""Exit criteria. Every comparison is exact; no tolerance appears anywhere."""

import random
import subprocess
import sys
from fractions import Fraction

import pytest
import sympy

from toricmorse.cohomology import cohomology_dims, euler_char, vanishing_scan
from toricmorse.divisors import Divisor, builtin, is_ample, is_nef, polytope_box, polytope_of
from toricmorse.intersection import chi_polynomial, intersection_table, volume_oracle
from toricmorse.lattice import enumerate_points
from toricmorse.morse import (
    PASS,
    binom_identity_check,
    chi_q,
    fit_leading,
    power_sum,
    random_subadditivity,
    strong_coefficient,
    verify_intermediate,
    verify_strong,
    verify_weak,
    weak_coefficient,
)

from oracles import AMPLE_PAIRS, BUILTINS, GOLDEN_F, GOLDEN_G, product_dims

SEED = 20240601
CRITERIA = {
    1: "weak Morse bound PASSes on every built-in, ample pair and q",
    2: "strong Morse bound PASSes on every built-in, ample pair and q; equality flag at q = n",
    3: "golden P1xP1 instance: table (4,5,4), h^1 = k^2 - 1, coefficients 5 and 3, example margins",
    4: "vanishing lemma: finite k0 with K_max=10, A_max=5 and h^q(kF+aH)=0 for q >= 1 on the grid",
    5: "chi_q(kF) = (-1)^q chi(kF) past k0; subadditivity on 100 seeded draws per built-in",
    6: "intermediate bounds for kF - jG on k in [1,20], j in [0,k], q = 0,1,2, weak and strong",
    7: "engine cross-validation: Ehrhart h^0, Serre symmetry, chi polynomial, volume oracle",
    8: "power sum and binomial identities for n <= 10, i < n, j <= 50",
    9: "report CSV byte-identical with 1 and 8 workers",
}

MATRIX = [(name, F, G) for name in BUILTINS for F, G in AMPLE_PAIRS[name]]
MATRIX_IDS = [f"{name}-{'.'.join(map(str, F))}-{'.'.join(map(str, G))}" for name, F, G in MATRIX]


def test_matrix_is_ample():
    for name, F, G in MATRIX:
        X = builtin(name)
        assert is_ample(X, F) and is_ample(X, G)
    assert all(len(AMPLE_PAIRS[name]) >= 3 for name in BUILTINS)


@pytest.mark.parametrize("name, F, G", MATRIX, ids=MATRIX_IDS)
def test_criterion_1_weak(name, F, G):
    X = builtin(name)
    table = intersection_table(X, F, G)
    for q in range(X.dim + 1):
        report = verify_weak(X, F, G, q, table=table)
        assert report.verdict == PASS, report.summary()
        assert report.fit.coefficient <= report.coefficient


@pytest.mark.parametrize("name, F, G", MATRIX, ids=MATRIX_IDS)
def test_criterion_2_strong(name, F, G):
    X = builtin(name)
    table = intersection_table(X, F, G)
    for q in range(X.dim + 1):
        report = verify_strong(X, F, G, q, table=table)
        assert report.verdict == PASS, report.summary()
        if q == X.dim:
            assert "equality" in report.flags
            gap = fit_leading(((r.k, r.measured - r.bound) for r in report.rows), X.dim)
            assert gap.coefficient == 0


def test_criterion_3_golden():
    X = builtin("P1xP1")
    table = intersection_table(X, GOLDEN_F, GOLDEN_G)
    assert table.numbers == (4, 5, 4)
    for k in range(1, 25):
        h = cohomology_dims(X, k * (Divisor(GOLDEN_F) - Divisor(GOLDEN_G)))
        assert h[1] == k * k - 1 == product_dims("P1xP1", (0, k, 0, -k))[1]
    assert weak_coefficient(table, 1) == 5
    assert strong_coefficient(table, 1) == 3
    weak1 = verify_weak(X, GOLDEN_F, GOLDEN_G, 1, table=table).row(10)
    assert (weak1.measured, weak1.bound, weak1.margin) == (99, 500, 401)
    weak2 = verify_weak(X, GOLDEN_F, GOLDEN_G, 2, table=table).row(10)
    assert (weak2.measured, weak2.bound, weak2.margin) == (0, 200, 200)
    strong1 = verify_strong(X, GOLDEN_F, GOLDEN_G, 1, table=table).row(10)
    assert (strong1.measured, strong1.bound, strong1.margin) == (99, 300, 201)
    strong2 = verify_strong(X, GOLDEN_F, GOLDEN_G, 2, table=table)
    assert (strong2.row(10).measured, strong2.row(10).bound, strong2.row(10).margin) == (-99, -100, -1)
    assert "equality" in strong2.flags
    strong0 = verify_strong(X, GOLDEN_F, GOLDEN_G, 0, table=table).row(10)
    assert (strong0.measured, strong0.bound, strong0.margin) == (0, 200, 200)
    inter = verify_intermediate(X, GOLDEN_F, GOLDEN_G, 1, 1, k_range=range(1, 21), table=table)
    assert (inter.row(10, 8).measured, inter.row(10, 8).bound, inter.row(10, 8).margin) == (65, 400, 335)
    weak0 = verify_weak(builtin("P2"), (0, 0, 2), (0, 0, 1), 0).row(10)
    assert (weak0.measured, weak0.bound, weak0.margin) == (66, 200, 134)


@pytest.mark.parametrize("name, F, H", MATRIX, ids=MATRIX_IDS)
def test_criterion_4_vanishing(name, F, H):
    X = builtin(name)
    result = vanishing_scan(X, F, H, 10, 5)
    assert result.k0 is not None and result.k0 <= 10
    for k in range(1, 11):
        for a in range(6):
            dims = cohomology_dims(X, k * Divisor(F) + a * Divisor(H)).dims
            assert (k < result.k0) or dims[1:] == (0,) * X.dim


@pytest.mark.parametrize("name, F, G", MATRIX, ids=MATRIX_IDS)
def test_criterion_5_chi_q_identity(name, F, G):
    X = builtin(name)
    for D in (F, G):
        k0 = vanishing_scan(X, D, D, 10, 5).k0
        for k in range(k0, 11):
            profile = cohomology_dims(X, k * Divisor(D))
            for q in range(X.dim + 1):
                assert chi_q(q, profile) == (-1) ** q * euler_char(X, k * Divisor(D))


@pytest.mark.parametrize("name", BUILTINS)
def test_criterion_5_subadditivity(name):
    rows = random_subadditivity(builtin(name), 100, SEED)
    assert len(rows) == 100
    bad = [r for r in rows if not r.ok]
    assert not bad, bad[:3]


@pytest.mark.parametrize("kind", ["weak", "strong"])
@pytest.mark.parametrize("q", [0, 1, 2])
def test_criterion_6_intermediate(kind, q):
    X = builtin("P1xP1")
    report = verify_intermediate(X, GOLDEN_F, GOLDEN_G, 1, q, j_range=None, k_range=range(1, 21), kind=kind)
    assert len(report.rows) == sum(k + 1 for k in range(1, 21))
    assert report.verdict == PASS, [p.summary() for p in report.parts]
    assert all(p.verdict == PASS for p in report.parts)


def _random_nef(X, rng, wanted):
    found = []
    for _ in range(5000):
        D = Divisor(rng.randint(-2, 4) for _ in range(X.nrays))
        if is_nef(X, D):
            found.append(D)
            if len(found) == wanted:
                return found
    raise AssertionError(f"only {len(found)} nef divisors sampled on {X.name}")


@pytest.mark.parametrize("name", BUILTINS)
def test_criterion_7_cross_validation(name):
    X = builtin(name)
    rng = random.Random(SEED)
    for D in _random_nef(X, rng, 50):
        count = len(enumerate_points(polytope_of(X, D), polytope_box(X, D)))
        assert cohomology_dims(X, D)[0] == count
    K = X.canonical()
    for _ in range(50):
        D = Divisor(rng.randint(-5, 5) for _ in range(X.nrays))
        assert cohomology_dims(X, D).dims[::-1] == cohomology_dims(X, K - D).dims
    for F, G in AMPLE_PAIRS[name]:
        poly = chi_polynomial(X, F, G)
        for _ in range(10):
            s, t = rng.randint(-4, 6), rng.randint(-4, 6)
            assert poly(s, t) == euler_char(X, s * Divisor(F) + t * Divisor(G))
        table = intersection_table(X, F, G)
        assert table[0] == volume_oracle(X, F)
        assert table[X.dim] == volume_oracle(X, G)


def test_criterion_8_identities():
    j_sym = sympy.Symbol("j")
    for n in range(1, 11):
        for i in range(n):
            assert binom_identity_check(n, i)
            closed = (sympy.bernoulli(i + 1, j_sym) - sympy.bernoulli(i + 1, 0)) / (i + 1)
            for j in range(51):
                assert power_sum(j, i) == closed.subs(j_sym, j)
            # leading term j^{i+1}/(i+1): the remainder has degree <= i
            fit = fit_leading([(j, power_sum(j, i) - Fraction(j ** (i + 1), i + 1)) for j in range(1, 51)],
                              i + 1, max_period=1)
            assert fit.coefficient == 0


@pytest.mark.parametrize(
    "name, F, G",
    [("P1xP1", GOLDEN_F, GOLDEN_G), ("P1xP2", (0, 2, 0, 0, 1), (0, 1, 0, 0, 2))],
)
def test_criterion_9_determinism(tmp_path, name, F, G):
    outputs = []
    for jobs in (1, 8):
        path = tmp_path / f"report-{jobs}.csv"
        cp = subprocess.run(
            [sys.executable, "-m", "toricmorse", "report", "--builtin", name, "--F", ",".join(map(str, F)),
             "--G", ",".join(map(str, G)), "--seed", str(SEED), "--jobs", str(jobs), "--csv", str(path)],
            capture_output=True, text=True,
        )
        assert cp.returncode == 0, cp.stdout + cp.stderr
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) > 100
