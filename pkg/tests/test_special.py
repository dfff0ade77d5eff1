import bisect
import itertools
import logging
import math

import pytest

from diophcount.counting import BoxDomain, count_solutions
from diophcount.eqparse import parse_equation
from diophcount.errors import UnsupportedConstruct
from diophcount.special import (
    PowerChainSystem,
    SystemOfEquations,
    UnverifiedClaimWarning,
    catalan_check,
    count_exponential,
    count_power_tower,
    count_system,
    exp_sum_check,
    iroot,
    power_chain_count,
    ternary_quadratic_claim,
)


def test_iroot_exact():
    for e in range(1, 8):
        for n in list(range(0, 300)) + [10**18, 10**18 - 1, 2**64 + 1]:
            t = iroot(n, e)
            assert t**e <= n < (t + 1) ** e


# --- systems ---

def test_line_meets_antidiagonal():
    sys_ = SystemOfEquations.parse(["x2 - x1 = 0", "x1 + x2 - 10 = 0"])
    assert count_system(sys_, BoxDomain(2, 10)).pi == 1


def test_unsolvable_member_kills_the_system():
    sys_ = SystemOfEquations.parse(["x1^2 + x2^2 + 1 = 0", "x1*x2 = x3"])
    for N in (1, 10, 50):
        assert count_system(sys_, BoxDomain(3, N)).pi == 0


def test_equivalent_equations():
    sys_ = SystemOfEquations.parse(["x2 - x1 = 0", "2*x2 - 2*x1 = 0"])
    assert count_system(sys_, BoxDomain(2, 20)).pi == 20


def _system_oracle(texts, k, N):
    eqs = SystemOfEquations.parse(texts).equations
    from diophcount.eqparse import evaluate
    return sum(1 for pt in itertools.product(range(1, N + 1), repeat=k)
               if all(evaluate(eq.F, pt) == 0 for eq in eqs))


@pytest.mark.parametrize("texts, k", [
    (["x1 + x2 = x3", "x1 = 2*x2"], 3),
    (["x1^2 + x2^2 = x3^2", "x3 = 13"], 3),
    (["x1*x2 = 12", "x3 = x1 + 1"], 4),
    (["2^x1 = x2", "x3 = x2 + x1"], 3),
    (["x1 = x2", "x2 = x3", "x3 = x4"], 4),
])
def test_system_against_oracle(texts, k):
    sys_ = SystemOfEquations.parse(texts)
    k = max(k, sys_.k)
    for N in (6, 14):
        expected = _system_oracle(texts, sys_.k, N) * N ** (k - sys_.k)
        r = count_system(sys_, BoxDomain(k, N))
        assert r.pi == expected


def test_system_count_bounded_by_members():
    texts = ["x1^2 + x2^2 = x3^2", "x1 + x2 + x3 = 12"]
    sys_ = SystemOfEquations.parse(texts)
    box = BoxDomain(3, 20)
    pi = count_system(sys_, box).pi
    assert pi <= min(count_solutions(eq, box).pi for eq in sys_.equations)
    assert pi <= 1 * 20**2


def test_system_validation(caplog):
    with pytest.raises(ValueError):
        SystemOfEquations(())
    with pytest.raises(ValueError):
        SystemOfEquations((parse_equation("x1 = 1"), parse_equation("x1 = x2")))
    with caplog.at_level(logging.WARNING, logger="diophcount"):
        SystemOfEquations.parse(["x1 = x2", "x2 = 3"])
    assert "1 < m < k" in caplog.text


# --- power chains ---

@pytest.mark.parametrize("exps, N, expected", [
    ((2, 3, 4), 10**6, 10),
    ((2, 3), 64, 4),
    ((2, 3, 4), 1, 1),
])
def test_power_chain_examples(exps, N, expected):
    assert power_chain_count(PowerChainSystem(exps), N) == expected


def test_power_chain_pairs_oracle():
    found = [(a, b) for a in range(1, 65) for b in range(1, 65) if a**2 == b**3]
    assert len(found) == power_chain_count(PowerChainSystem((2, 3)), 64) == 4


def test_chain_validation():
    for bad in [(2,), (3, 2), (2, 2), (0, 1)]:
        with pytest.raises(ValueError):
            PowerChainSystem(bad)
    s = PowerChainSystem((2, 3, 4))
    assert (s.m, s.k) == (12, 3)
    assert s.parametric_solution(2) == (64, 16, 8)


@pytest.mark.parametrize("exps", [(2, 3), (2, 3, 4), (2, 4)])
def test_chain_closed_form_matches_system_count(exps):
    s = PowerChainSystem(exps)
    system = s.equations()
    Ns = sorted(set(list(range(1, 80)) + [t ** (s.m // exps[0]) + d for t in range(1, 6) for d in (-1, 0, 1)]
                    + [4096, 5000]))
    for N in Ns:
        if N < 1 or N > 5000:
            continue
        assert power_chain_count(s, N) == count_system(system, BoxDomain(s.k, N)).pi, N


def _exact_root(v, e):
    # float guess corrected by exact integer checks
    a = round(v ** (1.0 / e))
    for cand in (a - 1, a, a + 1):
        if cand >= 1 and cand**e == v:
            return cand
    return None


@pytest.mark.parametrize("exps", [(2, 3), (2, 3, 4), (2, 4)])
def test_chain_closed_form_for_every_N_up_to_5000(exps):
    # brute-force the solution set of the largest box; smaller boxes are subsets
    top = 5000
    sols = []
    for last in range(1, top + 1):
        v = last ** exps[-1]
        pt = [_exact_root(v, e) for e in exps[:-1]] + [last]
        if all(x is not None and x <= top for x in pt):
            sols.append(tuple(pt))
    largest = sorted(max(pt) for pt in sols)
    s = PowerChainSystem(exps)
    for N in range(1, top + 1):
        assert power_chain_count(s, N) == bisect.bisect_right(largest, N), N


def test_chain_brute_force_at_4096():
    s = PowerChainSystem((2, 3, 4))
    assert count_system(s.equations(), BoxDomain(3, 4096)).pi == 4


def test_chain_matches_parametric_family():
    s = PowerChainSystem((2, 3, 4))
    N = 10**6
    family = [s.parametric_solution(t) for t in range(1, 20) if max(s.parametric_solution(t)) <= N]
    assert len(family) == power_chain_count(s, N)


# --- exponential families ---

@pytest.mark.parametrize("a, N, expected", [(2, 1000, 9), (10, 99, 1), (2, 1, 0)])
def test_count_exponential(a, N, expected):
    assert count_exponential(a, N) == expected


def test_count_exponential_brackets():
    for a in range(2, 12):
        for N in range(1, 2000, 37):
            r = count_exponential(a, N)
            assert a**r <= N < a ** (r + 1) or (r == 0 and N < a)


@pytest.mark.parametrize("N, expected", [(16, 20), (2, 1)])
def test_power_tower(N, expected):
    assert count_power_tower(N) == expected


def test_power_tower_below_square():
    for N in (4, 16, 64):
        assert count_power_tower(N) < N**2


def test_power_tower_matches_counting():
    eq = parse_equation("x3 = x1^x2")
    for N in list(range(2, 40)) + [64, 100]:
        # x1 = 1 contributes (1, x2, 1) for every x2
        assert count_power_tower(N) == count_solutions(eq, BoxDomain(3, N)).pi - N


def test_catalan_default_box():
    assert catalan_check() == [(3, 2, 3)]


def test_catalan_with_exponent_one(caplog):
    with caplog.at_level(logging.WARNING, logger="diophcount"):
        found = catalan_check(x2_range=(1, 10))
    assert (5, 1, 2) in found and len(found) > 1
    assert "x2 may equal 1" in caplog.text


def test_catalan_fixed_x3():
    assert catalan_check(x3_range=(3, 3)) == [(3, 2, 3)]


def test_catalan_against_counting():
    eq = parse_equation("x1^x2 - 2^x3 = 1")
    N = 40
    brute = [pt for pt in itertools.product(range(2, N + 1), range(2, 11), range(1, N + 1))
             if pt[0] ** pt[1] - 2 ** pt[2] == 1]
    assert brute == catalan_check((2, N), (2, 10), (1, N))
    assert count_solutions(eq, BoxDomain(3, N)).pi == len(brute) + sum(1 for x3 in range(1, 6) if 2**x3 + 1 <= N)


def test_exp_sum():
    assert exp_sum_check(30) == [(1, 1, 1), (4, 2, 2)]
    assert exp_sum_check(5) == [(1, 1, 1), (4, 2, 2)]
    assert 2**4 + 3**2 == 5**2
    eq = parse_equation("2^x1 + 3^x2 = 5^x3")
    assert count_solutions(eq, BoxDomain(3, 30)).pi == 2


@pytest.mark.parametrize("text", ["sin(x1) = 0", "cosh(x1) - x2 = 0", "tanh(x1) = 1"])
def test_trigonometric_forms_rejected(text):
    with pytest.raises(UnsupportedConstruct):
        parse_equation(text)


# --- unverified claim ---

def test_ternary_quadratic_claim_warns():
    with pytest.warns(UnverifiedClaimWarning, match=r"\(4, 7, 9\)"):
        check = ternary_quadratic_claim(100)
    assert check.claimed == math.isqrt(99 // 2)
    assert not check.confirmed
    assert check.oracle_count > check.claimed
    assert (4, 7, 9) in check.outside_family
    assert check.family_count == 100 // 3
    eq = parse_equation("2*x1^2 + x2^2 - x3^2 = 0")
    assert count_solutions(eq, BoxDomain(3, 100)).pi == check.oracle_count
    assert check.oracle_count == check.family_count + len(check.outside_family)
