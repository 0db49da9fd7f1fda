import itertools
import random

import mpmath
import pytest

from playgol.theory import MilParams, hypothesis_space_size, playgol_improves, sample_bound

from oracles import count_programs

GRID = list(itertools.product(range(1, 5), range(1, 3), (1, 2), range(1, 3)))  # p, m, j, n


def reference_bound(n, m, p, j, eps, delta):
    mpmath.mp.dps = 50
    eps, delta = mpmath.mpf(eps), mpmath.mpf(delta)
    return ((n * mpmath.log(m) + (j + 1) * n * mpmath.log(p) + mpmath.log(1 / delta)) / eps)


@pytest.mark.parametrize("p,m,j,n", GRID)
def test_space_size_matches_enumeration(p, m, j, n):
    assert hypothesis_space_size(m, p, j, n) == count_programs(m, p, j, n)


def test_space_size_is_exact_for_large_values():
    assert hypothesis_space_size(4, 10, 2, 3) == 64_000_000_000
    assert hypothesis_space_size(2, 30, 2, 10) == (2 * 30 ** 3) ** 10


def test_sample_bound_high_precision():
    rng = random.Random(11)
    worst = 0.0
    for _ in range(500):
        p, m, j, n = rng.randint(1, 500), rng.randint(1, 20), rng.randint(1, 4), rng.randint(1, 30)
        eps, delta = rng.uniform(1e-3, 1), rng.uniform(1e-6, 1)
        got = sample_bound(MilParams(p, m, j, n, eps, delta))
        ref = reference_bound(n, m, p, j, eps, delta)
        if ref != 0:
            worst = max(worst, float(abs((mpmath.mpf(got) - ref) / ref)))
    assert worst <= 1e-12


def test_sample_bound_example():
    got = sample_bound(MilParams(10, 4, 2, 3, 0.1, 0.05))
    assert got == pytest.approx(float(reference_bound(3, 4, 10, 2, 0.1, 0.05)), rel=1e-12)


def test_improves_matches_exact_integers():
    rng = random.Random(5)
    disagreements = 0
    for _ in range(1000):
        n = rng.randint(1, 12)
        k = rng.randint(0, n)
        p = rng.randint(1, 60)
        c = rng.randint(0, 200)
        if playgol_improves(n, k, p, c) != (p ** n > (p + c) ** (n - k)):
            disagreements += 1
    assert disagreements == 0


@pytest.mark.parametrize("n,k,p,c", [(2, 1, 4, 12), (2, 1, 4, 11), (3, 0, 5, 0), (4, 2, 3, 6), (1, 1, 1, 0)])
def test_improves_near_ties(n, k, p, c):
    assert playgol_improves(n, k, p, c) == (p ** n > (p + c) ** (n - k))


def test_no_new_symbols_and_shorter_target_improves():
    assert playgol_improves(5, 2, 7, 0)
    assert not playgol_improves(5, 0, 7, 3)


@pytest.mark.parametrize("args", [(0, 0, 1, 1), (2, 3, 1, 1), (2, 1, 0, 1), (2, 1, 1, -1)])
def test_improves_validation(args):
    with pytest.raises(ValueError):
        playgol_improves(*args)


def test_param_validation():
    with pytest.raises(ValueError):
        MilParams(0, 1, 1, 1)
    with pytest.raises(ValueError):
        MilParams(1, 1, 1, 1, epsilon=0)
    with pytest.raises(ValueError):
        sample_bound(MilParams(2, 1, 1, 0))
