"""Power substitution and log-convex regularization, with a brute-force
minorant oracle for small windows."""

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from carleman.scalar import Interval, PrecisionError, ScalarConfig, factorial
from carleman.seqcore import (
    Analytic,
    Custom,
    Gevrey,
    IteratedLog,
    PowerSub,
    SequenceError,
    WeightSequence,
    is_increasing,
    is_log_convex,
)
from carleman.transforms import (
    Regularized,
    derived_power_substitution,
    log_convex_regularization,
    power_substitution,
)

F = Fraction
EXACT = ScalarConfig(mode="exact")


# -- oracle: exhaustive greatest log-convex minorant ---------------------------
# Values are represented as pairs (q, d) meaning q ** (1/d); comparisons clear
# denominators, so the oracle is exact end to end.


def _le(a, b):
    (qa, da), (qb, db) = a, b
    return qa ** db <= qb ** da


def _eq(a, b):
    (qa, da), (qb, db) = a, b
    return qa ** db == qb ** da


def _candidate(vals, verts):
    out = []
    for n in range(len(vals)):
        a = max(v for v in verts if v <= n)
        b = min(v for v in verts if v >= n)
        if a == b:
            out.append((vals[n], 1))
        else:
            out.append((vals[a] ** (b - n) * vals[b] ** (n - a), b - a))
    return out


def _log_convex_pairs(cand):
    for n in range(1, len(cand) - 1):
        (qm, dm) = cand[n]
        (qa, da) = cand[n - 1]
        (qb, db) = cand[n + 1]
        lcm = da * db // math.gcd(da, db)
        prod = (qa ** (lcm // da) * qb ** (lcm // db), lcm)
        if not _le((qm ** 2, dm), prod):
            return False
    return True


def minorant_oracle(vals):
    """Pointwise max over every log-convex minorant interpolating a vertex
    subset; exhaustive, so only for small windows."""
    n_max = len(vals) - 1
    best = None
    for r in range(n_max):
        for interior in combinations(range(1, n_max), r):
            verts = (0, *interior, n_max)
            cand = _candidate(vals, verts)
            if not all(_le(cand[n], (vals[n], 1)) for n in range(len(vals))):
                continue
            if not _log_convex_pairs(cand):
                continue
            if best is None:
                best = cand
            else:
                best = [b if _le(c, b) else c for b, c in zip(best, cand)]
    return best


def _reg_root(reg, n):
    rep = reg.as_root(n)
    assert rep is not None
    return rep


# -- regularization ------------------------------------------------------------


def test_regularization_spec_window_example():
    seq = Custom(table=[1, 8, 2, 64])
    reg = log_convex_regularization(seq, (0, 3))
    assert reg.vertices == (0, 2, 3)
    expected = minorant_oracle([F(1), F(8), F(2), F(64)])
    for n in range(4):
        assert _eq(_reg_root(reg, n), expected[n])
    # the interpolated value at n=1 is sqrt(2)
    q, d = _reg_root(reg, 1)
    assert (q, d) == (F(2), 2) or q ** 2 == F(2) ** d


def test_regularization_fixed_point_on_log_convex_input():
    seq = Custom(table=[1, 2, 8, 64])
    reg = log_convex_regularization(seq, (0, 3))
    assert reg.vertices == (0, 1, 2, 3)
    for n in range(4):
        assert reg.exact(n) == seq.exact(n)


def test_regularization_matches_bruteforce_oracle_randomized():
    rng = random.Random(20240817)
    for _ in range(25):
        n_max = rng.randint(2, 7)
        vals = [F(1)] + [
            F(rng.randint(1, 4096), rng.randint(1, 4096)) for _ in range(n_max)
        ]
        seq = Custom(table=vals)
        reg = log_convex_regularization(seq, (0, n_max))
        expected = minorant_oracle([seq.exact(n) for n in range(n_max + 1)])
        for n in range(n_max + 1):
            assert _eq(_reg_root(reg, n), expected[n]), (vals, n)


def test_regularization_idempotent():
    rng = random.Random(7)
    for _ in range(10):
        vals = [F(1)] + [F(rng.randint(1, 999), rng.randint(1, 999)) for _ in range(12)]
        reg = log_convex_regularization(Custom(table=vals), (0, 12))
        reg2 = log_convex_regularization(reg, (0, 12))
        assert reg2.vertices == tuple(range(13))
        for n in range(13):
            assert _eq(_reg_root(reg2, n), _reg_root(reg, n))


def test_regularization_minorant_and_log_convex():
    rng = random.Random(99)
    for _ in range(10):
        vals = [F(1)] + [F(rng.randint(1, 999), rng.randint(1, 999)) for _ in range(10)]
        seq = Custom(table=vals)
        reg = log_convex_regularization(seq, (0, 10))
        for n in range(11):
            q, d = _reg_root(reg, n)
            assert q <= seq.exact(n) ** d
        assert is_log_convex(reg, (1, 9)).ok


def test_regularization_monotone_in_input():
    rng = random.Random(4242)
    for _ in range(10):
        small = [F(1)] + [F(rng.randint(1, 99), rng.randint(1, 99)) for _ in range(8)]
        big = [v * F(rng.randint(1, 5)) for v in small]
        big[0] = F(1)
        ra = log_convex_regularization(Custom(table=small), (0, 8))
        rb = log_convex_regularization(Custom(table=[max(s, b) for s, b in zip(small, big)]), (0, 8))
        for n in range(9):
            assert _le(_reg_root(ra, n), _reg_root(rb, n))


def test_regularization_of_iterated_log_is_fixed_point():
    seq = IteratedLog(2)
    reg = log_convex_regularization(seq, (0, 12))
    assert reg.vertices == tuple(range(13))
    for n in (0, 3, 11):
        assert reg.enclosure(n, 128) == seq.enclosure(n, 128)


def test_regularization_window_validation():
    with pytest.raises(SequenceError):
        log_convex_regularization(Analytic(), (1, 5))
    with pytest.raises(SequenceError):
        log_convex_regularization(Analytic(), (0, 1))
    reg = log_convex_regularization(Custom(table=[1, 2, 4, 8, 16]), (0, 4))
    with pytest.raises(SequenceError):
        reg.exact(5)


class _GeometricIrrational(WeightSequence):
    """M_n = sqrt(2)**n: log-linear with no exact root form, so hull ties
    cannot be resolved by intervals."""

    def _exact(self, n):
        return F(2) ** (n // 2) if n % 2 == 0 else None

    def _root(self, n):
        return None

    def _enclosure(self, n, bits):
        from carleman.scalar import iv_pow

        return iv_pow(Interval.point(2), F(n, 2), bits)


def test_regularization_unresolvable_ties_raise_precision_error():
    cfg = ScalarConfig(bits=64, max_doublings=2)
    with pytest.raises(PrecisionError):
        log_convex_regularization(_GeometricIrrational(), (0, 4), cfg)


# -- power substitution ---------------------------------------------------------


def test_power_substitution_values():
    ps = power_substitution(Gevrey(1), 2)
    assert ps.exact(3) == 720
    assert ps.exact(0) == 1
    idp = power_substitution(Gevrey(1), 1)
    for n in range(10):
        assert idp.exact(n) == Gevrey(1).exact(n)
    with pytest.raises(SequenceError):
        power_substitution(Analytic(), 0)


def test_power_substitution_composition():
    base = Custom(rule=lambda n: F(n + 1) ** 2, name="squares")
    once = power_substitution(power_substitution(base, 2), 3)
    direct = power_substitution(base, 6)
    for n in range(8):
        assert once.exact(n) == direct.exact(n)


def test_power_substitution_preserves_increasing():
    base = Custom(rule=lambda n: F(2) ** n, name="dyadic")
    assert is_increasing(base, (0, 10)).ok
    assert is_increasing(power_substitution(base, 3), (0, 6)).ok


def test_derived_power_substitution_examples():
    g = Gevrey(1)
    # p=1 reduces to the derived sequence
    for n in range(1, 6):
        assert derived_power_substitution(g, 1, n, EXACT).fraction() == factorial(
            n
        ) * g.exact(n)
    # n=1 gives M'_p for any p
    for p in (1, 2, 3, 5):
        assert derived_power_substitution(g, p, 1, EXACT).fraction() == factorial(
            p
        ) * g.exact(p)
    # n=0 convention
    assert derived_power_substitution(g, 4, 0, EXACT).fraction() == 1
    # p=2, n=2: the exponent n**((p-1)n) evaluates to 4 by direct computation
    assert 2 ** ((2 - 1) * 2) == 4
    expected = F(factorial(4) * g.exact(4), 4)
    assert derived_power_substitution(g, 2, 2, EXACT).fraction() == expected
    with pytest.raises(SequenceError):
        derived_power_substitution(g, 0, 1)
