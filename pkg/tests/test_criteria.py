"""Quasianalyticity, derivation closure, and inclusion criteria."""

from fractions import Fraction

import pytest

from carleman.criteria import (
    dc_partial_sum,
    derivation_closure_estimate,
    inclusion_estimate,
    quasianalytic_verdict,
)
from carleman.scalar import ScalarConfig
from carleman.seqcore import (
    Analytic,
    Custom,
    Gevrey,
    IteratedLog,
    PowerSub,
    SequenceError,
)

F = Fraction
EXACT = ScalarConfig(mode="exact")


def harmonic(n):
    return sum(F(1, i) for i in range(1, n + 1))


def test_dc_partial_sum_analytic_is_harmonic():
    for N in (0, 3, 10):
        assert dc_partial_sum(Analytic(), N, EXACT).fraction() == harmonic(N + 1)


def test_dc_partial_sum_gevrey_term_shape_and_bound():
    # terms are exactly 1/(n+1)^2, so partial sums telescope below 2
    g = Gevrey(1)
    brute = sum(F(1, (n + 1) ** 2) for n in range(33))
    assert dc_partial_sum(g, 32, EXACT).fraction() == brute
    for N in (1, 8, 64, 256):
        s = dc_partial_sum(g, N, EXACT).fraction()
        assert s < 2
        # telescoping oracle: 1/(n+1)^2 <= 1/(n(n+1)) gives the tail < 1/N
        assert s < 1 + sum(F(1, n * (n + 1)) for n in range(1, N + 2))


def test_dc_partial_sum_nondecreasing_in_N():
    for seq in (Analytic(), Gevrey(1), IteratedLog(2)):
        prev = None
        for N in (1, 4, 16, 64):
            cur = dc_partial_sum(seq, N, ScalarConfig(bits=128)).interval()
            if prev is not None:
                assert cur.hi >= prev.lo
                assert cur.midpoint >= prev.midpoint
            prev = cur


def test_dc_partial_sum_iterated_log_positive_increasing():
    vals = [dc_partial_sum(IteratedLog(2), N, ScalarConfig(bits=128)).interval() for N in (8, 32, 64)]
    assert all(v.lo > 0 for v in vals)
    assert vals[0].hi < vals[2].hi


def test_quasianalytic_family_verdicts():
    assert quasianalytic_verdict(Analytic()).ok
    assert quasianalytic_verdict(Analytic()).scope == "global"
    assert quasianalytic_verdict(Gevrey(1)).outcome == "fails"
    assert quasianalytic_verdict(Gevrey(F(1, 2))).outcome == "fails"
    assert quasianalytic_verdict(Gevrey(0)).ok
    for k in (1, 2, 3):
        assert quasianalytic_verdict(IteratedLog(k)).ok
    assert quasianalytic_verdict(PowerSub(IteratedLog(1), 2)).outcome == "fails"
    assert quasianalytic_verdict(PowerSub(IteratedLog(2), 3)).ok
    assert quasianalytic_verdict(PowerSub(IteratedLog(2), 3)).scope == "global"
    # nested substitutions flatten
    nested = PowerSub(PowerSub(IteratedLog(1), 2), 3)
    assert quasianalytic_verdict(nested).outcome == "fails"


def test_quasianalytic_powersub_identity_matches_base():
    for base in (Analytic(), Gevrey(1), IteratedLog(1), IteratedLog(2)):
        assert (
            quasianalytic_verdict(PowerSub(base, 1)).outcome
            == quasianalytic_verdict(base).outcome
        )


def test_quasianalytic_custom_is_inconclusive_with_trend():
    seq = Custom(rule=lambda n: F(n + 1), name="linear")
    v = quasianalytic_verdict(seq)
    assert v.outcome == "inconclusive"
    assert v.trend is not None and len(v.trend.last) >= 2
    # short finite tables stay in range
    short = Custom(table=[1, 2, 4, 8, 16, 32])
    v2 = quasianalytic_verdict(short)
    assert v2.outcome == "inconclusive"


def test_derivation_closure_analytic():
    est, verdict = derivation_closure_estimate(Analytic(), (1, 16), EXACT)
    assert est.fraction() == 1
    assert verdict.ok and verdict.scope == "global"


def test_derivation_closure_gevrey_max_at_n1():
    est, verdict = derivation_closure_estimate(Gevrey(1), (1, 32))
    enc = est.interval()
    assert enc.contains(F(2)) and enc.width < F(1, 2 ** 100)
    assert verdict.ok
    # sweep oracle: (n+1)**(1/n) < 2 for n >= 2
    for n in range(2, 33):
        assert F(n + 1) < F(2) ** n


def test_derivation_closure_custom_squared_exponent():
    seq = Custom(rule=lambda n: F(2) ** (n * n), name="gauss-like")
    est, verdict = derivation_closure_estimate(seq, (1, 12))
    enc = est.interval()
    assert enc.contains(F(8)) and enc.width < F(1, 2 ** 64)
    assert verdict.outcome == "inconclusive"
    # brute-force oracle: ratio root is 2**(2 + 1/n), maximal at n=1
    for n in range(1, 13):
        ratio = seq.exact(n + 1) / seq.exact(n)
        assert ratio == F(2) ** (2 * n + 1)


def test_inclusion_identity():
    g = Gevrey(1)
    est, verdict = inclusion_estimate(g, g, (1, 16), EXACT)
    assert est.fraction() == 1
    assert verdict.ok and verdict.scope == "global"


def test_inclusion_analytic_in_gevrey():
    est, verdict = inclusion_estimate(Analytic(), Gevrey(1), (1, 24))
    enc = est.interval()
    assert enc.contains(F(1)) and enc.width < F(1, 2 ** 100)
    assert verdict.ok and verdict.scope == "global"
    # sweep oracle: (1/n!)**(1/n) <= 1 with max 1 at n=1
    assert Gevrey(1).exact(1) == 1


def test_inclusion_gevrey_in_analytic_inconclusive_growth():
    est, verdict = inclusion_estimate(Gevrey(1), Analytic(), (1, 16))
    assert verdict.outcome == "inconclusive"
    assert "monotone growth" in verdict.trend.note
    assert est.interval().lo > 2  # (16!)^(1/16) is already large


def test_inclusion_submultiplicative_across_windows():
    window = (1, 12)
    trips = [
        (Analytic(), Gevrey(1), Gevrey(2)),
        (Gevrey(1), Gevrey(2), Gevrey(3)),
    ]
    for M, Nseq, P in trips:
        mn = inclusion_estimate(M, Nseq, window)[0].interval()
        np_ = inclusion_estimate(Nseq, P, window)[0].interval()
        mp = inclusion_estimate(M, P, window)[0].interval()
        assert mp.lo <= mn.hi * np_.hi


def test_window_validation():
    with pytest.raises(SequenceError):
        derivation_closure_estimate(Analytic(), (0, 4))
    with pytest.raises(SequenceError):
        inclusion_estimate(Analytic(), Analytic(), (3, 2))
