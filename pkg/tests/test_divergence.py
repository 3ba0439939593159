import math
import random

import pytest
from hypothesis import given, strategies as st

from fairaudit import divergence as dv
from fairaudit.tabular import ProbabilityDistribution


# --- independent brute-force oracles (direct summation from count tables) ---

def oracle_kl(p_counts, q_counts):
    pt, qt = sum(p_counts), sum(q_counts)
    total = 0.0
    for pc, qc in zip(p_counts, q_counts):
        p = pc / pt
        q = qc / qt
        if p == 0.0:
            continue
        if q == 0.0:
            return math.inf
        total += p * math.log2(p / q)
    return total


def oracle_kl_normalized(p_counts, q_counts):
    return 1.0 - math.exp(-oracle_kl(p_counts, q_counts))


def oracle_js(p_counts, q_counts):
    pt, qt = sum(p_counts), sum(q_counts)
    ps = [c / pt for c in p_counts]
    qs = [c / qt for c in q_counts]
    ms = [(a + b) / 2.0 for a, b in zip(ps, qs)]

    def partial(xs):
        return sum(x * math.log2(x / m) for x, m in zip(xs, ms) if x > 0.0)

    return (partial(ps) + partial(qs)) / 2.0


def dist(counts, support=None):
    support = support or tuple(f"v{i}" for i in range(len(counts)))
    return ProbabilityDistribution.from_counts(support, counts)


def random_counts(rng, k, allow_zero=True):
    while True:
        counts = [rng.randint(0, 50) if allow_zero else rng.randint(1, 50)
                  for _ in range(k)]
        if sum(counts) > 0:
            return counts


class TestKl:
    def test_identical_is_zero(self):
        p = dist([1, 1])
        assert dv.kl(p, p).value == 0.0

    def test_one_bit(self):
        assert dv.kl(dist([1, 0]), dist([1, 1])).value == 1.0

    def test_zero_support_is_infinite(self):
        assert dv.kl(dist([1, 1]), dist([1, 0])).value == math.inf

    def test_mismatched_supports(self):
        with pytest.raises(ValueError, match="supports"):
            dv.kl(dist([1, 1], ("a", "b")), dist([1, 1], ("a", "c")))

    def test_asymmetry_witness(self):
        p, q = dist([2, 2]), dist([1, 3])
        assert dv.kl(p, q).value != dv.kl(q, p).value

    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_nonnegative_and_separating(self, k, seed):
        rng = random.Random(seed)
        pc = random_counts(rng, k, allow_zero=False)
        qc = random_counts(rng, k, allow_zero=False)
        v = dv.kl(dist(pc), dist(qc)).value
        assert v >= 0.0
        if v < 1e-12:  # equality only for (numerically) identical distributions
            pt, qt = sum(pc), sum(qc)
            assert all(abs(a / pt - b / qt) < 1e-6 for a, b in zip(pc, qc))


class TestKlNormalized:
    def test_zero(self):
        p = dist([2, 3])
        assert dv.kl_normalized(p, p).value == 0.0

    def test_infinite_maps_to_one(self):
        assert dv.kl_normalized(dist([1, 1]), dist([1, 0])).value == 1.0

    def test_one_bit_case(self):
        got = dv.kl_normalized(dist([1, 0]), dist([1, 1])).value
        assert got == 1.0 - math.exp(-1.0)

    def test_strictly_increasing_in_kl(self):
        rng = random.Random(7)
        pairs = []
        for _ in range(40):
            pc = random_counts(rng, 3, allow_zero=False)
            qc = random_counts(rng, 3, allow_zero=False)
            pairs.append((dv.kl(dist(pc), dist(qc)).value,
                          dv.kl_normalized(dist(pc), dist(qc)).value))
        pairs.sort()
        for (k0, n0), (k1, n1) in zip(pairs, pairs[1:]):
            if k1 > k0:
                assert n1 > n0


class TestJs:
    def test_identical_is_zero(self):
        p = dist([2, 5, 3])
        assert dv.js(p, p).value == 0.0

    def test_disjoint_is_exactly_one(self):
        assert dv.js(dist([1, 0]), dist([0, 1])).value == 1.0
        assert dv.js(dist([3, 4, 0, 0]), dist([0, 0, 5, 2])).value == 1.0
        assert dv.js(dist([1, 2, 0]), dist([0, 0, 7])).value == 1.0

    def test_symmetry(self):
        rng = random.Random(11)
        for _ in range(200):
            p = dist(random_counts(rng, 3))
            q = dist(random_counts(rng, 3))
            assert abs(dv.js(p, q).value - dv.js(q, p).value) <= 1e-12

    @given(st.integers(2, 5), st.integers(0, 10_000))
    def test_bounded(self, k, seed):
        rng = random.Random(seed)
        p = dist(random_counts(rng, k))
        q = dist(random_counts(rng, k))
        assert 0.0 <= dv.js(p, q).value <= 1.0


class TestOracleAgreement:
    def test_thousand_random_pairs(self):
        rng = random.Random(20240101)
        checked = 0
        for _ in range(1000):
            k = rng.randint(2, 5)
            pc = random_counts(rng, k)
            qc = random_counts(rng, k)
            p, q = dist(pc), dist(qc)
            got_kl = dv.kl(p, q).value
            want_kl = oracle_kl(pc, qc)
            if math.isinf(want_kl):
                assert math.isinf(got_kl)
                assert dv.kl_normalized(p, q).value == 1.0
            else:
                assert abs(got_kl - want_kl) <= 1e-12
                assert abs(dv.kl_normalized(p, q).value - oracle_kl_normalized(pc, qc)) <= 1e-12
            assert abs(dv.js(p, q).value - oracle_js(pc, qc)) <= 1e-12
            checked += 1
        assert checked == 1000


class TestAggregate:
    def _vals(self, xs):
        return [dv.DivergenceValue(dv.JS, x) for x in xs]

    def test_max(self):
        assert dv.aggregate(self._vals([0.1, 0.3]), "max").value == 0.3

    def test_mean(self):
        assert dv.aggregate(self._vals([0.1, 0.3]), "mean").value == pytest.approx(0.2)

    def test_min(self):
        assert dv.aggregate(self._vals([0.1, 0.3]), "min").value == 0.1

    def test_singleton(self):
        for mode in dv.AGGREGATIONS:
            assert dv.aggregate(self._vals([0.42]), mode).value == 0.42

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            dv.aggregate([], "max")

    def test_mixed_kinds_rejected(self):
        with pytest.raises(ValueError, match="mixed"):
            dv.aggregate([dv.DivergenceValue(dv.JS, 0.1),
                          dv.DivergenceValue(dv.KL, 0.1)], "max")


class TestAutoThreshold:
    SPEC_INTERVALS = {"high": (0.02, 0.10), "low": (0.10, 0.25)}

    def test_worked_example(self):
        t = dv.auto_threshold("high", 2, 1000, 1000,
                              intervals=self.SPEC_INTERVALS, c_ref=10)
        assert t.lam == pytest.approx(0.2)
        assert t.epsilon == 0.2 * 0.02 + 0.8 * 0.10  # 0.084

    def test_endpoints_exact(self):
        iv = (0.02, 0.10)
        assert dv.interpolate_threshold(iv, 0.0) == 0.10
        assert dv.interpolate_threshold(iv, 1.0) == 0.02
        # lam saturates at 1 for maximal granularity and population
        t = dv.auto_threshold("high", 10, 1000, 1000, intervals=self.SPEC_INTERVALS)
        assert t.epsilon == 0.02

    def test_monotone_in_granularity_and_population(self):
        prev = None
        for n_c in range(2, 13):
            eps = dv.auto_threshold("high", n_c, 500, 1000).epsilon
            if prev is not None:
                assert eps <= prev
            prev = eps
        prev = None
        for n_d in range(100, 1001, 100):
            eps = dv.auto_threshold("high", 3, n_d, 1000).epsilon
            if prev is not None:
                assert eps <= prev
            prev = eps

    def test_high_is_stricter_than_low(self):
        for n_c in (2, 4, 8):
            for n_d in (10, 100, 1000):
                hi = dv.auto_threshold("high", n_c, n_d, 1000).epsilon
                lo = dv.auto_threshold("low", n_c, n_d, 1000).epsilon
                assert hi <= lo

    def test_epsilon_inside_interval(self):
        t = dv.auto_threshold("low", 5, 250, 1000)
        m, upper = t.interval
        assert m <= t.epsilon <= upper

    def test_errors(self):
        with pytest.raises(ValueError, match="at least 2"):
            dv.auto_threshold("high", 1, 10, 100)
        with pytest.raises(ValueError, match="outside"):
            dv.auto_threshold("high", 2, 0, 100)
        with pytest.raises(ValueError, match="outside"):
            dv.auto_threshold("high", 2, 101, 100)
        with pytest.raises(ValueError, match="interval"):
            dv.auto_threshold("high", 2, 10, 100, intervals={"high": (0.3, 0.2), "low": (0.1, 0.2)})
        with pytest.raises(ValueError, match="rigour"):
            dv.auto_threshold("medium", 2, 10, 100)
