import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.weights import (WeightSeq, as_float, coarsen, is_coarsening_of,
                              make_sequence, random_rational_sequence,
                              ratio_diagnostics)


def accumulated(seq, n):
    total = Fraction(0) if seq.exact else 0.0
    out = []
    for k in range(1, n + 1):
        total = total + seq.term(k)
        out.append(total)
    return out


class TestDescriptors:
    def test_ones(self):
        s = make_sequence("ones")
        assert s.term(5) == 1 and s.partial_sum(10) == 10
        assert s.sum_diverges is True
        assert s.tail_bound(3) is None

    def test_dyadic_exact(self):
        s = make_sequence("dyadic")
        assert s.term(3) == Fraction(1, 8)
        assert s.partial_sum(4) == Fraction(15, 16)
        assert s.tail_bound(4) == Fraction(1, 16)
        assert s.sum_diverges is False
        assert s.exact

    def test_geometric_below_one(self):
        s = make_sequence("geometric:1/3")
        assert s.term(2) == Fraction(1, 9)
        assert s.partial_sum(3) == Fraction(13, 27)
        assert s.tail_bound(2) == Fraction(1, 2) - Fraction(4, 9)
        assert s.sum_diverges is False

    def test_geometric_above_one(self):
        s = make_sequence("geometric:2")
        assert s.term(4) == 16
        assert s.partial_sum(4) == 30
        assert s.sum_diverges is True and s.tail_bound(4) is None

    def test_geometric_ratio_one(self):
        s = make_sequence("geometric:1")
        assert s.partial_sum(7) == 7 and s.sum_diverges is True

    def test_closed_form_partial_sums_match_accumulation(self):
        for desc in ("ones", "dyadic", "geometric:1/3", "geometric:2",
                     "geometric:1", "perturbed-dyadic:3"):
            s = make_sequence(desc)
            acc = accumulated(s, 25)
            assert [s.partial_sum(n) for n in range(1, 26)] == acc, desc

    def test_perturbed_dyadic(self):
        s = make_sequence("perturbed-dyadic:3")
        assert s.term(3) == 1 and s.term(2) == Fraction(1, 4)
        assert s.tail_bound(5) == Fraction(1, 32)
        total = s.partial_sum(5) + s.tail_bound(5)
        assert total == 2 - Fraction(1, 8)

    def test_power_integer_exponent_exact(self):
        s = make_sequence("power:2")
        assert s.term(3) == 9 and s.exact
        assert s.sum_diverges is True
        inv = make_sequence("power:-2")
        assert inv.term(3) == Fraction(1, 9)
        assert inv.sum_diverges is False

    def test_power_tail_bound_dominates_true_tail(self):
        s = make_sequence("power:-2")
        bound = s.tail_bound(10)
        true_tail = sum(1.0 / k ** 2 for k in range(11, 20_000))
        assert true_tail < bound < 2 * true_tail

    @pytest.mark.parametrize("desc", ["bogus", "geometric:0", "geometric:-1/2",
                                      "geometric:inf", "perturbed-dyadic:0",
                                      "perturbed-dyadic:x", "power:inf", "ones:3"])
    def test_rejects_bad_descriptors(self, desc):
        with pytest.raises(ValueError):
            make_sequence(desc)

    def test_nonpositive_custom_term_rejected(self):
        # the first term is probed at construction time
        with pytest.raises(ValueError, match="not positive"):
            WeightSeq("broken", lambda n: n - 2)
        # later terms are validated on access
        s = WeightSeq("fades", lambda n: 3 - n)
        assert s.term(2) == 1
        with pytest.raises(ValueError, match="not positive"):
            s.term(3)

    def test_term_indexing_starts_at_one(self):
        with pytest.raises(ValueError):
            make_sequence("ones").term(0)


class TestFloatViews:
    def test_terms_floats(self):
        arr = make_sequence("dyadic").terms_floats(4)
        assert list(arr) == [0.5, 0.25, 0.125, 0.0625]

    def test_overflow_raises(self):
        with pytest.raises(ValueError, match="overflow"):
            make_sequence("geometric:2").terms_floats(1100)

    def test_underflow_raises(self):
        with pytest.raises(ValueError, match="underflow"):
            make_sequence("dyadic").terms_floats(1100)

    def test_as_float_view(self):
        s = as_float(make_sequence("dyadic"))
        assert s.number_mode == "float"
        assert s.term(3) == 0.125
        assert s.tail_bound(4) == pytest.approx(1 / 16)
        assert s.sum_diverges is False

    def test_partial_sums_floats_match_exact(self):
        s = make_sequence("geometric:1/3")
        exact = [float(s.partial_sum(n)) for n in range(1, 21)]
        assert list(s.partial_sums_floats(20)) == pytest.approx(exact, rel=1e-14)


class TestCache:
    def test_accumulation_cache_is_thread_consistent(self):
        s = WeightSeq("custom", lambda n: Fraction(1, n))
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: s.partial_sum(300), range(16)))
        expected = sum(Fraction(1, k) for k in range(1, 301))
        assert all(r == expected for r in results)


class TestRatioDiagnostics:
    def test_ones_ratios(self):
        rep = ratio_diagnostics(make_sequence("ones"), 5)
        assert rep.ratios == (1.0, 0.5, 1 / 3, 0.25, 0.2)
        assert rep.is_nonincreasing
        assert rep.divergence_verdict == "diverges"

    def test_dyadic_converges_with_monotone_ratios(self):
        rep = ratio_diagnostics(make_sequence("dyadic"), 30)
        assert rep.is_nonincreasing
        assert rep.divergence_verdict == "converges"
        assert rep.max_term_ratio == pytest.approx(0.5 / float(1 - Fraction(1, 2) ** 30))

    def test_bump_breaks_monotonicity(self):
        rep = ratio_diagnostics(make_sequence("perturbed-dyadic:3"), 10)
        assert not rep.is_nonincreasing

    def test_unknown_divergence_is_inconclusive(self):
        s = WeightSeq("mystery", lambda n: Fraction(1, n))
        rep = ratio_diagnostics(s, 10)
        assert rep.divergence_verdict == "inconclusive"

    def test_float_path_matches_exact_path(self):
        s = make_sequence("dyadic")
        exact = ratio_diagnostics(s, 20)
        floaty = ratio_diagnostics(as_float(s), 20)
        assert floaty.ratios == pytest.approx(exact.ratios, rel=1e-12)
        assert floaty.is_nonincreasing == exact.is_nonincreasing

    def test_first_ratio_is_one_and_all_in_unit_interval(self):
        for desc in ("ones", "dyadic", "geometric:2", "perturbed-dyadic:2"):
            rep = ratio_diagnostics(make_sequence(desc), 12)
            assert rep.ratios[0] == 1.0
            assert all(0 < r <= 1 for r in rep.ratios)

    def test_serializes(self):
        out = ratio_diagnostics(make_sequence("ones"), 5).to_json()
        assert out["divergence_verdict"] == "diverges"
        assert "ratios" in out  # small N includes the full list


class TestCoarsen:
    def test_block_sums(self):
        c = coarsen(make_sequence("ones"), [2, 1, 3])
        assert [c.term(k) for k in range(1, 5)] == [2, 1, 3, 1]
        assert c.partial_sum(3) == 6

    def test_exact_geometric_blocks(self):
        q = Fraction(1, 2)
        c = coarsen(make_sequence("geometric:1/2"), [2] * 6)
        for k in range(1, 7):
            assert c.term(k) == q ** (2 * k - 1) * (1 + q)

    def test_partial_sums_are_a_subsequence(self):
        lam = make_sequence("geometric:3/4")
        c = coarsen(lam, [3, 1, 2, 5])
        assert c.partial_sum(2) == lam.partial_sum(4)
        assert c.partial_sum(4) == lam.partial_sum(11)

    def test_tail_bound_passes_through(self):
        c = coarsen(make_sequence("dyadic"), [2, 2])
        assert c.tail_bound(2) == Fraction(1, 16)

    def test_rejects_bad_blocks(self):
        with pytest.raises(ValueError):
            coarsen(make_sequence("ones"), [])
        with pytest.raises(ValueError):
            coarsen(make_sequence("ones"), [2, 0])


class TestCoarseningOrder:
    def test_coarsenings_certify(self):
        lam = make_sequence("geometric:1/2")
        psi = coarsen(lam, [1, 2, 3, 1])
        assert is_coarsening_of(psi, lam, 4)

    @given(blocks=st.lists(st.integers(min_value=1, max_value=4),
                           min_size=1, max_size=10))
    @settings(max_examples=40, deadline=None)
    def test_random_coarsenings_certify(self, blocks):
        lam = make_sequence("ones")
        assert is_coarsening_of(coarsen(lam, blocks), lam, len(blocks))

    def test_unrelated_sequences_fail(self):
        assert not is_coarsening_of(make_sequence("geometric:1/3"),
                                    make_sequence("ones"), 1)

    def test_float_sequences_are_rejected(self):
        with pytest.raises(TypeError):
            is_coarsening_of(as_float(make_sequence("dyadic")),
                             make_sequence("dyadic"), 2)

    def test_walk_budget(self):
        lam = make_sequence("geometric:1/2")  # partial sums < 1 forever
        two = WeightSeq("two", lambda n: 2 * n)
        with pytest.raises(RuntimeError, match="without reaching"):
            is_coarsening_of(two, lam, 1, max_steps=50)


class TestRandomRational:
    def test_deterministic_and_positive(self):
        a = random_rational_sequence(9)
        b = random_rational_sequence(9)
        terms = [a.term(n) for n in range(1, 30)]
        assert terms == [b.term(n) for n in range(1, 30)]
        assert all(0 < t <= 9 for t in terms)
        assert a.exact and a.sum_diverges is True

    def test_seed_changes_sequence(self):
        a = [random_rational_sequence(1).term(n) for n in range(1, 20)]
        b = [random_rational_sequence(2).term(n) for n in range(1, 20)]
        assert a != b
