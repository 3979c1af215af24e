import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotflow.invariants import alexander, gauss_linking, LaurentPoly, writhe_and_self_linking
from knotflow.templates import (
    CyclicWord,
    PeriodicWord,
    SameOrbit,
    Universality,
    enumerate_words,
    lorenz_like,
    pair_linking,
    universal_predicate,
    word_to_braid,
    word_to_curve,
    words_to_curves,
)


def brute_force_necklaces(length):
    """All aperiodic binary necklaces of exactly this length, canonical."""
    found = set()
    for bits in itertools.product("xy", repeat=length):
        word = "".join(bits)
        canonical = min(word[i:] + word[:i] for i in range(length))
        if (word + word).index(word, 1) == length:
            found.add(canonical)
    return found


words_strategy = st.text(alphabet="xy", min_size=1, max_size=10)


class TestCyclicWord:
    @given(words_strategy)
    @settings(max_examples=200, deadline=None)
    def test_canonical_is_rotation_invariant(self, word):
        w = CyclicWord.of(word)
        for i in range(len(word)):
            rotated = CyclicWord.of(word[i:] + word[:i])
            assert rotated.canonical == w.canonical

    def test_aperiodicity(self):
        assert CyclicWord.of("xy").aperiodic
        assert not CyclicWord.of("xyxy").aperiodic
        assert not CyclicWord.of("xxx").aperiodic

    def test_alphabet_validation(self):
        with pytest.raises(ValueError):
            CyclicWord.of("xz")
        with pytest.raises(ValueError):
            CyclicWord.of("")


class TestEnumeration:
    def test_length_one(self):
        assert [str(w) for w in enumerate_words(1)] == ["x", "y"]

    def test_length_three(self):
        assert [str(w) for w in enumerate_words(3)] == ["x", "y", "xy", "xxy", "xyy"]

    @pytest.mark.parametrize("length", range(1, 13))
    def test_matches_brute_force(self, length):
        expected = brute_force_necklaces(length)
        got = {str(w) for w in enumerate_words(12) if len(w) == length}
        assert got == expected

    def test_length_twelve_count(self):
        assert len(brute_force_necklaces(12)) == 335

    def test_sorted_by_length_then_lex(self):
        words = [str(w) for w in enumerate_words(6)]
        assert words == sorted(words, key=lambda s: (len(s), s))


class TestUniversality:
    @pytest.mark.parametrize(
        "m,n,star,expected",
        [
            (0, -1, False, Universality.UNIVERSAL),
            (0, 0, False, Universality.NOT_UNIVERSAL),
            (0, 3, False, Universality.NOT_UNIVERSAL),
            (-2, 0, False, Universality.UNIVERSAL),
            (1, 2, False, Universality.NOT_UNIVERSAL),
            (-1, -2, False, Universality.NOT_UNIVERSAL),
            (0, 5, True, Universality.UNIVERSAL),
            (1, -1, False, Universality.UNKNOWN),
            (-2, 3, True, Universality.UNKNOWN),
        ],
    )
    def test_table(self, m, n, star, expected):
        assert universal_predicate(m, n, star) is expected


class TestWordToBraid:
    def test_two_cycle(self):
        braid = word_to_braid(lorenz_like(0, 0), CyclicWord.of("xy"))
        assert braid.strands == 2
        assert braid.letters == (1,)

    def test_three_cycle(self):
        braid = word_to_braid(lorenz_like(0, 0), CyclicWord.of("xxy"))
        assert braid.strands == 3
        assert braid.letters == (2, 1)

    def test_trefoil_word(self):
        braid = word_to_braid(lorenz_like(0, 0), CyclicWord.of("xyxyy"))
        assert braid.strands == 5
        assert len(braid.letters) == 6
        assert braid.is_positive()
        assert braid.permutation() == (3, 4, 0, 1, 2)
        assert alexander(braid) == LaurentPoly.from_pairs([(-1, 1), (0, -1), (1, 1)])

    def test_periodic_word_rejected(self):
        with pytest.raises(PeriodicWord):
            word_to_braid(lorenz_like(0, 0), CyclicWord.of("xyxy"))

    def test_positive_on_plain_template(self):
        spec = lorenz_like(0, 0)
        for w in enumerate_words(6):
            assert word_to_braid(spec, w).is_positive() or len(w) == 1

    def test_negative_on_starred_template(self):
        spec = lorenz_like(0, 0, starred=True)
        for w in enumerate_words(5):
            braid = word_to_braid(spec, w)
            assert braid.is_negative() or not braid.letters

    def test_crossing_count_is_inversion_count(self):
        spec = lorenz_like(0, 0)
        for w in enumerate_words(6):
            braid = word_to_braid(spec, w)
            rotations = sorted(w.rotations())
            targets = [sorted(w.rotations()).index(r[1:] + r[0]) for r in rotations]
            inversions = sum(
                1
                for i in range(len(targets))
                for j in range(i + 1, len(targets))
                if targets[i] > targets[j]
            )
            assert braid.crossing_count == inversions

    def test_trip_number_one_words_are_unknots(self):
        spec = lorenz_like(0, 0)
        for length in range(1, 9):
            for word in ["x" * (length - 1) + "y", "x" + "y" * (length - 1)]:
                if len(word) < 1 or (length > 1 and len(set(word)) == 1):
                    continue
                braid = word_to_braid(spec, CyclicWord.of(word))
                report_poly = alexander(braid)
                assert report_poly == LaurentPoly.one()
                assert (braid.crossing_count - braid.strands + 1) // 2 == 0

    def test_twist_insertion(self):
        braid = word_to_braid(lorenz_like(0, -1), CyclicWord.of("xy"))
        # one x-rotation and one y-rotation: the y-ear block is a single
        # strand, so a twist on it adds no crossings
        assert braid.letters == (1,)
        braid = word_to_braid(lorenz_like(0, -1), CyclicWord.of("xyy"))
        # two y-rotations: one negative full twist adds 2 negative crossings
        assert sorted(braid.letters)[:2] == [-2, -2]


class TestPairLinking:
    def test_fixed_points_unlinked(self):
        assert pair_linking(lorenz_like(0, 0), CyclicWord.of("x"), CyclicWord.of("y")) == 0

    def test_negative_twist(self):
        assert pair_linking(lorenz_like(0, -1), CyclicWord.of("xy"), CyclicWord.of("y")) == -1

    def test_positive_twist(self):
        assert pair_linking(lorenz_like(0, 1), CyclicWord.of("xy"), CyclicWord.of("y")) == 1

    def test_symmetry(self):
        spec = lorenz_like(1, -2, starred=True)
        pairs = [("xy", "y"), ("xxy", "xyy"), ("x", "xxy")]
        for a, b in pairs:
            w1, w2 = CyclicWord.of(a), CyclicWord.of(b)
            assert pair_linking(spec, w1, w2) == pair_linking(spec, w2, w1)

    def test_same_orbit_rejected(self):
        with pytest.raises(SameOrbit):
            pair_linking(lorenz_like(0, 0), CyclicWord.of("xy"), CyclicWord.of("yx"))

    def test_mirror_covariance(self):
        words = [("xy", "y"), ("xxy", "y"), ("xy", "xyy")]
        for m, n, star in [(0, 0, False), (2, 1, False), (0, -3, True)]:
            spec = lorenz_like(m, n, star)
            mirror = spec.mirror()
            for a, b in words:
                w1, w2 = CyclicWord.of(a), CyclicWord.of(b)
                assert pair_linking(mirror, w1, w2) == -pair_linking(spec, w1, w2)

    def test_mirror_negates_braid_letters(self):
        spec = lorenz_like(1, -1)
        w = CyclicWord.of("xxyy")
        b1 = word_to_braid(spec, w)
        b2 = word_to_braid(spec.mirror(), w)
        assert b2.letters == tuple(-l for l in b1.letters)


class TestCurves:
    def test_single_strand_planar_loop(self):
        curve = word_to_curve(lorenz_like(0, 0), CyclicWord.of("x"))
        assert np.allclose(curve.vertices[:, 0], curve.vertices[0, 0])

    def test_pair_curves_unlinked(self):
        c1, c2 = words_to_curves(
            lorenz_like(0, 0), [CyclicWord.of("xy"), CyclicWord.of("y")]
        )
        assert gauss_linking(c1, c2, "signed_crossings") == 0

    def test_pair_curves_match_combinatorial(self):
        for spec, expected in [(lorenz_like(0, -1), -1), (lorenz_like(0, 1), 1)]:
            c1, c2 = words_to_curves(spec, [CyclicWord.of("xy"), CyclicWord.of("y")])
            assert gauss_linking(c1, c2, "signed_crossings") == expected
            quad = gauss_linking(c1, c2, "quadrature")
            assert round(quad) == expected
            assert abs(quad - expected) < 0.1

    def test_bennequin_equality_short_words(self):
        spec = lorenz_like(0, 0)
        for w in enumerate_words(6):
            braid = word_to_braid(spec, w)
            poly = alexander(braid)
            assert poly.span == braid.crossing_count - braid.strands + 1
