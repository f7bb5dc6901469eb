from fractions import Fraction

import pytest

from cantordiff.cantor import middle_pair
from cantordiff.errors import BudgetExceededError, ParseError, PreconditionError
from cantordiff.finitetype import (
    arrangement_pieces,
    build_automaton,
    char_poly,
    classify_pisot_pair,
    count_classes_in_window,
    depth_counting_bound,
    eval_poly_fraction,
    hausdorff_dimension,
    is_finite_type,
    piece_fingerprint,
    spectral_radius,
)
from cantordiff.ifs import LineIFS, LineMap, depth_class_count, generate_ifs
from cantordiff.intervals import Interval
from cantordiff.scalars import GOLDEN, FieldSpec, Scalar, parse_scalar

from .conftest import rat

# The 5-type transition matrix and depth-2 populations, frozen acceptance
# targets for the golden system at slope 2/gamma.
TYPE_MATRIX = [
    [5, 11, 3, 11, 5],
    [2, 6, 2, 6, 2],
    [4, 10, 3, 10, 4],
    [0, 2, 0, 1, 2],
    [0, 8, 2, 6, 5],
]
TYPE_START = [19, 10, 17, 2, 10]
TYPE_WEIGHTS = [6, 12, 3, 12, 6]


def gs(u, v) -> Scalar:
    return Scalar(Fraction(u), Fraction(v), GOLDEN)


@pytest.fixture(scope="module")
def golden_ifs(golden_pair, gamma):
    return generate_ifs(golden_pair, 2 / gamma)


@pytest.fixture(scope="module")
def golden_automaton(golden_ifs):
    return build_automaton(golden_ifs)


class TestFiniteType:
    def test_golden_certificate(self, golden_ifs):
        cert = is_finite_type(golden_ifs)
        assert cert is not None
        assert cert.kind == "pisot-lattice"
        assert cert.k == 1  # offsets already lie in Z[g]

    def test_middle_third_rational_lattice(self, third_pair):
        cert = is_finite_type(generate_ifs(third_pair, rat(1)))
        assert cert is not None and cert.kind == "rational-lattice"

    def test_non_integral_expansion_unknown(self, two_fifths_pair):
        # 1/ratio = 5/2 is not an algebraic integer: no lattice certificate
        assert is_finite_type(generate_ifs(two_fifths_pair, rat(1))) is None

    def test_inexact_slope_rejected_upstream(self):
        with pytest.raises(ParseError):
            parse_scalar("pi", GOLDEN)


class TestAutomaton:
    def test_middle_third_tiling(self, third_pair):
        aut = build_automaton(generate_ifs(third_pair, rat(1)))
        assert aut.state_count == 1
        assert aut.matrix == [[3]]
        dim = hausdorff_dimension(aut.ifs, aut)
        assert dim.hdim_lo <= 1.0 <= dim.hdim_hi

    def test_quarter_tiling(self, quarter_pair):
        aut = build_automaton(generate_ifs(quarter_pair, rat("1/2")))
        assert aut.state_count == 1
        assert aut.matrix == [[4]]

    def test_golden_closes_small(self, golden_automaton):
        assert golden_automaton.complete
        assert golden_automaton.state_count == 3
        assert sorted(golden_automaton.member_counts) == [7, 12, 20]

    def test_class_counts_match_enumeration(self, golden_ifs, golden_automaton):
        for n in range(1, 6):
            assert golden_automaton.class_count(n) == depth_class_count(
                golden_ifs, n, class_budget=3_000_000
            )

    def test_budget_degrades_gracefully(self, quarter_pair):
        ifs = generate_ifs(quarter_pair, rat("3/2"))  # percolating overlap chains
        with pytest.raises(BudgetExceededError) as info:
            build_automaton(ifs, state_budget=64)
        assert info.value.partial is not None
        assert not info.value.partial.complete


class TestSpectralRadius:
    def test_paper_type_matrix(self):
        # Exact characteristic polynomial x^5 - 20x^4 + 50x^3 - 28x^2 - 3x
        # = x(x-1)(x^3 - 19x^2 + 31x + 3); its largest root is 17.18605...
        result = spectral_radius(TYPE_MATRIX)
        assert result.char_poly == (1, -20, 50, -28, -3, 0)
        assert result.hi - result.lo < Fraction(1, 10**6)
        assert abs(result.midpoint - 17.186054896) < 1e-6
        root = (result.lo + result.hi) / 2
        cubic_val = eval_poly_fraction((1, -19, 31, 3), root)
        assert abs(cubic_val) < Fraction(1, 1000)

    def test_identity(self):
        result = spectral_radius([[1, 0], [0, 1]])
        assert result.lo <= 1 <= result.hi and result.hi - result.lo < Fraction(1, 10**8)

    def test_symmetric_two_by_two(self):
        result = spectral_radius([[2, 1], [1, 2]])
        assert result.lo <= 3 <= result.hi and result.hi - result.lo < Fraction(1, 10**8)

    def test_zero_matrix(self):
        result = spectral_radius([[0, 0], [0, 0]])
        assert result.lo == result.hi == 0

    def test_reducible(self):
        result = spectral_radius([[2, 1], [0, 1]])
        assert result.lo <= 2 <= result.hi and result.hi - result.lo < Fraction(1, 10**8)

    def test_periodic(self):
        result = spectral_radius([[0, 1], [1, 0]])
        assert result.lo <= 1 <= result.hi and result.hi - result.lo < Fraction(1, 10**8)

    def test_enclosure_contains_char_poly_root(self, golden_automaton):
        result = spectral_radius(golden_automaton.matrix)
        assert result.char_poly is not None
        lo_val = eval_poly_fraction(result.char_poly, result.lo)
        hi_val = eval_poly_fraction(result.char_poly, result.hi)
        assert lo_val == 0 or hi_val == 0 or (lo_val < 0) != (hi_val < 0)

    def test_negative_entry_rejected(self):
        with pytest.raises(PreconditionError):
            spectral_radius([[1, -1], [0, 1]])


class TestDimension:
    def test_golden_value(self, golden_ifs, golden_automaton):
        dim = hausdorff_dimension(golden_ifs, golden_automaton)
        # The island automaton's cubic is x^3 - 19x^2 + 31x + 3, largest
        # root 17.18605...; in base gamma^6 that is 0.9850472...
        assert dim.char_poly == (1, -19, 31, 3)
        assert dim.hdim_hi - dim.hdim_lo < 1e-8
        assert abs(dim.hdim - 0.9850472442) < 1e-8

    def test_tilings_have_dimension_one(self, third_pair, quarter_pair):
        for pair, lam in ((third_pair, rat(1)), (quarter_pair, rat("1/2"))):
            dim = hausdorff_dimension(generate_ifs(pair, lam))
            assert dim.hdim_lo <= 1 <= dim.hdim_hi
            assert dim.hdim_hi - dim.hdim_lo < 1e-8

    def test_dimension_capped_by_similarity(self, golden_ifs, third_pair, quarter_pair):
        import math

        systems = (
            golden_ifs,
            generate_ifs(third_pair, rat(1)),
            generate_ifs(quarter_pair, rat(1)),
        )
        for ifs in systems:
            dim = hausdorff_dimension(ifs)
            inv = float(ifs.ratio.inverse())
            similarity = math.log(len(ifs.maps)) / math.log(inv)
            assert dim.hdim_lo <= min(1.0, similarity) + 1e-9

    def test_box_equals_hausdorff(self, golden_ifs, golden_automaton):
        dim = hausdorff_dimension(golden_ifs, golden_automaton)
        assert dim.box_dim == dim.hdim

    def test_lambda_scaling_invariance(self, golden_pair, gamma):
        base = 2 / gamma
        dims = []
        p, q = gamma**3, gamma**2
        for i, j in ((0, 0), (1, 1), (-1, -1)):
            lam = base * p**i / q**j
            dims.append(hausdorff_dimension(generate_ifs(golden_pair, lam)))
        lo = max(d.hdim_lo for d in dims)
        hi = min(d.hdim_hi for d in dims)
        assert lo <= hi  # all enclosures overlap

    def test_duality_invariance(self, golden_pair, gamma):
        lam = 2 / gamma
        swapped = middle_pair(golden_pair.second.alpha, golden_pair.first.alpha)
        d1 = hausdorff_dimension(generate_ifs(golden_pair, lam))
        d2 = hausdorff_dimension(generate_ifs(swapped, lam.inverse()))
        assert max(d1.hdim_lo, d2.hdim_lo) <= min(d1.hdim_hi, d2.hdim_hi)


class TestDepthCounting:
    def test_golden_table_start(self, golden_ifs):
        result = depth_counting_bound(golden_ifs, 2)
        assert result.k_n == 369
        assert abs(result.k_n ** 0.5 - 19.2093) < 1e-3

    def test_first_sub_one_bound_at_six(self, golden_ifs, golden_automaton):
        for n in range(2, 6):
            result = depth_counting_bound(golden_ifs, n, automaton=golden_automaton)
            assert result.bound_lo > 1, f"bound dipped below 1 at n={n}"
        result6 = depth_counting_bound(golden_ifs, 6, automaton=golden_automaton)
        assert result6.bound_hi < 1
        assert result6.bound_hi < 0.9982

    def test_single_map_system(self):
        ifs = LineIFS(
            [LineMap(rat("1/2"), rat(0))], Interval(rat(0), rat(0))
        )
        result = depth_counting_bound(ifs, 3)
        assert result.k_n == 1
        assert abs(result.bound) < 1e-12

    def test_enumeration_vs_automaton_methods_agree(self, golden_ifs, golden_automaton):
        by_enum = depth_counting_bound(golden_ifs, 4, enumeration_budget=500_000)
        by_aut = depth_counting_bound(
            golden_ifs, 4, enumeration_budget=10, automaton=golden_automaton
        )
        assert by_enum.method == "enumeration" and by_aut.method == "automaton"
        assert by_enum.k_n == by_aut.k_n == 109281


class TestPisotClassification:
    def test_golden_alignment_slope_measure_zero(self, gamma):
        verdict = classify_pisot_pair(GOLDEN, 3, 2, 2 / gamma)
        assert verdict.kind == "measure_zero"
        assert verdict.dimension.hdim_hi < 1

    def test_golden_unit_slope_contains_interval(self):
        verdict = classify_pisot_pair(GOLDEN, 3, 2, rat(1))
        assert verdict.kind == "contains_interval"

    def test_non_pisot_field_rejected(self):
        non_pisot = FieldSpec(Fraction(1), Fraction(3))  # conjugate modulus > 1
        with pytest.raises(PreconditionError):
            classify_pisot_pair(non_pisot, 3, 2, rat(1))

    def test_zero_slope_rejected(self):
        with pytest.raises(PreconditionError):
            classify_pisot_pair(GOLDEN, 3, 2, rat(0))

    def test_generic_field_slope(self, gamma):
        # A generic slope may defeat the island automaton (percolating
        # chains); the contract is a verdict or an honest budget error.
        try:
            verdict = classify_pisot_pair(GOLDEN, 3, 2, gamma / 2, state_budget=96)
        except BudgetExceededError:
            return
        assert verdict.kind in ("measure_zero", "contains_interval")


class TestArrangement:
    def test_golden_piece_census(self, golden_ifs, gamma):
        pieces = arrangement_pieces(golden_ifs)
        census = {}
        for piece in pieces:
            key = piece_fingerprint(golden_ifs, piece)
            census[key] = census.get(key, 0) + 1
        # X, Y, Z single-covered; G, R double-covered; 2 gaps separate them
        assert census[(rat(2), 1)] == 6
        assert census[(rat(1), 1)] == 12
        assert census[(gs(5, -2), 1)] == 3
        assert census[(gs(-3, 2), 2)] == 12
        assert census[(rat(1), 2)] == 6

    def test_populations_reproduce_type_matrix(self, golden_ifs, golden_automaton):
        pieces = arrangement_pieces(golden_ifs)
        fingerprints = [
            (rat(2), 1),      # X
            (rat(1), 1),      # Y
            (gs(5, -2), 1),   # Z
            (gs(-3, 2), 2),   # G
            (rat(1), 2),      # R
        ]
        reps = []
        for key in fingerprints:
            reps.append(
                next(p for p in pieces if piece_fingerprint(golden_ifs, p) == key)
            )
        expected = TYPE_START[:]
        for n in (2, 3, 4):
            got = [
                count_classes_in_window(
                    golden_automaton,
                    rep.interval,
                    n,
                    "inside" if key[1] == 2 else "overlap",
                )
                for rep, key in zip(reps, fingerprints)
            ]
            assert got == expected, f"population mismatch at depth {n}"
            expected = [
                sum(TYPE_MATRIX[i][j] * expected[j] for j in range(5)) for i in range(5)
            ]

    def test_population_uniform_across_pieces_depth2(self, golden_ifs, golden_automaton):
        # "Regardless of the indexes": every piece of one type counts alike.
        pieces = arrangement_pieces(golden_ifs)
        by_type = {}
        for piece in pieces:
            key = piece_fingerprint(golden_ifs, piece)
            mode = "inside" if key[1] == 2 else "overlap"
            count = count_classes_in_window(golden_automaton, piece.interval, 2, mode)
            by_type.setdefault(key, set()).add(count)
        assert all(len(counts) == 1 for counts in by_type.values())


def test_characteristic_polynomial_of_type_matrix():
    assert char_poly(TYPE_MATRIX) == (1, -20, 50, -28, -3, 0)
