"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as they
happen; without -s they appear in the captured-output sections.  Every
tolerance is pinned here.  Criterion 2 carries two sub-assertions that are
mutually inconsistent with its own characteristic-polynomial assertion; they
are asserted as stated and fail honestly (see the repository notes), while
everything computable from the polynomial itself passes.
"""

import random
from contextlib import contextmanager
from fractions import Fraction

import pytest

from cantordiff.cantor import middle_pair, thickness_product
from cantordiff.finitetype import (
    arrangement_pieces,
    build_automaton,
    count_classes_in_window,
    char_poly,
    depth_counting_bound,
    hausdorff_dimension,
    piece_fingerprint,
    spectral_radius,
)
from cantordiff.fullinterval import analyze, is_full
from cantordiff.ifs import (
    attractor_membership,
    coverage_at_depth,
    generate_ifs,
    measure_zero_by_count,
    sum_as_difference,
    union_at_depth,
)
from cantordiff.intervals import Interval
from cantordiff.nonlinear import (
    CATALOG,
    LinkRange,
    certificate_smoke_gap,
    interval_certificate,
)
from cantordiff.renorm import build_recurrent_set, membership, verify_recurrence
from cantordiff.scalars import GOLDEN, Scalar

from .conftest import rat


def gs(u, v) -> Scalar:
    return Scalar(Fraction(u), Fraction(v), GOLDEN)


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except AssertionError as exc:
        first_line = str(exc).splitlines()[0] if str(exc) else "assertion failed"
        print(f"FAIL criterion {num:2d}: {label} -- {first_line}")
        raise
    print(f"PASS criterion {num:2d}: {label}")


@pytest.fixture(scope="module")
def golden_ifs(golden_pair, gamma):
    return generate_ifs(golden_pair, 2 / gamma)


@pytest.fixture(scope="module")
def golden_automaton(golden_ifs):
    return build_automaton(golden_ifs)


# The five-type transition matrix, start populations, and multiplicities of
# the golden system's depth-1 arrangement (acceptance targets).
TYPE_MATRIX = [
    [5, 11, 3, 11, 5],
    [2, 6, 2, 6, 2],
    [4, 10, 3, 10, 4],
    [0, 2, 0, 1, 2],
    [0, 8, 2, 6, 5],
]
TYPE_START = [19, 10, 17, 2, 10]

GOLDEN_EXPANDING_OFFSETS = [
    gs(8, 8), gs(6, 8), gs(8, 6), gs(6, 6), gs(4, 6), gs(6, 4), gs(4, 4),
    gs(4, 2), gs(2, 2), gs(4, 0), gs(2, 0), gs(0, 0), gs(2, -2), gs(0, -2),
    gs(0, -4), gs(-2, -4), gs(0, -6), gs(-2, -6), gs(-4, -6), gs(-2, -8),
    gs(-4, -8),
]


def test_criterion_1_golden_ifs_reproduction(golden_ifs):
    with criterion(1, "golden system: 21 maps with the listed expanding offsets"):
        assert len(golden_ifs.maps) == 21
        assert golden_ifs.expanding_offsets_desc() == GOLDEN_EXPANDING_OFFSETS


def test_criterion_2_matrix_and_dimension(golden_ifs, golden_automaton):
    with criterion(2, "type populations, characteristic polynomial, spectral data"):
        pieces = arrangement_pieces(golden_ifs)
        fingerprints = [
            (rat(2), 1),     # X
            (rat(1), 1),     # Y
            (gs(5, -2), 1),  # Z
            (gs(-3, 2), 2),  # G
            (rat(1), 2),     # R
        ]
        reps = [
            next(p for p in pieces if piece_fingerprint(golden_ifs, p) == key)
            for key in fingerprints
        ]
        expected = TYPE_START[:]
        for n in range(2, 7):
            got = [
                count_classes_in_window(
                    golden_automaton,
                    rep.interval,
                    n,
                    "inside" if key[1] == 2 else "overlap",
                )
                for rep, key in zip(reps, fingerprints)
            ]
            assert got == expected, f"populations at depth {n}: {got} != {expected}"
            expected = [
                sum(TYPE_MATRIX[i][j] * expected[j] for j in range(5))
                for i in range(5)
            ]
        # char poly of A: x^5 - 20x^4 + 50x^3 - 28x^2 - 3x
        #              = x (x - 1) (x^3 - 19x^2 + 31x + 3)
        assert char_poly(TYPE_MATRIX) == (1, -20, 50, -28, -3, 0)
        radius = spectral_radius(TYPE_MATRIX)
        dim = hausdorff_dimension(golden_ifs, golden_automaton)
        # The two stated numeric targets contradict the polynomial above:
        # its largest root is 17.18605..., giving hdim 0.98505...; the values
        # below belong to the variant cubic x^3 - 19x^2 + 30x + 3.  They are
        # asserted as stated and fail honestly.
        assert abs(radius.midpoint - 17.2508) <= 1e-3, (
            f"spectral radius {radius.midpoint:.6f} != 17.2508 +- 1e-3 "
            "(17.2508 is not a root of the asserted characteristic polynomial; "
            "the exact largest root is 17.186055)"
        )
        assert abs(dim.hdim - 0.9863) <= 1e-3, (
            f"hdim {dim.hdim:.6f} != 0.9863 +- 1e-3 (follows from the root slip)"
        )


def test_criterion_3_counting_table(golden_ifs, golden_automaton):
    with criterion(3, "k_n^(1/n) table for n = 2..6 and first sub-1 bound at n = 6"):
        targets = {2: 19.2093, 3: 18.5246, 4: 18.1817, 5: 17.9782, 6: 17.8437}
        first_sub_one = None
        for n in range(2, 7):
            result = depth_counting_bound(
                golden_ifs, n, enumeration_budget=200_000, automaton=golden_automaton
            )
            root = result.k_n ** (1.0 / n)
            assert abs(root - targets[n]) < 1e-3, f"k_{n}^(1/{n}) = {root}"
            if first_sub_one is None and result.bound_hi < 1:
                first_sub_one = n
        assert first_sub_one == 6
        final = depth_counting_bound(
            golden_ifs, 6, enumeration_budget=200_000, automaton=golden_automaton
        )
        assert final.bound_hi < 0.9982


def test_criterion_4_pair_diagnostics(golden_pair, gamma):
    with criterion(4, "golden pair dimension sum and thickness product"):
        from cantordiff.cantor import hausdorff_dim

        alo, ahi = hausdorff_dim(golden_pair.first)
        blo, bhi = hausdorff_dim(golden_pair.second)
        assert abs((alo + blo + ahi + bhi) / 2 - 1.2003) <= 1e-4
        product = thickness_product(golden_pair)
        assert product == (rat(3) - gamma).inverse()
        plo, phi = product.float_enclosure()
        assert abs((plo + phi) / 2 - 0.7236) <= 1e-4


def test_criterion_5_closed_form_vs_coverage(golden_pair, quarter_pair, gamma):
    with criterion(5, "full-slope set vs coverage oracle (golden and quarter)"):
        analysis = analyze(golden_pair)
        assert analysis.J == Interval(gs(-4, 3), rat(1))  # [3g - 4, 1]

        assert is_full(golden_pair, rat(1)).full
        unit = generate_ifs(golden_pair, rat(1))
        for depth in (1, 4, 8):
            assert coverage_at_depth(unit, depth, class_budget=50_000).covered

        lam = 2 / gamma
        assert not is_full(golden_pair, lam).full
        report = coverage_at_depth(generate_ifs(golden_pair, lam), 1)
        assert report.gaps.parts == (
            Interval(gs(-7, 4), gs(6, -4)),   # H1 = ((-4g-3)/g^6, (-4g-2)/g^6)
            Interval(gs(-3, 2), gs(10, -6)),  # H2 = ((2g+1)/g^6, (2g+2)/g^6)
        )

        q_analysis = analyze(quarter_pair)
        assert list(q_analysis.Lambda) == [
            Interval(rat("1/2"), rat("1/2")),
            Interval(rat(2), rat(2)),
        ]
        for lam_q in (rat("1/2"), rat(2)):
            ifs_q = generate_ifs(quarter_pair, lam_q)
            for depth in (1, 4, 8):
                assert coverage_at_depth(ifs_q, depth, class_budget=50_000).covered
        gap_found = False
        ifs_bad = generate_ifs(quarter_pair, rat("7/10"))
        for depth in range(1, 9):
            if not coverage_at_depth(ifs_bad, depth).covered:
                gap_found = True
                break
        assert gap_found


def test_criterion_6_oracle_equivalence(third_pair, quarter_pair, golden_pair, gamma):
    with criterion(6, "renormalization-orbit vs backward-orbit membership"):
        systems = [
            (third_pair, rat(1)),
            (third_pair, rat(4)),
            (quarter_pair, rat("1/2")),
            (golden_pair, 2 / gamma),
        ]
        rng = random.Random(2024)
        for pair, lam in systems:
            ifs = generate_ifs(pair, lam)
            lo, hi = ifs.hull.lo, ifs.hull.hi
            span = hi - lo
            decided_pairs = 0
            for _ in range(100):
                t = lo + span * rat(Fraction(rng.randint(0, 4096), 4096))
                orbit = membership(t, lam, pair, budget=4_000)
                backward = attractor_membership(ifs, t, budget=4_000)
                if orbit.decided and backward.decided:
                    decided_pairs += 1
                    assert orbit.kind == backward.kind, (
                        f"pair {pair}, lam={lam}, t={t}: "
                        f"{orbit.kind} vs {backward.kind}"
                    )
            assert decided_pairs > 0


def test_criterion_7_recurrent_set(two_fifths_pair):
    with criterion(7, "recurrent set for alpha = beta = 2/5, 200x200 grid"):
        region = build_recurrent_set(two_fifths_pair)
        report = verify_recurrence(region, two_fifths_pair, grid=200)
        assert report.points == 40_000
        assert not report.failures
        assert report.max_steps >= 1


def test_criterion_8_invariance_suite(golden_pair, third_pair, quarter_pair, gamma):
    with criterion(8, "lambda-scaling, duality, and sum-shift identities"):
        # Scaling: dimensions at lam and at (p/q) lam = 2 agree.
        lam = 2 / gamma
        d1 = hausdorff_dimension(generate_ifs(golden_pair, lam))
        d2 = hausdorff_dimension(generate_ifs(golden_pair, rat(2)))
        assert max(d1.hdim_lo, d2.hdim_lo) <= min(d1.hdim_hi, d2.hdim_hi)

        # Duality: swapped pair at 1/lam has the same structure scaled by -lam.
        swapped = middle_pair(golden_pair.second.alpha, golden_pair.first.alpha)
        direct = generate_ifs(golden_pair, lam)
        dual = generate_ifs(swapped, lam.inverse())
        for depth in (1, 2, 3):
            assert union_at_depth(direct, depth) == union_at_depth(
                dual, depth
            ).scale(-lam)

        # Sum shift: exact translated unions through depth 4.
        for pair, lam_s in ((third_pair, rat(1)), (quarter_pair, rat("1/2"))):
            diff = generate_ifs(pair, lam_s)
            total = sum_as_difference(pair, lam_s)
            for depth in range(1, 5):
                assert union_at_depth(total, depth) == union_at_depth(
                    diff, depth
                ).translate(lam_s)
        gdiff = generate_ifs(golden_pair, lam)
        gsum = sum_as_difference(golden_pair, lam)
        for depth in (1, 2, 3):
            assert union_at_depth(gsum, depth) == union_at_depth(
                gdiff, depth
            ).translate(lam)


def test_criterion_9_nonlinear_certificates(third_pair, golden_pair):
    with criterion(9, "three interval certificates with density smoke checks"):
        cases = [
            (
                third_pair,
                CATALOG["neg_square"],
                CATALOG["square"],
                (((1,), (0,)), ((0,), (1,))),
                LinkRange(rat("-51/100"), rat("-49/100")),
            ),
            (
                third_pair,
                CATALOG["sin"],
                CATALOG["neg_cos"],
                (((0,), (1,)), ((0,), (1,))),
                LinkRange(rat("17/50"), rat("9/25")),
            ),
            (
                golden_pair,
                CATALOG["sqrt"],
                CATALOG["sqrt"],
                (((1, 1, 0), (1,)), ((), (1,))),
                LinkRange(rat("978/1000"), rat("979/1000")),
            ),
        ]
        for pair, f, g, base, rng in cases:
            cert = interval_certificate(f, g, pair, base, rng)
            assert cert.verdict == "interval-certified"
            gap, modulus = certificate_smoke_gap(cert, pair, max_pairs=10_000)
            assert gap <= modulus, f"{f.name}-{g.name}: gap {gap} > {modulus}"


def test_criterion_10_measure_zero_counting(golden_pair, gamma):
    with criterion(10, "counting dichotomy at the alignment slope"):
        wide = measure_zero_by_count(middle_pair(rat("1/8"), rat("1/64")))
        assert wide.kind == "measure_zero"
        assert wide.class_count <= 6
        assert wide.lam == rat("8/9")

        golden = measure_zero_by_count(golden_pair)
        assert golden.kind == "inconclusive"
        assert golden.class_count == 21
        assert golden.lam == 2 / gamma
