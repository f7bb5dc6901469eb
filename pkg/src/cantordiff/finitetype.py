"""Finite-type certification, neighbor automaton, spectral radius, dimension.

The automaton's unit is the island: a maximal union of same-scale map images
whose interiors overlap (images that merely touch stay separate).  A state
records the member offsets in units of the member length, translated to start
at 0.  Refining one island applies every map inside each member, dedups the
children exactly, and regroups; the transition matrix counts child islands by
type.  Class counts (distinct depth-n images) are then integer linear
functionals of matrix powers, and the attractor's Hausdorff dimension (equal
to its box dimension for these systems) is log of the spectral radius in base
1/ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Optional

from .cantor import CantorPair, MiddleCantor, middle_pair
from .errors import (
    BudgetExceededError,
    PreconditionError,
    UndecidableError,
)
from .ifs import LineIFS, depth_class_count, generate_ifs
from .intervals import Interval, IntervalSet
from .numerics import ln_enclosure, outward_floats
from .scalars import FieldSpec, Scalar, common_denominator

ZERO = Scalar.rational(0)
ONE = Scalar.rational(1)

DEFAULT_STATE_BUDGET = 10_000
DEFAULT_RADIUS_TOL = Fraction(1, 10**9)
CHARPOLY_MAX_DIM = 12


# -- finite-type certificate -----------------------------------------------------


@dataclass(frozen=True)
class FiniteTypeCertificate:
    kind: str  # "rational-lattice" | "pisot-lattice"
    k: int
    description: str


def is_finite_type(ifs: LineIFS) -> Optional[FiniteTypeCertificate]:
    """Ring certificate for finite type, or None (meaning unknown).

    Rational systems qualify when 1/ratio is an integer and all offsets share
    one denominator k; quadratic-field systems when the field generator is a
    Pisot unit-like integer (integer a, b, conjugate modulus < 1), 1/ratio is
    a power of it, and the offsets lie in (1/k) Z[g].  Unknown systems still
    admit an automaton attempt under a state budget.
    """
    inv = ifs.ratio.inverse()
    fld = ifs.field()
    k = common_denominator([*ifs.offsets, ifs.hull.lo, ifs.hull.hi])
    if fld is None:
        if inv.as_fraction().denominator != 1:
            return None
        return FiniteTypeCertificate(
            "rational-lattice",
            k,
            f"1/ratio = {inv} is an integer; offsets lie in (1/{k})Z",
        )
    if not fld.is_pisot():
        return None
    if inv.u.denominator != 1 or inv.v.denominator != 1:
        return None
    g = fld.generator()
    power = None
    acc = ONE
    for m in range(1, 256):
        acc = acc * g
        if acc == inv:
            power = m
            break
    if power is None:
        return None
    return FiniteTypeCertificate(
        "pisot-lattice",
        k,
        f"1/ratio = g^{power} with g quadratic Pisot; offsets lie in (1/{k})Z[g]",
    )


# -- neighbor automaton ------------------------------------------------------------


@dataclass(frozen=True)
class NeighborState:
    """Island configuration: sorted member offsets in member-length units.

    offsets[0] == 0; the island spans [0, offsets[-1] + 1] at that scale.
    """

    offsets: tuple[Scalar, ...]

    @property
    def member_count(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> Scalar:
        return self.offsets[-1] + ONE


@dataclass(frozen=True)
class IslandInstance:
    state_id: int
    position: Scalar  # absolute left endpoint of the island


class NeighborAutomaton:
    """States, integer transition matrix, and the depth-1 island instances."""

    def __init__(
        self,
        ifs: LineIFS,
        states: list[NeighborState],
        matrix: list[list[int]],
        depth1: list[IslandInstance],
        complete: bool,
    ):
        self.ifs = ifs
        self.states = states
        self.matrix = matrix
        self.depth1 = depth1
        self.complete = complete
        self.state_index = {st: i for i, st in enumerate(states)}
        self.member_counts = [st.member_count for st in states]
        self.start_vector = [0] * len(states)
        for inst in depth1:
            self.start_vector[inst.state_id] += 1
        self._power_cache: list[list[list[int]]] = [
            _identity(len(states)),
            [row[:] for row in matrix],
        ]

    @property
    def state_count(self) -> int:
        return len(self.states)

    def matrix_power(self, n: int) -> list[list[int]]:
        while len(self._power_cache) <= n:
            self._power_cache.append(
                _matmul(self._power_cache[-1], self._power_cache[1])
            )
        return self._power_cache[n]

    def islands_at_depth(self, n: int) -> list[int]:
        """Island counts per state at depth n >= 1."""
        if n < 1:
            raise PreconditionError("depth must be >= 1")
        power = self.matrix_power(n - 1)
        return [
            sum(self.start_vector[i] * power[i][j] for i in range(self.state_count))
            for j in range(self.state_count)
        ]

    def class_count(self, n: int) -> int:
        """Distinct depth-n image classes: members summed over all islands."""
        islands = self.islands_at_depth(n)
        return sum(c * m for c, m in zip(islands, self.member_counts))

    def subtree_class_count(self, state_id: int, extra_depth: int) -> int:
        """Depth-(d+j) classes descending from one island of this type."""
        if extra_depth == 0:
            return self.member_counts[state_id]
        row = self.matrix_power(extra_depth)[state_id]
        return sum(row[j] * self.member_counts[j] for j in range(self.state_count))


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    n = len(A)
    return [
        [sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)
    ]


def _group_islands(
    lefts: list[Scalar],
) -> list[tuple[Scalar, list[Scalar]]]:
    """Group unit-length intervals at the given lefts into islands.

    Input must be sorted.  Interiors overlap when the next left is strictly
    below the previous right; touching intervals open a new island.
    """
    islands: list[tuple[Scalar, list[Scalar]]] = []
    current: list[Scalar] = []
    reach: Scalar | None = None
    for left in lefts:
        if current and left < reach:
            current.append(left)
            if left + ONE > reach:
                reach = left + ONE
        else:
            if current:
                islands.append((current[0], current))
            current = [left]
            reach = left + ONE
    if current:
        islands.append((current[0], current))
    return islands


def refine_state(
    state: NeighborState, digits: tuple[Scalar, ...], inv_ratio: Scalar
) -> list[tuple[NeighborState, Scalar]]:
    """Children islands of one island, as (state, offset-in-child-units).

    digits are the normalized map translations (b_i - hull_lo*(1 - ratio)) /
    hull_width; a member at offset o spawns children at (o + digit) / ratio
    in child-member units.
    """
    children = {(o + d) * inv_ratio for o in state.offsets for d in digits}
    lefts = sorted(children)
    result = []
    for start, members in _group_islands(lefts):
        offsets = tuple(m - start for m in members)
        result.append((NeighborState(offsets), start))
    return result


def _normalized_digits(ifs: LineIFS) -> tuple[Scalar, ...]:
    w = ifs.hull.length
    h0 = ifs.hull.lo
    return tuple((m.offset - h0 * (ONE - ifs.ratio)) / w for m in ifs.maps)


def depth1_islands(ifs: LineIFS) -> list[tuple[NeighborState, Scalar]]:
    """Depth-1 island decomposition of the hull, absolute positions."""
    scale = ifs.ratio * ifs.hull.length
    lefts = sorted(ifs.ratio * ifs.hull.lo + m.offset for m in ifs.maps)
    unit_lefts = [x / scale for x in lefts]
    result = []
    for start, members in _group_islands(unit_lefts):
        state = NeighborState(tuple(m - start for m in members))
        result.append((state, start * scale))
    return result


def build_automaton(
    ifs: LineIFS,
    state_budget: int = DEFAULT_STATE_BUDGET,
    member_cap: int = 4096,
) -> NeighborAutomaton:
    """Close the island refinement into a finite automaton.

    Raises BudgetExceededError with the partial automaton attached when the
    state space does not close within the budget, or when some island's
    member count exceeds member_cap (the signature of percolating overlap
    chains, which never close).  Dimension is then only bounded by depth
    counting, not computed.
    """
    digits = _normalized_digits(ifs)
    inv_ratio = ifs.ratio.inverse()
    index: dict[NeighborState, int] = {}
    states: list[NeighborState] = []
    rows: list[list[int] | None] = []

    def intern(state: NeighborState) -> int:
        sid = index.get(state)
        if sid is None:
            sid = len(states)
            index[state] = sid
            states.append(state)
            rows.append(None)
        return sid

    def over_budget() -> bool:
        return len(states) > state_budget or any(
            st.member_count > member_cap for st in states[-4:]
        )

    depth1 = [
        IslandInstance(intern(state), pos) for state, pos in depth1_islands(ifs)
    ]
    pending = list(range(len(states)))
    while pending:
        if over_budget():
            partial = _assemble(ifs, states, rows, depth1, complete=False)
            raise BudgetExceededError(
                f"automaton budget exceeded ({len(states)} states)", partial=partial
            )
        sid = pending.pop()
        if rows[sid] is not None:
            continue
        counts: dict[int, int] = {}
        for child_state, _pos in refine_state(states[sid], digits, inv_ratio):
            cid = intern(child_state)
            counts[cid] = counts.get(cid, 0) + 1
            if rows[cid] is None and cid not in pending:
                pending.append(cid)
        rows[sid] = counts
    return _assemble(ifs, states, rows, depth1, complete=True)


def _assemble(ifs, states, rows, depth1, complete) -> NeighborAutomaton:
    n = len(states)
    matrix = [[0] * n for _ in range(n)]
    for i, counts in enumerate(rows):
        if counts:
            for j, c in counts.items():
                matrix[i][j] = c
    return NeighborAutomaton(ifs, states, matrix, depth1, complete)


# -- spectral radius ---------------------------------------------------------------


@dataclass(frozen=True)
class RadiusResult:
    lo: Fraction
    hi: Fraction
    char_poly: Optional[tuple[int, ...]]  # monic, highest power first

    @property
    def midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)


def char_poly(matrix: list[list[int]]) -> tuple[int, ...]:
    """Exact characteristic polynomial by the Faddeev-LeVerrier recursion."""
    n = len(matrix)
    M = [[Fraction(x) for x in row] for row in matrix]
    coeffs = [Fraction(1)]
    work = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        work = [
            [sum(M[i][l] * work[l][j] for l in range(n)) for j in range(n)]
            for i in range(n)
        ]
        c = -sum(work[i][i] for i in range(n)) / k
        coeffs.append(c)
        for i in range(n):
            work[i][i] += c
    assert all(c.denominator == 1 for c in coeffs)
    return tuple(int(c) for c in coeffs)


def eval_poly_fraction(coeffs: Iterable[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def eval_poly_scalar(coeffs: Iterable[int], x: Scalar) -> Scalar:
    acc = ZERO
    for c in coeffs:
        acc = acc * x + Scalar.rational(c)
    return acc


def _tarjan_sccs(adj: list[list[int]]) -> list[list[int]]:
    n = len(adj)
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = [1]

    for root in range(n):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                visited[v] = True
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if not visited[w]:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _cw_radius_irreducible(
    matrix: list[list[Fraction]], tol: Fraction, max_iter: int = 500
) -> tuple[Fraction, Fraction]:
    """Collatz-Wielandt bracket for an irreducible nonnegative matrix.

    Iterates on M + I (primitive for irreducible M) and subtracts the shift;
    the min/max ratio sandwich is rigorous at every step and for any positive
    vector, so the iterate may be rounded to keep denominators small.
    """
    n = len(matrix)
    M = [[matrix[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    grid = 1 << 96
    x = [Fraction(1)] * n
    best_lo, best_hi = Fraction(0), None
    for _ in range(max_iter):
        y = [sum(M[i][j] * x[j] for j in range(n)) for i in range(n)]
        ratios = [y[i] / x[i] for i in range(n)]
        lo, hi = min(ratios), max(ratios)
        best_lo = max(best_lo, lo)
        best_hi = hi if best_hi is None else min(best_hi, hi)
        if best_hi - best_lo < tol:
            break
        norm = max(y)
        x = [Fraction(int(yi * grid / norm) + 1, grid) for yi in y]
    return best_lo - 1, best_hi - 1


def spectral_radius(
    matrix: list[list[int]], tol: Fraction = DEFAULT_RADIUS_TOL
) -> RadiusResult:
    """Rigorous enclosure of the Perron root of a nonnegative integer matrix.

    The matrix is condensed into strongly connected components; each
    component's radius comes from the Collatz-Wielandt sandwich, and the
    overall radius is the maximum.  The exact characteristic polynomial is
    attached for dimensions up to 12 and used to tighten the enclosure by
    bisection when possible.
    """
    n = len(matrix)
    if n == 0 or all(all(x == 0 for x in row) for row in matrix):
        return RadiusResult(Fraction(0), Fraction(0), char_poly(matrix) if n <= CHARPOLY_MAX_DIM else None)
    for row in matrix:
        if len(row) != n or any(x < 0 for x in row):
            raise PreconditionError("square nonnegative integer matrix required")
    adj = [[j for j in range(n) if matrix[i][j] > 0] for i in range(n)]
    lo, hi = Fraction(0), Fraction(0)
    for comp in _tarjan_sccs(adj):
        if len(comp) == 1:
            v = comp[0]
            clo = chi = Fraction(matrix[v][v])
        else:
            sub = [[Fraction(matrix[i][j]) for j in comp] for i in comp]
            clo, chi = _cw_radius_irreducible(sub, tol)
        lo = max(lo, clo)
        hi = max(hi, chi)
    cp = char_poly(matrix) if n <= CHARPOLY_MAX_DIM else None
    if cp is not None:
        lo, hi = _tighten_with_poly(cp, lo, hi, tol)
    return RadiusResult(lo, hi, cp)


def _tighten_with_poly(cp, lo, hi, tol) -> tuple[Fraction, Fraction]:
    """Bisect the char poly around the CW bracket when a sign change exists."""
    f_lo = eval_poly_fraction(cp, lo)
    f_hi = eval_poly_fraction(cp, hi)
    if f_lo == 0:
        return lo, lo
    if f_hi == 0:
        return hi, hi
    if (f_lo < 0) == (f_hi < 0):
        return lo, hi
    a, b = lo, hi
    fa = f_lo
    while b - a > tol / 4:
        mid = (a + b) / 2
        fm = eval_poly_fraction(cp, mid)
        if fm == 0:
            return mid, mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return a, b


# -- dimension ---------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionResult:
    spectral_lo: float
    spectral_hi: float
    hdim_lo: float
    hdim_hi: float
    char_poly: Optional[tuple[int, ...]]
    state_count: int
    finite_type: Optional[FiniteTypeCertificate]

    @property
    def hdim(self) -> float:
        return (self.hdim_lo + self.hdim_hi) / 2

    @property
    def box_dim(self) -> float:
        """Box dimension equals Hausdorff dimension for these attractors."""
        return self.hdim


def _log_ratio_enclosure(
    value: tuple[Fraction, Fraction], base: tuple[Fraction, Fraction], bits: int = 160
) -> tuple[Fraction, Fraction]:
    """ln(value)/ln(base) for value >= 1 brackets and base > 1 brackets."""
    vlo = ln_enclosure(value[0], bits)[0]
    vhi = ln_enclosure(value[1], bits)[1]
    blo = ln_enclosure(base[0], bits)[0]
    bhi = ln_enclosure(base[1], bits)[1]
    return vlo / bhi, vhi / blo


def covers_hull(ifs: LineIFS) -> bool:
    """True when the depth-1 images already cover the hull exactly.

    The cover then persists at every depth (the maps reproduce a full hull),
    so the attractor is the hull itself and its dimension is exactly 1.
    """
    union = IntervalSet(m.apply_interval(ifs.hull) for m in ifs.maps)
    return union == IntervalSet([ifs.hull])


def hausdorff_dimension(
    ifs: LineIFS,
    automaton: Optional[NeighborAutomaton] = None,
    tol: Fraction = DEFAULT_RADIUS_TOL,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> DimensionResult:
    """Hausdorff (= box) dimension via the island automaton's Perron root.

    Full covers short-circuit to dimension exactly 1: their single island
    keeps growing and never closes, but no automaton is needed there.
    """
    if automaton is None and covers_hull(ifs):
        inv = ifs.ratio.inverse().float_enclosure(120)
        return DimensionResult(
            inv[0], inv[1], 1.0, 1.0, None, 0, is_finite_type(ifs)
        )
    if automaton is None:
        automaton = build_automaton(ifs, state_budget)
    radius = spectral_radius(automaton.matrix, tol)
    base = ifs.ratio.inverse().rational_enclosure(160)
    rlo = max(radius.lo, Fraction(1))
    rhi = max(radius.hi, Fraction(1))
    dlo, dhi = _log_ratio_enclosure((rlo, rhi), base)
    slo, shi = outward_floats(radius.lo, radius.hi)
    flo, fhi = outward_floats(dlo, dhi)
    return DimensionResult(
        slo, shi, flo, fhi, radius.char_poly, automaton.state_count, is_finite_type(ifs)
    )


# -- depth counting ----------------------------------------------------------------


@dataclass(frozen=True)
class CountingBound:
    n: int
    k_n: int
    bound_lo: float
    bound_hi: float
    method: str  # "enumeration" | "automaton"

    @property
    def bound(self) -> float:
        return (self.bound_lo + self.bound_hi) / 2


def depth_counting_bound(
    ifs: LineIFS,
    n: int,
    enumeration_budget: int = 500_000,
    automaton: Optional[NeighborAutomaton] = None,
) -> CountingBound:
    """k_n (distinct depth-n classes) and the bound log_{(1/ratio)^n} k_n.

    Enumerates with exact dedup while the class count fits the budget, then
    switches to the automaton's integer counting (the two agree exactly; the
    soundness tests pin that).  The bound is a rigorous enclosure.
    """
    try:
        k_n = depth_class_count(ifs, n, enumeration_budget)
        method = "enumeration"
    except BudgetExceededError:
        if automaton is None:
            automaton = build_automaton(ifs)
        if not automaton.complete:
            raise
        k_n = automaton.class_count(n)
        method = "automaton"
    base = ifs.ratio.inverse().rational_enclosure(160)
    lo, hi = _log_ratio_enclosure(
        (Fraction(k_n), Fraction(k_n)),
        (base[0] ** n, base[1] ** n),
    )
    flo, fhi = outward_floats(lo, hi)
    return CountingBound(n, k_n, flo, fhi, method)


# -- Pisot pair classification --------------------------------------------------


@dataclass(frozen=True)
class PisotVerdict:
    kind: str  # "contains_interval" | "measure_zero"
    dimension: DimensionResult
    detail: str


def classify_pisot_pair(
    omega: FieldSpec, n: int, m: int, mu: Scalar, state_budget: int = DEFAULT_STATE_BUDGET
) -> PisotVerdict:
    """Dichotomy for (C_{omega^-n}, C_{omega^-m}) at slope mu in Q[omega].

    Builds the difference system, certifies finite type, and compares the
    automaton's Perron root with 1/ratio exactly through the characteristic
    polynomial: dimension 1 forces nonempty interior (finite-type interior
    theorem), dimension below 1 forces zero Lebesgue measure.
    """
    if not omega.is_pisot():
        raise PreconditionError("omega must be a quadratic Pisot number")
    if mu.sign() == 0:
        raise PreconditionError("mu must be nonzero")
    g = omega.generator()
    pair = middle_pair(g**-n, g**-m)
    ifs = generate_ifs(pair, mu)
    cert = is_finite_type(ifs)
    if cert is None:
        raise PreconditionError("finite-type certificate failed for this system")
    if covers_hull(ifs):
        dim = hausdorff_dimension(ifs)
        return PisotVerdict(
            "contains_interval",
            dim,
            "depth-1 images cover the hull, so the attractor is the full "
            "interval (dimension exactly 1)",
        )
    automaton = build_automaton(ifs, state_budget)
    dim = hausdorff_dimension(ifs, automaton)
    inv = ifs.ratio.inverse()
    if dim.char_poly is not None:
        at_base = eval_poly_scalar(dim.char_poly, inv)
        if at_base.sign() == 0:
            return PisotVerdict(
                "contains_interval",
                dim,
                "1/ratio is a root of the automaton's characteristic polynomial: "
                "dimension 1, hence nonempty interior",
            )
        if dim.hdim_hi < 1:
            return PisotVerdict("measure_zero", dim, "dimension enclosure below 1")
        raise UndecidableError(
            "characteristic polynomial excludes dimension 1 but the enclosure "
            "still straddles it"
        )
    if dim.hdim_hi < 1:
        return PisotVerdict("measure_zero", dim, "dimension enclosure below 1")
    if dim.hdim_lo >= 1:
        return PisotVerdict(
            "contains_interval", dim, "dimension enclosure pinned at 1"
        )
    raise UndecidableError("dimension enclosure straddles 1 after max refinement")


# -- arrangement pieces and windowed class populations ---------------------------


@dataclass(frozen=True)
class ArrangementPiece:
    interval: Interval
    multiplicity: int

    @property
    def length(self) -> Scalar:
        return self.interval.length


def arrangement_pieces(ifs: LineIFS) -> list[ArrangementPiece]:
    """Maximal constant-multiplicity intervals of the depth-1 image union."""
    images = [m.apply_interval(ifs.hull) for m in ifs.maps]
    points = sorted({p for iv in images for p in (iv.lo, iv.hi)})
    pieces: list[ArrangementPiece] = []
    for lo, hi in zip(points, points[1:]):
        mid = (lo + hi) / 2
        mult = sum(1 for iv in images if iv.lo < mid < iv.hi)
        if mult > 0:
            pieces.append(ArrangementPiece(Interval(lo, hi), mult))
    merged: list[ArrangementPiece] = []
    for piece in pieces:
        if (
            merged
            and merged[-1].multiplicity == piece.multiplicity
            and merged[-1].interval.hi == piece.interval.lo
        ):
            merged[-1] = ArrangementPiece(
                Interval(merged[-1].interval.lo, piece.interval.hi), piece.multiplicity
            )
        else:
            merged.append(piece)
    return merged


def piece_fingerprint(ifs: LineIFS, piece: ArrangementPiece) -> tuple[Scalar, int]:
    """(length / ratio, multiplicity): the type key used to collapse pieces."""
    return (piece.length / ifs.ratio, piece.multiplicity)


CountMode = Literal["overlap", "inside"]


def count_classes_in_window(
    automaton: NeighborAutomaton,
    window: Interval,
    n: int,
    mode: CountMode,
) -> int:
    """Number of depth-n classes meeting the window, by lazy island unfolding.

    mode "overlap" counts classes whose image interior meets the window
    interior (the single-cover convention); mode "inside" counts closed
    containment (the double-cover convention).  Islands entirely inside the
    window are charged in one shot through matrix powers; only the at most
    two boundary islands per level are refined further, so deep counts stay
    cheap and exact.
    """
    ifs = automaton.ifs
    digits = _normalized_digits(ifs)
    inv_ratio = ifs.ratio.inverse()
    hull_w = ifs.hull.length
    member_len = [hull_w]
    for _ in range(n):
        member_len.append(member_len[-1] * ifs.ratio)

    total = 0
    work: list[tuple[int, Scalar, int]] = [
        (inst.state_id, inst.position, 1) for inst in automaton.depth1
    ]
    while work:
        sid, pos, depth = work.pop()
        state = automaton.states[sid]
        span_hi = pos + state.span * member_len[depth]
        if span_hi <= window.lo or pos >= window.hi:
            continue  # at most touching: no interior overlap, no containment
        if window.lo <= pos and span_hi <= window.hi:
            total += automaton.subtree_class_count(sid, n - depth)
            continue
        if depth == n:
            ml = member_len[n]
            for o in state.offsets:
                left = pos + o * ml
                right = left + ml
                if mode == "overlap":
                    if left < window.hi and right > window.lo:
                        total += 1
                else:
                    if window.lo <= left and right <= window.hi:
                        total += 1
            continue
        for child_state, child_off in refine_state(state, digits, inv_ratio):
            child_pos = pos + child_off * member_len[depth + 1]
            sid2 = automaton.state_index.get(child_state)
            if sid2 is None:
                raise PreconditionError(
                    "window counting met a state outside the (complete) automaton"
                )
            work.append((sid2, child_pos, depth + 1))
    return total
