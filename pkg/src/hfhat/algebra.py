"""The strands algebra of a pointed matched circle, over F2.

Basic generators are strands diagrams: upward strands in the cut-open
circle together with matched pairs of horizontal strands.  F2-linear
combinations are plain frozensets of generators; addition is symmetric
difference.
"""

from __future__ import annotations

from itertools import combinations

from .pmc import Chord, PointedMatchedCircle, reverse_pmc, reverse_point, reversed_pair_map


class StrandsGenerator:
    """A basic strands diagram.

    moving:      sorted tuple of (start, end) with start < end
    horizontals: sorted tuple of pair indices; each contributes both
                 matched horizontal strands
    """

    __slots__ = ("pmc", "moving", "horizontals", "left_pairs", "right_pairs",
                 "supp", "inv", "weight", "_hash")

    def __init__(self, pmc: PointedMatchedCircle, moving, horizontals):
        moving = tuple(sorted(tuple(m) for m in moving))
        horizontals = tuple(sorted(horizontals))
        self.pmc = pmc
        self.moving = moving
        self.horizontals = horizontals

        starts = [s for s, _ in moving]
        ends = [e for _, e in moving]
        if any(s >= e for s, e in moving):
            raise ValueError(f"strand must move up: {moving}")
        if len(set(starts)) != len(starts) or len(set(ends)) != len(ends):
            raise ValueError(f"duplicate starts or ends in {moving}")
        start_pairs = [pmc.pair_of(s) for s in starts]
        end_pairs = [pmc.pair_of(e) for e in ends]
        if len(set(start_pairs)) != len(start_pairs) or len(set(end_pairs)) != len(end_pairs):
            raise ValueError(f"matched points both used as starts (or ends): {moving}")
        hset = set(horizontals)
        if len(hset) != len(horizontals):
            raise ValueError("duplicate horizontal pair")
        if hset & set(start_pairs) or hset & set(end_pairs):
            raise ValueError("horizontal pair collides with a moving endpoint")

        self.left_pairs = frozenset(start_pairs) | hset
        self.right_pairs = frozenset(end_pairs) | hset
        self.weight = len(moving) + len(horizontals) - pmc.genus

        supp = [0] * max(pmc.n_points - 1, 0)
        for s, e in moving:
            for i in range(s, e):
                supp[i - 1] += 1
        self.supp = tuple(supp)

        h_points = [p for h in horizontals for p in pmc.pairs[h]]
        inv = 0
        for (s1, e1), (s2, e2) in combinations(moving, 2):
            if (s1 < s2) != (e1 < e2):
                inv += 1
        for s, e in moving:
            inv += sum(1 for p in h_points if s < p < e)
        self.inv = inv
        self._hash = hash((pmc, moving, horizontals))

    @property
    def is_idempotent(self) -> bool:
        return not self.moving

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StrandsGenerator)
            and self._hash == other._hash
            and self.moving == other.moving
            and self.horizontals == other.horizontals
            and self.pmc == other.pmc
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        segs = [f"{s}->{e}" for s, e in self.moving]
        segs += [f"h{h}" for h in self.horizontals]
        return "Strands(" + ",".join(segs) + ")"

    def sort_key(self):
        return (self.moving, self.horizontals)

    def to_json(self) -> dict:
        return {"moving": [list(m) for m in self.moving],
                "horizontals": list(self.horizontals)}

    def ascii(self) -> str:
        """Crude strand picture, one row per point, bottom row = point 1."""
        rows = []
        for p in range(self.pmc.n_points, 0, -1):
            mark = "."
            for s, e in self.moving:
                if s == p:
                    mark = "/"
                elif e == p:
                    mark = "\\"
            if self.pmc.pair_of(p) in self.horizontals:
                mark = "-"
            rows.append(f"{p:3d} {mark}")
        return "\n".join(rows)


ZERO: frozenset = frozenset()


def idempotent(pmc: PointedMatchedCircle, pairs) -> StrandsGenerator:
    return StrandsGenerator(pmc, (), tuple(sorted(pairs)))


_mul_cache: dict = {}
_diff_cache: dict = {}


def multiply_basic(a: StrandsGenerator, b: StrandsGenerator) -> StrandsGenerator | None:
    """Product of basic generators: concatenate, drop half-horizontals,
    straighten; None when one of the five vanishing rules applies."""
    if a.pmc != b.pmc:
        raise ValueError("cannot multiply generators over different circles")
    key = (a, b)
    if key in _mul_cache:
        return _mul_cache[key]
    result = _multiply_basic_uncached(a, b)
    _mul_cache[key] = result
    return result


def _strand_list(g: StrandsGenerator):
    strands = list(g.moving)
    for h in g.horizontals:
        for p in g.pmc.pairs[h]:
            strands.append((p, p))
    return strands


def _multiply_basic_uncached(a, b):
    pmc = a.pmc
    b_by_start = {s: (s, e) for s, e in _strand_list(b)}
    consumed = set()
    composite = []
    dropped_a: dict[int, int] = {}
    for s, e in _strand_list(a):
        nxt = b_by_start.get(e)
        if nxt is None:
            if s != e:
                return None
            dropped_a[pmc.pair_of(s)] = dropped_a.get(pmc.pair_of(s), 0) + 1
            continue
        consumed.add(e)
        composite.append((s, e, nxt[1]))
    if any(count == 2 for count in dropped_a.values()):
        return None
    dropped_b: dict[int, int] = {}
    for s, e in _strand_list(b):
        if s in consumed:
            continue
        if s != e:
            return None
        dropped_b[pmc.pair_of(s)] = dropped_b.get(pmc.pair_of(s), 0) + 1
    if any(count == 2 for count in dropped_b.values()):
        return None

    for (s1, m1, e1), (s2, m2, e2) in combinations(composite, 2):
        cross_lower = (s1 < s2) != (m1 < m2)
        cross_upper = (m1 < m2) != (e1 < e2)
        if cross_lower and cross_upper:
            return None

    moving = [(s, e) for s, _, e in composite if s != e]
    flat = sorted(s for s, _, e in composite if s == e)
    horizontals = []
    for p in flat:
        h = pmc.pair_of(p)
        if h not in horizontals:
            horizontals.append(h)
    return StrandsGenerator(pmc, moving, horizontals)


def multiply(x: frozenset, y: frozenset) -> frozenset:
    out: set = set()
    for a in x:
        for b in y:
            c = multiply_basic(a, b)
            if c is not None:
                out ^= {c}
    return frozenset(out)


def _inv_of_strands(strands) -> int:
    """Crossing count of a list of (start, end) strands, straightened."""
    inv = 0
    for (s1, e1), (s2, e2) in combinations(strands, 2):
        if (s1 < s2) != (e1 < e2):
            inv += 1
    return inv


def differential_basic(a: StrandsGenerator) -> frozenset:
    """Sum of upward resolutions at crossings; double crossings die.

    The double-crossing test runs on the resolved diagram before any
    mate-less horizontal is dropped, so crossings with the doomed
    horizontal still count against the resolution.
    """
    if a in _diff_cache:
        return _diff_cache[a]
    pmc = a.pmc
    out: set = set()
    moving = list(a.moving)
    h_strands = [(p, p) for h in a.horizontals for p in pmc.pairs[h]]
    for i, j in combinations(range(len(moving)), 2):
        s1, e1 = moving[i]
        s2, e2 = moving[j]
        if (s1 < s2) == (e1 < e2):
            continue
        if s2 < s1:
            (s1, e1), (s2, e2) = (s2, e2), (s1, e1)
        new_moving = [m for k, m in enumerate(moving) if k not in (i, j)]
        new_moving += [(s1, e2), (s2, e1)]
        if _inv_of_strands(new_moving + h_strands) == a.inv - 1:
            out ^= {StrandsGenerator(pmc, new_moving, a.horizontals)}
    for i, (s, e) in enumerate(moving):
        for h in a.horizontals:
            for p in pmc.pairs[h]:
                if not s < p < e:
                    continue
                new_moving = [m for k, m in enumerate(moving) if k != i]
                new_moving += [(s, p), (p, e)]
                ghost = [(q, q) for hh in a.horizontals for q in pmc.pairs[hh] if q != p]
                if _inv_of_strands(new_moving + ghost) != a.inv - 1:
                    continue
                new_h = [x for x in a.horizontals if x != h]
                out ^= {StrandsGenerator(pmc, new_moving, new_h)}
    result = frozenset(out)
    _diff_cache[a] = result
    return result


def differential(x: frozenset) -> frozenset:
    out: set = set()
    for a in x:
        out ^= differential_basic(a)
    return frozenset(out)


def basis(pmc: PointedMatchedCircle, weight: int) -> list[StrandsGenerator]:
    """All basic generators of the given weight, lexicographically ordered."""
    if abs(weight) > pmc.genus:
        return []
    return [g for g in full_basis(pmc) if g.weight == weight]


_basis_cache: dict = {}


def full_basis(pmc: PointedMatchedCircle) -> list[StrandsGenerator]:
    """All basic generators of every weight."""
    if pmc in _basis_cache:
        return _basis_cache[pmc]
    points = range(1, pmc.n_points + 1)
    out = []
    for num_moving in range(pmc.n_pairs + 1):
        for starts in combinations(points, num_moving):
            if len({pmc.pair_of(s) for s in starts}) != num_moving:
                continue
            for moving in _assignments(pmc, starts):
                used = {pmc.pair_of(p) for m in moving for p in m}
                free = [h for h in range(pmc.n_pairs) if h not in used]
                for size in range(len(free) + 1):
                    for hs in combinations(free, size):
                        out.append(StrandsGenerator(pmc, moving, hs))
    out.sort(key=StrandsGenerator.sort_key)
    _basis_cache[pmc] = out
    return out


def _assignments(pmc, starts, chosen=()):
    if not starts:
        yield chosen
        return
    s = starts[0]
    taken_ends = {e for _, e in chosen}
    taken_pairs = {pmc.pair_of(e) for _, e in chosen}
    for e in range(s + 1, pmc.n_points + 1):
        if e in taken_ends or pmc.pair_of(e) in taken_pairs:
            continue
        yield from _assignments(pmc, starts[1:], chosen + ((s, e),))


def all_idempotents(pmc: PointedMatchedCircle) -> list[StrandsGenerator]:
    out = []
    for size in range(pmc.n_pairs + 1):
        for pairs in combinations(range(pmc.n_pairs), size):
            out.append(idempotent(pmc, pairs))
    return out


def chord_element(pmc: PointedMatchedCircle, chord: Chord, weight: int | None = None) -> frozenset:
    """Sum of all horizontal completions of the single moving strand."""
    return chordset_element(pmc, [chord], weight)


def chordset_element(pmc: PointedMatchedCircle, chords, weight: int | None = None) -> frozenset:
    """Sum over all valid horizontal completions of several moving strands.

    The empty chord set gives the sum of all idempotents (restricted to one
    weight if requested).
    """
    chords = list(chords)
    moving = tuple((c.start, c.end) for c in chords)
    try:
        StrandsGenerator(pmc, moving, ())
    except ValueError:
        return ZERO
    used = {pmc.pair_of(p) for m in moving for p in m}
    free = [h for h in range(pmc.n_pairs) if h not in used]
    out = set()
    for size in range(len(free) + 1):
        if weight is not None and len(moving) + size - pmc.genus != weight:
            continue
        for hs in combinations(free, size):
            out.add(StrandsGenerator(pmc, moving, hs))
    return frozenset(out)


def supp(a: StrandsGenerator) -> tuple[int, ...]:
    return a.supp


def opposite_basic(a: StrandsGenerator) -> StrandsGenerator:
    """Transport a generator to the reversed circle; anti-homomorphism."""
    pmc = a.pmc
    rev = reverse_pmc(pmc)
    pair_map = reversed_pair_map(pmc)
    moving = [(reverse_point(pmc, e), reverse_point(pmc, s)) for s, e in a.moving]
    horizontals = [pair_map[h] for h in a.horizontals]
    return StrandsGenerator(rev, moving, horizontals)


def opposite(x: frozenset) -> frozenset:
    return frozenset(opposite_basic(a) for a in x)


def truncate_element(x: frozenset) -> frozenset:
    """Quotient by the differential ideal of local multiplicity >= 2."""
    return frozenset(a for a in x if all(m <= 1 for m in a.supp))


def summand_restriction(
    a: StrandsGenerator,
    keep_points: int,
    sum_pmc: PointedMatchedCircle,
    part_pmc: PointedMatchedCircle,
    base_pairs: frozenset,
) -> StrandsGenerator | None:
    """One basic-generator step of the quotient map A(Z#Z0) -> A(Z).

    keep_points is the number of points of the first summand Z; the
    generator dies unless its support stays inside Z and its horizontals on
    Z0 are exactly base_pairs (which are stripped).
    """
    if any(s > keep_points or e > keep_points for s, e in a.moving):
        return None
    inner, outer = [], []
    for h in a.horizontals:
        (p, _q) = sum_pmc.pairs[h]
        (inner if p <= keep_points else outer).append(h)
    if frozenset(outer) != base_pairs:
        return None
    pair_map = {}
    for h in inner:
        p, q = sum_pmc.pairs[h]
        pair_map[h] = part_pmc.pair_of(p)
    return StrandsGenerator(part_pmc, a.moving, sorted(pair_map[h] for h in inner))


def quotient_map(
    x: frozenset,
    keep_points: int,
    sum_pmc: PointedMatchedCircle,
    part_pmc: PointedMatchedCircle,
    base_pairs,
) -> frozenset:
    base = frozenset(base_pairs)
    out: set = set()
    for a in x:
        b = summand_restriction(a, keep_points, sum_pmc, part_pmc, base)
        if b is not None:
            out ^= {b}
    return frozenset(out)
