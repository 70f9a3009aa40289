"""Identity and arc-slide bimodules.

Both are type D structures over a pair of strands algebras, one for each
boundary circle, with the second circle orientation-reversed.  The
identity bimodule's differential is the sum of all matched chord pairs;
an arc-slide bimodule's differential is assembled from near-chords, with
the over-slide ambiguities fixed by a basic choice and the structural
equation.
"""

from __future__ import annotations

from itertools import combinations

from . import algebra as alg
from .algebra import StrandsGenerator
from .homalg import AlgebraFactor, StructureError, TypeDStructure
from .pmc import (
    ArcSlide,
    Chord,
    PointedMatchedCircle,
    all_chords,
    restricted_chords,
    reverse_pmc,
    reverse_point,
    reversed_pair_map,
)

# ---------------------------------------------------------------------------
# The identity bimodule


def complementary_idempotent_pairs(pmc: PointedMatchedCircle):
    """(left pair set, right pair set on the reversed circle) for all splits."""
    rpm = reversed_pair_map(pmc)
    out = []
    for size in range(pmc.n_pairs + 1):
        for left in combinations(range(pmc.n_pairs), size):
            right = frozenset(rpm[p] for p in range(pmc.n_pairs) if p not in left)
            out.append((frozenset(left), right))
    return out


def dd_identity(pmc: PointedMatchedCircle, truncated: bool = False,
                weight: int | None = None) -> TypeDStructure:
    """The identity bimodule: complementary idempotent pairs, with one
    differential term for every chord and every horizontal completion."""
    rev = reverse_pmc(pmc)
    rpm = reversed_pair_map(pmc)
    out = TypeDStructure(
        (AlgebraFactor(pmc, truncated), AlgebraFactor(rev, truncated)),
        name=f"DDid(g={pmc.genus})",
    )
    for left, right in complementary_idempotent_pairs(pmc):
        if weight is not None and len(left) - pmc.genus != weight:
            continue
        out.add_generator(tuple(sorted(left)), (left, right))

    gen_keys = {tuple(sorted(idm[0])) for g in out.generators for idm in [out.idem[g]]}
    for chord in all_chords(pmc):
        for aL, aR in matched_chord_terms(pmc, rev, rpm, chord):
            src = tuple(sorted(aL.left_pairs))
            tgt = tuple(sorted(aL.right_pairs))
            if src in gen_keys and tgt in gen_keys:
                if truncated and (any(m > 1 for m in aL.supp) or any(m > 1 for m in aR.supp)):
                    continue
                out.add_arrow(src, tgt, (aL, aR))
    out.propagate_gradings()
    return out


def matched_chord_terms(pmc, rev, rpm, chord: Chord):
    """Basic pairs (a, a_o) pairing a chord completion on the circle with
    the matching completion on the reverse, complementary at both ends."""
    s, t = chord.start, chord.end
    ps, pt = pmc.pair_of(s), pmc.pair_of(t)
    if ps == pt:
        return
    free = [h for h in range(pmc.n_pairs) if h not in (ps, pt)]
    ro_s, ro_t = reverse_point(pmc, t), reverse_point(pmc, s)
    for size in range(len(free) + 1):
        for hs in combinations(free, size):
            aL = StrandsGenerator(pmc, [(s, t)], hs)
            comp = [p for p in range(pmc.n_pairs) if p not in aL.left_pairs]
            horiz_o = [rpm[p] for p in comp if p != pt]
            aR = StrandsGenerator(rev, [(ro_s, ro_t)], horiz_o)
            yield aL, aR


# ---------------------------------------------------------------------------
# Arc-slide combinatorics: transports, restricted supports, idempotent types


class SlideContext:
    """Precomputed bookkeeping for one arc-slide."""

    def __init__(self, slide: ArcSlide):
        self.slide = slide
        src = slide.source
        tgt = slide.target
        self.src = src
        self.tgt = tgt
        self.rev_tgt = reverse_pmc(tgt)
        self.rpm_tgt = reversed_pair_map(tgt)  # pairs of Z' -> pairs of -Z'
        self.n = src.n_points
        self.sigma = Chord(min(slide.b1, slide.c1), max(slide.b1, slide.c1))
        c2p = slide.point_map[slide.c2]
        self.sigma_p = Chord(min(slide.b1_new, c2p), max(slide.b1_new, c2p))
        self.c2_target = c2p
        self.c_span = Chord(min(slide.c1, slide.c2), max(slide.c1, slide.c2))
        lo = min(slide.point_map[slide.c1], c2p)
        hi = max(slide.point_map[slide.c1], c2p)
        self.c_span_target = Chord(lo, hi)
        # pair translation: pairs of -Z' back to pairs of Z
        self.pair_from_rev = {}
        for p in range(tgt.n_pairs):
            self.pair_from_rev[self.rpm_tgt[p]] = slide.pair_map.index(p)
        # common-gap layout for restricted supports
        self.src_gap = self._gap_map(self.n, slide.b1, self.sigma)
        self.tgt_gap = self._gap_map(self.n, slide.b1_new, self.sigma_p)

    @staticmethod
    def _gap_map(n: int, removed: int, sigma: Chord):
        """interval index (1-based) -> common-gap index, with the sliding
        interval mapped to None (it is dropped from restricted supports)."""
        points = [p for p in range(1, n + 1) if p != removed]
        out = {}
        for i in range(1, n):
            if i == sigma.start:
                out[i] = None
            else:
                below = sum(1 for p in points if p <= i)
                out[i] = below - 1
        return out

    # -- point/chord transport --------------------------------------------

    def point(self, p: int, fat: bool = False) -> int:
        if p == self.slide.b1:
            if not fat:
                raise KeyError("the sliding foot has no target point")
            return self.slide.b1_new
        return self.slide.point_map[p]

    def point_back(self, q: int, fat: bool = False) -> int:
        if q == self.slide.b1_new:
            if not fat:
                raise KeyError("the new foot has no source point")
            return self.slide.b1
        for p, v in self.slide.point_map.items():
            if v == q:
                return p
        raise KeyError(q)

    def chord(self, c: Chord, fat: bool = False) -> Chord:
        a, b = self.point(c.start, fat), self.point(c.end, fat)
        return Chord(min(a, b), max(a, b))

    def chord_back(self, c: Chord, fat: bool = False) -> Chord:
        a, b = self.point_back(c.start, fat), self.point_back(c.end, fat)
        return Chord(min(a, b), max(a, b))

    # -- restricted supports ------------------------------------------------

    def restricted_left(self, a: StrandsGenerator) -> tuple[int, ...]:
        out = [0] * (self.n - 2)
        for i, mult in enumerate(a.supp, start=1):
            g = self.src_gap[i]
            if g is not None and mult:
                out[g] += mult
        return tuple(out)

    def restricted_right(self, a_o: StrandsGenerator) -> tuple[int, ...]:
        supp_t = tuple(reversed(a_o.supp))  # back to target-circle coordinates
        out = [0] * (self.n - 2)
        for i, mult in enumerate(supp_t, start=1):
            g = self.tgt_gap[i]
            if g is not None and mult:
                out[g] += mult
        return tuple(out)

    # -- idempotent types ---------------------------------------------------

    def translate_right_idem(self, pairs_rev: frozenset) -> frozenset:
        return frozenset(self.pair_from_rev[p] for p in pairs_rev)

    def idem_type(self, left: frozenset, right_rev: frozenset) -> str | None:
        """'CX', 'XC', or 'Y'; None when not near-complementary."""
        right = self.translate_right_idem(right_rev)
        every = frozenset(range(self.src.n_pairs))
        b, c = self.slide.b_pair, self.slide.c_pair
        if left & right == frozenset() and left | right == every:
            return "CX" if c in left else "XC"
        if left & right == frozenset({c}) and left | right == every - {b}:
            return "Y"
        return None


# ---------------------------------------------------------------------------
# Near-chord enumeration


class NearChord:
    """A basic differential candidate for an arc-slide bimodule."""

    __slots__ = ("left", "right", "kind", "indeterminate")

    def __init__(self, left: StrandsGenerator, right: StrandsGenerator,
                 kind: str, indeterminate: bool):
        self.left = left
        self.right = right
        self.kind = kind
        self.indeterminate = indeterminate

    def key(self):
        return (self.left, self.right)

    def __repr__(self) -> str:
        flag = "?" if self.indeterminate else ""
        return f"NearChord[{self.kind}{flag}]({self.left},{self.right})"


def _pieces(chord: Chord, cut: Chord) -> list[Chord]:
    """Components of the chord with the cut interval removed; cut inside."""
    out = []
    if chord.start < cut.start:
        out.append(Chord(chord.start, cut.start))
    if cut.end < chord.end:
        out.append(Chord(cut.end, chord.end))
    return out


def _join_interval(chord: Chord, s: Chord) -> list[tuple[int, int]] | None:
    """Moving set carrying the chord's support plus one copy of s.

    Adjacent intervals concatenate; disjoint ones stay separate strands; a
    strictly interior s doubles up as a nested strand of its own.
    """
    if chord.end == s.start:
        return [(chord.start, s.end)]
    if s.end == chord.start:
        return [(s.start, chord.end)]
    if chord.end < s.start or s.end < chord.start:
        return [(chord.start, chord.end), (s.start, s.end)]
    if chord.start <= s.start and s.end <= chord.end:
        if chord.start == s.start or chord.end == s.end:
            return None  # shared endpoint: no valid strand pair
        return [(chord.start, chord.end), (s.start, s.end)]
    return None


def _sigma_join(ctx: SlideContext, chord: Chord) -> list[tuple[int, int]] | None:
    return _join_interval(chord, ctx.sigma)


def _sigma_join_target(ctx: SlideContext, chord: Chord) -> list[tuple[int, int]] | None:
    return _join_interval(chord, ctx.sigma_p)


def _moving_configs(ctx: SlideContext):
    """(kind, source moving set, target moving set) for every near-chord
    shape; target chords are in target-circle coordinates."""
    slide = ctx.slide
    sigma, sigma_p = ctx.sigma, ctx.sigma_p
    over = slide.kind == "over"
    configs: list[tuple[str, list, list]] = []

    # type 1: a restricted chord on both sides
    for xi in restricted_chords(slide):
        configs.append(("1", [xi], [ctx.chord(xi)]))

    # type 2: the sliding interval alone, on either side
    configs.append(("2", [sigma], []))
    configs.append(("2", [], [sigma_p]))

    # type 3: sigma glued onto a chord touching it at the C-foot
    for xi in all_chords(ctx.src):
        if slide.b1 in (xi.start, xi.end):
            continue
        if xi.end == sigma.start or xi.start == sigma.end:
            if slide.c1 in (xi.start, xi.end):
                configs.append(("3", _sigma_join(ctx, xi), [ctx.chord(xi)]))
    for xi_t in all_chords(ctx.tgt):
        if slide.b1_new in (xi_t.start, xi_t.end):
            continue
        if xi_t.end == sigma_p.start or xi_t.start == sigma_p.end:
            if ctx.c2_target in (xi_t.start, xi_t.end):
                configs.append(("3", [ctx.chord_back(xi_t)], _sigma_join_target(ctx, xi_t)))

    # type 4: a chord containing sigma, minus sigma on one side
    for xi in all_chords(ctx.src):
        if xi.start <= sigma.start and sigma.end <= xi.end and xi != sigma:
            pieces = _pieces(xi, sigma)
            configs.append(("4", pieces, [ctx.chord(xi, fat=True)]))
    for xi_t in all_chords(ctx.tgt):
        if xi_t.start <= sigma_p.start and sigma_p.end <= xi_t.end and xi_t != sigma_p:
            pieces = _pieces(xi_t, sigma_p)
            configs.append(("4", [ctx.chord_back(xi_t, fat=True)], pieces))

    # type 5: two chords, one ending on each foot of C, opposite signs
    c1, c2, b1, b2 = slide.c1, slide.c2, slide.b1, slide.b2
    for xi in restricted_chords(slide):
        if c1 not in (xi.start, xi.end) or b2 in (xi.start, xi.end):
            continue
        sign_c1 = 1 if xi.end == c1 else -1
        for eta in all_chords(ctx.src):
            if b1 in (eta.start, eta.end):
                continue
            if c2 not in (eta.start, eta.end):
                continue
            sign_c2 = 1 if eta.end == c2 else -1
            if sign_c1 == sign_c2:
                continue
            if {xi.start, xi.end} & {eta.start, eta.end}:
                continue
            disjoint = xi.end < eta.start or eta.end < xi.start
            nested = (xi.start < eta.start and eta.end < xi.end) or (
                eta.start < xi.start and xi.end < eta.end
            )
            if over and not (disjoint or nested):
                continue
            # the chord at c1 must approach it away from the sliding interval
            if xi.start <= sigma.start and sigma.end <= xi.end:
                continue
            configs.append(("5", [xi, eta], [ctx.chord(xi), ctx.chord(eta)]))

    # type 6: sigma glued on one side, sigma' removed from the other
    for xi in restricted_chords(slide):
        xt = ctx.chord(xi)
        if not (xt.start <= sigma_p.start and sigma_p.end <= xt.end):
            continue
        if xt.start < sigma_p.start and sigma_p.end < xt.end:
            continue  # sigma' interior: not this type
        if over and not (xi.end <= sigma.start or sigma.end <= xi.start):
            continue
        join = _sigma_join(ctx, xi)
        if join is None:
            continue
        configs.append(("6", join, _pieces(xt, sigma_p)))
    for xi_t in all_chords(ctx.tgt):
        if slide.b1_new in (xi_t.start, xi_t.end):
            continue
        if ctx.tgt.pair_of(xi_t.start) == ctx.tgt.pair_of(xi_t.end):
            continue
        try:
            xs = ctx.chord_back(xi_t)
        except KeyError:
            continue
        if not (xs.start <= sigma.start and sigma.end <= xs.end):
            continue
        if xs.start < sigma.start and sigma.end < xs.end:
            continue
        if over and not (xi_t.end <= sigma_p.start or sigma_p.end <= xi_t.start):
            continue
        join = _sigma_join_target(ctx, xi_t)
        if join is None:
            continue
        configs.append(("6", _pieces(xs, sigma), join))

    if over:
        span, span_t = ctx.c_span, ctx.c_span_target
        # type 7: the C-span on both sides, broken once on one side
        for w in range(span.start + 1, span.end):
            configs.append(("7", [Chord(span.start, w), Chord(w, span.end)], [span_t]))
        for w in range(span_t.start + 1, span_t.end):
            configs.append(("7", [span], [Chord(span_t.start, w), Chord(w, span_t.end)]))
        # type 8: the C-span plus a disjoint or strictly nested restricted chord
        for xi in restricted_chords(slide):
            if {xi.start, xi.end} & {span.start, span.end}:
                continue
            disjoint = xi.end < span.start or span.end < xi.start
            nested = span.start < xi.start and xi.end < span.end
            around = xi.start < span.start and span.end < xi.end
            if not (disjoint or nested or around):
                continue
            configs.append(("8", [span, xi], [span_t, ctx.chord(xi)]))

    return configs


def _complete(ctx: SlideContext, kind: str, src_chords, tgt_chords):
    """All horizontal completions with near-complementary ends."""
    src, rev = ctx.src, ctx.rev_tgt
    moving_l = [(c.start, c.end) if isinstance(c, Chord) else c for c in src_chords]
    moving_r = [
        (reverse_point(ctx.tgt, c.end if isinstance(c, Chord) else c[1]),
         reverse_point(ctx.tgt, c.start if isinstance(c, Chord) else c[0]))
        for c in tgt_chords
    ]
    try:
        bare_l = StrandsGenerator(src, moving_l, ())
        bare_r = StrandsGenerator(rev, moving_r, ())
    except ValueError:
        return
    if ctx.restricted_left(bare_l) != ctx.restricted_right(bare_r):
        return
    free_l = [h for h in range(src.n_pairs)
              if h not in bare_l.left_pairs and h not in bare_l.right_pairs]
    free_r = [h for h in range(rev.n_pairs)
              if h not in bare_r.left_pairs and h not in bare_r.right_pairs]
    for size_l in range(len(free_l) + 1):
        for hl in combinations(free_l, size_l):
            aL = StrandsGenerator(src, moving_l, hl)
            for size_r in range(len(free_r) + 1):
                for hr in combinations(free_r, size_r):
                    aR = StrandsGenerator(rev, moving_r, hr)
                    if ctx.idem_type(aL.left_pairs, aR.left_pairs) is None:
                        continue
                    if ctx.idem_type(aL.right_pairs, aR.right_pairs) is None:
                        continue
                    yield aL, aR


def _is_indeterminate(ctx: SlideContext, kind: str, aL, aR) -> bool:
    if ctx.slide.kind == "under":
        return False
    if kind in ("7", "8"):
        return True
    span = ctx.c_span
    span_gaps = {ctx.src_gap[i] for i in range(span.start, span.end)}
    span_gaps.discard(None)
    rl = ctx.restricted_left(aL)
    covered = {g for g, m in enumerate(rl) if m}
    if kind == "3":
        return covered == span_gaps
    if kind == "4":
        if not span_gaps <= covered:
            return False
        jumps = _support_jump_points(ctx, rl)
        return ctx.slide.c1 in jumps or ctx.slide.c2 in jumps
    return False


def _support_jump_points(ctx: SlideContext, restricted):
    """Source points where the restricted support multiplicity jumps."""
    points = [p for p in range(1, ctx.n + 1) if p != ctx.slide.b1]
    jumps = set()
    for k, p in enumerate(points):
        below = restricted[k - 1] if k > 0 else 0
        above = restricted[k] if k < len(restricted) else 0
        if below != above:
            jumps.add(p)
    return jumps


def enumerate_near_chords(slide: ArcSlide) -> list[NearChord]:
    """The syntactic near-chord list for the slide, deduplicated, each
    flagged determinate or indeterminate."""
    ctx = SlideContext(slide)
    seen: dict = {}
    for kind, src_chords, tgt_chords in _moving_configs(ctx):
        if src_chords is None or tgt_chords is None:
            continue
        for aL, aR in _complete(ctx, kind, src_chords, tgt_chords):
            key = (aL, aR)
            if key in seen:
                continue
            seen[key] = NearChord(aL, aR, kind, _is_indeterminate(ctx, kind, aL, aR))
    return sorted(seen.values(), key=lambda nc: (nc.left.sort_key(), nc.right.sort_key()))


def dischords(slide: ArcSlide) -> list[tuple[StrandsGenerator, StrandsGenerator]]:
    """Elements with the C-span on both sides and one strand per side."""
    ctx = SlideContext(slide)
    out = []
    for aL, aR in _complete(ctx, "D", [ctx.c_span], [ctx.c_span_target]):
        out.append((aL, aR))
    return out


# ---------------------------------------------------------------------------
# The near-diagonal scan and grading (test oracles live here too)


def near_diagonal_pairs(slide: ArcSlide):
    """All basic pairs with equal restricted supports and near-complementary
    idempotents at both ends."""
    ctx = SlideContext(slide)
    by_supp: dict = {}
    for aR in alg.full_basis(ctx.rev_tgt):
        by_supp.setdefault(ctx.restricted_right(aR), []).append(aR)
    for aL in alg.full_basis(ctx.src):
        for aR in by_supp.get(ctx.restricted_left(aL), ()):  # matching supports
            if ctx.idem_type(aL.left_pairs, aR.left_pairs) is None:
                continue
            if ctx.idem_type(aL.right_pairs, aR.right_pairs) is None:
                continue
            yield aL, aR


def near_diagonal_grading(slide: ArcSlide, aL: StrandsGenerator, aR: StrandsGenerator):
    """The integer grading of a near-diagonal basic pair.

    Computed as the Maslov components plus idempotent-dependent correction
    terms in the six regions around the sliding interval; the c1-below-c2
    configurations are handled by reflecting everything first.
    """
    from .grading import iota2

    if slide.c1 < slide.c2:
        refl = ArcSlide(
            reverse_pmc(slide.source),
            reverse_point(slide.source, slide.b1),
            reverse_point(slide.source, slide.c1),
        )
        return near_diagonal_grading(refl, alg.opposite_basic(aL), _reflect_right(slide, refl, aR))

    ctx = SlideContext(slide)
    supp_l = aL.supp
    supp_r = tuple(reversed(aR.supp))  # target-circle coordinates

    def mult(supp, idx):
        return supp[idx - 1] if 1 <= idx <= len(supp) else 0

    b1, c1 = slide.b1, slide.c1
    b1p, c2p = slide.b1_new, ctx.c2_target
    if slide.kind == "under":  # b1 = c1 - 1, b1' = c2' + 1
        n_sp, n_s, n_sm = mult(supp_l, c1), mult(supp_l, b1), mult(supp_l, b1 - 1)
        n_tp, n_t, n_tm = mult(supp_r, b1p), mult(supp_r, c2p), mult(supp_r, c2p - 1)
    else:  # over: b1 = c1 + 1, b1' = c2' - 1
        n_sp, n_s, n_sm = mult(supp_l, b1), mult(supp_l, c1), mult(supp_l, c1 - 1)
        n_tp, n_t, n_tm = mult(supp_r, c2p), mult(supp_r, b1p), mult(supp_r, b1p - 1)

    def correction4(ty: str) -> int:
        if slide.kind == "under":
            table = {
                "CX": n_tp - n_t,
                "XC": -n_s + n_sm,
                "Y": n_sp - n_s - n_t + n_tm,
            }
        else:
            table = {
                "CX": -n_t + n_tm,
                "XC": n_sp - n_s,
                "Y": -n_s + n_sm + n_tp - n_t,
            }
        return table[ty]

    ty_i = ctx.idem_type(aL.left_pairs, aR.left_pairs)
    ty_j = ctx.idem_type(aL.right_pairs, aR.right_pairs)
    if ty_i is None or ty_j is None:
        raise ValueError("not a near-diagonal pair")
    total4 = 2 * (iota2(aL) + iota2(aR)) + correction4(ty_i) + correction4(ty_j)
    if total4 % 4:
        raise ValueError(f"grading not an integer: {total4}/4")
    return total4 // 4


def _reflect_right(slide: ArcSlide, refl: ArcSlide, aR: StrandsGenerator) -> StrandsGenerator:
    """Transport the reversed-target factor through the reflection."""
    # aR lives over -Z'; the reflected slide's right algebra is -(-Z') = Z'.
    return alg.opposite_basic(aR)


def grading_minus_one_scan(slide: ArcSlide):
    """All near-diagonal basic pairs of grading -1 (the near-chord oracle)."""
    out = []
    for aL, aR in near_diagonal_pairs(slide):
        if aL.is_idempotent and aR.is_idempotent:
            continue
        if near_diagonal_grading(slide, aL, aR) == -1:
            out.append((aL, aR))
    return out


# ---------------------------------------------------------------------------
# The arc-slide bimodule


def slide_generators(ctx: SlideContext):
    """All near-complementary idempotent pairs (X and Y types)."""
    src = ctx.src
    every = range(src.n_pairs)
    rpm_inv = {v: k for k, v in ctx.pair_from_rev.items()}
    out = []
    for size in range(src.n_pairs + 1):
        for left in combinations(every, size):
            right = frozenset(p for p in every if p not in left)
            out.append((frozenset(left), frozenset(rpm_inv[p] for p in right)))
    b, c = ctx.slide.b_pair, ctx.slide.c_pair
    rest = [p for p in every if p not in (b, c)]
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            left = frozenset({c, *extra})
            right_src = frozenset({c, *(p for p in rest if p not in extra)})
            out.append((left, frozenset(rpm_inv[p] for p in right_src)))
    return out


_slide_dd_cache: dict = {}


def arcslide_dd(slide: ArcSlide, truncated: bool = False,
                basic_choice_side: str = "source") -> TypeDStructure:
    """The bimodule of an arc-slide over its two boundary algebras.

    Under-slides take every near-chord as a differential term.  For
    over-slides the indeterminate terms are pinned down by a basic choice
    on the sigma-extended candidates and by solving the structural
    equation over F2; the result is verified before returning.
    """
    cache_key = (slide.source, slide.b1, slide.c1, truncated, basic_choice_side)
    if cache_key in _slide_dd_cache:
        return _slide_dd_cache[cache_key]
    out = _arcslide_dd_uncached(slide, truncated, basic_choice_side)
    _slide_dd_cache[cache_key] = out
    return out


def _arcslide_dd_uncached(slide: ArcSlide, truncated: bool,
                          basic_choice_side: str) -> TypeDStructure:
    ctx = SlideContext(slide)
    out = TypeDStructure(
        (AlgebraFactor(slide.source, truncated), AlgebraFactor(ctx.rev_tgt, truncated)),
        name=f"DD(slide {slide.b1} over {slide.c1})",
    )
    for left, right in slide_generators(ctx):
        out.add_generator((tuple(sorted(left)), tuple(sorted(right))), (left, right))

    chords = enumerate_near_chords(slide)
    if truncated:
        chords = [
            nc for nc in chords
            if all(m <= 1 for m in nc.left.supp) and all(m <= 1 for m in nc.right.supp)
        ]

    def add(nc: NearChord):
        src_key = (tuple(sorted(nc.left.left_pairs)), tuple(sorted(nc.right.left_pairs)))
        tgt_key = (tuple(sorted(nc.left.right_pairs)), tuple(sorted(nc.right.right_pairs)))
        out.add_arrow(src_key, tgt_key, (nc.left, nc.right))

    if slide.kind == "under":
        for nc in chords:
            add(nc)
        out.require_d_squared()
        out.propagate_gradings()
        if out.gradings.has_pure_lambda_relation():
            raise StructureError("under-slide grading set is not lambda-free")
        return out

    snapshot = out.copy()
    best = None
    for terms in _over_slide_solutions(ctx, out.factors, chords, basic_choice_side):
        trial = snapshot.copy()
        trial.delta = {x: dict(row) for x, row in snapshot.delta.items()}
        for nc in terms:
            src_key = (tuple(sorted(nc.left.left_pairs)), tuple(sorted(nc.right.left_pairs)))
            tgt_key = (tuple(sorted(nc.left.right_pairs)), tuple(sorted(nc.right.right_pairs)))
            trial.add_arrow(src_key, tgt_key, (nc.left, nc.right))
        trial.require_d_squared()
        trial.propagate_gradings()
        # no loop may reduce to a bare lambda power
        if not trial.gradings.has_pure_lambda_relation():
            return trial
        if best is None:
            best = trial
    if best is None:
        raise StructureError("no valid solution of the over-slide equation")
    return best


def _over_slide_solutions(ctx, factors, chords, basic_choice_side):
    """Yield candidate differential term lists for an over-slide.

    The sigma-extended indeterminates are set by the basic choice; the
    rest are unknowns of the structural equation dA + A*A = 0.  The
    equation's solutions form an affine space over F2; they are produced
    in order of how many indeterminate terms they include, since the
    holomorphic differential never uses disconnected domains.
    """
    from .homalg import coef_differential, coef_multiply

    determinate = [nc for nc in chords if not nc.indeterminate]
    indet = [nc for nc in chords if nc.indeterminate]
    base = [(nc.left, nc.right) for nc in determinate]
    chosen3 = []
    for nc in indet:
        if nc.kind == "3":
            covers_sigma = nc.left.supp[ctx.sigma.start - 1] > 0
            if covers_sigma == (basic_choice_side == "source"):
                base.append((nc.left, nc.right))
                chosen3.append(nc)
    unknowns = [nc for nc in indet if nc.kind != "3"]

    def mul(c1, c2):
        if c1[0].right_pairs != c2[0].left_pairs or c1[1].right_pairs != c2[1].left_pairs:
            return None
        return coef_multiply(factors, c1, c2)

    const: dict = {}

    def toggle(acc, term):
        acc[term] = acc.get(term, 0) ^ 1

    for c in base:
        for term in coef_differential(factors, c):
            toggle(const, term)
    for c1 in base:
        for c2 in base:
            p = mul(c1, c2)
            if p is not None:
                toggle(const, p)

    lin: list[dict] = []
    for nc in unknowns:
        x = (nc.left, nc.right)
        row: dict = {}
        for term in coef_differential(factors, x):
            toggle(row, term)
        for c in base:
            for p in (mul(c, x), mul(x, c)):
                if p is not None:
                    toggle(row, p)
        p = mul(x, x)
        if p is not None:
            toggle(row, p)
        lin.append({k: v for k, v in row.items() if v})

    quad: dict = {}
    for i in range(len(unknowns)):
        for j in range(i + 1, len(unknowns)):
            xi = (unknowns[i].left, unknowns[i].right)
            xj = (unknowns[j].left, unknowns[j].right)
            row: dict = {}
            for p in (mul(xi, xj), mul(xj, xi)):
                if p is not None:
                    toggle(row, p)
            row = {k: v for k, v in row.items() if v}
            if row:
                quad[(i, j)] = row

    coupled = sorted({i for pair in quad for i in pair})
    if len(coupled) > 20:
        raise StructureError("over-slide equation has too many coupled unknowns")

    solutions = []
    for mask in range(1 << len(coupled)):
        forced = {idx: bool(mask >> k & 1) for k, idx in enumerate(coupled)}
        rhs = dict(const)
        rows = []
        cols = []
        for i, nc in enumerate(unknowns):
            if i in forced:
                if forced[i]:
                    for term, bit in lin[i].items():
                        if bit:
                            rhs[term] = rhs.get(term, 0) ^ 1
            else:
                rows.append(lin[i])
                cols.append(i)
        for (i, j), row in quad.items():
            if forced[i] and forced[j]:
                for term, bit in row.items():
                    if bit:
                        rhs[term] = rhs.get(term, 0) ^ 1
        for values in _solve_f2_all(rows, {k for k, v in rhs.items() if v}):
            solution = dict(forced)
            solution.update({cols[k]: values[k] for k in range(len(cols))})
            solutions.append(solution)
    if not solutions:
        raise StructureError("over-slide structural equation unsatisfiable")
    solutions.sort(key=lambda sol: (sum(sol.values()), sorted(sol.items())))
    for solution in solutions:
        yield determinate + chosen3 + [nc for i, nc in enumerate(unknowns) if solution[i]]


def _solve_f2_all(rows: list[dict], target: set, limit: int = 64):
    """All solutions of sum_i c_i * rows[i] = target over F2, sparse rows.

    Yields bit lists: a particular solution shifted by every kernel
    combination, capped at ``limit`` to keep degenerate systems in check.
    """
    rows = [set(k for k, v in r.items() if v) for r in rows]
    target = set(target)
    n = len(rows)
    combos = [{i} for i in range(n)]
    pivots: list = []
    for i in range(n):
        if not rows[i]:
            continue
        piv = min(rows[i], key=repr)
        for j in range(n):
            if j != i and piv in rows[j]:
                rows[j] ^= rows[i]
                combos[j] ^= combos[i]
        pivots.append((piv, i))
    particular = [0] * n
    for piv, i in pivots:
        if piv in target:
            target ^= rows[i]
            for k in combos[i]:
                particular[k] ^= 1
    if target:
        return
    kernel = [combos[i] for i in range(n) if not rows[i]]
    if 1 << len(kernel) > limit:
        kernel = kernel[: max(limit.bit_length() - 1, 0)]
    for mask in range(1 << len(kernel)):
        out = list(particular)
        for k, combo in enumerate(kernel):
            if mask >> k & 1:
                for idx in combo:
                    out[idx] ^= 1
        yield out
