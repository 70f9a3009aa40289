"""Handlebody modules and the closed-manifold pipeline.

A closed three-manifold presented by a gluing word is computed by walking
the word: each slide contributes one morphism complex against its
bimodule, reduced before the next step; the two handlebody modules are
paired off at the end and the homology is split into lambda orbits with
relative Maslov degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import algebra as alg
from .algebra import StrandsGenerator
from .homalg import (
    AlgebraFactor,
    TypeDStructure,
    cancel,
    mor_against_bimodule,
    mor_complex,
    tensor,
)
from .pmc import (
    ArcSlide,
    Chord,
    PointedMatchedCircle,
    connected_sum,
    reverse_pmc,
    reverse_point,
    reversed_pair_map,
    split_pmc,
)
from .slides import arcslide_dd, dd_identity, matched_chord_terms


# ---------------------------------------------------------------------------
# Building blocks


def cfd_zero_framed_handlebody(genus: int, truncated: bool = False) -> TypeDStructure:
    """One generator; one differential loop per handle, along its a-arc."""
    pmc = split_pmc(genus)
    out = TypeDStructure((AlgebraFactor(pmc, truncated),), name=f"H0(g={genus})")
    idem = frozenset(pmc.pair_of(4 * i + 1) for i in range(genus))
    out.add_generator("x", (idem,))
    for i in range(genus):
        s, t = 4 * i + 1, 4 * i + 3
        horiz = sorted(p for p in idem if p != pmc.pair_of(s))
        out.add_arrow("x", "x", (StrandsGenerator(pmc, [(s, t)], horiz),))
    out.propagate_gradings()
    return out


def cfd_zero_framed_handlebody_reversed(genus: int, truncated: bool = False) -> TypeDStructure:
    """The zero-framed handlebody presented over the reversed circle."""
    pmc = split_pmc(genus)  # its own reverse, but the b-feet take the arcs
    out = TypeDStructure((AlgebraFactor(pmc, truncated),), name=f"H0rev(g={genus})")
    idem = frozenset(pmc.pair_of(4 * i + 2) for i in range(genus))
    out.add_generator("x", (idem,))
    for i in range(genus):
        s, t = 4 * i + 2, 4 * i + 4
        horiz = sorted(p for p in idem if p != pmc.pair_of(s))
        out.add_arrow("x", "x", (StrandsGenerator(pmc, [(s, t)], horiz),))
    out.propagate_gradings()
    return out


def self_gluing_circle(pmc: PointedMatchedCircle) -> PointedMatchedCircle:
    return connected_sum(reverse_pmc(pmc), pmc)


def cfd_self_gluing(pmc: PointedMatchedCircle, truncated: bool = False) -> TypeDStructure:
    """The handlebody whose boundary doubles the circle across a junction.

    Generators are the complementary idempotent pairs, read inside the glued
    algebra; the differential multiplies by every matched chord pair from
    the two halves plus every chord symmetric across the junction.
    """
    rev = reverse_pmc(pmc)
    big = self_gluing_circle(pmc)
    n = pmc.n_points
    out = TypeDStructure((AlgebraFactor(big, truncated),), name=f"Hsg(g={pmc.genus})")

    def w_pair(point: int) -> int:
        return big.pair_of(point)

    keys = {}
    for size in range(pmc.n_pairs + 1):
        for left in combinations(range(pmc.n_pairs), size):
            rev_pairs = frozenset(
                w_pair(rev.pairs[p][0]) for p in left
            )
            comp = [q for q in range(pmc.n_pairs) if q not in
                    {_pair_under_reversal(pmc, rev, p) for p in left}]
            z_pairs = frozenset(w_pair(pmc.pairs[q][0] + n) for q in comp)
            idem = rev_pairs | z_pairs
            key = tuple(sorted(idem))
            keys[key] = idem
            out.add_generator(key, (idem,))

    # chords matched across the two halves
    rpm_rev = reversed_pair_map(rev)
    for chord in [Chord(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]:
        for aL, aR in matched_chord_terms(rev, pmc, rpm_rev, chord):
            fused = _fuse_pair(big, aL, aR, shift=n)
            src = tuple(sorted(fused.left_pairs))
            tgt = tuple(sorted(fused.right_pairs))
            if src in keys and tgt in keys:
                if truncated and any(m > 1 for m in fused.supp):
                    continue
                out.add_arrow(src, tgt, (fused,))

    # chords symmetric about the junction between the halves
    for radius in range(n):
        s, t = n - radius, n + radius + 1
        if s < 1 or t > big.n_points:
            continue
        ps, pt = big.pair_of(s), big.pair_of(t)
        if ps == pt:
            continue
        free = [h for h in range(big.n_pairs) if h not in (ps, pt)]
        for size in range(len(free) + 1):
            for hs in combinations(free, size):
                a = StrandsGenerator(big, [(s, t)], hs)
                src = tuple(sorted(a.left_pairs))
                tgt = tuple(sorted(a.right_pairs))
                if src in keys and tgt in keys:
                    if truncated and any(m > 1 for m in a.supp):
                        continue
                    out.add_arrow(src, tgt, (a,))
    out.propagate_gradings()
    return out


def _pair_under_reversal(pmc, rev, rev_pair: int) -> int:
    """Which pair of the circle a pair of the reversed circle came from."""
    a, _ = rev.pairs[rev_pair]
    return pmc.pair_of(reverse_point(pmc, a))


def _fuse_pair(big, a_first: StrandsGenerator, a_second: StrandsGenerator,
               shift: int) -> StrandsGenerator:
    moving = list(a_first.moving) + [(s + shift, t + shift) for s, t in a_second.moving]
    horiz = [big.pair_of(a_first.pmc.pairs[h][0]) for h in a_first.horizontals]
    horiz += [big.pair_of(a_second.pmc.pairs[h][0] + shift) for h in a_second.horizontals]
    return StrandsGenerator(big, moving, sorted(horiz))


def dd_elementary_cobordism(pmc: PointedMatchedCircle, side: str = "right",
                            truncated: bool = False) -> TypeDStructure:
    """The handle-attaching cobordism with its split bordering.

    Built as the identity bimodule tensored with the genus-one handlebody,
    re-read inside the algebra of the summed circle at the handlebody's
    idempotent.  A bimodule over the enlarged circle and the reversed one.
    """
    ddid = dd_identity(pmc, truncated)
    torus = split_pmc(1)
    big = connected_sum(pmc, torus, side=side)
    shift = pmc.n_points if side == "right" else torus.n_points
    rev = reverse_pmc(pmc)
    out = TypeDStructure(
        (AlgebraFactor(big, truncated), AlgebraFactor(rev, truncated)),
        name=f"Cob(g{pmc.genus}->g{pmc.genus + 1})",
    )

    def fuse(a: StrandsGenerator, torus_part: StrandsGenerator) -> StrandsGenerator:
        first, second = (a, torus_part) if side == "right" else (torus_part, a)
        off = pmc.n_points if side == "right" else torus.n_points
        moving = list(first.moving) + [(s + off, t + off) for s, t in second.moving]
        horiz = [big.pair_of(first.pmc.pairs[h][0]) for h in first.horizontals]
        horiz += [big.pair_of(second.pmc.pairs[h][0] + off) for h in second.horizontals]
        return StrandsGenerator(big, moving, sorted(horiz))

    # the torus block carries the reversed-handlebody framing so that the
    # orientation reversal at the next pairing lands on the zero-framed one
    h_idem = alg.idempotent(torus, [torus.pair_of(2)])
    h_loop = StrandsGenerator(torus, [(2, 4)], ())

    for g in ddid.generators:
        left, right = ddid.idem[g]
        fused_idem = fuse(alg.idempotent(pmc, sorted(left)), h_idem)
        out.add_generator(g, (fused_idem.left_pairs, right))
    for g in ddid.generators:
        for g2, coefs in ddid.delta[g].items():
            for aL, aR in coefs:
                out.add_arrow(g, g2, (fuse(aL, h_idem), aR))
        left, right = ddid.idem[g]
        out.add_arrow(
            g, g,
            (fuse(alg.idempotent(pmc, sorted(left)), h_loop),
             alg.idempotent(rev, sorted(right))),
        )
    out.propagate_gradings()
    return out


# ---------------------------------------------------------------------------
# Mapping words


class WordError(ValueError):
    """A gluing word fails to compose."""


@dataclass
class MappingWord:
    """A sequence of slide and Dehn-twist tokens on a split surface."""

    genus: int
    steps: list = field(default_factory=list)

    @staticmethod
    def from_json(data: dict) -> "MappingWord":
        word = MappingWord(genus=data["genus"])
        for step in data.get("steps", []):
            if "slide" in step:
                word.steps.append(("slide", step["slide"]["b1"], step["slide"]["c1"]))
            elif "dehn_twist" in step:
                word.steps.append(
                    ("twist", step["dehn_twist"]["pair"], step["dehn_twist"].get("power", 1))
                )
            else:
                raise WordError(f"unknown step {step!r}")
        return word

    def to_json(self) -> dict:
        steps = []
        for step in self.steps:
            if step[0] == "slide":
                steps.append({"slide": {"b1": step[1], "c1": step[2]}})
            else:
                steps.append({"dehn_twist": {"pair": step[1], "power": step[2]}})
        return {"genus": self.genus, "steps": steps}

    def expand(self, handedness: str = "standard") -> list[ArcSlide]:
        cur = split_pmc(self.genus)
        slides: list[ArcSlide] = []
        for step in self.steps:
            if step[0] == "slide":
                try:
                    s = ArcSlide(cur, step[1], step[2])
                except ValueError as err:
                    raise WordError(str(err)) from err
                slides.append(s)
                cur = s.target
            else:
                batch = dehn_twist_expand(cur, step[1], step[2], handedness)
                slides.extend(batch)
                if batch:
                    cur = batch[-1].target
        return slides


def dehn_twist_expand(pmc: PointedMatchedCircle, pair: int, power: int = 1,
                      handedness: str = "standard") -> list[ArcSlide]:
    """Factor a Dehn twist along a matched pair into arc-slides.

    Each point between the feet slides over the pair once, in turn.  The
    standard handedness is the direction pinned by the Poincare sphere
    computation; the reversed handedness (or a negative power) gives the
    inverse twist.
    """
    if not 0 <= pair < pmc.n_pairs:
        raise WordError(f"no matched pair {pair} on this circle")
    inverted = (power < 0) == (handedness == "standard")
    out: list[ArcSlide] = []
    cur = pmc
    for _ in range(abs(power)):
        b, b_top = cur.pairs[pair]
        count = b_top - b - 1
        batch = []
        for _ in range(count):
            s = ArcSlide(cur, b + 1, b)
            batch.append(s)
            cur = s.target
        if not inverted:
            batch = [s.inverse() for s in reversed(batch)]
        out.extend(batch)
        if batch:
            cur = batch[-1].target
    return out


# ---------------------------------------------------------------------------
# The pipeline


def reflect_slide(slide: ArcSlide) -> ArcSlide:
    """The same slide on the orientation-reversed circle."""
    return ArcSlide(
        reverse_pmc(slide.source),
        reverse_point(slide.source, slide.b1),
        reverse_point(slide.source, slide.c1),
    )


def apply_slides(module: TypeDStructure, slides, truncated: bool = False,
                 stats: list | None = None, check: bool = False) -> TypeDStructure:
    """Pair the module against each slide bimodule in turn, reducing as we go.

    Each step consumes the bimodule's source factor against the module and
    leaves a module over the slide's target circle.
    """
    current = module
    for s in slides:
        bim = arcslide_dd(s, truncated)
        if bim.factors[0] != current.factors[0]:
            raise WordError(
                f"slide at {s.b1} over {s.c1} does not act on the module's circle"
            )
        raw = mor_against_bimodule(bim, current, seam=0).relabel()
        if check:
            raw.require_d_squared()
        reduced = cancel(raw)
        if stats is not None:
            stats.append((len(raw.generators), len(reduced.generators)))
        current = reduced
    return current


@dataclass
class ClosedResult:
    """Homology ranks split by lambda orbit, with pipeline stage sizes."""

    orbits: list
    stages: list
    mor_rank: int = 0

    @property
    def total_rank(self) -> int:
        return sum(o["rank"] for o in self.orbits)

    def to_json(self) -> dict:
        return {
            "orbits": self.orbits,
            "stages": [{"before": b, "after": a} for b, a in self.stages],
            "mor_generators": self.mor_rank,
        }

    def text(self) -> str:
        lines = [f"total rank {self.total_rank} in {len(self.orbits)} orbit(s)"]
        for i, orbit in enumerate(self.orbits):
            mas = ", ".join(f"{d}: {c}" for d, c in sorted(orbit["maslov"].items()))
            mod = orbit.get("modulus", 0)
            tag = f" (degrees mod {mod})" if mod else ""
            lines.append(f"  orbit {i}: rank {orbit['rank']}{tag}  maslov {{{mas}}}")
        for i, (before, after) in enumerate(self.stages):
            lines.append(f"  stage {i + 1}: {before} -> {after}")
        lines.append(f"  final mor complex: {self.mor_rank} generators")
        return "\n".join(lines)


def spinc_maslov(complex_: TypeDStructure) -> list[dict]:
    """Split a reduced complex into lambda orbits with relative degrees."""
    reduced = cancel(complex_)
    gens = reduced.sorted_generators()
    if reduced.gradings is None:
        return [{"rank": len(gens), "maslov": {}, "modulus": 0}] if gens else []
    gradings = reduced.gradings
    orbits = gradings.orbit_partition(gens)
    out = []
    for orbit in orbits:
        base = orbit[0]
        degrees = []
        modulus = 0
        for g in orbit:
            res = gradings.degree_difference(g, base)
            if res is None:
                degrees.append(None)
                continue
            deg, mod2 = res
            modulus = mod2 // 2 if mod2 else 0
            degrees.append(deg)
        known = [d for d in degrees if d is not None]
        floor = min(known) if known else 0
        hist: dict = {}
        for d in degrees:
            key = "?" if d is None else str(d - floor if not modulus else d % modulus)
            hist[key] = hist.get(key, 0) + 1
        out.append({"rank": len(orbit), "maslov": hist, "modulus": modulus})
    out.sort(key=lambda o: (-o["rank"], sorted(o["maslov"].items())))
    return out


def hf_hat_closed(genus: int, word: MappingWord, truncated: bool = False,
                  handedness: str = "standard", final: str = "hom",
                  check: bool = False) -> ClosedResult:
    """HF-hat of the closed manifold glued from two handlebodies by the word.

    ``final`` picks the pairing model for the last step: ``hom`` maps one
    handlebody module into the other, ``identity`` maps the identity
    bimodule into the tensor of the two sides.  Both give the same
    homology; the identity model is the larger complex.
    """
    if word.genus != genus:
        raise WordError("word genus disagrees with the requested genus")
    slides = word.expand(handedness)
    stats: list = []
    left = cfd_zero_framed_handlebody(genus, truncated)
    if final == "hom":
        right = apply_slides(cfd_zero_framed_handlebody(genus, truncated), slides,
                             truncated, stats, check=check)
        if left.factors != right.factors:
            raise WordError("word does not return to the split circle")
        pairing = mor_complex(left, right)
    elif final == "identity":
        right = apply_slides(cfd_zero_framed_handlebody_reversed(genus, truncated),
                             [reflect_slide(s) for s in slides],
                             truncated, stats, check=check)
        ddid = dd_identity(split_pmc(genus), truncated)
        pairing = mor_complex(ddid, tensor(left, right))
    else:
        raise ValueError(f"unknown final pairing {final!r}")
    if check:
        pairing.require_d_squared()
    orbits = spinc_maslov(pairing)
    return ClosedResult(orbits=orbits, stages=stats, mor_rank=len(pairing.generators))


# ---------------------------------------------------------------------------
# Bordered pipeline with elementary cobordisms


def cfd_bordered(start_genus: int, steps, truncated: bool = False,
                 stats: list | None = None) -> TypeDStructure:
    """CFD of a bordered manifold built from slides and handle attachments.

    ``steps`` mixes ('slide', b1, c1), ('twist', pair, power) and
    ('cobordism',) tokens; a cobordism raises the boundary genus by one
    with the split bordering.  Tokens refer to positions on the running
    underlying circle, which starts as the split circle of the given genus.
    """
    module = cfd_zero_framed_handlebody(start_genus, truncated)
    cur = split_pmc(start_genus)
    for step in steps:
        if step[0] == "cobordism":
            base = reverse_pmc(cur)
            bim = dd_elementary_cobordism(base, truncated=truncated)
            if bim.factors[1] != module.factors[0]:
                raise WordError("cobordism does not match the module's boundary")
            raw = mor_against_bimodule(bim, module, seam=1).relabel()
            module = cancel(raw)
            if stats is not None:
                stats.append((len(raw.generators), len(module.generators)))
            cur = reverse_pmc(connected_sum(base, split_pmc(1)))
            continue
        if step[0] == "twist":
            batch = dehn_twist_expand(cur, step[1], step[2])
        else:
            batch = [ArcSlide(cur, step[1], step[2])]
        module = apply_slides(module, batch, truncated, stats)
        if batch:
            cur = batch[-1].target
    return module


# ---------------------------------------------------------------------------
# Presets reproducing the published computations


SELF_GLUING_SLIDES = [(5, 4), (2, 1), (3, 2), (4, 3), (2, 1), (6, 5), (7, 6), (2, 3)]


def self_gluing_word() -> MappingWord:
    word = MappingWord(genus=2)
    word.steps = [("slide", b1, c1) for b1, c1 in SELF_GLUING_SLIDES]
    return word


def poincare_twist_tokens() -> list:
    # Five repetitions of the two torus twists on the split genus-two
    # circle, as slides in the handedness pinned by the published run
    out = []
    for _ in range(5):
        out.append(("slide", 3, 4))
        out.append(("slide", 2, 3))
    return out


def poincare_sphere(truncated: bool = False, check: bool = False,
                    self_gluing_route: str = "direct") -> ClosedResult:
    """HF-hat of the Poincare sphere via self-gluing handlebodies."""
    stats: list = []
    if self_gluing_route == "slides":
        base = apply_slides(
            cfd_zero_framed_handlebody(2, truncated),
            self_gluing_word().expand(),
            truncated,
            stats,
            check=check,
        )
    else:
        base = cancel(cfd_self_gluing(split_pmc(1), truncated))
    twist_stats: list = []
    slides = [ArcSlide(split_pmc(2), b1, c1) for _, b1, c1 in poincare_twist_tokens()]
    module = apply_slides(base, slides, truncated, twist_stats, check=check)
    left = cancel(cfd_self_gluing(split_pmc(1), truncated))
    pairing = mor_complex(left, module)
    if check:
        pairing.require_d_squared()
    orbits = spinc_maslov(pairing)
    return ClosedResult(orbits=orbits, stages=stats + twist_stats,
                        mor_rank=len(pairing.generators))
