from itertools import product

import pytest

import hfhat.algebra as alg
from hfhat.ainfty import (
    BoundednessError,
    MinimalModel,
    RetractError,
    box_closed,
    box_tensor_minimal,
    caa_identity,
    minimal_model,
)
from hfhat.algebra import StrandsGenerator
from hfhat.homalg import TypeDStructure, cancel, homology_rank
from hfhat.manifolds import apply_slides, cfd_zero_framed_handlebody, hf_hat_closed, MappingWord
from hfhat.pmc import ArcSlide, reverse_pmc, split_pmc

Z1 = split_pmc(1)
REV = reverse_pmc(Z1)

RHO = {name: StrandsGenerator(Z1, [mv], ()) for name, mv in
       [("1", (1, 2)), ("2", (2, 3)), ("3", (3, 4)),
        ("12", (1, 3)), ("23", (2, 4)), ("123", (1, 4))]}
LAM = {name: StrandsGenerator(REV, [mv], ()) for name, mv in
       [("1", (1, 2)), ("2", (2, 3)), ("3", (3, 4)),
        ("12", (1, 3)), ("23", (2, 4)), ("123", (1, 4))]}


def test_caa_identity_generator_count():
    assert len(caa_identity(Z1).basis) == 30


def test_caa_identity_d_squared_zero():
    caa = caa_identity(Z1)
    for b in caa.basis:
        acc = set()
        for t in caa.differential(b):
            acc ^= set(caa.differential(t))
        assert not acc


def test_caa_identity_differential_pair_structure():
    caa = caa_identity(Z1)
    sources = [b for b in caa.basis if caa.differential(b)]
    arrows = sum(len(caa.differential(b)) for b in caa.basis)
    assert len(sources) == 14
    assert arrows == 15
    model = minimal_model(caa)
    assert len(model.generators) == 2


def test_minimal_model_retract_identities():
    # the constructor verifies g o f = id and dT + Td = id + fg
    minimal_model(caa_identity(Z1))


def test_minimal_model_quoted_operations():
    """The two quoted minimal-model operations, in this package's labels.

    The loop family's interior inputs rho_23 and lambda_12 match the
    published computation on the nose; the closing single chord is the
    mirror-partner of the opener under our reversed-circle labelling.
    """
    model = minimal_model(caa_identity(Z1))
    x0, y0 = model.generators
    triple = model.operation(x0, lambdas=[LAM["1"]], rhos=[RHO["3"]])
    assert triple == frozenset({y0})
    loop = model.operation(x0, lambdas=[LAM["12"], LAM["1"]], rhos=[RHO["3"], RHO["23"]])
    assert loop == frozenset({y0})


def test_minimal_model_operations_are_gauge_invariant():
    caa = caa_identity(Z1)
    models = [minimal_model(caa, seed=s) for s in (0, 1)]
    ops = []
    for model in models:
        table = set()
        for x in model.generators:
            for r in RHO.values():
                for l in LAM.values():
                    v = model.operation(x, lambdas=[l], rhos=[r])
                    for y in v:
                        table.add((x[0], r.moving, l.moving, y[0]))
        ops.append(table)
    assert ops[0] == ops[1]


def test_strict_unitality():
    model = minimal_model(caa_identity(Z1))
    x0 = model.generators[0]
    iota = alg.idempotent(Z1, sorted(x0[2].left_pairs))
    assert model.operation(x0, rhos=[iota]) == frozenset({x0})
    assert model.operation(x0, lambdas=[LAM["2"], alg.idempotent(REV, [0])]) == frozenset()


def test_ainfty_relations_exhaustive_short_inputs():
    """Structure relations over every pair of input sequences whose total
    support length is at most four: operation compositions over all splits
    cancel against operations with one adjacent product taken inside."""
    model = minimal_model(caa_identity(Z1))
    singles_r = [RHO[k] for k in ("1", "2", "3", "12", "23", "123")]
    singles_l = [LAM[k] for k in ("1", "2", "3", "12", "23", "123")]

    def seqs(pool, max_total):
        yield ()
        for a in pool:
            la = a.moving[0][1] - a.moving[0][0]
            if la <= max_total:
                for rest in seqs(pool, max_total - la):
                    yield (a,) + rest

    def total(seq):
        return sum(e - s for a in seq for s, e in a.moving)

    lam_seqs = [s for s in seqs(singles_l, 4) if len(s) <= 2]
    rho_seqs = [s for s in seqs(singles_r, 4) if len(s) <= 2]
    for x in model.generators:
        for ls in lam_seqs:
            for rs in rho_seqs:
                if not (ls or rs) or total(ls) + total(rs) > 4:
                    continue
                acc = set()
                for i in range(len(ls) + 1):
                    for j in range(len(rs) + 1):
                        if (i, j) == (0, 0) or (i, j) == (len(ls), len(rs)):
                            continue
                        for y in model.operation(x, lambdas=ls[:i], rhos=rs[:j]):
                            acc ^= set(model.operation(y, lambdas=ls[i:], rhos=rs[j:]))
                for k in range(len(ls) - 1):
                    prod = alg.multiply_basic(ls[k], ls[k + 1])
                    if prod is not None:
                        acc ^= set(model.operation(
                            x, lambdas=ls[:k] + (prod,) + ls[k + 2:], rhos=rs))
                for k in range(len(rs) - 1):
                    prod = alg.multiply_basic(rs[k], rs[k + 1])
                    if prod is not None:
                        acc ^= set(model.operation(
                            x, lambdas=ls, rhos=rs[:k] + (prod,) + rs[k + 2:]))
                assert not acc, (x, ls, rs)


def test_box_with_zero_delta_module():
    model = minimal_model(caa_identity(Z1))
    N = TypeDStructure((cfd_zero_framed_handlebody(1).factors[0],))
    N.add_generator("u", (frozenset({0}),))
    out = box_tensor_minimal(model, "rho", N)
    # vanishing delta leaves only the (zero) m_1 differential
    assert out.arrow_count() == 0
    assert len(out.generators) == 1  # one model generator matches the idempotent


def test_box_tensor_depth_cap_raises():
    model = minimal_model(caa_identity(Z1))
    loops = TypeDStructure((cfd_zero_framed_handlebody(1).factors[0],))
    loops.add_generator("u", (frozenset({0}),))
    loops.add_arrow("u", "u", (RHO["12"],))
    assert loops.verify_d_squared()
    with pytest.raises(BoundednessError):
        box_tensor_minimal(model, "rho", loops, depth_cap=1)


def test_cross_path_ranks_on_random_words():
    import random

    from hfhat.ainfty import box_closed_dg
    from hfhat.manifolds import cfd_zero_framed_handlebody_reversed

    rng = random.Random(23)
    caa = caa_identity(Z1)
    left = cfd_zero_framed_handlebody_reversed(1)
    for _ in range(3):
        word = MappingWord(genus=1)
        for _i in range(rng.randint(1, 6)):
            word.steps.append(("slide", *rng.choice(
                [(1, 2), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3)])))
        mor_rank = hf_hat_closed(1, word).total_rank
        right = apply_slides(cfd_zero_framed_handlebody(1), word.expand())
        boxed = box_closed_dg(caa, left, right)
        assert boxed.verify_d_squared()
        assert homology_rank(boxed) == mor_rank, word.steps
