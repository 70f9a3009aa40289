"""A-infinity modules: the dualized identity bimodule and its minimal model.

The dualized identity bimodule is an honest dg bimodule with two commuting
right actions.  Transferring its structure to homology through a strong
deformation retract produces infinitely many higher operations, so they
are exposed through a lazy, memoized evaluator: each operation is a g -
action - T - action - ... - f zigzag, summed over the interleavings of the
two input sequences.
"""

from __future__ import annotations

from . import algebra as alg
from .algebra import StrandsGenerator
from .homalg import TypeDStructure
from .pmc import PointedMatchedCircle, reverse_pmc
from .slides import dd_identity


class BoundednessError(RuntimeError):
    """An iterated-delta evaluation exceeded its depth cap."""


class RetractError(ValueError):
    """Proposed perturbation data fails the retract identities."""


# ---------------------------------------------------------------------------
# The dualized identity bimodule (a dg bimodule with two right actions)


class DualIdentityBimodule:
    """Module maps from the identity bimodule into its second algebra.

    Basis triples (g, a, c): g is a generator of the identity bimodule,
    a decorates it with a first-factor algebra element ending at g's left
    idempotent, and c is the value in the second algebra.  The two right
    actions precompose with the first factor and postmultiply the value.
    """

    def __init__(self, pmc: PointedMatchedCircle, truncated: bool = False,
                 weight: int | None = 0):
        self.pmc = pmc
        self.rev = reverse_pmc(pmc)
        self.ddid = dd_identity(pmc, truncated)
        basis = []
        for g in self.ddid.generators:
            left, right = self.ddid.idem[g]
            for a in alg.full_basis(self.rev):
                if a.right_pairs != right:
                    continue
                if weight is not None and a.weight != -weight:
                    continue
                if truncated and any(m > 1 for m in a.supp):
                    continue
                for c in alg.full_basis(pmc):
                    if c.left_pairs != left:
                        continue
                    if weight is not None and c.weight != weight:
                        continue
                    if truncated and any(m > 1 for m in c.supp):
                        continue
                    basis.append((g, a, c))
        self.basis = sorted(basis, key=lambda t: (repr(t[0]), t[1].sort_key(), t[2].sort_key()))
        self.index = {b: i for i, b in enumerate(self.basis)}
        self._differential = {b: self._compute_differential(b) for b in self.basis}

    def _compute_differential(self, elt) -> frozenset:
        g, a, c = elt
        out: set = set()
        for c2 in alg.differential_basic(c):
            out ^= {(g, a, c2)}
        for b in alg.full_basis(self.rev):
            if b.right_pairs == a.right_pairs and a in alg.differential_basic(b):
                out ^= {(g, b, c)}
        for g2 in self.ddid.generators:
            for g3, coefs in self.ddid.delta[g2].items():
                if g3 != g:
                    continue
                for p, q in coefs:
                    pc = alg.multiply_basic(p, c)
                    if pc is None:
                        continue
                    for b in alg.full_basis(self.rev):
                        if b.right_pairs != self.ddid.idem[g2][1]:
                            continue
                        if alg.multiply_basic(b, q) == a:
                            out ^= {(g2, b, pc)}
        return frozenset(out)

    def differential(self, elt) -> frozenset:
        return self._differential[elt]

    def act(self, chain: frozenset, side: str, r: StrandsGenerator) -> frozenset:
        """Right action by a basic element of either boundary algebra.

        The first-factor action multiplies the value; the reversed-factor
        action divides the decoration, both induced from the identity
        bimodule's two left module structures.
        """
        out: set = set()
        for g, a, c in chain:
            if side == "rho":
                cs = alg.multiply_basic(c, r)
                if cs is not None:
                    out ^= {(g, a, cs)}
            elif side == "lambda":
                for b in alg.full_basis(self.rev):
                    if b.left_pairs == r.right_pairs and alg.multiply_basic(r, b) == a:
                        out ^= {(g, b, c)}
            else:
                raise ValueError(f"unknown side {side!r}")
        return frozenset(out)

    def homology_rank(self) -> int:
        alive, _, _, _, _ = _retract_data(self)
        return len(alive)


def caa_identity(pmc: PointedMatchedCircle, truncated: bool = False,
                 weight: int | None = 0) -> DualIdentityBimodule:
    return DualIdentityBimodule(pmc, truncated, weight)


# ---------------------------------------------------------------------------
# Strong deformation retract by iterated pair cancellation


def _retract_data(module: DualIdentityBimodule):
    """(surviving basis, f, g, T, reduced differential) over F2.

    f and T are maps into chains of the big module; g maps big-module
    basis elements to chains of survivors.  Built by cancelling one
    differential pair at a time, composing the elementary retractions.
    """
    basis = list(module.basis)
    dmat = {b: set(module.differential(b)) for b in basis}
    f = {b: {b} for b in basis}
    g = {b: {b} for b in basis}
    T: dict = {b: set() for b in basis}
    alive = list(basis)

    def sym(target: dict, key, chain):
        cur = target.get(key, set())
        cur ^= chain
        target[key] = cur

    while True:
        pair = None
        for x in alive:
            for y in sorted(dmat[x], key=repr):
                pair = (x, y)
                break
            if pair:
                break
        if pair is None:
            break
        x, y = pair
        dx_rest = set(dmat[x])
        dx_rest.discard(y)
        dx_rest.discard(x)
        # elementary retraction killing the pair (x, y)
        new_alive = [w for w in alive if w not in (x, y)]
        new_d = {}
        for w in new_alive:
            chain = set(dmat[w])
            if y in chain:
                chain ^= dmat[x]
            chain.discard(x)
            chain.discard(y)
            new_d[w] = chain
        # compose: f' = f o f_e, g' = g_e o g, T' = T + f o t_e o g
        f_e = {w: {w} ^ ({x} if y in dmat[w] else set()) for w in new_alive}
        new_f = {}
        for w in new_alive:
            chain: set = set()
            for v in f_e[w]:
                chain ^= f[v]
            new_f[w] = chain
        g_e = {w: {w} for w in new_alive}
        g_e[x] = set()
        g_e[y] = set(dx_rest)
        new_g = {}
        for b in basis:
            chain: set = set()
            for v in g[b]:
                chain ^= g_e[v]
            new_g[b] = chain
        for b in basis:
            te_gb = set()
            for v in g[b]:
                if v == y:
                    te_gb ^= {x}
            add: set = set()
            for v in te_gb:
                add ^= f[v]
            T[b] = T[b] ^ add
        alive = new_alive
        dmat = new_d
        f = new_f
        g = new_g
    return alive, f, g, T, dmat


class MinimalModel:
    """The transferred structure on the homology of the dualized identity.

    Operations are evaluated lazily: feed the inclusion through
    alternating action/homotopy steps and project.  Bimodule operations
    sum over all interleavings of the two input sequences.
    """

    def __init__(self, module: DualIdentityBimodule, seed: int = 0):
        self.module = module
        alive, f, g, T, dred = _retract_data(module)
        if any(dred[w] for w in alive):
            raise RetractError("reduced differential is nonzero")
        self.generators = list(alive)
        self._f = f
        self._g = g
        self._T = T
        self._memo: dict = {}
        self._verify_retract()

    def _verify_retract(self) -> None:
        mod = self.module
        for w in self.generators:
            gf = set()
            for v in self._f[w]:
                gf ^= self._g[v]
            if gf != {w}:
                raise RetractError("g o f is not the identity on the retract")
        for b in mod.basis:
            lhs: set = set()
            for v in self._T[b]:
                lhs ^= mod.differential(v)
            for v in mod.differential(b):
                lhs ^= self._T[v]
            rhs = {b}
            for v in self._g[b]:
                rhs ^= self._f[v]
            if lhs != rhs:
                raise RetractError("dT + Td != id + fg")

    def lambda_idempotent(self, x) -> frozenset:
        """Pairs of the reversed circle whose idempotent acts by one on x."""
        return x[1].left_pairs

    def rho_idempotent(self, x) -> frozenset:
        return x[2].right_pairs

    # -- lazy operations ----------------------------------------------------

    def _chain_T(self, chain: frozenset) -> frozenset:
        out: set = set()
        for v in chain:
            out ^= self._T[v]
        return frozenset(out)

    def _chain_g(self, chain: frozenset) -> frozenset:
        out: set = set()
        for v in chain:
            out ^= self._g[v]
        return frozenset(out)

    def op_sequence(self, x, inputs) -> frozenset:
        """One zigzag: f, multiply/T alternately along the inputs, then g.

        ``inputs`` is a tuple of (side, basic generator); empty input gives
        zero (the model is minimal).
        """
        if not inputs:
            return frozenset()
        key = (x, inputs)
        if key in self._memo:
            return self._memo[key]
        chain = frozenset(self._f[x])
        for i, (side, r) in enumerate(inputs):
            if i:
                chain = self._chain_T(chain)
                if not chain:
                    break
            chain = self.module.act(chain, side, r)
            if not chain:
                break
        result = self._chain_g(chain) if chain else frozenset()
        self._memo[key] = result
        return result

    def operation(self, x, lambdas=(), rhos=()) -> frozenset:
        """The bimodule operation with the two ordered input sequences."""
        lambdas = tuple(lambdas)
        rhos = tuple(rhos)
        if any(r.is_idempotent for r in lambdas + rhos):
            # strict unitality: idempotents act only through the plain
            # module structure, never through higher operations
            if len(lambdas) + len(rhos) != 1:
                return frozenset()
            ident = (lambdas + rhos)[0]
            _, a, c = x
            matches = (a.left_pairs == ident.left_pairs) if lambdas else (
                c.right_pairs == ident.left_pairs)
            return frozenset({x}) if matches else frozenset()
        out: set = set()
        for merged in _interleavings(
            tuple(("lambda", r) for r in lambdas), tuple(("rho", r) for r in rhos)
        ):
            out ^= self.op_sequence(x, merged)
        return frozenset(out)


def _interleavings(seq1, seq2):
    if not seq1:
        yield seq2
        return
    if not seq2:
        yield seq1
        return
    for rest in _interleavings(seq1[1:], seq2):
        yield (seq1[0],) + rest
    for rest in _interleavings(seq1, seq2[1:]):
        yield (seq2[0],) + rest


def minimal_model(module: DualIdentityBimodule, seed: int = 0) -> MinimalModel:
    return MinimalModel(module, seed)


# ---------------------------------------------------------------------------
# Box tensor products


def box_tensor_minimal(model: MinimalModel, side: str, N: TypeDStructure,
                       depth_cap: int | None = None) -> TypeDStructure:
    """Pair one action of the minimal model against a type D structure.

    The result is an F2 complex on idempotent-matched pairs whose
    differential sums the operations fed by iterated delta coefficients.
    Evaluation walks delta paths and prunes once the zigzag chain dies.
    """
    if len(N.factors) != 1:
        raise ValueError("box tensor needs a one-factor type D structure")
    cap = depth_cap if depth_cap is not None else 10 * max(len(N.generators), 1)
    idem_of = model.lambda_idempotent if side == "lambda" else model.rho_idempotent
    out = TypeDStructure((), name=f"box({side})")
    pairs = [(x, u) for x in model.generators for u in N.generators
             if idem_of(x) == N.idem[u][0]]
    for x, u in pairs:
        out.add_generator((x, u), ())
    for x, u in pairs:
        stack = [(0, u, None)]
        while stack:
            depth, w, chain = stack.pop()
            if depth:
                result = model._chain_g(chain) if chain else frozenset()
                for y in result:
                    if (y, w) in out.idem:
                        out.add_arrow((x, u), (y, w), ())
            if depth >= cap:
                raise BoundednessError("box tensor exceeded its depth cap")
            for w2, cs in N.delta[w].items():
                for c in cs:
                    basic = c[0]
                    if basic.is_idempotent:
                        # strict unitality: a unit coefficient only moves the
                        # module marker, and only before any real input
                        if chain is None:
                            kept = model.module.act(frozenset(model._f[x]), side, basic)
                            for y in model._chain_g(kept):
                                if (y, w2) in out.idem:
                                    out.add_arrow((x, u), (y, w2), ())
                        continue
                    if chain is None:
                        nxt = model.module.act(frozenset(model._f[x]), side, basic)
                    else:
                        nxt = model.module.act(model._chain_T(chain), side, basic)
                    if nxt:
                        stack.append((depth + 1, w2, nxt))
    return out


def box_closed_dg(module: DualIdentityBimodule, N_lambda: TypeDStructure,
                  N_rho: TypeDStructure) -> TypeDStructure:
    """Close both strict actions of the dg identity bimodule.

    With only a differential and two strict actions, the box differential
    needs single delta steps and no homotopy trees, so no boundedness
    hypotheses enter.
    """
    out = TypeDStructure((), name="box(dg)")
    triples = [
        (b, u, v)
        for b in module.basis
        for u in N_lambda.generators
        if b[1].left_pairs == N_lambda.idem[u][0]
        for v in N_rho.generators
        if b[2].right_pairs == N_rho.idem[v][0]
    ]
    for key in triples:
        out.add_generator(key, ())
    for b, u, v in triples:
        for b2 in module.differential(b):
            if (b2, u, v) in out.idem:
                out.add_arrow((b, u, v), (b2, u, v), ())
        for u2, cs in N_lambda.delta[u].items():
            for c in cs:
                for b2 in module.act(frozenset({b}), "lambda", c[0]):
                    if (b2, u2, v) in out.idem:
                        out.add_arrow((b, u, v), (b2, u2, v), ())
        for v2, cs in N_rho.delta[v].items():
            for c in cs:
                for b2 in module.act(frozenset({b}), "rho", c[0]):
                    if (b2, u, v2) in out.idem:
                        out.add_arrow((b, u, v), (b2, u, v2), ())
    return out


def box_closed(model: MinimalModel, N_lambda: TypeDStructure, N_rho: TypeDStructure,
               depth_cap: int | None = None) -> TypeDStructure:
    """Close up both actions of the minimal model against two modules.

    The differential on idempotent-matched triples sums bimodule
    operations over interleaved delta paths from the two sides; each
    stack entry is one interleaving prefix with its live zigzag chain.
    """
    for N in (N_lambda, N_rho):
        if len(N.factors) != 1:
            raise ValueError("box tensor needs one-factor type D structures")
    size = max(len(N_lambda.generators) + len(N_rho.generators), 1)
    cap = depth_cap if depth_cap is not None else 10 * size
    out = TypeDStructure((), name="box(closed)")
    triples = [
        (x, u, v)
        for x in model.generators
        for u in N_lambda.generators
        if model.lambda_idempotent(x) == N_lambda.idem[u][0]
        for v in N_rho.generators
        if model.rho_idempotent(x) == N_rho.idem[v][0]
    ]
    for key in triples:
        out.add_generator(key, ())
    for x, u, v in triples:
        stack = [(0, u, v, None)]
        while stack:
            depth, w_l, w_r, chain = stack.pop()
            if depth:
                for y in model._chain_g(chain):
                    if (y, w_l, w_r) in out.idem:
                        out.add_arrow((x, u, v), (y, w_l, w_r), ())
            if depth >= cap:
                raise BoundednessError("box tensor exceeded its depth cap")
            moves = [("lambda", w2, c[0], w_r)
                     for w2, cs in N_lambda.delta[w_l].items() for c in cs]
            moves += [("rho", w_l, c[0], w2)
                      for w2, cs in N_rho.delta[w_r].items() for c in cs]
            for side, nl, basic, nr in moves:
                if basic.is_idempotent:
                    if chain is None:
                        kept = model.module.act(frozenset(model._f[x]), side, basic)
                        for y in model._chain_g(kept):
                            if (y, nl, nr) in out.idem:
                                out.add_arrow((x, u, v), (y, nl, nr), ())
                    continue
                if chain is None:
                    nxt = model.module.act(frozenset(model._f[x]), side, basic)
                else:
                    nxt = model.module.act(model._chain_T(chain), side, basic)
                if nxt:
                    stack.append((depth + 1, nl, nr, nxt))
    return out
