"""Gradings: the big grading group, coset lattices, and the mod-2 action.

Group elements are pairs (j, alpha) with j a half-integer Maslov component
and alpha a one-chain of interval multiplicities, one block of coordinates
per algebra factor of the graded structure.  j is stored doubled so all
arithmetic is exact.  The product twists by the average local multiplicity
of the second chain along the boundary of the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .algebra import StrandsGenerator


@dataclass(frozen=True)
class GradingElement:
    j2: int  # doubled Maslov component
    alphas: tuple[tuple[int, ...], ...]  # one multiplicity vector per factor

    def __mul__(self, other: "GradingElement") -> "GradingElement":
        if len(self.alphas) != len(other.alphas):
            raise ValueError("grading elements live over different factor lists")
        twist2 = 0
        for a1, a2 in zip(self.alphas, other.alphas):
            twist2 += _m2_boundary(a2, a1)
        alphas = tuple(
            tuple(x + y for x, y in zip(a1, a2)) for a1, a2 in zip(self.alphas, other.alphas)
        )
        return GradingElement(self.j2 + other.j2 + twist2, alphas)

    def inverse(self) -> "GradingElement":
        neg = tuple(tuple(-x for x in a) for a in self.alphas)
        twist2 = sum(_m2_boundary(a, a) for a in self.alphas)
        return GradingElement(-self.j2 + twist2, neg)

    def power(self, n: int) -> "GradingElement":
        out = identity_like(self)
        step = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * step
        return out

    @property
    def is_identity(self) -> bool:
        return self.j2 == 0 and all(all(x == 0 for x in a) for a in self.alphas)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for a in self.alphas for x in a)


def _m2_boundary(alpha: tuple[int, ...], beta: tuple[int, ...]) -> int:
    """Doubled value of m(alpha, d(beta)): the boundary of beta evaluated
    against the two-sided average multiplicity of alpha."""
    total = 0
    n = len(alpha)
    for p in range(n + 1):
        d = (beta[p - 1] if p > 0 else 0) - (beta[p] if p < n else 0)
        if d:
            avg2 = (alpha[p - 1] if p > 0 else 0) + (alpha[p] if p < n else 0)
            total += d * avg2
    return total


def identity_element(sizes: tuple[int, ...]) -> GradingElement:
    return GradingElement(0, tuple((0,) * s for s in sizes))


def identity_like(g: GradingElement) -> GradingElement:
    return GradingElement(0, tuple((0,) * len(a) for a in g.alphas))


def lambda_power(sizes: tuple[int, ...], n: int = 1) -> GradingElement:
    return GradingElement(2 * n, tuple((0,) * s for s in sizes))


def parity_changes(alpha: tuple[int, ...]) -> int:
    seq = [0, *alpha, 0]
    return sum(1 for a, b in zip(seq, seq[1:]) if (a - b) % 2)


def epsilon4(alpha: tuple[int, ...]) -> int:
    """Quadrupled congruence defect: the number of parity changes."""
    return parity_changes(alpha)


def check_congruence(g: GradingElement) -> bool:
    """j must equal the quarter parity-change count modulo 1."""
    e4 = sum(epsilon4(a) for a in g.alphas)
    return (2 * g.j2 - e4) % 4 == 0


def gr_generator(a: StrandsGenerator) -> GradingElement:
    """Big-group grading of a basic generator: crossings minus the average
    multiplicity of the support along the initial points of all strands."""
    return GradingElement(iota2(a), (a.supp,))


def iota2(a: StrandsGenerator) -> int:
    """Doubled Maslov component of the generator's grading."""
    start_points = [s for s, _ in a.moving]
    for h in a.horizontals:
        start_points.extend(a.pmc.pairs[h])
    n = len(a.supp)
    m2 = 0
    for p in start_points:
        m2 += (a.supp[p - 2] if p >= 2 else 0) + (a.supp[p - 1] if p - 1 < n else 0)
    return 2 * a.inv - m2


def gr_coefficient(coef: tuple[StrandsGenerator, ...], sizes: tuple[int, ...]) -> GradingElement:
    """Grading of a basic coefficient of a multi-factor structure."""
    j2 = sum(iota2(a) for a in coef)
    alphas = tuple(a.supp for a in coef)
    if tuple(len(a) for a in alphas) != sizes:
        raise ValueError("coefficient does not match the factor sizes")
    return GradingElement(j2, alphas)


# ---------------------------------------------------------------------------
# Integer lattice reduction for relation subgroups


def _row_reduce(rows: list[list[int]]):
    """Integer row echelon (Hermite-style) with recorded combinations.

    Returns (echelon, combos, pivots) with echelon = combos * rows.
    """
    rows = [list(r) for r in rows]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    combos = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for col in range(n):
        # Euclid on the column below r.
        while True:
            nz = [i for i in range(r, m) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            combos[r], combos[piv] = combos[piv], combos[r]
            done = True
            for i in range(r + 1, m):
                if rows[i][col]:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    combos[i] = [x - q * y for x, y in zip(combos[i], combos[r])]
                    if rows[i][col]:
                        done = False
            if done:
                break
        if r < m and rows[r][col] != 0:
            pivots.append(col)
            r += 1
        if r == m:
            break
    return rows, combos, pivots


class RelationLattice:
    """The subgroup generated by a list of grading elements.

    Supports orbit membership for the homological part and the achievable
    set of lambda powers, which is j0 + n*Z for a torsion modulus n coming
    from kernel combinations and pairwise commutators.
    """

    def __init__(self, relations: list[GradingElement], sizes: tuple[int, ...]):
        self.relations = list(relations)
        self.sizes = sizes
        rows = [list(r.flat()) for r in self.relations]
        width = sum(sizes)
        self._width = width
        if rows:
            self._echelon, self._combos, self._pivots = _row_reduce(rows)
        else:
            self._echelon, self._combos, self._pivots = [], [], []
        self.lambda_torsion2 = self._compute_torsion2()

    def _solve(self, target: list[int]):
        """Coefficients c with sum c_i * relation_i = target on chains."""
        coeffs = [0] * len(self.relations)
        residue = list(target)
        for row_idx, col in enumerate(self._pivots):
            piv = self._echelon[row_idx][col]
            if residue[col] % piv != 0:
                return None
            q = residue[col] // piv
            if q:
                residue = [x - q * y for x, y in zip(residue, self._echelon[row_idx])]
                coeffs = [c + q * y for c, y in zip(coeffs, self._combos[row_idx])]
        if any(residue):
            return None
        return coeffs

    def _product_j2(self, coeffs: list[int]) -> int:
        out = identity_element(self.sizes)
        for c, r in zip(coeffs, self.relations):
            if c:
                out = out * r.power(c)
        return out.j2

    def _compute_torsion2(self) -> int:
        tor = 0
        # Commutators of subgroup elements are central lambda powers whose
        # exponents come from an antisymmetric pairing, bilinear in the
        # chain parts; an echelon basis of the chain lattice generates all
        # of them.  Kernel combinations contribute their own exponents.
        basis = [row for row in self._echelon if any(row)]
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                tor = gcd(tor, self._pairing2(basis[i], basis[j]))
        zero_rows = [
            self._combos[i]
            for i in range(len(self._echelon))
            if all(x == 0 for x in self._echelon[i])
        ]
        for combo in zero_rows:
            tor = gcd(tor, self._product_j2(combo))
        return tor

    def _pairing2(self, flat_a: list[int], flat_b: list[int]) -> int:
        total = 0
        offset = 0
        for size in self.sizes:
            a = tuple(flat_a[offset:offset + size])
            b = tuple(flat_b[offset:offset + size])
            total += _m2_boundary(b, a) - _m2_boundary(a, b)
            offset += size
        return total

    def contains_chain(self, g: GradingElement) -> bool:
        if not self.relations:
            return all(x == 0 for x in g.flat())
        return self._solve(list(g.flat())) is not None

    def lambda_degree(self, g: GradingElement):
        """If g = lambda^t * (element of the subgroup), return (t, modulus2);
        the degree is defined mod modulus2 / 2.  None if not in the orbit."""
        if not self.relations:
            if any(g.flat()):
                return None
            if g.j2 % 2:
                return None
            return (g.j2 // 2, 0)
        coeffs = self._solve(list(g.flat()))
        if coeffs is None:
            return None
        diff2 = g.j2 - self._product_j2(coeffs)
        if diff2 % 2:
            return None
        tor = self.lambda_torsion2
        if tor:
            if tor % 2:
                return None
            return ((diff2 // 2) % (tor // 2) if tor != 2 else 0, tor)
        return (diff2 // 2, 0)

    def is_lambda_free(self) -> bool:
        return self.lambda_torsion2 == 0


class Gradings:
    """A grading set by representatives and relations.

    Each generator's grading is the right coset rep * <relations>.  Two
    generators are in the same lambda orbit when the chain parts of their
    representatives differ by the relation lattice; the relative Maslov
    degree is then the lambda power, modulo the lattice's lambda torsion.
    """

    def __init__(self, sizes, reps: dict, relations: list[GradingElement]):
        self.sizes = tuple(sizes)
        self.reps = dict(reps)
        self.relations = list(relations)
        self._lattice = RelationLattice(self.relations, self.sizes)

    @property
    def lattice(self) -> RelationLattice:
        return self._lattice

    def degree_difference(self, x, y):
        """(degree of x) - (degree of y) with its modulus, or None."""
        h = self.reps[y].inverse() * self.reps[x]
        return self._lattice.lambda_degree(h)

    def same_orbit(self, x, y) -> bool:
        h = self.reps[y].inverse() * self.reps[x]
        return self._lattice.contains_chain(h)

    def is_lambda_free(self) -> bool:
        return self._lattice.is_lambda_free()

    def compact(self) -> "Gradings":
        """Equivalent grading data with at most basis-many relations.

        Long relation lists accumulate along a pipeline; an echelon basis
        of the chain lattice plus one pure lambda power carrying the
        torsion generates the same sublattice for every query made here.
        """
        lat = self._lattice
        new: list[GradingElement] = []
        for row_idx, row in enumerate(lat._echelon):
            if not any(row):
                continue
            j2 = lat._product_j2(lat._combos[row_idx])
            alphas = []
            offset = 0
            for size in self.sizes:
                alphas.append(tuple(row[offset:offset + size]))
                offset += size
            new.append(GradingElement(j2, tuple(alphas)))
        if lat.lambda_torsion2:
            new.append(GradingElement(lat.lambda_torsion2,
                                      tuple((0,) * s for s in self.sizes)))
        return Gradings(self.sizes, self.reps, new)

    def has_pure_lambda_relation(self) -> bool:
        """Whether some relation is a nonzero power of lambda alone."""
        return any(
            r.j2 != 0 and all(all(v == 0 for v in a) for a in r.alphas)
            for r in self.relations
        )

    def orbit_partition(self, keys):
        """Group keys into lambda orbits, preserving input order."""
        orbits: list[list] = []
        for k in keys:
            for orbit in orbits:
                if self.same_orbit(k, orbit[0]):
                    orbit.append(k)
                    break
            else:
                orbits.append([k])
        return orbits


# ---------------------------------------------------------------------------
# The mod-2 grading action of a slide word


class Mod2GradingMap:
    """The symplectic-with-parity action of a word of slides.

    Tracks the integer matrix on the pair classes h(B_i) together with the
    rule that a class a picks up the parity of |a|_1 + |psi(a)|_1 on the
    Maslov bit.
    """

    def __init__(self, matrix: list[list[int]]):
        self.matrix = [list(row) for row in matrix]  # columns = source pairs

    @staticmethod
    def identity(n_pairs: int) -> "Mod2GradingMap":
        return Mod2GradingMap([[1 if i == j else 0 for j in range(n_pairs)] for i in range(n_pairs)])

    def apply_chain(self, a: list[int]) -> list[int]:
        n = len(self.matrix)
        return [sum(self.matrix[i][j] * a[j] for j in range(n)) for i in range(n)]

    def apply(self, m_bit: int, a: list[int]) -> tuple[int, list[int]]:
        image = self.apply_chain(a)
        norm = sum(abs(x) for x in a) + sum(abs(x) for x in image)
        return ((m_bit + norm) % 2, image)

    def compose(self, first: "Mod2GradingMap") -> "Mod2GradingMap":
        """self after first."""
        n = len(self.matrix)
        out = [
            [sum(self.matrix[i][k] * first.matrix[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
        return Mod2GradingMap(out)


def slide_homology_matrix(slide) -> list[list[int]]:
    """Matrix of the slide on the pair classes, target basis by source basis.

    The sliding pair maps to its successor plus or minus the slid-over pair;
    all other pairs are fixed.  Signs follow the six combinatorial cases of
    the slide, reduced to the c1-above-c2 configuration by reflecting.
    """
    from .pmc import ArcSlide, reverse_pmc, reverse_point

    n = slide.source.n_pairs
    mat = [[0] * n for _ in range(n)]
    for j in range(n):
        if j != slide.b_pair:
            mat[slide.pair_map[j]][j] = 1

    if slide.c1 > slide.c2:
        case = _slide_case(slide)
        b_sign, c_sign = _CASE_SIGNS[case]
        mat[slide.pair_map[slide.b_pair]][slide.b_pair] = b_sign
        mat[slide.pair_map[slide.c_pair]][slide.b_pair] = c_sign
        return mat

    # Reflect to reach the c1-above-c2 configuration, act, reflect back.
    refl = ArcSlide(
        reverse_pmc(slide.source),
        reverse_point(slide.source, slide.b1),
        reverse_point(slide.source, slide.c1),
    )
    from .pmc import reversed_pair_map

    src_map = reversed_pair_map(slide.source)  # pairs of Z -> pairs of -Z
    tgt_map = reversed_pair_map(slide.target)
    inner = slide_homology_matrix(refl)
    out = [[0] * n for _ in range(n)]
    for j in range(n):
        col = [0] * n
        col[src_map[j]] = 1
        image = [sum(inner[i][k] * col[k] for k in range(n)) for i in range(n)]
        # refl.target should be reverse_pmc(slide.target); transport back.
        for i in range(n):
            if image[i]:
                out[tgt_map.index(i)][j] = image[i]
    return out


def _slide_case(slide) -> str:
    """Combinatorial case of a slide with c1 above c2."""
    b1, b2, c1, c2 = slide.b1, slide.b2, slide.c1, slide.c2
    if slide.kind == "under":
        if not c2 < b2 < c1:
            return "U.I" if b2 > c1 else "U.III"
        return "U.II"
    if b2 > c1:
        return "O.I"
    if c2 < b2 < c1:
        return "O.II"
    return "O.III"


_CASE_SIGNS = {
    # psi(h(B)) = b_sign * h(B') + c_sign * h(C)
    "U.I": (1, -1),
    "U.II": (-1, 1),
    "U.III": (1, 1),
    "O.I": (1, -1),
    "O.II": (-1, 1),
    "O.III": (1, 1),
}


def xi_word(slides, n_pairs: int | None = None) -> Mod2GradingMap:
    """The mod-2 grading map of a composable word of slides."""
    slides = list(slides)
    for first, second in zip(slides, slides[1:]):
        if first.target != second.source:
            raise ValueError("slide word is not composable")
    if n_pairs is None:
        n_pairs = slides[0].source.n_pairs if slides else 0
    out = Mod2GradingMap.identity(n_pairs)
    for s in slides:
        out = Mod2GradingMap(slide_homology_matrix(s)).compose(out)
    return out


# ---------------------------------------------------------------------------
# Propagation of gradings over a differential graph


def propagate_gradings(structure, seeds=None, tree_choice: int = 0):
    """Assign a coset to each generator by walking the differential graph.

    Tree arrows fix gradings exactly by gr(x) = lambda * gr(coef) * gr(y);
    every non-tree arrow contributes one loop relation.  Disconnected
    components restart from a seed (identity unless provided).  A nonzero
    tree_choice permutes the arrow visit order, for tree independence tests.
    """
    sizes = structure.factor_sizes()
    reps: dict = {}
    relations: list[GradingElement] = list(seeds.get("relations", [])) if seeds else []
    seed_reps = seeds.get("reps", {}) if seeds else {}
    lam = lambda_power(sizes)

    arrows = []
    for x in structure.generators:
        for y, coefs in structure.delta.get(x, {}).items():
            for coef in sorted(coefs, key=_coef_key):
                arrows.append((x, coef, y))
    if tree_choice:
        arrows = arrows[tree_choice % max(len(arrows), 1):] + arrows[: tree_choice % max(len(arrows), 1)]

    adjacency: dict = {x: [] for x in structure.generators}
    for x, coef, y in arrows:
        adjacency[x].append((y, coef, "fwd"))
        adjacency[y].append((x, coef, "bwd"))

    for start in structure.generators:
        if start in reps:
            continue
        reps[start] = seed_reps.get(start, identity_element(sizes))
        stack = [start]
        while stack:
            x = stack.pop()
            for y, coef, direction in adjacency[x]:
                g = lam * gr_coefficient(coef, sizes)
                if y not in reps:
                    # gr(src) = lambda * gr(coef) * gr(tgt)
                    if direction == "fwd":
                        reps[y] = g.inverse() * reps[x]
                    else:
                        reps[y] = g * reps[x]
                    stack.append(y)
                else:
                    if direction == "fwd":
                        loop = reps[x].inverse() * g * reps[y]
                    else:
                        loop = reps[y].inverse() * g * reps[x]
                    if not loop.is_identity:
                        relations.append(loop)
    return Gradings(sizes, reps, _dedupe(relations))


def _coef_key(coef):
    return tuple(g.sort_key() for g in coef)


def _dedupe(relations):
    seen = set()
    out = []
    for r in relations:
        key = (r.j2, r.alphas)
        if key not in seen and not r.is_identity:
            seen.add(key)
            out.append(r)
    return out


def verify_arrow_compatibility(structure, gradings: Gradings) -> bool:
    """Every arrow must satisfy gr(src) = lambda*gr(coef)*gr(tgt) mod relations."""
    sizes = structure.factor_sizes()
    lam = lambda_power(sizes)
    for x in structure.generators:
        for y, coefs in structure.delta.get(x, {}).items():
            for coef in coefs:
                g = lam * gr_coefficient(coef, sizes)
                h = (g * gradings.reps[y]).inverse() * gradings.reps[x]
                if gradings.lattice.lambda_degree(h) != (0, gradings.lattice.lambda_torsion2):
                    return False
    return True
