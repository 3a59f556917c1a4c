"""Crystallographic root systems with exact rational coordinates.

Supported Cartan types: the reduced families A-G and the nonreduced BC_N.
Each system is realized in a fixed ambient space with rational coordinates
so that chamber membership, stabilizer detection and dominance tests are
exact.  Weights are handled as integer coordinate tuples in the
fundamental-weight basis throughout; the Euclidean vector of a weight is
recovered with :meth:`RootSystem.weight_vector`.

For BC_N two simple systems coexist: the C_N-type basis (used for the
fundamental-weight coordinates, so that the half-sum of the reduced
positive roots pairs to 1 with every basis coroot) and the B_N-type set of
indecomposable positive roots (which generates the nonnegative root cone
used by the dominance order).  For reduced systems the two coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Vec = tuple[Fraction, ...]
Coords = tuple[int, ...]

LABELS = ("A", "B", "C", "D", "E", "F", "G", "BC")

DEFAULT_WEYL_BUDGET = 100_000


class BudgetExceededError(RuntimeError):
    """A Weyl-group enumeration would exceed the element budget."""

    def __init__(self, label: str, required: int, budget: int):
        super().__init__(
            f"Weyl group of {label} has {required} elements, budget is {budget}"
        )
        self.required = required
        self.budget = budget


def dot(x: Vec, y: Vec) -> Fraction:
    return sum(a * b for a, b in zip(x, y))


def _vec(entries) -> Vec:
    return tuple(Fraction(e) for e in entries)


def _unit(n: int, i: int, scale=1) -> Vec:
    v = [Fraction(0)] * n
    v[i] = Fraction(scale)
    return tuple(v)


def _add(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def _sub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def _neg(x: Vec) -> Vec:
    return tuple(-a for a in x)


def _scale(c, x: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * a for a in x)


def coroot(alpha: Vec) -> Vec:
    return _scale(Fraction(2, 1) / dot(alpha, alpha), alpha)


def _solve(mat: list[list[Fraction]], rhs: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve mat @ X = rhs exactly by Gaussian elimination (square mat)."""
    n = len(mat)
    m = len(rhs[0])
    a = [list(row) + list(r) for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1, 1) / a[col][col]
        a[col] = [inv * x for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:n + m] for row in a]


def _reflection_matrix(alpha: Vec, dim: int) -> tuple[Vec, ...]:
    av = coroot(alpha)
    rows = []
    for i in range(dim):
        e = _unit(dim, i)
        rows.append(_sub(e, _scale(av[i], alpha)))
    # rows[i] holds the i-th row of the reflection acting on column vectors
    return tuple(tuple(rows[j][i] for j in range(dim)) for i in range(dim))


def _mat_vec(m: tuple[Vec, ...], v: Vec) -> Vec:
    return tuple(dot(row, v) for row in m)


def _mat_mul(a: tuple[Vec, ...], b: tuple[Vec, ...]) -> tuple[Vec, ...]:
    n = len(a)
    bt = list(zip(*b))
    return tuple(tuple(dot(a[i], bt[j]) for j in range(n)) for i in range(n))


def _identity(n: int) -> tuple[Vec, ...]:
    return tuple(_unit(n, i) for i in range(n))


@dataclass(frozen=True)
class WeylElement:
    """Weyl group element: reduced word in simple reflections plus its matrix."""

    word: tuple[int, ...]
    matrix: tuple[Vec, ...]

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    def act(self, v: Vec) -> Vec:
        return _mat_vec(self.matrix, v)

    def inverse(self) -> "WeylElement":
        # products of orthogonal reflections: inverse equals transpose
        return WeylElement(tuple(reversed(self.word)),
                           tuple(zip(*self.matrix)))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.word + other.word,
                           _mat_mul(self.matrix, other.matrix))


def _simple_root_data(label: str, rank: int):
    """Ambient dimension, basis simple roots, and Q+ generators for a type."""
    n = rank
    if label == "A":
        if n < 1:
            raise ValueError("A_N needs N >= 1")
        dim = n + 1
        simples = [_sub(_unit(dim, i), _unit(dim, i + 1)) for i in range(n)]
        return dim, simples, simples
    if label == "B":
        if n < 2:
            raise ValueError("B_N needs N >= 2")
        simples = [_sub(_unit(n, i), _unit(n, i + 1)) for i in range(n - 1)]
        simples.append(_unit(n, n - 1))
        return n, simples, simples
    if label == "C":
        if n < 2:
            raise ValueError("C_N needs N >= 2")
        simples = [_sub(_unit(n, i), _unit(n, i + 1)) for i in range(n - 1)]
        simples.append(_unit(n, n - 1, 2))
        return n, simples, simples
    if label == "D":
        if n < 3:
            raise ValueError("D_N needs N >= 3")
        simples = [_sub(_unit(n, i), _unit(n, i + 1)) for i in range(n - 1)]
        simples.append(_add(_unit(n, n - 2), _unit(n, n - 1)))
        return n, simples, simples
    if label == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_N needs N in {6,7,8}")
        half = Fraction(1, 2)
        a1 = tuple([half, -half, -half, -half, -half, -half, -half, half])
        a2 = _add(_unit(8, 0), _unit(8, 1))
        rest = [_sub(_unit(8, i), _unit(8, i - 1)) for i in range(1, 7)]
        simples = ([a1, a2] + rest)[:n]
        return 8, simples, simples
    if label == "F":
        if n != 4:
            raise ValueError("F_4 needs rank 4")
        half = Fraction(1, 2)
        simples = [
            _sub(_unit(4, 1), _unit(4, 2)),
            _sub(_unit(4, 2), _unit(4, 3)),
            _unit(4, 3),
            (half, -half, -half, -half),
        ]
        return 4, simples, simples
    if label == "G":
        if n != 2:
            raise ValueError("G_2 needs rank 2")
        simples = [
            _sub(_unit(3, 0), _unit(3, 1)),
            _add(_add(_unit(3, 0, -2), _unit(3, 1)), _unit(3, 2)),
        ]
        return 3, simples, simples
    if label == "BC":
        if n < 1:
            raise ValueError("BC_N needs N >= 1")
        basis = [_sub(_unit(n, i), _unit(n, i + 1)) for i in range(n - 1)]
        basis.append(_unit(n, n - 1, 2))
        gens = [_sub(_unit(n, i), _unit(n, i + 1)) for i in range(n - 1)]
        gens.append(_unit(n, n - 1))
        return n, basis, gens
    raise ValueError(f"unknown Cartan label {label!r}")


def _reflection_closure(simples: list[Vec], dim: int) -> set[Vec]:
    roots = set(simples) | {_neg(a) for a in simples}
    refl = [_reflection_matrix(a, dim) for a in simples]
    frontier = list(roots)
    while frontier:
        beta = frontier.pop()
        for m in refl:
            img = _mat_vec(m, beta)
            if img not in roots:
                roots.add(img)
                frontier.append(img)
    return roots


def _bc_roots(n: int) -> set[Vec]:
    roots: set[Vec] = set()
    for i in range(n):
        for s in (1, -1):
            roots.add(_unit(n, i, s))
            roots.add(_unit(n, i, 2 * s))
        for j in range(i + 1, n):
            for si in (1, -1):
                for sj in (1, -1):
                    roots.add(_add(_unit(n, i, si), _unit(n, j, sj)))
    return roots


class RootSystem:
    """Immutable Cartan datum for one irreducible (possibly nonreduced) type.

    Use :func:`build_root_system`; instances are cached per (label, rank) and
    weight coordinate tuples are only meaningful relative to their system.
    """

    def __init__(self, label: str, rank: int, *, _data=None):
        self.label = label
        self.rank = rank
        if _data is not None:
            dim, basis, gens, roots = _data
        else:
            dim, basis, gens = _simple_root_data(label, rank)
            if label == "BC":
                roots = _bc_roots(rank)
            else:
                roots = _reflection_closure(basis, dim)
        self.dim = dim
        self.simple_roots: tuple[Vec, ...] = tuple(basis)
        self.gen_simples: tuple[Vec, ...] = tuple(gens)
        self.basis_coroots: tuple[Vec, ...] = tuple(coroot(a) for a in basis)

        # fundamental weights from <w_r, b_j^vee> = delta_{rj}, solved in
        # the span of the simple roots
        cartan = [[dot(b, bv) for b in basis] for bv in self.basis_coroots]
        eye = [[Fraction(1 if i == j else 0) for j in range(rank)]
               for i in range(rank)]
        coeff = _solve(cartan, eye)
        self.fundamental_weights: tuple[Vec, ...] = tuple(
            tuple(sum(coeff[k][r] * basis[k][i] for k in range(rank))
                  for i in range(dim))
            for r in range(rank)
        )

        regular = self.fundamental_weights[0]
        for w in self.fundamental_weights[1:]:
            regular = _add(regular, w)
        self._regular = regular

        self.roots: tuple[Vec, ...] = tuple(sorted(roots))
        self.positive_roots: tuple[Vec, ...] = tuple(
            a for a in self.roots if dot(a, regular) > 0)
        rootset = set(self.roots)
        self.positive_roots_0: tuple[Vec, ...] = tuple(
            a for a in self.positive_roots if _scale(2, a) not in rootset)
        self.positive_roots_1: tuple[Vec, ...] = tuple(
            a for a in self.positive_roots if _scale(Fraction(1, 2), a) not in rootset)

        rho = (Fraction(0),) * dim
        for a in self.positive_roots_0:
            rho = _add(rho, a)
        self.rho: Vec = _scale(Fraction(1, 2), rho)
        self.rho_coords: Coords = self.vector_coords(self.rho)

        # integer reflection action on fundamental-weight coordinates:
        # r_i(c)_j = c_j - c_i * <b_i, b_j^vee>
        self._refl_rows = tuple(
            tuple(int(dot(basis[i], self.basis_coroots[j])) for j in range(rank))
            for i in range(rank)
        )
        self._refl_mats = tuple(
            _reflection_matrix(a, dim) for a in basis)
        self._gen_gram_inv = _solve(
            [[dot(a, b) for b in gens] for a in gens], eye)
        # pairing table <omega_j, alpha^vee> over positive roots (integers)
        self._pos_coroot_pairings = tuple(
            tuple(int(dot(w, coroot(a))) for w in self.fundamental_weights)
            for a in self.positive_roots)
        self._weyl_cache: dict[int, tuple[WeylElement, ...]] = {}
        self._coord_mats: dict = {}

    # -- coordinates ---------------------------------------------------

    def weight_vector(self, mu: Coords) -> Vec:
        v = (Fraction(0),) * self.dim
        for c, w in zip(mu, self.fundamental_weights):
            if c:
                v = _add(v, _scale(c, w))
        return v

    def vector_coords(self, v: Vec) -> Coords:
        out = []
        for bv in self.basis_coroots:
            c = dot(v, bv)
            if c.denominator != 1:
                raise ValueError(f"{v} is not in the weight lattice")

            out.append(int(c))
        return tuple(out)

    def vector_coords_rational(self, v: Vec) -> tuple[Fraction, ...]:
        return tuple(dot(v, bv) for bv in self.basis_coroots)

    def root_coords(self, alpha: Vec) -> Coords:
        return self.vector_coords(alpha)

    def pairing(self, mu: Coords, alpha: Vec) -> Fraction:
        """<mu, alpha^vee> for a weight mu and a root alpha."""
        return dot(self.weight_vector(mu), coroot(alpha))

    # -- basic predicates ----------------------------------------------

    def is_dominant(self, mu: Coords) -> bool:
        return all(c >= 0 for c in mu)

    def qplus_expansion(self, mu: Coords):
        """Coefficients of mu over the Q+ generators, or None if not in Q."""
        v = self.weight_vector(mu)
        rhs = [dot(a, v) for a in self.gen_simples]
        coeffs = [sum(self._gen_gram_inv[i][j] * rhs[j] for j in range(self.rank))
                  for i in range(self.rank)]
        if any(c.denominator != 1 for c in coeffs):
            return None
        return tuple(int(c) for c in coeffs)

    def dominance_leq(self, mu: Coords, lam: Coords) -> bool:
        """mu <= lam in the dominance order (lam - mu in Q+)."""
        diff = tuple(a - b for a, b in zip(lam, mu))
        exp = self.qplus_expansion(diff)
        return exp is not None and all(c >= 0 for c in exp)

    def height(self, mu: Coords) -> int:
        """Sum of fundamental-weight coordinates (test-set grading)."""
        return sum(mu)

    def min_coroot_pairing(self, lam: Coords):
        """m(lambda): minimal pairing of lam with the positive coroots."""
        return min(sum(c * r for c, r in zip(lam, cc))
                   for cc in self._pos_coroot_pairings)

    # -- Weyl group action ----------------------------------------------

    def simple_reflection_coords(self, i: int, mu: Coords) -> Coords:
        ci = mu[i]
        if ci == 0:
            return mu
        row = self._refl_rows[i]
        return tuple(c - ci * row[j] for j, c in enumerate(mu))

    def weyl_orbit(self, mu: Coords) -> set[Coords]:
        seen = {mu}
        frontier = [mu]
        while frontier:
            nu = frontier.pop()
            for i in range(self.rank):
                img = self.simple_reflection_coords(i, nu)
                if img not in seen:
                    seen.add(img)
                    frontier.append(img)
        return seen

    def dominant_representative(self, mu: Coords):
        """Dominantize mu; returns (lam, sign, stabilizer_trivial).

        sign is the parity of the number of simple reflections applied, which
        equals det(w_mu) whenever mu is regular.
        """
        cur = mu
        sign = 1
        while True:
            i = next((j for j, c in enumerate(cur) if c < 0), None)
            if i is None:
                break
            cur = self.simple_reflection_coords(i, cur)
            sign = -sign
        return cur, sign, all(c != 0 for c in cur)

    def act_coords(self, w: WeylElement, mu: Coords) -> Coords:
        m = self.coord_matrix(w)
        return tuple(sum(m[j][r] * mu[r] for r in range(self.rank))
                     for j in range(self.rank))

    def coord_matrix(self, w: WeylElement):
        """Integer matrix of w acting on fundamental-weight coordinates."""
        cached = self._coord_mats.get(w.matrix)
        if cached is None:
            cols = [self.vector_coords(w.act(om)) for om in self.fundamental_weights]
            cached = tuple(tuple(cols[r][j] for r in range(self.rank))
                           for j in range(self.rank))
            self._coord_mats[w.matrix] = cached
        return cached

    def weyl_group(self, max_order: int = DEFAULT_WEYL_BUDGET) -> tuple[WeylElement, ...]:
        """Enumerate W by breadth-first closure under simple reflections."""
        if self._weyl_cache:
            elems = next(iter(self._weyl_cache.values()))
            if len(elems) <= max_order:
                return elems
            raise BudgetExceededError(self._name(), len(elems), max_order)
        order_bound = weyl_order(self.label, self.rank)
        if order_bound > max_order:
            raise BudgetExceededError(self._name(), order_bound, max_order)
        ident = WeylElement((), _identity(self.dim))
        refls = [WeylElement((i,), self._refl_mats[i]) for i in range(self.rank)]
        seen = {ident.matrix: ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for i, r in enumerate(refls):
                    prod = WeylElement(w.word + (i,), _mat_mul(w.matrix, r.matrix))
                    if prod.matrix not in seen:
                        seen[prod.matrix] = prod
                        nxt.append(prod)
            frontier = nxt
        elems = tuple(seen.values())
        self._weyl_cache[0] = elems
        return elems

    def weyl_order(self) -> int:
        return weyl_order(self.label, self.rank)

    def longest_element(self) -> WeylElement:
        """w_0, found by dominantizing the negative of a regular vector."""
        cur = self.vector_coords(_neg(self._regular))
        word = []
        while True:
            i = next((j for j, c in enumerate(cur) if c < 0), None)
            if i is None:
                break
            cur = self.simple_reflection_coords(i, cur)
            word.append(i)
        mat = _identity(self.dim)
        for i in reversed(word):
            mat = _mat_mul(mat, self._refl_mats[i])
        # built as r_{i_k} ... r_{i_1} applied left-to-right on the vector
        w = WeylElement(tuple(reversed(word)), mat)
        assert all(c >= 0 for c in self.act_coords(w, self.vector_coords(_neg(self._regular))))
        return w

    def minus_one_in_weyl_group(self) -> bool:
        w0 = self.longest_element()
        eye = range(self.rank)
        basis = [tuple(1 if i == j else 0 for j in eye) for i in eye]
        return all(self.act_coords(w0, b) == tuple(-x for x in b) for b in basis)

    # -- distinguished weights -------------------------------------------

    def minuscule_weights(self) -> list[Coords]:
        out = []
        for r in range(self.rank):
            w = self.fundamental_weights[r]
            if all(dot(w, coroot(a)) <= 1 for a in self.positive_roots):
                out.append(tuple(1 if j == r else 0 for j in range(self.rank)))
        return out

    def quasi_minuscule_weight(self) -> Coords:
        """The unique short dominant root (alpha_0 with alpha_0^vee maximal)."""
        dominant_roots = [a for a in self.positive_roots
                          if self.is_dominant(self.vector_coords(a))]
        pi = min(dominant_roots, key=lambda a: dot(a, a))
        pic = self.vector_coords(pi)
        assert all(dot(self.weight_vector(pic), coroot(a)) <= 1
                   for a in self.positive_roots if a != pi)
        return pic

    def index_of_root_lattice(self) -> int:
        """|P/Q| from the Q+ generators expressed in weight coordinates."""
        mat = [list(self.vector_coords(a)) for a in self.gen_simples]
        det = _determinant([[Fraction(x) for x in row] for row in mat])
        return abs(int(det))

    # -- misc -------------------------------------------------------------

    def dual(self) -> "RootSystem":
        """Root system built from the coroots, realized in the same space."""
        if self.label == "BC":
            # {e_i, 2e_i, e_i +- e_j} is closed under alpha -> alpha^vee
            return self
        if self._dual is None:
            basis = [coroot(a) for a in self.simple_roots]
            roots = _reflection_closure(basis, self.dim)
            data = (self.dim, basis, basis, roots)
            self._dual = RootSystem(self.label + "v", self.rank, _data=data)
        return self._dual

    _dual = None

    def saturated_weights(self, tops) -> list[Coords]:
        """All dominant mu with mu <= top for some top, dominance order."""
        found: set[Coords] = set()
        for top in tops:
            if not self.is_dominant(top):
                raise ValueError(f"top weight {top} is not dominant")
            tv = self.weight_vector(top)
            norm2 = dot(tv, tv)
            bounds = []
            for w in self.fundamental_weights:
                ww = dot(w, w)
                b = 0
                while (b + 1) * (b + 1) * ww <= norm2:
                    b += 1
                bounds.append(b)
            for cand in itertools.product(*(range(b + 1) for b in bounds)):
                if cand in found:
                    continue
                if self.dominance_leq(cand, top):
                    found.add(cand)
        return sorted(found, key=lambda mu: (self._ext_key(mu), mu))

    def _ext_key(self, mu: Coords):
        # <mu, 2 rho^vee> is integral and strictly refines dominance
        if self._two_rho_vee is None:
            acc = [0] * self.rank
            for cc in self._pos_coroot_pairings:
                for j in range(self.rank):
                    acc[j] += cc[j]
            self._two_rho_vee = tuple(acc)
        return sum(c * r for c, r in zip(mu, self._two_rho_vee))

    _two_rho_vee = None

    def linear_extension(self, weights) -> list[Coords]:
        """Sort weights by a fixed linear extension of the dominance order."""
        return sorted(weights, key=lambda mu: (self._ext_key(mu), mu))

    def _name(self) -> str:
        return f"{self.label}{self.rank}"

    def __repr__(self) -> str:
        return f"RootSystem({self._name()}, |R+|={len(self.positive_roots)})"


def _determinant(mat) -> Fraction:
    n = len(mat)
    a = [row[:] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1, 1) / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


_FACT = [1]
for _k in range(1, 13):
    _FACT.append(_FACT[-1] * _k)


def weyl_order(label: str, rank: int) -> int:
    """Classical order formula for W, used to guard enumeration budgets."""
    n = rank
    if label == "A":
        return _FACT[n + 1] if n + 1 < len(_FACT) else _big_factorial(n + 1)
    if label in ("B", "C", "BC"):
        return 2 ** n * _big_factorial(n)
    if label == "D":
        return 2 ** (n - 1) * _big_factorial(n)
    if label == "E":
        return {6: 51840, 7: 2903040, 8: 696729600}[n]
    if label == "F":
        return 1152
    if label == "G":
        return 12
    # dual systems share the order of the original
    if label.endswith("v"):
        return weyl_order(label[:-1], rank)
    raise ValueError(f"unknown Cartan label {label!r}")


def _big_factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


@lru_cache(maxsize=None)
def build_root_system(label: str, rank: int) -> RootSystem:
    """Construct (and cache) the root system of the given Cartan type."""
    if label not in LABELS:
        raise ValueError(f"unknown Cartan label {label!r}; expected one of {LABELS}")
    return RootSystem(label, rank)
