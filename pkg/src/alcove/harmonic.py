"""Sparse Laurent polynomials on the weight lattice and torus quadrature.

A LaurentPoly is a finite sum  sum_mu c_mu e^{i<mu, xi>}  with exponents mu
in the weight lattice, stored sparsely by fundamental-weight coordinates.
Coefficients may be exact (int / Fraction) or complex; Weyl characters are
built exactly by long division of alternating sums.

All normalized alcove integrals are realized as averages over the torus
E / 2pi Q^vee on a uniform grid in a coroot-lattice basis.  The alcove of
the construction equals the fundamental alcove of the affine Weyl group
W x 2pi Q^vee, so the cell volume is |W| Vol(A) and

    1/(|W| Vol A) * integral_A h dxi  =  cell average of (h * 1_A),

which for W-invariant integrands h equals (cell average of h) / |W|.  The
grid average of e^{i<mu, xi>} is exactly 1 for mu in M*P and 0 otherwise,
so band-limited integrands are integrated exactly once M clears their
bandwidth.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .qfun import CFunctionSpec
from .rootsys import RootSystem, WeylElement


class LaurentPoly:
    """Sparse exponential sum on the weight lattice of one root system."""

    __slots__ = ("rs", "terms")

    def __init__(self, rs: RootSystem, terms: dict):
        self.rs = rs
        self.terms = {mu: c for mu, c in terms.items() if c != 0}

    @classmethod
    def monomial(cls, rs, mu, coeff=1):
        return cls(rs, {tuple(mu): coeff})

    @classmethod
    def zero(cls, rs):
        return cls(rs, {})

    @classmethod
    def one(cls, rs):
        return cls(rs, {(0,) * rs.rank: 1})

    def __add__(self, other):
        out = dict(self.terms)
        for mu, c in other.terms.items():
            out[mu] = out.get(mu, 0) + c
        return LaurentPoly(self.rs, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for mu, c in other.terms.items():
            out[mu] = out.get(mu, 0) - c
        return LaurentPoly(self.rs, out)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.rs, {mu: c * other for mu, c in self.terms.items()})
        out: dict = {}
        for mu, c in self.terms.items():
            for nu, d in other.terms.items():
                key = tuple(a + b for a, b in zip(mu, nu))
                out[key] = out.get(key, 0) + c * d
        return LaurentPoly(self.rs, out)

    __rmul__ = __mul__

    def __neg__(self):
        return LaurentPoly(self.rs, {mu: -c for mu, c in self.terms.items()})

    def conjugate(self) -> "LaurentPoly":
        """Pointwise complex conjugate for real xi: exponents negate."""
        return LaurentPoly(self.rs, {
            tuple(-x for x in mu): np.conjugate(c) if isinstance(c, complex) else c
            for mu, c in self.terms.items()})

    def compose_weyl(self, w: WeylElement) -> "LaurentPoly":
        """f(xi) -> f(w(xi)); exponents are mapped by w^{-1}."""
        winv = w.inverse()
        rs = self.rs
        return LaurentPoly(rs, {rs.act_coords(winv, mu): c
                                for mu, c in self.terms.items()})

    def coeff(self, mu):
        return self.terms.get(tuple(mu), 0)

    def support(self):
        return set(self.terms)

    def is_weyl_invariant(self, sample=5) -> bool:
        for i in range(self.rs.rank):
            for mu, c in list(self.terms.items())[:64]:
                img = self.rs.simple_reflection_coords(i, mu)
                if not _close(self.terms.get(img, 0), c):
                    return False
        return True

    def eval_grid(self, grid: "QuadratureGrid") -> np.ndarray:
        return grid.eval_terms(self.terms)

    def eval_at(self, xi) -> complex:
        """Evaluate at one point; xi is an ambient vector (may be complex)."""
        xi = np.asarray(xi, dtype=complex)
        total = 0j
        rs = self.rs
        for mu, c in self.terms.items():
            v = np.array([float(x) for x in rs.weight_vector(mu)])
            total += complex(c) * np.exp(1j * np.dot(v, xi))
        return total

    def eval_shifted(self, xi_real, shift, s: float) -> complex:
        """Evaluate at xi + i*s*shift for real xi and a real shift vector."""
        xi = np.asarray(xi_real, dtype=float)
        sh = np.asarray(shift, dtype=float)
        total = 0j
        for mu, c in self.terms.items():
            v = np.array([float(x) for x in self.rs.weight_vector(mu)])
            total += complex(c) * np.exp(1j * np.dot(v, xi) - s * np.dot(v, sh))
        return total

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.rs, {mu: fn(c) for mu, c in self.terms.items()})

    def prune(self, tol: float) -> "LaurentPoly":
        return LaurentPoly(self.rs, {mu: c for mu, c in self.terms.items()
                                     if abs(complex(c)) > tol})

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"LaurentPoly({self.rs._name()}, {len(self.terms)} terms)"


def _close(a, b, tol=1e-9) -> bool:
    return abs(complex(a) - complex(b)) <= tol * (1 + abs(complex(a)))


def monomial_symmetric(rs: RootSystem, lam) -> LaurentPoly:
    """m_lambda: coefficient one on each weight of the Weyl orbit of lambda."""
    lam = tuple(lam)
    if not rs.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    return LaurentPoly(rs, {mu: 1 for mu in rs.weyl_orbit(lam)})


def alternating_sum(rs: RootSystem, mu) -> LaurentPoly:
    """sum_w det(w) e^{i<w(mu), xi>} over the full Weyl group."""
    out: dict = {}
    for w in rs.weyl_group():
        key = rs.act_coords(w, tuple(mu))
        out[key] = out.get(key, 0) + w.sign
    return LaurentPoly(rs, out)


def weyl_denominator(rs: RootSystem) -> LaurentPoly:
    """The Weyl denominator as a Laurent polynomial, sum_w det(w) e^{i w(rho)}."""
    return alternating_sum(rs, rs.rho_coords)


def eval_delta(rs: RootSystem, xi) -> complex:
    """delta(xi) as the product over R0+ of (e^{i<a,xi>/2} - e^{-i<a,xi>/2})."""
    xi = np.asarray(xi, dtype=float)
    out = 1.0 + 0j
    for a in rs.positive_roots_0:
        th = float(np.dot([float(x) for x in a], xi))
        out *= 2j * np.sin(th / 2.0)
    return out


def laurent_divide(num: LaurentPoly, den: LaurentPoly, tol: float = 0.0) -> LaurentPoly:
    """Exact long division num/den along the lexicographic exponent order.

    With tol == 0 the coefficients must cancel exactly (int/Fraction input);
    a positive tol prunes float residue below tol * max|coeff|.
    """
    rem = dict(num.terms)
    if not rem:
        return LaurentPoly(num.rs, {})
    dlead = max(den.terms)
    dcoeff = den.terms[dlead]
    scale = max(abs(complex(c)) for c in rem.values())
    quot: dict = {}
    steps = 0
    limit = 40 * (len(rem) + 1) * (len(den.terms) + 1)
    while rem:
        steps += 1
        if steps > limit:
            raise ArithmeticError("Laurent division did not terminate; "
                                  "divisor does not divide the numerator")
        m = max(rem)
        c = rem.pop(m)
        if tol > 0 and abs(complex(c)) <= tol * scale:
            continue
        e = tuple(a - b for a, b in zip(m, dlead))
        q = Fraction(c, dcoeff) if isinstance(c, int) and isinstance(dcoeff, int) \
            else c / dcoeff
        quot[e] = quot.get(e, 0) + q
        for k, v in den.terms.items():
            if k == dlead:
                continue
            kk = tuple(a + b for a, b in zip(e, k))
            nv = rem.get(kk, 0) - q * v
            if nv == 0:
                rem.pop(kk, None)
            else:
                rem[kk] = nv
    if all(isinstance(c, Fraction) and c.denominator == 1 for c in quot.values()):
        quot = {k: int(c) for k, c in quot.items()}
    return LaurentPoly(num.rs, quot)


def weyl_character(rs: RootSystem, lam) -> LaurentPoly:
    """chi_lambda by exact division of alternating sums (integer output)."""
    lam = tuple(lam)
    if not rs.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    num = alternating_sum(rs, tuple(a + b for a, b in zip(rs.rho_coords, lam)))
    return laurent_divide(num, weyl_denominator(rs))


def weyl_character_extended(rs: RootSystem, lam) -> LaurentPoly:
    """chi_lambda for arbitrary lam in P, via the reflection boundary rule."""
    lam = tuple(lam)
    shifted = tuple(a + b for a, b in zip(rs.rho_coords, lam))
    dom, sign, regular = rs.dominant_representative(shifted)
    if not regular:
        return LaurentPoly.zero(rs)
    back = tuple(a - b for a, b in zip(dom, rs.rho_coords))
    chi = weyl_character(rs, back)
    return chi if sign == 1 else -chi


class QuadratureGrid:
    """Uniform M^N grid on the torus E / 2pi Q^vee.

    Points are xi_k = (2pi/M) sum_j k_j beta_j with {beta_j} the coroots of
    the basis simple roots (a Z-basis of Q^vee).  Pairing a weight with
    beta_j gives exactly its j-th fundamental-weight coordinate, so phases
    are (2pi/M) * (k . mu).
    """

    def __init__(self, rs: RootSystem, M: int):
        if M < 2:
            raise ValueError("grid subdivision must be at least 2")
        self.rs = rs
        self.M = int(M)
        n = rs.rank
        idx = np.indices((self.M,) * n).reshape(n, -1).T
        self.index = np.ascontiguousarray(idx, dtype=np.int64)
        self.size = self.index.shape[0]
        self._xi = None
        self._alcove = None

    def eval_coords(self, mu) -> np.ndarray:
        """exp(i <mu, xi>) over the grid for one weight mu."""
        phase = (2.0 * np.pi / self.M) * (self.index @ np.asarray(mu, dtype=np.int64))
        return np.exp(1j * phase)

    def eval_terms(self, terms: dict) -> np.ndarray:
        out = np.zeros(self.size, dtype=complex)
        items = list(terms.items())
        for start in range(0, len(items), 64):
            block = items[start:start + 64]
            mus = np.array([mu for mu, _ in block], dtype=np.int64)
            coeffs = np.array([complex(c) for _, c in block])
            phases = (2.0 * np.pi / self.M) * (self.index @ mus.T)
            out += np.exp(1j * phases) @ coeffs
        return out

    def angles(self, mu) -> np.ndarray:
        """<mu, xi> over the grid (mu given by weight coordinates)."""
        return (2.0 * np.pi / self.M) * (self.index @ np.asarray(mu, dtype=np.int64))

    @property
    def xi(self) -> np.ndarray:
        """Grid points as ambient vectors, shape (size, dim)."""
        if self._xi is None:
            beta = np.array([[float(x) for x in b]
                             for b in self.rs.basis_coroots])
            self._xi = (2.0 * np.pi / self.M) * (self.index @ beta)
        return self._xi

    @property
    def alcove_mask(self) -> np.ndarray:
        """Exact indicator of the open alcove 0 < <xi, a> < 2pi for a in R+."""
        if self._alcove is None:
            mask = np.ones(self.size, dtype=bool)
            for a in self.rs.positive_roots:
                pai = self.index @ np.asarray(self.rs.root_coords(a), dtype=np.int64)
                mask &= (pai > 0) & (pai < self.M)
            self._alcove = mask
        return self._alcove

    def average(self, values: np.ndarray) -> complex:
        return complex(np.mean(values))

    def __repr__(self):
        return f"QuadratureGrid({self.rs._name()}, M={self.M}, {self.size} points)"


def chat_values(spec: CFunctionSpec, grid: QuadratureGrid) -> np.ndarray:
    """The overall c-function C(xi) = prod_{a in R1+} c_|a|(e^{-i<a,xi>})."""
    rs = grid.rs
    out = np.ones(grid.size, dtype=complex)
    for a in rs.positive_roots_1:
        z = np.exp(-1j * grid.angles(rs.root_coords(a)))
        out *= spec.for_root(a)._eval_raw(z)
    return out


def weight_function_values(spec: CFunctionSpec, grid: QuadratureGrid) -> np.ndarray:
    """The weight Delta(xi) = 1/|C(xi)|^2 on the grid (nonnegative)."""
    c = chat_values(spec, grid)
    return 1.0 / (c.real**2 + c.imag**2)


def weight_function_eval(spec: CFunctionSpec, xi) -> float:
    """Pointwise Delta(xi) for an ambient vector xi."""
    rs = spec.rs
    xi = np.asarray(xi, dtype=float)
    c = 1.0 + 0j
    for a in rs.positive_roots_1:
        th = float(np.dot([float(x) for x in a], xi))
        c *= complex(spec.for_root(a)._eval_raw(np.exp(-1j * th)))
    return 1.0 / abs(c) ** 2


def delta_values(rs: RootSystem, grid: QuadratureGrid) -> np.ndarray:
    out = np.ones(grid.size, dtype=complex)
    for a in rs.positive_roots_0:
        th = grid.angles(rs.root_coords(a))
        out *= 2j * np.sin(th / 2.0)
    return out


def measure_values(spec: CFunctionSpec, grid: QuadratureGrid) -> np.ndarray:
    """Delta(xi) |delta(xi)|^2 on the grid."""
    d = delta_values(grid.rs, grid)
    return weight_function_values(spec, grid) * (d.real**2 + d.imag**2)


class QuadratureError(RuntimeError):
    pass


def bandwidth_bound(rs: RootSystem, supports) -> int:
    """Max |<mu, beta_j>| over products of terms drawn from the supports."""
    total = 0
    for sup in supports:
        if not sup:
            continue
        total += max(max(abs(c) for c in mu) for mu in sup)
    return total


def inner_product(f: LaurentPoly, g: LaurentPoly, spec: CFunctionSpec,
                  grid: QuadratureGrid | None = None, tol: float = 1e-10,
                  max_m: int = 4096) -> complex:
    """(f, g) with respect to the weight Delta |delta|^2, alcove-normalized.

    Equals the cell average of f conj(g) Delta |delta|^2 divided by |W|.
    Without an explicit grid the subdivision doubles until two successive
    values agree within tol (exact at the first step for unit weights).
    """
    rs = f.rs
    if grid is not None:
        return _ip_on_grid(f, g, spec, grid)
    dsup = weyl_denominator(rs).support()
    band = bandwidth_bound(rs, [f.support(), g.support(), dsup, dsup])
    m = 2 * band + 2
    if spec.is_unit:
        return _ip_on_grid(f, g, spec, QuadratureGrid(rs, m))
    prev = _ip_on_grid(f, g, spec, QuadratureGrid(rs, m))
    while m <= max_m:
        m *= 2
        cur = _ip_on_grid(f, g, spec, QuadratureGrid(rs, m))
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"inner product did not stabilize below M={max_m}")


def _ip_on_grid(f, g, spec, grid) -> complex:
    w = measure_values(spec, grid)
    vals = f.eval_grid(grid) * np.conjugate(g.eval_grid(grid)) * w
    return complex(np.mean(vals)) / grid.rs.weyl_order()


def gram_matrix(polys, spec: CFunctionSpec, grid: QuadratureGrid) -> np.ndarray:
    """Gram matrix of a family of Laurent polynomials on a fixed grid."""
    rs = polys[0].rs
    w = measure_values(spec, grid) / (grid.size * rs.weyl_order())
    E = np.column_stack([p.eval_grid(grid) for p in polys])
    return (E * w[:, None]).T @ E.conj()
