"""Orthonormal polynomials on the alcove and their closed-form data.

The primary construction is Gram-Schmidt on the monomial symmetric basis,
ordered by a linear extension of the dominance order, with inner products
from torus quadrature.  For the q-Pochhammer weights the orthonormalized
polynomials admit closed-form norm constants; those are implemented here
together with residual checks for the classical identities they satisfy
(specialization, symmetry, difference equation, recurrence).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .harmonic import (LaurentPoly, QuadratureGrid, QuadratureError,
                       bandwidth_bound, gram_matrix, monomial_symmetric,
                       weyl_denominator, laurent_divide)
from .qfun import (CFunctionSpec, cfun_taylor, koornwinder_spec,
                   macdonald_spec, qpochhammer_inf)
from .rootsys import RootSystem, coroot, dot


# ---------------------------------------------------------------------------
# parameter sets


class ParameterError(ValueError):
    pass


def _fvec(v) -> np.ndarray:
    return np.array([float(x) for x in v])


@dataclass(frozen=True)
class MacdonaldParams:
    """Deformation data for a reduced system: g per root length and q = e^{-s}."""

    rs: RootSystem
    q: float
    g_by_len2: tuple

    @classmethod
    def create(cls, rs, g, q):
        if rs.label.startswith("BC"):
            raise ParameterError("MacdonaldParams needs a reduced root system")
        if not 0 < q < 1:
            raise ParameterError(f"q must be in (0,1), got {q}")
        lens = sorted({float(dot(a, a)) for a in rs.positive_roots})
        gmap = dict(g) if isinstance(g, dict) else {l: float(g) for l in lens}
        if any(gmap[l] <= 0 for l in lens):
            raise ParameterError("all coupling parameters g must be positive")
        return cls(rs, float(q), tuple(sorted(gmap.items())))

    @property
    def s(self) -> float:
        return -math.log(self.q)

    def g_of_root(self, alpha) -> float:
        return dict(self.g_by_len2)[float(dot(alpha, alpha))]

    def cspec(self) -> CFunctionSpec:
        return macdonald_spec(self.rs, dict(self.g_by_len2), self.q)

    def rho_g(self) -> np.ndarray:
        out = np.zeros(self.rs.dim)
        for a in self.rs.positive_roots:
            out += 0.5 * self.g_of_root(a) * _fvec(a)
        return out

    def rho_g_vee(self) -> np.ndarray:
        out = np.zeros(self.rs.dim)
        for a in self.rs.positive_roots:
            out += 0.5 * self.g_of_root(a) * _fvec(coroot(a))
        return out

    def _cpm_factors(self, x: np.ndarray):
        for a in self.rs.positive_roots:
            yield self.g_of_root(a), float(np.dot(x, _fvec(coroot(a))))

    def cplus(self, x: np.ndarray) -> float:
        out = 1.0
        for g, xa in self._cpm_factors(x):
            out *= _cplus1(g, xa, self.q)
        return out

    def cminus(self, x: np.ndarray) -> float:
        out = 1.0
        for g, xa in self._cpm_factors(x):
            out *= _cminus1(g, xa, self.q)
        return out

    def dual(self) -> "MacdonaldParams":
        """Parameters on the dual system; each orbit keeps its coupling."""
        rsd = self.rs.dual()
        gmap = {}
        for a in self.rs.positive_roots:
            gmap[float(dot(coroot(a), coroot(a)))] = self.g_of_root(a)
        return MacdonaldParams.create(rsd, gmap, self.q)


def _cplus1(g, x, q):
    if x <= 0:
        raise ParameterError(f"c^+ argument must be positive, got {x}")
    return q ** (g * x / 2) * \
        float(qpochhammer_inf(q ** (g + x), q).real) / \
        float(qpochhammer_inf(q ** x, q).real)


def _cminus1(g, x, q):
    den = float(qpochhammer_inf(q ** (1 - g + x), q).real)
    if den == 0.0:
        raise ParameterError(f"pole of c^- at argument {x} (g={g})")
    return q ** (g * x / 2) * float(qpochhammer_inf(q ** (1 + x), q).real) / den


@dataclass(frozen=True)
class KoornwinderParams:
    """Five-parameter data of the nonreduced case.

    ghat, ghat0..ghat3 sit on the spectral (c-function) side; the dual
    parameters g, g0..g3 enter the lattice-side constants via the linear
    relations of the duplication-type involution.
    """

    rs: RootSystem
    q: float
    ghat: float
    gh: tuple  # (ghat0, ghat1, ghat2, ghat3)

    @classmethod
    def create(cls, rs, ghat, gh0123, q):
        if not rs.label.startswith("BC"):
            raise ParameterError("KoornwinderParams needs a BC_N root system")
        if not 0 < q < 1:
            raise ParameterError(f"q must be in (0,1), got {q}")
        gh = tuple(float(x) for x in gh0123)
        if ghat <= 0 or min(gh) <= 0:
            raise ParameterError("all hat parameters must be positive")
        return cls(rs, float(q), float(ghat), gh)

    @property
    def s(self) -> float:
        return -math.log(self.q)

    @property
    def g(self) -> float:
        return self.ghat

    @property
    def gdual(self) -> tuple:
        h0, h1, h2, h3 = self.gh
        return (0.5 * (h0 + h1 + h2 + h3), 0.5 * (h0 + h1 - h2 - h3),
                0.5 * (h0 - h1 + h2 - h3), 0.5 * (h0 - h1 - h2 + h3))

    def cspec(self) -> CFunctionSpec:
        return koornwinder_spec(self.rs, self.ghat, self.gh, self.q)

    def _short_long(self):
        roots = self.rs.positive_roots_1
        lens = sorted({float(dot(a, a)) for a in roots})
        short = [a for a in roots if float(dot(a, a)) == lens[0]]
        long_ = [a for a in roots if float(dot(a, a)) != lens[0]]
        return short, long_

    def rho_g(self) -> np.ndarray:
        short, long_ = self._short_long()
        g0 = self.gdual[0]
        out = np.zeros(self.rs.dim)
        for a in long_:
            out += 0.5 * self.g * _fvec(a)
        for a in short:
            out += g0 * _fvec(a)
        return out

    def rho_g_vee(self) -> np.ndarray:
        short, long_ = self._short_long()
        out = np.zeros(self.rs.dim)
        for a in long_:
            out += 0.5 * self.ghat * _fvec(a)
        for a in short:
            out += self.gh[0] * _fvec(a)
        return out

    def cplus(self, x: np.ndarray) -> float:
        short, long_ = self._short_long()
        q = self.q
        g0, g1, g2, g3 = self.gdual
        out = 1.0
        for a in long_:
            out *= _cplus1(self.g, float(np.dot(x, _fvec(a))), q)
        for a in short:
            xa = float(np.dot(x, _fvec(a)))
            if xa <= 0:
                raise ParameterError(f"c^+ argument must be positive, got {xa}")
            num = float(qpochhammer_inf(q ** (g0 + xa), q).real)
            num *= float(qpochhammer_inf(-(q ** (g1 + xa)), q).real)
            num *= float(qpochhammer_inf(q ** (g2 + 0.5 + xa), q).real)
            num *= float(qpochhammer_inf(-(q ** (g3 + 0.5 + xa)), q).real)
            out *= q ** ((g0 + g1 + g2 + g3) * xa / 2) * num / \
                float(qpochhammer_inf(q ** (2 * xa), q).real)
        return out

    def cminus(self, x: np.ndarray) -> float:
        short, long_ = self._short_long()
        q = self.q
        g0, g1, g2, g3 = self.gdual
        out = 1.0
        for a in long_:
            out *= _cminus1(self.g, float(np.dot(x, _fvec(a))), q)
        for a in short:
            xa = float(np.dot(x, _fvec(a)))
            den = float(qpochhammer_inf(q ** (1 - g0 + xa), q).real)
            den *= float(qpochhammer_inf(-(q ** (1 - g1 + xa)), q).real)
            den *= float(qpochhammer_inf(q ** (0.5 - g2 + xa), q).real)
            den *= float(qpochhammer_inf(-(q ** (0.5 - g3 + xa)), q).real)
            if den == 0.0:
                raise ParameterError(f"pole of c^- at argument {xa}")
            out *= q ** ((g0 + g1 + g2 + g3) * xa / 2) * \
                float(qpochhammer_inf(q ** (1 + 2 * xa), q).real) / den
        return out


PolyParams = MacdonaldParams | KoornwinderParams


@dataclass(frozen=True)
class NormData:
    """Closed-form norm constants: P_lam = N0^{-1/2} Delta(lam)^{1/2} c_lam p_lam."""

    delta: float
    n0: float
    c_lam: float
    cplus_shift: float
    cminus_shift: float

    @property
    def orthonormal_scale(self) -> float:
        # multiplies the monic polynomial to give the orthonormal one
        return self.delta ** 0.5 * self.c_lam / self.n0 ** 0.5


def norm_constants(params: PolyParams, lam) -> NormData:
    rs = params.rs
    rho = params.rho_g()
    x = rho + _fvec(rs.weight_vector(tuple(lam)))
    cp0, cm0 = params.cplus(rho), params.cminus(rho)
    cpl, cml = params.cplus(x), params.cminus(x)
    data = NormData(delta=(cp0 * cm0) / (cpl * cml), n0=cm0 / cp0,
                    c_lam=cpl / cp0, cplus_shift=cpl, cminus_shift=cml)
    if not (data.delta > 0 and data.n0 > 0 and math.isfinite(data.delta)):
        raise ParameterError(f"invalid norm constants at lam={lam}: {data}")
    return data


# ---------------------------------------------------------------------------
# Gram-Schmidt construction


class GramSingularError(RuntimeError):
    def __init__(self, cond):
        super().__init__(f"numerically singular Gram matrix (cond ~ {cond:.3g})")
        self.cond = cond


class OrthoPolySystem:
    """Orthonormal polynomials P_lam on a saturated, linearly ordered weight set.

    coeff[i, j] is the coefficient of m_{weights[j]} in P_{weights[i]}; the
    matrix is lower triangular with positive diagonal.
    """

    def __init__(self, rs, spec, weights, coeff, grid_m, cond):
        self.rs = rs
        self.spec = spec
        self.weights = list(weights)
        self.index = {mu: i for i, mu in enumerate(self.weights)}
        self.coeff = coeff
        self.grid_m = grid_m
        self.cond = cond
        self._monomials = [monomial_symmetric(rs, mu) for mu in self.weights]

    def __contains__(self, lam) -> bool:
        return tuple(lam) in self.index

    def leading(self, lam) -> float:
        i = self.index[tuple(lam)]
        return float(self.coeff[i, i].real)

    def poly(self, lam) -> LaurentPoly:
        i = self.index[tuple(lam)]
        out = LaurentPoly.zero(self.rs)
        for j in range(i + 1):
            c = self.coeff[i, j]
            if c != 0:
                out = out + self._monomials[j] * complex(c)
        return out

    def monic(self, lam) -> LaurentPoly:
        i = self.index[tuple(lam)]
        scale = 1.0 / self.coeff[i, i]
        out = LaurentPoly.zero(self.rs)
        for j in range(i + 1):
            c = self.coeff[i, j] * scale
            if c != 0:
                out = out + self._monomials[j] * complex(c)
        return out

    def normalized(self, params: PolyParams, lam) -> LaurentPoly:
        """The closed-norm polynomial P_lam = N0^{-1/2} Delta^{1/2} c_lam p_lam."""
        return self.monic(lam) * norm_constants(params, lam).orthonormal_scale

    def monomial_values(self, grid: QuadratureGrid) -> np.ndarray:
        return np.column_stack([m.eval_grid(grid) for m in self._monomials])

    def export_table(self) -> dict:
        """JSON-ready coefficient table keyed by weight coordinates."""
        out = {}
        for i, lam in enumerate(self.weights):
            row = {}
            for j in range(i + 1):
                c = complex(self.coeff[i, j])
                if c != 0:
                    row[",".join(map(str, self.weights[j]))] = [c.real, c.imag]
            out[",".join(map(str, lam))] = row
        return out


def _validate_order(rs, weights) -> list:
    order = list(weights)
    for i, mu in enumerate(order):
        for lam in order[i + 1:]:
            if rs.dominance_leq(lam, mu) and lam != mu:
                raise ValueError(f"order violates dominance: {lam} <= {mu}")
    return order


def gram_schmidt(rs: RootSystem, spec: CFunctionSpec, tops, order=None,
                 tol: float = 1e-11, max_m: int = 4096) -> OrthoPolySystem:
    """Orthonormalize the monomial basis below the given top weight(s).

    For the unit weight the quadrature Gram is exact (band-limited
    integrand) and the factorization is carried out in exact rational
    arithmetic, so the output coefficients are exact character data.
    """
    if tops and isinstance(tops[0], int):
        tops = [tuple(tops)]
    weights = rs.saturated_weights([tuple(t) for t in tops])
    if order is not None:
        if set(order) != set(weights):
            raise ValueError("custom order must contain exactly the saturated set")
        weights = _validate_order(rs, order)

    monos = [monomial_symmetric(rs, mu) for mu in weights]
    dsup = weyl_denominator(rs).support()
    msup = set().union(*(mo.support() for mo in monos))
    band = bandwidth_bound(rs, [msup, msup, dsup, dsup])
    m = 2 * band + 2

    if spec.is_unit:
        gram = gram_matrix(monos, spec, QuadratureGrid(rs, m))
        coeff = _exact_unit_factorization(gram, rs.weyl_order())
        return OrthoPolySystem(rs, spec, weights, coeff, m, 1.0)

    gram = gram_matrix(monos, spec, QuadratureGrid(rs, m)).real
    while True:
        m2 = 2 * m
        if m2 > max_m:
            raise QuadratureError(f"Gram matrix did not stabilize below M={max_m}")
        gram2 = gram_matrix(monos, spec, QuadratureGrid(rs, m2)).real
        if np.max(np.abs(gram2 - gram)) <= tol * (1.0 + np.max(np.abs(gram2))):
            gram = gram2
            m = m2
            break
        gram, m = gram2, m2

    gram = 0.5 * (gram + gram.T)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise GramSingularError(np.linalg.cond(gram))
    coeff = np.linalg.solve(chol, np.eye(len(weights)))
    return OrthoPolySystem(rs, spec, weights, coeff, m, float(np.linalg.cond(gram)))


def _exact_unit_factorization(gram: np.ndarray, worder: int) -> np.ndarray:
    """Exact LDL^T of the (rational) unit-weight Gram; returns D^{-1/2} L^{-1}.

    Entries of |W| * Gram are integers for the unit weight, so the float
    matrix is rationalized by rounding before factorization.
    """
    n = gram.shape[0]
    gi = [[Fraction(round(float(gram[i, j].real) * worder), worder)
           for j in range(n)] for i in range(n)]
    lower = [[Fraction(0)] * n for _ in range(n)]
    diag = [Fraction(0)] * n
    for j in range(n):
        d = gi[j][j] - sum(lower[j][k] * lower[j][k] * diag[k] for k in range(j))
        if d <= 0:
            raise GramSingularError(float("inf"))
        diag[j] = d
        lower[j][j] = Fraction(1)
        for i in range(j + 1, n):
            v = gi[i][j] - sum(lower[i][k] * lower[j][k] * diag[k] for k in range(j))
            lower[i][j] = v / d
    # invert the unit lower-triangular factor exactly
    inv = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = Fraction(1)
        for j in range(i - 1, -1, -1):
            inv[i][j] = -sum(lower[i][k] * inv[k][j] for k in range(j, i))
    out = np.zeros((n, n))
    for i in range(n):
        scale = 1.0 / math.sqrt(float(diag[i]))
        for j in range(i + 1):
            out[i, j] = float(inv[i][j]) * scale
    return out


def macdonald_monic(system: OrthoPolySystem, lam) -> LaurentPoly:
    """The monic polynomial p_lam (orthogonal to all lower monomials)."""
    return system.monic(lam)


# ---------------------------------------------------------------------------
# identity residuals (Appendix-level checks)


def specialization_residual(params: PolyParams, system: OrthoPolySystem, lam) -> float:
    """|P_lam(i s rho_g^vee) - 1| for the normalized polynomial."""
    nd = norm_constants(params, lam)
    p = system.monic(lam) * nd.c_lam
    val = p.eval_shifted(np.zeros(params.rs.dim), params.rho_g_vee(), params.s)
    return abs(val - 1.0)


def symmetry_residual(params: MacdonaldParams, system: OrthoPolySystem,
                      dual_system: OrthoPolySystem, lam, mu) -> float:
    """|P^R_lam(is(rho_g^vee + mu)) - P^{R^vee}_mu(is(rho_g + lam))|."""
    rs = params.rs
    dparams = params.dual()
    lam_vec = _fvec(rs.weight_vector(tuple(lam)))
    mu_vec = _fvec(dparams.rs.weight_vector(tuple(mu)))
    p_r = system.monic(lam) * norm_constants(params, lam).c_lam
    p_d = dual_system.monic(mu) * norm_constants(dparams, mu).c_lam
    lhs = p_r.eval_shifted(np.zeros(rs.dim), params.rho_g_vee() + mu_vec, params.s)
    rhs = p_d.eval_shifted(np.zeros(rs.dim), dparams.rho_g_vee() + lam_vec, params.s)
    return abs(lhs - rhs)


def _sin_pochhammer(z: complex, m: int, s: float) -> complex:
    out = 1.0 + 0j
    for l in range(m):
        out *= cmath.sin(0.5 * (z + 1j * s * l))
    return out


def macdonald_identity_residual(params: MacdonaldParams, pi_dual, xi) -> float:
    """Residual of the Macdonald identity for a minuscule weight of R^vee."""
    rs = params.rs
    rsd = rs.dual()
    xi = np.asarray(xi, dtype=float)
    s, q = params.s, params.q
    rho_g = params.rho_g()
    lhs = 0j
    rhs = 0.0
    for nu in rsd.weyl_orbit(tuple(pi_dual)):
        nu_vec = _fvec(rsd.weight_vector(nu))
        term = 1.0 + 0j
        for a in rs.roots:
            av = _fvec(a)
            pairing = round(float(np.dot(nu_vec, av)))
            if pairing == 1:
                g = params.g_of_root(a)
                za = float(np.dot(xi, av))
                if abs(math.sin(za / 2.0)) < 1e-12:
                    raise ValueError(f"xi lies on a singular hyperplane for root {a}")
                term *= cmath.sin(0.5 * (1j * s * g + za)) / math.sin(za / 2.0)
            elif pairing > 1:
                raise ValueError("weight is not minuscule for the dual system")
        lhs += term
        rhs += q ** float(np.dot(nu_vec, rho_g))
    return abs(lhs - rhs)


def difference_equation_residual(params: MacdonaldParams, system: OrthoPolySystem,
                                 lam, xi, pi_dual) -> float:
    """Residual of the Macdonald difference equation at one spectral point.

    pi_dual is a (quasi-)minuscule weight of the dual system; the equation
    shifts the argument of P_lam by i s nu over the dual orbit.
    """
    rs = params.rs
    rsd = rs.dual()
    xi = np.asarray(xi, dtype=float)
    s, q = params.s, params.q
    nd = norm_constants(params, lam)
    p = system.monic(lam) * nd.c_lam
    rho_g = params.rho_g()
    lam_vec = _fvec(rs.weight_vector(tuple(lam)))
    p_at = p.eval_at(xi)
    lhs = 0j
    rhs = 0j
    for nu in rsd.weyl_orbit(tuple(pi_dual)):
        nu_vec = _fvec(rsd.weight_vector(nu))
        coeffv = 1.0 + 0j
        for a in rs.roots:
            av = _fvec(a)
            m = round(float(np.dot(nu_vec, av)))
            if m > 0:
                g = params.g_of_root(a)
                za = float(np.dot(xi, av))
                num = _sin_pochhammer(1j * s * g + za, m, s)
                den = _sin_pochhammer(za + 0j, m, s)
                if abs(den) < 1e-12:
                    raise ValueError("xi lies on a singular hyperplane")
                coeffv *= num / den
        shifted = p.eval_shifted(xi, nu_vec, s)
        lhs += coeffv * (shifted - p_at)
        rhs += (q ** float(np.dot(nu_vec, lam_vec + rho_g))
                - q ** float(np.dot(nu_vec, rho_g))) * p_at
    return abs(lhs - rhs)


def hopping_coefficient(params: PolyParams, nu_vec: np.ndarray, x: np.ndarray) -> float:
    """V_nu(x): the sinh-ratio product attached to a hop by nu.

    Reduced case: product over roots with <nu, a^vee> in {1, 2}; nonreduced
    case: the four-factor short-root and single-factor long-root product of
    the Koornwinder Laplacian.
    """
    s = params.s
    if isinstance(params, KoornwinderParams):
        return _koornwinder_v(params, nu_vec, x)
    out = 1.0
    for a in params.rs.roots:
        av = _fvec(coroot(a))
        m = round(float(np.dot(nu_vec, av)))
        if m <= 0:
            continue
        g = params.g_of_root(a)
        xa = float(np.dot(x, av))
        for l in range(m):
            den = math.sinh(0.5 * s * (xa + l))
            if abs(den) < 1e-14:
                raise ZeroDivisionError(f"singular hopping denominator at {xa + l}")
            out *= math.sinh(0.5 * s * (g + xa + l)) / den
    return out


def _koornwinder_v(params: KoornwinderParams, nu_vec: np.ndarray, x: np.ndarray) -> float:
    s = params.s
    g0, g1, g2, g3 = params.gdual
    short, long_ = params._short_long()
    out = 1.0
    for a in long_:
        for sgn in (1.0, -1.0):
            av = sgn * _fvec(a)
            if round(float(np.dot(nu_vec, av))) == 1:
                xa = float(np.dot(x, av))
                den = math.sinh(0.5 * s * xa)
                if abs(den) < 1e-14:
                    raise ZeroDivisionError("singular hopping denominator")
                out *= math.sinh(0.5 * s * (params.g + xa)) / den
    for a in short:
        for sgn in (1.0, -1.0):
            av = sgn * _fvec(a)
            if round(float(np.dot(nu_vec, av))) == 1:
                xa = float(np.dot(x, av))
                d1 = math.sinh(0.5 * s * xa)
                d2 = math.cosh(0.5 * s * xa)
                d3 = math.sinh(0.5 * s * (0.5 + xa))
                d4 = math.cosh(0.5 * s * (0.5 + xa))
                if min(abs(d1), abs(d3)) < 1e-14:
                    raise ZeroDivisionError("singular hopping denominator")
                out *= (math.sinh(0.5 * s * (g0 + xa)) / d1
                        * math.cosh(0.5 * s * (g1 + xa)) / d2
                        * math.sinh(0.5 * s * (g2 + 0.5 + xa)) / d3
                        * math.cosh(0.5 * s * (g3 + 0.5 + xa)) / d4)
    return out


def functional_relation_residual(params: PolyParams, nu_vec, x_vec) -> float:
    """Defect of Delta(x+nu) V_{-nu}(rho_g+x+nu) = Delta(x) V_nu(rho_g+x).

    Delta is the closed-form norm ratio evaluated at a real vector; since it
    grows exponentially into the chamber the defect is normalized by the
    magnitude of the two sides once they exceed unit size.
    """
    rho = params.rho_g()
    x = np.asarray(x_vec, dtype=float)
    nu = np.asarray(nu_vec, dtype=float)

    def delta_at(v):
        cp0, cm0 = params.cplus(rho), params.cminus(rho)
        return (cp0 * cm0) / (params.cplus(rho + v) * params.cminus(rho + v))

    lhs = delta_at(x + nu) * hopping_coefficient(params, -nu, rho + x + nu)
    rhs = delta_at(x) * hopping_coefficient(params, nu, rho + x)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def pieri_residual(params: PolyParams, system: OrthoPolySystem, lam, xi, pi) -> float:
    """Residual of the recurrence (Pieri) relation at one spectral point."""
    rs = params.rs
    xi = np.asarray(xi, dtype=float)
    q = params.q
    lam = tuple(lam)
    rho_g = params.rho_g()
    rho_gv = params.rho_g_vee()
    x = rho_g + _fvec(rs.weight_vector(lam))

    def normalized(mu):
        return system.monic(mu) * norm_constants(params, mu).c_lam

    p_at = normalized(lam).eval_at(xi)
    lhs = 0j
    rhs = 0j
    for nu in rs.weyl_orbit(tuple(pi)):
        nu_vec = _fvec(rs.weight_vector(nu))
        lhs += (cmath.exp(1j * float(np.dot(nu_vec, xi)))
                - q ** float(np.dot(nu_vec, rho_gv))) * p_at
        lam_nu = tuple(a + b for a, b in zip(lam, nu))
        if rs.is_dominant(lam_nu):
            v = hopping_coefficient(params, nu_vec, x)
            rhs += v * (normalized(lam_nu).eval_at(xi) - p_at)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# asymptotically free polynomials


def truncated_overall_cfun(spec: CFunctionSpec, rs: RootSystem, degree: int) -> LaurentPoly:
    """Taylor truncation of C(xi) = prod c(e^{-i<a,xi>}) as a Laurent polynomial."""
    out = LaurentPoly.one(rs)
    for a in rs.positive_roots_1:
        coeffs = cfun_taylor(spec.for_root(a), degree)
        ac = rs.root_coords(a)
        terms = {tuple(-k * x for x in ac): complex(c)
                 for k, c in enumerate(coeffs) if c != 0.0}
        out = out * LaurentPoly(rs, terms)
    return out


def asymptotic_polynomial(spec: CFunctionSpec, rs: RootSystem, lam,
                          degree: int | None = None) -> LaurentPoly:
    """P_lam^infty with the overall c-function replaced by its Taylor polynomial.

    The default truncation degree is m(lam); by construction the result
    expands triangularly over the monomials with unit leading coefficient.
    """
    lam = tuple(lam)
    if degree is None:
        degree = max(0, int(rs.min_coroot_pairing(lam)))
    ctr = truncated_overall_cfun(spec, rs, degree)
    dsum = LaurentPoly.zero(rs)
    shifted = tuple(a + b for a, b in zip(rs.rho_coords, lam))
    for w in rs.weyl_group():
        cw = ctr.compose_weyl(w)
        expw = LaurentPoly.monomial(rs, rs.act_coords(w.inverse(), shifted), w.sign)
        dsum = dsum + cw * expw
    dsum = dsum.prune(1e-14)
    return laurent_divide(dsum, weyl_denominator(rs), tol=1e-13)


def taylor_truncated_asymptotic(spec: CFunctionSpec, rs: RootSystem, lam) -> LaurentPoly:
    return asymptotic_polynomial(spec, rs, lam, degree=None)
