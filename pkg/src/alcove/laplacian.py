"""Discrete (pseudo) Laplacians on the cone of dominant weights.

Lattice functions are finitely supported complex functions on P+.  Three
explicit actions are implemented: the free Laplacian (orbit sums with the
reflection boundary rule), the sinh-deformed hopping Laplacian attached to
a (quasi-)minuscule orbit on reduced systems, and its four-parameter BC_N
counterpart.  The generic pseudo Laplacian -- the pullback of a spectral
multiplier through the polynomial Fourier transform -- is realized by
quadrature through a wave table and cross-validates the explicit forms.
"""

from __future__ import annotations

import math

import numpy as np

from .orthopoly import (KoornwinderParams, MacdonaldParams, PolyParams,
                        hopping_coefficient, functional_relation_residual)
from .rootsys import RootSystem


class LatticeFunction:
    """Sparse complex function on the dominant cone (zero entries pruned)."""

    __slots__ = ("rs", "data")

    def __init__(self, rs: RootSystem, data: dict):
        self.rs = rs
        self.data = {tuple(k): complex(v) for k, v in data.items() if v != 0}

    @classmethod
    def indicator(cls, rs, lam):
        return cls(rs, {tuple(lam): 1.0})

    def items(self):
        return self.data.items()

    def get(self, lam) -> complex:
        return self.data.get(tuple(lam), 0j)

    def support(self):
        return set(self.data)

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.data.values()))

    def __add__(self, other):
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0j) + v
        return LatticeFunction(self.rs, out)

    def __sub__(self, other):
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0j) - v
        return LatticeFunction(self.rs, out)

    def __mul__(self, scalar):
        return LatticeFunction(self.rs, {k: v * scalar for k, v in self.data.items()})

    __rmul__ = __mul__

    def restricted(self, window) -> "LatticeFunction":
        win = {tuple(w) for w in window}
        return LatticeFunction(self.rs, {k: v for k, v in self.data.items() if k in win})

    def __repr__(self):
        return f"LatticeFunction({self.rs._name()}, {len(self.data)} sites)"


def localization_support(rs: RootSystem, lam, r: int) -> set:
    """Dominant mu with mu <= lam + w_r and mu - w0(w_r) >= lam.

    This is the largest set the pseudo Laplacian attached to the r-th
    fundamental orbit can reach from site lam under the dominance order.
    """
    lam = tuple(lam)
    omega = tuple(1 if j == r else 0 for j in range(rs.rank))
    top = tuple(a + b for a, b in zip(lam, omega))
    w0 = rs.longest_element()
    w0_omega = rs.act_coords(w0, omega)
    out = set()
    for mu in rs.saturated_weights([top]):
        shifted = tuple(a - b for a, b in zip(mu, w0_omega))
        if rs.dominance_leq(lam, shifted):
            out.add(mu)
    return out


def orbit_with_negatives(rs: RootSystem, pi) -> list:
    orbit = set(rs.weyl_orbit(tuple(pi)))
    orbit |= {tuple(-c for c in nu) for nu in orbit}
    return sorted(orbit)


# ---------------------------------------------------------------------------
# free Laplacians


def apply_free(rs: RootSystem, pi, phi: LatticeFunction) -> LatticeFunction:
    """Free Laplacian: fold the orbit sum back with the reflection rule.

    For mu outside the cone, phi_mu is read as det(w) phi_{w(rho+mu)-rho}
    when rho+mu is regular and as 0 otherwise.  On BC_N this reproduces the
    plain truncated sum over W(pi).
    """
    if rs.label.startswith("BC"):
        orbit = sorted(rs.weyl_orbit(tuple(pi)))
    else:
        orbit = orbit_with_negatives(rs, pi)
    rho = rs.rho_coords
    candidates = set()
    group = rs.weyl_group()
    for mu in phi.support():
        shifted = tuple(a + b for a, b in zip(rho, mu))
        for w in group:
            img = rs.act_coords(w, shifted)
            base = tuple(a - b for a, b in zip(img, rho))
            for nu in orbit:
                lam = tuple(a - b for a, b in zip(base, nu))
                if rs.is_dominant(lam):
                    candidates.add(lam)
    out = {}
    for lam in candidates:
        acc = 0j
        for nu in orbit:
            kappa = tuple(a + b for a, b in zip(lam, nu))
            if rs.is_dominant(kappa):
                acc += phi.get(kappa)
                continue
            shifted = tuple(a + b for a, b in zip(rho, kappa))
            dom, sign, regular = rs.dominant_representative(shifted)
            if not regular:
                continue
            back = tuple(a - b for a, b in zip(dom, rho))
            acc += sign * phi.get(back)
        if acc != 0:
            out[lam] = acc
    return LatticeFunction(rs, out)


def short_simple_perp_count(rs: RootSystem, lam) -> int:
    """Number of short simple roots orthogonal to lam (all count as short
    when the system is simply laced)."""
    lens = {float(sum(x * x for x in a)) for a in rs.simple_roots}
    shortest = min(lens)
    count = 0
    for i, a in enumerate(rs.simple_roots):
        if float(sum(x * x for x in a)) == shortest and lam[i] == 0:
            count += 1
    return count


def apply_free_closed(rs: RootSystem, pi, phi: LatticeFunction) -> LatticeFunction:
    """The boundary rule in closed form: -n_pi(lam) phi_lam plus the
    truncated orbit sum (reduced systems, pi (quasi-)minuscule)."""
    if rs.label.startswith("BC"):
        orbit = sorted(rs.weyl_orbit(tuple(pi)))
        diagonal = False
    else:
        orbit = orbit_with_negatives(rs, pi)
        pi_dom = tuple(pi)
        minuscule = pi_dom in {tuple(m) for m in rs.minuscule_weights()}
        diagonal = not minuscule
    out = {}
    sites = set(phi.support())
    for mu in phi.support():
        for nu in orbit:
            lam = tuple(a - b for a, b in zip(mu, nu))
            if rs.is_dominant(lam):
                sites.add(lam)
    for lam in sites:
        acc = 0j
        if diagonal:
            acc -= short_simple_perp_count(rs, lam) * phi.get(lam)
        for nu in orbit:
            kappa = tuple(a + b for a, b in zip(lam, nu))
            if rs.is_dominant(kappa):
                acc += phi.get(kappa)
        if acc != 0:
            out[lam] = acc
    return LatticeFunction(rs, out)


# ---------------------------------------------------------------------------
# deformed hopping Laplacians


def V_coeff(params: PolyParams, nu_vec, x_vec) -> float:
    """Hopping coefficient V_nu(x); see orthopoly.hopping_coefficient."""
    return hopping_coefficient(params, np.asarray(nu_vec, float),
                               np.asarray(x_vec, float))


def diagonal_shift(params: PolyParams, pi) -> float:
    """E_pi(rho_g^vee): the exponential orbit sum at the deformed half-sum."""
    rs = params.rs
    rho_gv = params.rho_g_vee()
    if isinstance(params, KoornwinderParams):
        orbit = sorted(rs.weyl_orbit(tuple(pi)))
    else:
        orbit = orbit_with_negatives(rs, pi)
    s = params.s
    return float(sum(math.exp(s * float(np.dot(
        np.array([float(x) for x in rs.weight_vector(nu)]), rho_gv)))
        for nu in orbit))


def _hop_pair(params, rs, lam, nu, rho_g):
    """sqrt(V_nu(rho_g+lam) V_{-nu}(rho_g+lam+nu)) with positivity check."""
    lam_vec = np.array([float(x) for x in rs.weight_vector(lam)])
    nu_vec = np.array([float(x) for x in rs.weight_vector(nu)])
    v1 = hopping_coefficient(params, nu_vec, rho_g + lam_vec)
    v2 = hopping_coefficient(params, -nu_vec, rho_g + lam_vec + nu_vec)
    if v1 < 0 or v2 < 0:
        raise ArithmeticError(
            f"negative hopping radicand at lam={lam}, nu={nu}: {v1}, {v2}")
    return math.sqrt(v1) * math.sqrt(v2)


def apply_macdonald_ruijsenaars(params: MacdonaldParams, pi,
                                phi: LatticeFunction) -> LatticeFunction:
    """Hopping action of the deformed Laplacian on a reduced system.

    L phi_lam = E_pi(rho_g^vee) phi_lam
        + sum_{nu in W(pi) u W(-pi), lam+nu in P+}
              ( sqrt(V_nu V_-nu') phi_{lam+nu} - V_nu(rho_g+lam) phi_lam ).
    """
    rs = params.rs
    if isinstance(params, KoornwinderParams):
        raise ValueError("use apply_koornwinder for BC_N")
    orbit = orbit_with_negatives(rs, pi)
    return _apply_hopping(params, rs, orbit, phi)


def apply_koornwinder(params: KoornwinderParams, phi: LatticeFunction) -> LatticeFunction:
    """Hopping action of the four-parameter BC_N Laplacian (pi = omega_1)."""
    rs = params.rs
    pi = tuple(1 if j == 0 else 0 for j in range(rs.rank))
    orbit = sorted(rs.weyl_orbit(pi))
    return _apply_hopping(params, rs, orbit, phi, pi=pi)


def _apply_hopping(params, rs, orbit, phi, pi=None):
    rho_g = params.rho_g()
    if pi is None:
        dom = next(nu for nu in orbit if rs.is_dominant(nu))
    else:
        dom = pi
    shift = diagonal_shift(params, dom)
    sites = set(phi.support())
    for mu in phi.support():
        for nu in orbit:
            lam = tuple(a - b for a, b in zip(mu, nu))
            if rs.is_dominant(lam):
                sites.add(lam)
    out = {}
    for lam in sites:
        lam_vec = np.array([float(x) for x in rs.weight_vector(lam)])
        acc = shift * phi.get(lam)
        for nu in orbit:
            kappa = tuple(a + b for a, b in zip(lam, nu))
            if not rs.is_dominant(kappa):
                continue
            nu_vec = np.array([float(x) for x in rs.weight_vector(nu)])
            acc += _hop_pair(params, rs, lam, nu, rho_g) * phi.get(kappa)
            acc -= hopping_coefficient(params, nu_vec, rho_g + lam_vec) * phi.get(lam)
        if acc != 0:
            out[lam] = acc
    return LatticeFunction(rs, out)


# ---------------------------------------------------------------------------
# pseudo Laplacians through the Fourier transform


def apply_fourier_conjugated(table, symbol, phi: LatticeFunction,
                             window=None) -> LatticeFunction:
    """F^{-1} (E . F phi) by quadrature, on a window of dominant weights.

    ``table`` is a scattering.WaveTable whose polynomial system must contain
    the support of phi and the requested window.
    """
    rs = table.rs
    missing = [lam for lam in phi.support() if lam not in table.system.index]
    if missing:
        raise KeyError(f"polynomial table does not contain {missing[:3]}")
    if window is None:
        window = table.window()
    fhat = table.forward(phi)
    evals = symbol.eval_grid(table.grid)
    from .scattering import SpectralFunction
    prod = SpectralFunction(table.grid, evals * fhat.values, "covariant")
    return table.inverse(prod, window)


def commutator_residual(table, sym_a, sym_b, phi: LatticeFunction,
                        window=None) -> float:
    """|| L_a L_b phi - L_b L_a phi || / ||phi|| through the conjugated action."""
    ab = apply_fourier_conjugated(table, sym_a,
                                  apply_fourier_conjugated(table, sym_b, phi, window),
                                  window)
    ba = apply_fourier_conjugated(table, sym_b,
                                  apply_fourier_conjugated(table, sym_a, phi, window),
                                  window)
    return (ab - ba).norm() / phi.norm()


def operator_matrix(apply_fn, rs: RootSystem, sites) -> np.ndarray:
    """Matrix of a lattice operator on an explicit list of dominant sites."""
    sites = [tuple(s) for s in sites]
    index = {s: i for i, s in enumerate(sites)}
    n = len(sites)
    mat = np.zeros((n, n), dtype=complex)
    for j, s in enumerate(sites):
        img = apply_fn(LatticeFunction.indicator(rs, s))
        for lam, v in img.items():
            i = index.get(lam)
            if i is not None:
                mat[i, j] = v
    return mat


def interior_sites(rs: RootSystem, sites, orbit) -> list:
    """Sites whose full hopping neighborhood stays inside the site list.

    Rows of a truncated operator matrix indexed outside this set see the
    truncation edge and are excluded from symmetry and spectrum tests.
    """
    siteset = {tuple(s) for s in sites}
    out = []
    for s in sites:
        ok = True
        for nu in orbit:
            kappa = tuple(a + b for a, b in zip(s, nu))
            if rs.is_dominant(kappa) and kappa not in siteset:
                ok = False
                break
        if ok:
            out.append(tuple(s))
    return out


__all__ = [
    "LatticeFunction", "localization_support", "orbit_with_negatives",
    "apply_free", "apply_free_closed", "short_simple_perp_count",
    "V_coeff", "functional_relation_residual", "diagonal_shift",
    "apply_macdonald_ruijsenaars", "apply_koornwinder",
    "apply_fourier_conjugated", "commutator_residual",
    "operator_matrix", "interior_sites",
]
