"""Wave functions, Fourier pairings, and the factorized scattering matrix.

The lattice Hilbert space is l^2 over the dominant cone; the spectral side
is the alcove with the normalized Lebesgue measure.  Spectral data lives on
a torus QuadratureGrid in one of two forms:

* ``covariant``   -- globally defined values with f(w xi) = det(w) f(xi)
                     (Fourier transforms of lattice functions are of this
                     type); products of two covariant functions are
                     W-invariant, so cell averages carry a 1/|W| factor.
* ``alcove``      -- values supported on the open alcove and extended by
                     zero (wave packets); cell averages need no 1/|W|.

Both conventions realize the same normalized alcove integral because the
period cell consists of |W| copies of the alcove.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonic import (LaurentPoly, QuadratureGrid, alternating_sum,
                       chat_values, delta_values)
from .laplacian import LatticeFunction
from .orthopoly import OrthoPolySystem
from .qfun import CFunctionSpec, shat, shat_sqrt
from .rootsys import RootSystem, WeylElement, coroot, dot


def orbit_symbol(rs: RootSystem, pi, include_negative: bool = True) -> LaurentPoly:
    """Multiplication symbol: the exponential sum over W(pi) (and W(-pi))."""
    orbit = set(rs.weyl_orbit(tuple(pi)))
    if include_negative:
        orbit |= {tuple(-c for c in nu) for nu in orbit}
    return LaurentPoly(rs, {nu: 1 for nu in orbit})


def symbol_is_real(sym: LaurentPoly) -> bool:
    for mu, c in sym.terms.items():
        neg = tuple(-x for x in mu)
        if not np.isclose(complex(sym.terms.get(neg, 0)).real, complex(c).real) \
           or abs(complex(c).imag) > 1e-14:
            return False
    return True


def symbol_gradient(sym: LaurentPoly, grid: QuadratureGrid) -> np.ndarray:
    """grad E(xi) over the grid, shape (npoints, ambient_dim)."""
    rs = sym.rs
    out = np.zeros((grid.size, rs.dim), dtype=complex)
    for mu, c in sym.terms.items():
        vec = np.array([float(x) for x in rs.weight_vector(mu)])
        out += (1j * complex(c) * np.exp(1j * grid.angles(mu)))[:, None] * vec
    return out.real if symbol_is_real(sym) else out


@dataclass
class SpectralFunction:
    """Grid-sampled element of the spectral Hilbert space."""

    grid: QuadratureGrid
    values: np.ndarray
    kind: str  # "covariant" | "alcove"

    def __post_init__(self):
        if self.kind not in ("covariant", "alcove"):
            raise ValueError(f"unknown kind {self.kind!r}")

    def restrict_alcove(self) -> "SpectralFunction":
        vals = np.where(self.grid.alcove_mask, self.values, 0.0)
        return SpectralFunction(self.grid, vals, "alcove")

    def __mul__(self, other):
        if isinstance(other, SpectralFunction):
            raise TypeError("multiply by plain arrays or scalars")
        return SpectralFunction(self.grid, self.values * other, self.kind)

    def __sub__(self, other: "SpectralFunction"):
        assert self.kind == other.kind
        return SpectralFunction(self.grid, self.values - other.values, self.kind)


def spectral_inner(f: SpectralFunction, g: SpectralFunction) -> complex:
    """(f, g) in the normalized spectral Hilbert space."""
    if f.kind != g.kind:
        raise ValueError("cannot pair covariant with alcove-supported data")
    raw = complex(np.mean(f.values * np.conjugate(g.values)))
    if f.kind == "covariant":
        return raw / f.grid.rs.weyl_order()
    return raw


def spectral_norm(f: SpectralFunction) -> float:
    return float(np.sqrt(max(spectral_inner(f, f).real, 0.0)))


class WaveTable:
    """Wave-function values of one polynomial system on one grid.

    Caches Psi_lam = Delta^{1/2} delta P_lam and the plane waves Psi0_lam,
    and implements both Fourier pairings and their inverses.
    """

    def __init__(self, system: OrthoPolySystem, grid: QuadratureGrid):
        self.system = system
        self.rs = system.rs
        self.spec: CFunctionSpec = system.spec
        self.grid = grid
        self.kernel_bandwidth = _kernel_bandwidth(system)
        if grid.M <= 2 * self.kernel_bandwidth + 1:
            raise ValueError(
                f"grid M={grid.M} cannot resolve kernel frequencies up to "
                f"{self.kernel_bandwidth}; inverse transforms would alias")
        self._chat = chat_values(self.spec, grid)
        self.sqrt_weight = 1.0 / np.abs(self._chat)
        self.delta = delta_values(self.rs, grid)
        self._mono_vals = None
        self._psi: dict = {}
        self._psi0: dict = {}

    @property
    def monomial_values(self) -> np.ndarray:
        if self._mono_vals is None:
            self._mono_vals = self.system.monomial_values(self.grid)
        return self._mono_vals

    def poly_values(self, lam) -> np.ndarray:
        i = self.system.index[tuple(lam)]
        return self.monomial_values[:, : i + 1] @ self.system.coeff[i, : i + 1]

    def psi(self, lam) -> np.ndarray:
        lam = tuple(lam)
        if lam not in self._psi:
            self._psi[lam] = self.sqrt_weight * self.delta * self.poly_values(lam)
        return self._psi[lam]

    def psi0(self, lam) -> np.ndarray:
        lam = tuple(lam)
        if lam not in self._psi0:
            shifted = tuple(a + b for a, b in zip(self.rs.rho_coords, lam))
            self._psi0[lam] = alternating_sum(self.rs, shifted).eval_grid(self.grid)
        return self._psi0[lam]

    # -- Fourier pairings ------------------------------------------------

    def forward(self, phi: LatticeFunction) -> SpectralFunction:
        vals = np.zeros(self.grid.size, dtype=complex)
        for lam, c in phi.items():
            vals += c * np.conjugate(self.psi(lam))
        return SpectralFunction(self.grid, vals, "covariant")

    def forward_free(self, phi: LatticeFunction) -> SpectralFunction:
        vals = np.zeros(self.grid.size, dtype=complex)
        for lam, c in phi.items():
            vals += c * np.conjugate(self.psi0(lam))
        return SpectralFunction(self.grid, vals, "covariant")

    def _invert(self, fhat: SpectralFunction, kernel, window) -> LatticeFunction:
        if fhat.kind == "covariant":
            scale = 1.0 / self.rs.weyl_order()
            vals = fhat.values
        else:
            scale = 1.0
            vals = np.where(self.grid.alcove_mask, fhat.values, 0.0)
        out = {}
        for lam in window:
            c = complex(np.mean(vals * kernel(lam))) * scale
            if c != 0:
                out[tuple(lam)] = c
        return LatticeFunction(self.rs, out)

    def inverse(self, fhat: SpectralFunction, window) -> LatticeFunction:
        return self._invert(fhat, self.psi, window)

    def inverse_free(self, fhat: SpectralFunction, window) -> LatticeFunction:
        return self._invert(fhat, self.psi0, window)

    def window(self, tops=None) -> list:
        """Default inversion window: every weight of the polynomial table."""
        return list(self.system.weights)


def _kernel_bandwidth(system: OrthoPolySystem) -> int:
    """Largest coordinate reached by any W-image of rho + lam over the table."""
    rs = system.rs
    rho = rs.rho_coords
    best = 0
    maximal = [lam for lam in system.weights
               if not any(lam != mu and rs.dominance_leq(lam, mu)
                          for mu in system.weights)]
    for lam in maximal:
        shifted = tuple(a + b for a, b in zip(lam, rho))
        for nu in rs.weyl_orbit(shifted):
            best = max(best, max(abs(c) for c in nu))
    return best


def plane_wave_values(rs: RootSystem, lam, grid: QuadratureGrid) -> np.ndarray:
    shifted = tuple(a + b for a, b in zip(rs.rho_coords, tuple(lam)))
    return alternating_sum(rs, shifted).eval_grid(grid)


# -- factorized scattering phases -----------------------------------------


def smatrix_factor_half(spec: CFunctionSpec, w: WeylElement,
                        grid: QuadratureGrid) -> np.ndarray:
    """S_w^{1/2}(xi): one scalar phase per root of R1+, conjugated on the
    roots sent to negatives by w."""
    rs = grid.rs
    out = np.ones(grid.size, dtype=complex)
    for a in rs.positive_roots_1:
        theta = grid.angles(rs.root_coords(a))
        h = shat_sqrt(spec.for_root(a), theta)
        wa = w.act(a)
        if dot(wa, rs._regular) > 0:
            out *= h
        else:
            out *= np.conjugate(h)
    return out


def smatrix_factor(spec: CFunctionSpec, w: WeylElement,
                   grid: QuadratureGrid) -> np.ndarray:
    h = smatrix_factor_half(spec, w, grid)
    return h * h


def smatrix_factor_direct(spec: CFunctionSpec, w: WeylElement,
                          grid: QuadratureGrid) -> np.ndarray:
    """S_w(xi) = C(w xi) / C(-w xi), computed without the root factorization."""
    rs = grid.rs
    winv = w.inverse()
    num = np.ones(grid.size, dtype=complex)
    den = np.ones(grid.size, dtype=complex)
    for a in rs.positive_roots_1:
        c = spec.for_root(a)
        b = rs.vector_coords(winv.act(a))
        z = np.exp(-1j * grid.angles(b))
        num *= c._eval_raw(z)
        den *= c._eval_raw(np.conjugate(z))
    return num / den


def asymptotic_wave_values(spec: CFunctionSpec, lam,
                           grid: QuadratureGrid) -> np.ndarray:
    """Psi^infty_lam = sum_w det(w) S_w^{1/2}(xi) e^{i<rho+lam, w xi>}."""
    rs = grid.rs
    shifted = tuple(a + b for a, b in zip(rs.rho_coords, tuple(lam)))
    out = np.zeros(grid.size, dtype=complex)
    for w in rs.weyl_group():
        half = smatrix_factor_half(spec, w, grid)
        exps = grid.eval_coords(rs.act_coords(w.inverse(), shifted))
        out += w.sign * half * exps
    return out


def convergence_report(table: WaveTable, lambdas) -> dict:
    """Norms ||Psi_lam - Psi^infty_lam|| along a ray, with a log-linear fit."""
    ms, norms = [], []
    for lam in lambdas:
        diff = SpectralFunction(
            table.grid,
            table.psi(lam) - asymptotic_wave_values(table.spec, lam, table.grid),
            "covariant")
        ms.append(float(table.rs.min_coroot_pairing(tuple(lam))))
        norms.append(spectral_norm(diff))
    slope, intercept, r2 = _linear_fit(np.array(ms), np.log(np.maximum(norms, 1e-300)))
    return {"lambdas": [tuple(l) for l in lambdas], "m": ms, "norms": norms,
            "slope": slope, "intercept": intercept, "r_squared": r2}


def _linear_fit(x: np.ndarray, y: np.ndarray):
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    pred = a @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


# -- regular sector and the scattering matrix ------------------------------


class RegularSectorError(ValueError):
    pass


class ScatteringContext:
    """Wave table plus a real symbol: regular sector, S_L, wave operators."""

    def __init__(self, table: WaveTable, symbol: LaurentPoly,
                 regularity_tol: float = 1e-10):
        if not symbol_is_real(symbol):
            raise ValueError("scattering needs a real multiplication symbol")
        self.table = table
        self.rs = table.rs
        self.grid = table.grid
        self.symbol = symbol
        self.regularity_tol = regularity_tol
        self.symbol_values = symbol.eval_grid(self.grid).real
        self.gradient = symbol_gradient(symbol, self.grid)
        self._coroot_mat = np.array(
            [[float(x) for x in coroot(a)] for a in self.rs.positive_roots]).T
        pair = self.gradient @ self._coroot_mat
        self.regular_mask = self.grid.alcove_mask & \
            (np.min(np.abs(pair), axis=1) > regularity_tol)
        self._what: dict = {}
        self._factor_cache: dict = {}
        self._simple_coroots = np.array(
            [[float(x) for x in cv] for cv in self.rs.basis_coroots])

    def sector_element(self, k: int) -> WeylElement:
        """The Weyl element taking grad E at grid point k into the open chamber."""
        if not self.regular_mask[k]:
            raise RegularSectorError(f"grid point {k} is not in the regular sector")
        v = self.gradient[k].copy()
        word = []
        for _ in range(4 * len(self.rs.positive_roots) + 4):
            pair = self._simple_coroots @ v
            i = int(np.argmin(pair))
            if pair[i] > -self.regularity_tol:
                break
            word.append(i)
            av = np.array([float(x) for x in self.rs.simple_roots[i]])
            v = v - pair[i] * av
        else:
            raise RegularSectorError("dominantization of grad E did not converge")
        return self._element_from_word(tuple(reversed(word)))

    def _element_from_word(self, word) -> WeylElement:
        elem = self._factor_cache.get(("elem", word))
        if elem is None:
            from .rootsys import _identity, _mat_mul
            mat = _identity(self.rs.dim)
            for i in word:
                mat = _mat_mul(mat, self.rs._refl_mats[i])
            elem = WeylElement(word, mat)
            self._factor_cache[("elem", word)] = elem
        return elem

    def regular_sector_element(self, k: int) -> WeylElement:
        w = self._what.get(k)
        if w is None:
            w = self.sector_element(k)
            self._what[k] = w
        return w

    def _half_factor(self, w: WeylElement) -> np.ndarray:
        key = ("half", w.matrix)
        arr = self._factor_cache.get(key)
        if arr is None:
            arr = smatrix_factor_half(self.table.spec, w, self.grid)
            self._factor_cache[key] = arr
        return arr

    def smatrix_apply(self, fhat: SpectralFunction, power: float) -> SpectralFunction:
        """(S_L^p fhat)(xi) = S_{w_xi}^p(xi) fhat(xi) on the regular sector.

        Grid points outside the regular sector are zeroed; packets must keep
        their support away from the singular set.
        """
        if power not in (1.0, -1.0, 0.5, -0.5):
            raise ValueError("power must be one of +-1, +-1/2")
        fhat = fhat.restrict_alcove() if fhat.kind == "covariant" else fhat
        vals = np.where(self.regular_mask, fhat.values, 0.0)
        out = np.zeros_like(vals)
        active = np.nonzero(vals)[0]
        by_word: dict = {}
        for k in active:
            by_word.setdefault(self.regular_sector_element(int(k)), []).append(int(k))
        for w, ks in by_word.items():
            h = self._half_factor(w)
            ks = np.array(ks)
            if power == 0.5:
                f = h[ks]
            elif power == -0.5:
                f = np.conjugate(h[ks])
            elif power == 1.0:
                f = h[ks] ** 2
            else:
                f = np.conjugate(h[ks]) ** 2
            out[ks] = f * vals[ks]
        return SpectralFunction(self.grid, out, "alcove")

    # -- wave and scattering operators ---------------------------------

    def wave_operator_apply(self, phi: LatticeFunction, sign: int,
                            window=None) -> LatticeFunction:
        """Omega_{+-} phi = F^{-1} S_L^{-+1/2} F^{(0)} phi (sign = +1 or -1)."""
        window = self.table.window() if window is None else window
        fhat = self.table.forward_free(phi).restrict_alcove()
        fhat = self.smatrix_apply(fhat, -0.5 * sign)
        return self.table.inverse(fhat, window)

    def scattering_operator_apply(self, phi: LatticeFunction,
                                  window=None) -> LatticeFunction:
        """S_L phi = (F^{(0)})^{-1} S_L F^{(0)} phi."""
        window = self.table.window() if window is None else window
        fhat = self.table.forward_free(phi).restrict_alcove()
        fhat = self.smatrix_apply(fhat, 1.0)
        return self.table.inverse_free(fhat, window)
