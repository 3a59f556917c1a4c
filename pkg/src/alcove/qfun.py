"""One-variable c-functions and q-series primitives.

The admissible c-functions are analytic, zero-free and normalized to 1 at
the origin on a disc of certified radius ``rho > 1``; the three concrete
families are built from infinite q-Pochhammer products with 0 < q < 1.
Besides pointwise evaluation this module provides Taylor coefficients (via
FFT on a circle inside the certified disc) and the scalar scattering phase
s(theta) = c(e^{-i theta}) / c(e^{i theta}) together with its canonical
square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def qpochhammer_inf(z, q: float, tol: float = 1e-15):
    """(z; q)_infinity, truncated so the dropped tail is below tol.

    Accepts scalars or numpy arrays for z.  The truncation index K is chosen
    from |log prod_{n>K} (1 - z q^n)| <= |z| q^{K+1} / (1 - q).
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    zmax = float(np.max(np.abs(z))) if np.ndim(z) else abs(z)
    if zmax == 0.0:
        return np.ones_like(z) if np.ndim(z) else 1.0
    k = _truncation_index(zmax, q, tol)
    out = np.ones_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 1.0 + 0j
    zq = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    for _ in range(k + 1):
        out = out * (1.0 - zq)
        zq = zq * q
    if np.ndim(z):
        return out
    return complex(out)


def _truncation_index(zmax: float, q: float, tol: float) -> int:
    bound = tol * (1.0 - q) / max(zmax, tol)
    if bound >= 1.0:
        return 1
    return max(1, int(math.ceil(math.log(bound) / math.log(q))) + 1)


def qpochhammer(a, q: float, n: int):
    """Finite q-shifted factorial (a; q)_n."""
    out = 1.0 + 0j if isinstance(a, complex) else 1.0
    for k in range(n):
        out = out * (1 - a * q**k)
    return out


class CFunctionError(ValueError):
    pass


class CFunction:
    """Base class; concrete variants implement _eval_raw and _radius_hint."""

    tol = 1e-14

    def eval(self, z):
        zmax = float(np.max(np.abs(z))) if np.ndim(z) else abs(z)
        if zmax > self.rho * (1 + 1e-12):
            raise CFunctionError(
                f"|z| = {zmax:.6g} outside certified disc of radius {self.rho:.6g}")
        return self._eval_raw(z)

    @property
    def rho(self) -> float:
        return _certified_radius(self)

    def taylor(self, degree: int) -> np.ndarray:
        """Real Taylor coefficients a_0..a_degree by FFT on a safe circle."""
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        r0 = min(1.1, 0.5 * (1.0 + self.rho))
        n = 1 << max(8, (degree + 1).bit_length() + 2)
        zs = r0 * np.exp(2j * np.pi * np.arange(n) / n)
        vals = self._eval_raw(zs)
        coeffs = np.fft.fft(vals) / n
        a = coeffs[: degree + 1].real / r0 ** np.arange(degree + 1)
        return a


@dataclass(frozen=True)
class UnitC(CFunction):
    def _eval_raw(self, z):
        return np.ones_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 1.0 + 0j

    def _radius_hint(self) -> float:
        return 4.0

    def taylor(self, degree: int) -> np.ndarray:
        a = np.zeros(degree + 1)
        a[0] = 1.0
        return a


@dataclass(frozen=True)
class MacdonaldC(CFunction):
    """c(z) = (q^g z; q)_inf / (q z; q)_inf, with g, s > 0 and q = e^{-s}."""

    g: float = 1.0
    q: float = 0.5

    def __post_init__(self):
        if not (self.g > 0 and 0 < self.q < 1):
            raise CFunctionError(f"need g > 0 and q in (0,1): g={self.g}, q={self.q}")

    def _eval_raw(self, z):
        return qpochhammer_inf(self.q**self.g * np.asarray(z) if np.ndim(z) else self.q**self.g * z,
                               self.q, self.tol) / \
            qpochhammer_inf(self.q * np.asarray(z) if np.ndim(z) else self.q * z,
                            self.q, self.tol)

    def _radius_hint(self) -> float:
        # zeros at q^{-g-n}, poles at q^{-1-n}; take the geometric halfway point
        return min(self.q ** (-self.g / 2), self.q ** -0.5)


@dataclass(frozen=True)
class KoornwinderLongC(CFunction):
    """Long-root c-function of the nonreduced case, same shape as MacdonaldC."""

    ghat: float = 1.0
    q: float = 0.5

    def __post_init__(self):
        if not (self.ghat > 0 and 0 < self.q < 1):
            raise CFunctionError(f"need ghat > 0 and q in (0,1)")

    def _eval_raw(self, z):
        zz = np.asarray(z) if np.ndim(z) else z
        return qpochhammer_inf(self.q**self.ghat * zz, self.q, self.tol) / \
            qpochhammer_inf(self.q * zz, self.q, self.tol)

    def _radius_hint(self) -> float:
        return min(self.q ** (-self.ghat / 2), self.q ** -0.5)


@dataclass(frozen=True)
class KoornwinderShortC(CFunction):
    """Short-root c-function with four parameters:

    c(z) = (q^{g0} z, -q^{g1} z, q^{g2+1/2} z, -q^{g3+1/2} z; q)_inf / (q z^2; q)_inf.
    """

    g0: float = 0.5
    g1: float = 0.5
    g2: float = 0.5
    g3: float = 0.5
    q: float = 0.5

    def __post_init__(self):
        if not (min(self.g0, self.g1, self.g2, self.g3) > 0 and 0 < self.q < 1):
            raise CFunctionError("need g0..g3 > 0 and q in (0,1)")

    def _eval_raw(self, z):
        q = self.q
        zz = np.asarray(z) if np.ndim(z) else z
        num = qpochhammer_inf(q**self.g0 * zz, q, self.tol)
        num = num * qpochhammer_inf(-(q**self.g1) * zz, q, self.tol)
        num = num * qpochhammer_inf(q ** (self.g2 + 0.5) * zz, q, self.tol)
        num = num * qpochhammer_inf(-(q ** (self.g3 + 0.5)) * zz, q, self.tol)
        return num / qpochhammer_inf(q * zz * zz, q, self.tol)

    def _radius_hint(self) -> float:
        zero = min(self.g0, self.g1, self.g2 + 0.5, self.g3 + 0.5)
        return min(self.q ** (-zero / 2), self.q ** -0.25)


@lru_cache(maxsize=None)
def _certified_radius(c: CFunction) -> float:
    """Shrink the analytic hint until the circle-sampled modulus stays > 1e-6."""
    rho = c._radius_hint()
    theta = 2 * np.pi * np.arange(720) / 720
    for _ in range(60):
        if rho <= 1.0:
            raise CFunctionError(f"could not certify a zero-free radius > 1 for {c}")
        vals = c._eval_raw(rho * np.exp(1j * theta))
        if np.min(np.abs(vals)) > 1e-6:
            return rho
        rho = 1.0 + 0.9 * (rho - 1.0)
    raise CFunctionError(f"zero-freeness certification failed for {c}")


def cfun_eval(c: CFunction, z):
    return c.eval(z)


def cfun_taylor(c: CFunction, degree: int) -> np.ndarray:
    return c.taylor(degree)


def shat(c: CFunction, theta):
    """Scalar scattering phase s(theta) = c(e^{-i theta}) / c(e^{i theta})."""
    th = np.asarray(theta, dtype=float) if np.ndim(theta) else theta
    down = c._eval_raw(np.exp(-1j * th))
    up = c._eval_raw(np.exp(1j * th))
    return down / up


def shat_sqrt(c: CFunction, theta):
    """The square root branch u/|u| with u = c(e^{-i theta}).

    Its square equals shat(c, theta) and it is continuous in theta because
    the c-function is zero-free on the unit circle.
    """
    th = np.asarray(theta, dtype=float) if np.ndim(theta) else theta
    u = c._eval_raw(np.exp(-1j * th))
    return u / np.abs(u)


class CFunctionSpec:
    """Assignment of one c-function per root-length orbit of R1.

    Keyed by the squared length of the root; W-conjugate roots share a key.
    """

    def __init__(self, rs, by_length2: dict):
        self.rs = rs
        lengths = sorted({_len2(a) for a in rs.positive_roots_1})
        missing = [l for l in lengths if l not in by_length2]
        if missing:
            raise ValueError(f"no c-function for root length^2 in {missing}")
        self.by_length2 = dict(by_length2)

    def for_root(self, alpha) -> CFunction:
        return self.by_length2[_len2(alpha)]

    @property
    def is_unit(self) -> bool:
        return all(isinstance(c, UnitC) for c in self.by_length2.values())


def _len2(alpha) -> float:
    return float(sum(x * x for x in alpha))


def unit_spec(rs) -> CFunctionSpec:
    lengths = {_len2(a) for a in rs.positive_roots_1}
    return CFunctionSpec(rs, {l: UnitC() for l in lengths})


def macdonald_spec(rs, g, q: float) -> CFunctionSpec:
    """Macdonald c-functions on a reduced system; g scalar or {length^2: g}."""
    if rs.label.startswith("BC"):
        raise ValueError("macdonald_spec needs a reduced root system")
    lengths = sorted({_len2(a) for a in rs.positive_roots_1})
    if isinstance(g, dict):
        gmap = {float(l): g[l] for l in g}
    else:
        gmap = {l: float(g) for l in lengths}
    return CFunctionSpec(rs, {l: MacdonaldC(g=gmap[l], q=q) for l in lengths})


def koornwinder_spec(rs, ghat: float, g0123, q: float) -> CFunctionSpec:
    """Koornwinder c-functions on BC_N (hat parameters, spectral side)."""
    if not rs.label.startswith("BC"):
        raise ValueError("koornwinder_spec needs a BC_N root system")
    g0, g1, g2, g3 = (float(x) for x in g0123)
    short = KoornwinderShortC(g0=g0, g1=g1, g2=g2, g3=g3, q=q)
    lengths = sorted({_len2(a) for a in rs.positive_roots_1})
    table = {}
    for l in lengths:
        if l == min(lengths):
            table[l] = short
        else:
            table[l] = KoornwinderLongC(ghat=float(ghat), q=q)
    return CFunctionSpec(rs, table)
