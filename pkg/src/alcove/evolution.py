"""Time-dependent wave packets and the finite-time scattering diagnostics.

A wave packet is a compactly supported bump on one connected component of
the regular sector.  Four evolutions are compared: the free packet, the
interacting packets (with the half-power scattering matrix inserted), the
single-chamber classical packet transported at the group velocity, and the
asymptotic packet (interacting kernel replaced by its plane-wave limit).
The diagnostics measure the telescoping norms whose decay drives the
existence of the wave operators, together with unitarity and window
leakage, and fit power-law / exponential decay rates to each.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .harmonic import LaurentPoly, QuadratureGrid
from .laplacian import LatticeFunction
from .orthopoly import OrthoPolySystem
from .scattering import (ScatteringContext, SpectralFunction, WaveTable,
                         asymptotic_wave_values, spectral_norm)


class PacketError(RuntimeError):
    pass


def smoothstep(u: np.ndarray, k: int) -> np.ndarray:
    """Polynomial step: 0 at u<=0, 1 at u>=1, C^k at both ends."""
    x = np.clip(u, 0.0, 1.0)
    acc = np.zeros_like(x)
    for j in range(k + 1):
        acc += math.comb(k + j, j) * math.comb(2 * k + 1, k - j) * (-x) ** j
    return x ** (k + 1) * acc


def bump_profile(dist: np.ndarray, radius: float, k: int,
                 plateau: float = 0.5) -> np.ndarray:
    """Plateau bump: 1 inside plateau*radius, smooth C^k taper to 0 at radius."""
    u = (radius - dist) / (radius * (1.0 - plateau))
    return smoothstep(u, k)


class WavePacket:
    """Bump test function inside one component of the regular sector.

    Carries the component's Weyl element, the inflated velocity box of
    grad E over the support, and the chamber-interior margin epsilon.
    """

    def __init__(self, ctx: ScatteringContext, center, radius: float,
                 smoothness: int = 6, velocity_margin: float = 0.1,
                 min_wall_cells: int = 2):
        self.ctx = ctx
        self.grid = ctx.grid
        self.rs = ctx.rs
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.smoothness = int(smoothness)

        dist = np.linalg.norm(self.grid.xi - self.center[None, :], axis=1)
        inside = (dist < self.radius) & ctx.regular_mask
        if not np.any(inside):
            raise PacketError("packet support contains no regular grid points")
        vals = np.zeros(self.grid.size)
        vals[inside] = bump_profile(dist[inside], self.radius, self.smoothness)
        self.values = vals
        self.support = np.nonzero(vals)[0]

        elements = {ctx.regular_sector_element(int(k)).matrix:
                    ctx.regular_sector_element(int(k)) for k in self.support}
        if len(elements) != 1:
            raise PacketError(
                "support meets several sector components: "
                f"{[w.word for w in elements.values()]}")
        self.what = next(iter(elements.values()))
        self._check_wall_margin(min_wall_cells)

        grads = ctx.gradient[self.support]
        lo = grads.min(axis=0)
        hi = grads.max(axis=0)
        pad = velocity_margin * (hi - lo + np.linalg.norm(0.5 * (hi + lo)))
        self.v_lo = lo - pad
        self.v_hi = hi + pad
        self.eps_chamber = self._chamber_margin()
        if self.eps_chamber <= 0:
            raise PacketError(
                "velocity box touches a chamber wall; shrink the packet")

    def _check_wall_margin(self, cells: int):
        ok = self.ctx.regular_mask
        m = self.grid.M
        idx = {tuple(self.grid.index[k]) for k in self.support}
        offsets = [off for off in itertools.product(range(-cells, cells + 1),
                                                    repeat=self.rs.rank)
                   if any(off)]
        flat = {tuple(row): i for i, row in enumerate(self.grid.index)}
        for pt in idx:
            for off in offsets:
                nb = tuple((a + b) % m for a, b in zip(pt, off))
                if not ok[flat[nb]]:
                    raise PacketError(
                        "packet support is within %d cells of the singular set" % cells)

    def _chamber_margin(self) -> float:
        corners = itertools.product(*zip(self.v_lo, self.v_hi))
        eps = math.inf
        for corner in corners:
            v = self.what.act(tuple(map(float, corner)))
            v = np.array([float(x) for x in v])
            for a in self.rs.positive_roots:
                av = np.array([float(x) for x in a])
                aa = float(np.dot(av, av))
                eps = min(eps, 2.0 * float(np.dot(v, av)) / aa)
        return eps

    def spectral(self) -> SpectralFunction:
        return SpectralFunction(self.grid, self.values.astype(complex), "alcove")

    def norm(self) -> float:
        return spectral_norm(self.spectral())

    def chamber_element(self, t: float):
        """The Weyl element whose chamber carries the packet at time t."""
        if t > 0:
            return self.what
        return self.rs.longest_element() * self.what


# ---------------------------------------------------------------------------
# lattice windows


def _coord_bounds(packet: WavePacket, t: float, inflation: float, margin: int):
    rs = packet.rs
    w = packet.chamber_element(t)
    center = 0.5 * (packet.v_lo + packet.v_hi)
    half = 0.5 * (packet.v_hi - packet.v_lo) * inflation
    lo, hi = center - half, center + half
    corners = itertools.product(*zip(lo, hi))
    cmin = np.full(rs.rank, math.inf)
    cmax = np.full(rs.rank, -math.inf)
    for corner in corners:
        wv = np.array([float(x) for x in w.act(tuple(map(float, corner)))])
        coords = np.array([float(np.dot(wv, np.array([float(y) for y in bv])))
                           for bv in rs.basis_coroots])
        coords = t * coords
        cmin = np.minimum(cmin, coords)
        cmax = np.maximum(cmax, coords)
    rho = np.array(rs.rho_coords)
    lo_i = np.floor(cmin - rho).astype(int) - margin
    hi_i = np.ceil(cmax - rho).astype(int) + margin
    return np.maximum(lo_i, 0), np.maximum(hi_i, 0)


def window_sites(packet: WavePacket, t: float, inflation: float = 1.5,
                 margin: int = 10) -> list:
    """Dominant weights covering t * (inflated velocity box) plus a margin."""
    lo, hi = _coord_bounds(packet, t, inflation, margin)
    rs = packet.rs
    out = []
    for c in itertools.product(*(range(int(l), int(h) + 1)
                                 for l, h in zip(lo, hi))):
        if rs.is_dominant(c):
            out.append(tuple(int(x) for x in c))
    return sorted(out)


def classical_support(packet: WavePacket, t: float) -> list:
    """{lam : rho + lam in t * w(V_clas)} with w the time-oriented element."""
    if t == 0:
        raise ValueError("classical support is defined for t != 0")
    rs = packet.rs
    w = packet.chamber_element(t)
    winv = w.inverse()
    out = []
    for lam in window_sites(packet, t, inflation=1.0, margin=2):
        vec = np.array([float(x) for x in
                        rs.weight_vector(tuple(a + b for a, b in
                                               zip(lam, rs.rho_coords)))])
        u = np.array([float(x) for x in winv.act(tuple(vec))]) / t
        if np.all(u >= packet.v_lo - 1e-12) and np.all(u <= packet.v_hi + 1e-12):
            out.append(lam)
    return sorted(out)


# ---------------------------------------------------------------------------
# the four packets


def _phase_values(packet: WavePacket, t: float) -> np.ndarray:
    return np.exp(-1j * t * packet.ctx.symbol_values) * packet.values


def free_packet(packet: WavePacket, t: float, window=None) -> LatticeFunction:
    window = window_sites(packet, t) if window is None else window
    fhat = SpectralFunction(packet.grid, _phase_values(packet, t), "alcove")
    return packet.ctx.table.inverse_free(fhat, window)


def interacting_packet(packet: WavePacket, sign: int, t: float,
                       window=None) -> LatticeFunction:
    window = window_sites(packet, t) if window is None else window
    missing = [lam for lam in window if lam not in packet.ctx.table.system.index]
    if missing:
        raise PacketError(f"polynomial table too shallow for sites {missing[:3]}")
    scattered = packet.ctx.smatrix_apply(packet.spectral(), -0.5 * sign)
    vals = scattered.values * np.exp(-1j * t * packet.ctx.symbol_values)
    fhat = SpectralFunction(packet.grid, vals, "alcove")
    return packet.ctx.table.inverse(fhat, window)


def asymptotic_packet(packet: WavePacket, sign: int, t: float,
                      window=None) -> LatticeFunction:
    window = window_sites(packet, t) if window is None else window
    scattered = packet.ctx.smatrix_apply(packet.spectral(), -0.5 * sign)
    vals = scattered.values * np.exp(-1j * t * packet.ctx.symbol_values)
    vals = np.where(packet.grid.alcove_mask, vals, 0.0)
    spec = packet.ctx.table.spec
    cache = packet.ctx._factor_cache
    out = {}
    for lam in window:
        key = ("asymp", tuple(lam))
        kern = cache.get(key)
        if kern is None:
            kern = asymptotic_wave_values(spec, lam, packet.grid)
            cache[key] = kern
        c = complex(np.mean(vals * kern))
        if c != 0:
            out[tuple(lam)] = c
    return LatticeFunction(packet.rs, out)


def classical_packet(packet: WavePacket, t: float) -> LatticeFunction:
    """Single-chamber packet supported on the classically allowed sites."""
    rs = packet.rs
    w = packet.chamber_element(t)
    winv = w.inverse()
    vals = _phase_values(packet, t)
    out = {}
    for lam in classical_support(packet, t):
        shifted = tuple(a + b for a, b in zip(lam, rs.rho_coords))
        kern = packet.grid.eval_coords(rs.act_coords(winv, shifted))
        c = w.sign * complex(np.mean(vals * kern))
        if c != 0:
            out[lam] = c
    return LatticeFunction(rs, out)


def classical_projection(phi: LatticeFunction, packet: WavePacket,
                         t: float) -> LatticeFunction:
    return phi.restricted(classical_support(packet, t))


def leakage(packet: WavePacket, phi: LatticeFunction) -> float:
    """Relative Parseval defect of a windowed packet snapshot."""
    ref = packet.norm() ** 2
    return abs(ref - phi.norm() ** 2) / ref


# ---------------------------------------------------------------------------
# diagnostic run


@dataclass
class EvolutionReport:
    times: list
    norms: dict          # series name -> list of norms
    leakages: dict       # packet name -> list of relative defects
    fits: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def fit_series(self):
        t = np.array(self.times, dtype=float)
        for name, series in self.norms.items():
            y = np.array(series, dtype=float)
            good = y > 0
            if good.sum() < 2:
                continue
            lt, ly = np.log(t[good]), np.log(y[good])
            p_slope, p_res = _fit1(lt, ly)
            e_slope, e_res = _fit1(t[good], ly)
            self.fits[name] = {
                "power_exponent": p_slope, "power_rss": p_res,
                "exp_rate": e_slope, "exp_rss": e_res,
                "preferred": "exponential" if e_res < p_res else "power",
            }

    @property
    def success(self) -> bool:
        total = self.norms.get("interacting_vs_free", [])
        dec = all(a > b for a, b in zip(total, total[1:]))
        fit = self.fits.get("interacting_vs_free", {})
        return dec and fit.get("power_exponent", 0.0) <= -1.0

    def to_json(self) -> str:
        payload = {"times": self.times, "norms": self.norms,
                   "leakages": self.leakages, "fits": self.fits,
                   "meta": self.meta, "success": self.success}
        return json.dumps(payload, indent=2, sort_keys=True)


def _fit1(x, y):
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    rss = float(np.sum((y - a @ coef) ** 2))
    return float(coef[0]), rss


def suggest_subdivision(symbol: LaurentPoly, tmax: float, kernel_bandwidth: int,
                        m0: int = 64) -> int:
    """Grid subdivision resolving both the oscillatory phase up to time tmax
    and the largest Fourier kernel frequency of the polynomial table."""
    rs = symbol.rs
    vmax = 0.0
    for j in range(rs.rank):
        vmax = max(vmax, sum(abs(complex(c)) * abs(mu[j])
                             for mu, c in symbol.terms.items()))
    m = max(m0, int(math.ceil(8.0 * tmax * vmax)), 2 * kernel_bandwidth + 4)
    return m + m % 2


def _diagnostic_snapshot(system, symbol, center, radius, sign, t, m_of_t,
                         smoothness, fmax):
    m = m_of_t(t) if m_of_t is not None else suggest_subdivision(symbol, t, fmax)
    grid = QuadratureGrid(system.rs, m)
    ctx = ScatteringContext(WaveTable(system, grid), symbol)
    packet = WavePacket(ctx, center, radius, smoothness=smoothness)
    # the moving box window truncates the packet's intrinsic band tail, so
    # mass bookkeeping runs on the full table window instead
    box = set(window_sites(packet, t))
    window = list(system.weights)
    if not box <= set(window):
        raise PacketError("polynomial table too shallow for the time ladder")
    phi_free = free_packet(packet, t, window)
    phi_int = interacting_packet(packet, sign, t, window)
    phi_as = asymptotic_packet(packet, sign, t, window)
    phi_cl = classical_packet(packet, t)
    return {
        "interacting_vs_free": (phi_int - phi_free).norm(),
        "free_vs_classical": (phi_free - phi_cl).norm(),
        "asymptotic_vs_classical": (phi_as - phi_cl).norm(),
        "interacting_vs_asymptotic": (phi_int - phi_as).norm(),
        "projected_interacting_vs_asymptotic":
            classical_projection(phi_int - phi_as, packet, t).norm(),
        "leak_free": leakage(packet, phi_free),
        "leak_interacting": leakage(packet, phi_int),
    }


def run_scattering_diagnostic(system: OrthoPolySystem, symbol: LaurentPoly,
                              center, radius: float, sign: int, times,
                              m_of_t=None, smoothness: int = 6,
                              leak_tol: float = 1e-6,
                              workers: int = 1) -> EvolutionReport:
    """Compare the four packet evolutions across a ladder of times.

    The polynomial table must already contain every window site of the
    largest time; a shallow table raises PacketError with the missing
    sites.  Snapshots at different times are independent and run on a
    thread pool when workers > 1 (results are assembled in time order, so
    the report does not depend on scheduling).
    """
    times = sorted(times)
    names = ["interacting_vs_free", "free_vs_classical",
             "asymptotic_vs_classical", "interacting_vs_asymptotic",
             "projected_interacting_vs_asymptotic"]
    meta = {"sign": sign, "center": list(map(float, center)), "radius": radius,
            "times": list(times)}
    from .scattering import _kernel_bandwidth
    fmax = _kernel_bandwidth(system)

    def job(t):
        return _diagnostic_snapshot(system, symbol, center, radius, sign, t,
                                    m_of_t, smoothness, fmax)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            snaps = list(pool.map(job, times))
    else:
        snaps = [job(t) for t in times]

    norms = {n: [s[n] for s in snaps] for n in names}
    leaks = {"free": [s["leak_free"] for s in snaps],
             "interacting": [s["leak_interacting"] for s in snaps]}
    for t, s in zip(times, snaps):
        if max(s["leak_free"], s["leak_interacting"]) > leak_tol:
            meta["invalid"] = f"window leakage above {leak_tol} at t={t}"
    report = EvolutionReport(list(times), norms, leaks, meta=meta)
    report.fit_series()
    return report
