import numpy as np
import pytest

from alcove.harmonic import (QuadratureGrid, gram_matrix, inner_product,
                             monomial_symmetric, weyl_character)
from alcove.harmonic import chat_values
from alcove.orthopoly import (KoornwinderParams,
                              MacdonaldParams, ParameterError,
                              asymptotic_polynomial,
                              difference_equation_residual,
                              functional_relation_residual, gram_schmidt,
                              hopping_coefficient,
                              macdonald_identity_residual, norm_constants,
                              pieri_residual, specialization_residual,
                              symmetry_residual)
from alcove.qfun import unit_spec
from alcove.rank1 import Rank1Params, askey_wilson
from alcove.rootsys import build_root_system


def _fvec(rs, mu):
    return np.array([float(x) for x in rs.weight_vector(mu)])


def test_parameter_validation(a2, bc1):
    with pytest.raises(ParameterError):
        MacdonaldParams.create(a2, -0.5, 0.5)
    with pytest.raises(ParameterError):
        MacdonaldParams.create(a2, 1.0, 1.5)
    with pytest.raises(ParameterError):
        MacdonaldParams.create(bc1, 1.0, 0.5)
    with pytest.raises(ParameterError):
        KoornwinderParams.create(a2, 1.0, (0.5,) * 4, 0.5)


def test_unit_gram_schmidt_is_exact_characters(b2):
    sysu = gram_schmidt(b2, unit_spec(b2), [(2, 2), (3, 0), (0, 3)])
    for lam in sysu.weights:
        chi = weyl_character(b2, lam)
        p = sysu.poly(lam)
        for mu in p.support() | chi.support():
            assert complex(p.coeff(mu)) == complex(chi.coeff(mu))


def test_p0_is_normalized_constant(a2_macdonald, a2_system):
    p0 = a2_system.poly((0, 0))
    assert set(p0.support()) == {(0, 0)}
    val = inner_product(p0, p0, a2_macdonald.cspec())
    assert abs(val - 1.0) < 1e-10


def test_orthonormality_and_triangularity(a2, a2_macdonald, a2_system):
    spec = a2_macdonald.cspec()
    polys = [a2_system.poly(lam) for lam in a2_system.weights]
    gram = gram_matrix(polys, spec, QuadratureGrid(a2, a2_system.grid_m))
    assert np.max(np.abs(gram - np.eye(len(polys)))) < 1e-9
    n = len(a2_system.weights)
    for i in range(n):
        assert a2_system.coeff[i, i] > 0
        for j in range(i):
            # dominance triangularity: incomparable entries vanish
            if not a2.dominance_leq(a2_system.weights[j], a2_system.weights[i]):
                assert abs(a2_system.coeff[i, j]) < 1e-9


def test_extension_independence(a2, a2_macdonald):
    tops = [(2, 2), (3, 0), (0, 3)]
    base = gram_schmidt(a2, a2_macdonald.cspec(), tops)
    # a different linear refinement: reverse lexicographic tie-break
    weights = a2.saturated_weights(tops)
    alt = sorted(weights, key=lambda mu: (a2._ext_key(mu), tuple(-c for c in mu)))
    other = gram_schmidt(a2, a2_macdonald.cspec(), tops, order=alt)
    for lam in weights:
        p, q = base.poly(lam), other.poly(lam)
        for mu in p.support() | q.support():
            assert abs(complex(p.coeff(mu)) - complex(q.coeff(mu))) < 1e-10


def test_invalid_order_rejected(a2, a2_macdonald):
    tops = [(1, 1)]
    weights = a2.saturated_weights(tops)
    bad = list(reversed(weights))
    with pytest.raises(ValueError):
        gram_schmidt(a2, a2_macdonald.cspec(), tops, order=bad)


def test_minimal_weight_is_monomial(a2, a2_macdonald, a2_system):
    # empty lower order ideal: nothing to orthogonalize against (entries on
    # extension-earlier but dominance-incomparable weights are pure noise)
    p = a2_system.monic((1, 0))
    m = monomial_symmetric(a2, (1, 0))
    for mu in p.support() | m.support():
        assert abs(complex(p.coeff(mu)) - complex(m.coeff(mu))) < 1e-10
    assert abs(complex(p.coeff((1, 0))) - 1.0) < 1e-12


def test_norm_constants(a2_macdonald, a2_system):
    nd0 = norm_constants(a2_macdonald, (0, 0))
    assert abs(nd0.delta - 1.0) < 1e-12 and abs(nd0.c_lam - 1.0) < 1e-12
    spec = a2_macdonald.cspec()
    for lam in [(1, 1), (2, 2), (1, 0)]:
        nd = norm_constants(a2_macdonald, lam)
        pbold = a2_system.monic(lam) * nd.c_lam
        val = inner_product(pbold, pbold, spec).real
        assert abs(val - nd.n0 / nd.delta) < 1e-8 * (nd.n0 / nd.delta)
        # Gram-Schmidt output equals the closed-norm orthonormal polynomial
        pn = a2_system.normalized(a2_macdonald, lam)
        pg = a2_system.poly(lam)
        for mu in pn.support() | pg.support():
            assert abs(complex(pn.coeff(mu)) - complex(pg.coeff(mu))) < 1e-8


def test_asymptotically_monic(a1):
    par = MacdonaldParams.create(a1, 2.0, 0.5)
    system = gram_schmidt(a1, par.cspec(), [(8,), (7,)])
    lead = [system.leading((l,)) for l in range(1, 9)]
    gaps = [abs(1.0 - x) for x in lead]
    assert all(b < a for a, b in zip(gaps, gaps[2:]))  # within parity classes
    assert gaps[-1] < 1e-2


def test_specialization(a2, b2):
    par = MacdonaldParams.create(a2, 1.3, float(np.exp(-0.7)))
    system = gram_schmidt(a2, par.cspec(), [(1, 1), (1, 0), (0, 1)])
    assert specialization_residual(par, system, (0, 0)) == 0.0
    assert specialization_residual(par, system, (1, 0)) < 1e-10
    parb = MacdonaldParams.create(b2, {1.0: 0.9, 2.0: 1.4}, 0.5)
    sysb = gram_schmidt(b2, parb.cspec(), [(1, 1), (2, 0), (0, 2)])
    assert specialization_residual(parb, sysb, (0, 1)) < 1e-10


def test_symmetry_self_dual_and_bc_pair(a2, b2):
    par = MacdonaldParams.create(a2, 1.3, float(np.exp(-0.7)))
    system = gram_schmidt(a2, par.cspec(), [(1, 1), (1, 0), (0, 1)])
    dual = par.dual()
    dual_system = gram_schmidt(dual.rs, dual.cspec(), [(1, 1), (1, 0), (0, 1)])
    for lam in [(1, 0), (0, 1), (1, 1)]:
        for mu in [(1, 0), (0, 1)]:
            assert symmetry_residual(par, system, dual_system, lam, mu) < 1e-9
    # mu = 0 reduces to the specialization formula
    assert symmetry_residual(par, system, dual_system, (1, 0), (0, 0)) < 1e-10

    parb = MacdonaldParams.create(b2, {1.0: 0.9, 2.0: 1.4}, 0.5)
    sysb = gram_schmidt(b2, parb.cspec(), [(1, 1), (2, 0), (0, 2)])
    dualb = parb.dual()
    sysd = gram_schmidt(dualb.rs, dualb.cspec(), [(1, 1), (2, 0), (0, 2)])
    for lam in [(1, 0), (0, 1)]:
        for mu in [(1, 0), (0, 1)]:
            assert symmetry_residual(parb, sysb, sysd, lam, mu) < 1e-9


def test_macdonald_identity(a1, a2):
    rng = np.random.default_rng(0)
    par2 = MacdonaldParams.create(a2, 1.3, 0.5)
    par1 = MacdonaldParams.create(a1, 1.7, 0.5)
    a3 = build_root_system("A", 3)
    par3 = MacdonaldParams.create(a3, 0.8, 0.5)
    for _ in range(5):
        assert macdonald_identity_residual(
            par1, (1,), rng.uniform(0.3, 2.0, 2)) < 1e-12
        assert macdonald_identity_residual(
            par2, (1, 0), rng.uniform(0.3, 2.0, 3)) < 1e-12
        assert macdonald_identity_residual(
            par3, (0, 1, 0), rng.uniform(0.3, 1.8, 4)) < 1e-12
    # g -> 0: both sides approach the orbit size
    tiny = MacdonaldParams.create(a2, 1e-13, 0.5)
    assert macdonald_identity_residual(tiny, (1, 0), np.array([0.7, 0.1, -0.4])) < 1e-10


def test_difference_equation(a2, a2_macdonald, a2_system):
    rng = np.random.default_rng(1)
    for lam in [(1, 1), (2, 0)]:
        for _ in range(5):
            xi = rng.uniform(0.3, 2.0, size=3)
            for pid in [(1, 0), (0, 1), (1, 1)]:
                r = difference_equation_residual(
                    a2_macdonald, a2_system, lam, xi, pid)
                assert r < 1e-8
    # lam = 0: both sides vanish identically
    xi = rng.uniform(0.3, 2.0, size=3)
    assert difference_equation_residual(
        a2_macdonald, a2_system, (0, 0), xi, (1, 0)) < 1e-13


def test_pieri(a2, a2_macdonald, a2_system):
    rng = np.random.default_rng(2)
    for _ in range(5):
        xi = rng.uniform(0.3, 2.0, size=3)
        for pi in [(1, 0), (0, 1), (1, 1)]:
            assert pieri_residual(a2_macdonald, a2_system, (1, 1), xi, pi) < 1e-8


def test_functional_relation(a2, b2):
    rng = np.random.default_rng(3)
    for rs, g in [(a2, 1.3), (b2, {1.0: 0.9, 2.0: 1.4})]:
        par = MacdonaldParams.create(rs, g, 0.5)
        pi = tuple(1 if j == 0 else 0 for j in range(rs.rank))
        for _ in range(20):
            # random point of the open dominant cone, away from walls so
            # that x and x + nu stay in the region free of c^- poles
            coords = rng.uniform(1.5, 4.0, size=rs.rank)
            x = sum(c * _fvec(rs, tuple(int(j == r) for j in range(rs.rank)))
                    for r, c in enumerate(coords))
            for nu in rs.weyl_orbit(pi):
                assert functional_relation_residual(
                    par, _fvec(rs, nu), x) < 1e-10


def test_hopping_positivity(b2):
    par = MacdonaldParams.create(b2, {1.0: 0.9, 2.0: 1.4}, 0.5)
    rho = par.rho_g()
    pi = b2.quasi_minuscule_weight()
    for lam in b2.saturated_weights([(3, 3)]):
        for nu in b2.weyl_orbit(pi):
            lam_nu = tuple(a + b for a, b in zip(lam, nu))
            if not b2.is_dominant(lam_nu):
                continue
            v1 = hopping_coefficient(par, _fvec(b2, nu), rho + _fvec(b2, lam))
            v2 = hopping_coefficient(par, -_fvec(b2, nu), rho + _fvec(b2, lam_nu))
            assert v1 > 0 and v2 > 0


def test_g_to_one_continuity(a2):
    # monic coefficients at g = 1 +- 1e-6 stay within O(1e-5) of the
    # character data (chi_lam is the monic polynomial of the unit weight)
    for g in (1.0 - 1e-6, 1.0 + 1e-6):
        par = MacdonaldParams.create(a2, g, 0.5)
        system = gram_schmidt(a2, par.cspec(), [(1, 1), (2, 0)])
        for lam in [(1, 1), (2, 0)]:
            chi = weyl_character(a2, lam)
            p = system.monic(lam)
            for mu in chi.support():
                if a2.is_dominant(mu):
                    assert abs(complex(p.coeff(mu)) -
                               complex(chi.coeff(mu))) < 1e-4


def test_monic_matches_rank1_ultraspherical(a1):
    # A1 Macdonald polynomials against the q-ultraspherical oracle
    g, q = 1.7, 0.5
    par = MacdonaldParams.create(a1, g, q)
    system = gram_schmidt(a1, par.cspec(), [(4,), (3,)])
    oracle = Rank1Params.from_a1(g, q)
    for ell in range(5):
        nd = norm_constants(par, (ell,))
        pbold = system.monic((ell,)) * nd.c_lam
        for u in (0.3, 1.1, 2.2):
            xi_vec = u * _fvec(a1, (2,))  # xi = u * alpha, so <omega, xi> = u
            mine = pbold.eval_at(xi_vec)
            assert abs(mine - askey_wilson(ell, u, oracle)) < 1e-10


def test_asymptotic_polynomial(a1, a2):
    # unit c-functions: P^infty = chi exactly
    pu = asymptotic_polynomial(unit_spec(a2), a2, (2, 1), degree=3)
    chi = weyl_character(a2, (2, 1))
    for mu in pu.support() | chi.support():
        assert abs(complex(pu.coeff(mu)) - complex(chi.coeff(mu))) < 1e-12
    par = MacdonaldParams.create(a1, 2.0, 0.5)
    spec = par.cspec()
    for ell in (4, 5, 6):
        p = asymptotic_polynomial(spec, a1, (ell,))
        assert abs(complex(p.coeff((ell,))) - 1.0) < 1e-12
        for mu in p.support():
            if a1.is_dominant(mu):
                assert a1.dominance_leq(mu, (ell,))


def test_asymptotic_pairing(a1):
    # <P^infty_lam, m_mu> ~ delta for mu <= lam, via the exact overall
    # c-function on a grid (no Taylor truncation)
    g, q = 2.0, 0.5
    par = MacdonaldParams.create(a1, g, q)
    spec = par.cspec()
    grid = QuadratureGrid(a1, 128)
    from alcove.harmonic import delta_values, weight_function_values
    import alcove.harmonic as H

    cw = {}
    for w in a1.weyl_group():
        vals = np.ones(grid.size, dtype=complex)
        winv = w.inverse()
        for a in a1.positive_roots_1:
            b = a1.vector_coords(winv.act(a))
            vals *= spec.for_root(a)._eval_raw(np.exp(-1j * grid.angles(b)))
        cw[w.matrix] = vals
    weight = weight_function_values(spec, grid)
    dconj = np.conjugate(delta_values(a1, grid))
    for ell in (4, 5, 6):
        shifted = tuple(a + b for a, b in zip(a1.rho_coords, (ell,)))
        psi_inf_w = np.zeros(grid.size, dtype=complex)
        for w in a1.weyl_group():
            exps = grid.eval_coords(a1.act_coords(w.inverse(), shifted))
            psi_inf_w += w.sign * cw[w.matrix] * exps
        for mu in range(ell % 2, ell + 1, 2):
            mvals = np.conjugate(H.monomial_symmetric(a1, (mu,)).eval_grid(grid))
            val = np.mean(psi_inf_w * mvals * weight * dconj) / a1.weyl_order()
            assert abs(val - (mu == ell)) < 1e-6


def test_chat_taylor_truncation_consistency(a2, a2_macdonald):
    # the truncated overall c-function converges to the grid evaluation
    from alcove.orthopoly import truncated_overall_cfun
    spec = a2_macdonald.cspec()
    grid = QuadratureGrid(a2, 24)
    exact = chat_values(spec, grid)
    for deg, tol in [(4, 0.2), (10, 2e-3), (18, 1e-5)]:
        approx = truncated_overall_cfun(spec, a2, deg).eval_grid(grid)
        assert np.max(np.abs(approx - exact)) < tol
