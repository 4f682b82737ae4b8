from fractions import Fraction

import numpy as np
import pytest

from spinboson.bethe import (
    bae_residuals,
    closed_form_energy,
    energy_from_roots,
    liouville_ratio,
    newton_refine_bae,
    poly_from_roots,
    recover_roots,
    solve_sector,
    state_to_dict,
)
from spinboson.linalg import jacobi_eigen
from spinboson.model import (
    ModelSpec,
    ReferenceState,
    enumerate_sectors,
    sector_from_reference,
)
from spinboson.operators import (
    build_hamiltonian_operator,
    extract_polynomials,
    poly_eval,
)
from spinboson.representation import fock_oracle, sector_matrices


def tc_model(w=1.0, gp=0.3, g=0.1):
    return ModelSpec(M=1, r=1, s=1, k=(1,), w=(w,), g_prime=gp, g=g)


def two_site_model(gp=0.7, g=0.4):
    return ModelSpec(M=0, r=1, s=2, k=(), w=(), g_prime=gp, g=g)


def tc_doublet_sector(model):
    return sector_from_reference(model, Fraction(1, 2),
                                 ReferenceState(Fraction(-1, 2), (1,)))


class TestRecoverRoots:
    def test_single_mode_doublet_closed_form(self):
        w, gp, g = 1.0, 0.45, 0.2
        model = tc_model(w, gp, g)
        sec = tc_doublet_sector(model)
        disc = np.sqrt((w - gp) ** 2 + 4 * g * g)
        upper = recover_roots(model, sec, 1)
        assert upper.energy == pytest.approx((w + disc) / 2, rel=1e-12)
        alpha_minus = ((gp - w) - disc) / (2 * g)
        np.testing.assert_allclose(upper.roots, [alpha_minus], atol=1e-10)
        # E = g'/2 - g alpha on this block
        assert upper.energy == pytest.approx(gp / 2 - g * alpha_minus.real,
                                             rel=1e-12)
        assert upper.verified and not upper.degenerate_roots

    def test_trivial_sector(self):
        model = tc_model(w=1.0, gp=0.3)
        sec = sector_from_reference(model, Fraction(1, 2),
                                    ReferenceState(Fraction(-1, 2), (0,)))
        state = recover_roots(model, sec, 0)
        assert state.roots.size == 0
        assert state.energy == pytest.approx(-0.15)
        assert state.verified

    def test_two_site_pure_coupling(self):
        g = 0.8
        model = two_site_model(gp=0.0, g=g)
        sec = sector_from_reference(model, Fraction(1, 2),
                                    ReferenceState(Fraction(-1, 2)))
        low = recover_roots(model, sec, 0)
        high = recover_roots(model, sec, 1)
        assert low.energy == pytest.approx(-g)
        assert high.energy == pytest.approx(+g)
        np.testing.assert_allclose(low.roots, [1.0], atol=1e-10)
        np.testing.assert_allclose(high.roots, [-1.0], atol=1e-10)
        # E = -g sum(alpha) for this family member
        for st in (low, high):
            assert st.energy == pytest.approx(-g * st.roots[0].real, abs=1e-10)

    def test_root_count_and_index_bounds(self):
        model = two_site_model()
        sec = sector_from_reference(model, Fraction(5, 2),
                                    ReferenceState(Fraction(-5, 2)))
        for idx in range(sec.dim):
            assert recover_roots(model, sec, idx).roots.size == sec.n_top
        with pytest.raises(ValueError):
            recover_roots(model, sec, sec.dim)

    def test_rejects_zero_coupling(self):
        model = two_site_model(g=0.0)
        sec = sector_from_reference(model, Fraction(1), ReferenceState(Fraction(-1)))
        with pytest.raises(ValueError, match="g != 0"):
            recover_roots(model, sec, 0)


class TestBaeResiduals:
    def test_single_root_is_p1(self):
        model = tc_model(1.0, 0.45, 0.2)
        sec = tc_doublet_sector(model)
        polys = extract_polynomials(build_hamiltonian_operator(model, sec))
        alpha = np.array([0.37 + 0.11j])
        res = bae_residuals(model, sec, alpha)
        np.testing.assert_allclose(res, [poly_eval(polys[1], alpha[0])],
                                   rtol=1e-12)

    def test_doublet_p1_vanishes_at_recovered_root(self):
        w, gp, g = 1.0, 0.45, 0.2
        model = tc_model(w, gp, g)
        sec = tc_doublet_sector(model)
        state = recover_roots(model, sec, 0)
        alpha = state.roots[0]
        # P_1(z) = -g z^2 + (g' - w) z + g vanishes at the root
        val = -g * alpha**2 + (gp - w) * alpha + g
        assert abs(val) < 1e-10
        assert abs(state.bae_residuals[0]) < 1e-10

    def test_two_site_triplet_residuals(self):
        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(1), ReferenceState(Fraction(-1)))
        for idx in range(sec.dim):
            state = recover_roots(model, sec, idx)
            assert state.max_residual() < 1e-8

    def test_coincident_roots_rejected(self):
        model = two_site_model()
        sec = sector_from_reference(model, Fraction(1), ReferenceState(Fraction(-1)))
        with pytest.raises(ValueError, match="oincident"):
            bae_residuals(model, sec, np.array([0.5, 0.5 + 1e-9]))

    def test_wrong_root_count_rejected(self):
        model = two_site_model()
        sec = sector_from_reference(model, Fraction(1), ReferenceState(Fraction(-1)))
        with pytest.raises(ValueError, match="expected 2 roots"):
            bae_residuals(model, sec, np.array([1.0]))


class TestEnergyFromRoots:
    def test_trivial_sector_diagonal(self):
        model = tc_model(w=1.0, gp=0.3)
        sec = sector_from_reference(model, Fraction(1, 2),
                                    ReferenceState(Fraction(-1, 2), (0,)))
        assert energy_from_roots(model, sec, np.zeros(0)) == pytest.approx(-0.15)

    def test_collective_spin_closed_form(self):
        # E = g'(j - lam) - g (lam+1)(lam+2) sum(alpha)
        gp, g = 0.9, 0.7
        model = ModelSpec(M=0, r=2, s=1, k=(), w=(), g_prime=gp, g=g)
        j = Fraction(2)
        for sec in enumerate_sectors(model, j):
            for state in solve_sector(model, sec):
                expected = (gp * (float(j) - sec.lam)
                            - g * (sec.lam + 1) * (sec.lam + 2)
                            * float(np.sum(state.roots).real))
                assert state.energy == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_rotor_offset_enters_energy(self):
        a, b, c = 1.0, 2.0, 3.0
        j = Fraction(1)
        model = ModelSpec(M=0, r=2, s=2, k=(), w=(),
                          g_prime=(2 * c - a - b) / 2, g=(a - b) / 4,
                          constant_shift=(a + b) / 2 * float(j * (j + 1)))
        sec = next(s for s in enumerate_sectors(model, j) if s.p == 1)
        assert sec.dim == 1
        state = solve_sector(model, sec)[0]
        assert state.energy == pytest.approx(a + b)

    def test_rejects_complex_root_sum(self):
        model = tc_model(1.0, 0.45, 0.2)
        sec = tc_doublet_sector(model)
        with pytest.raises(ValueError, match="imaginary"):
            energy_from_roots(model, sec, np.array([0.3 + 2.0j]))

    def test_formula_affine_in_roots_matches_ratio_everywhere(self):
        # the coefficient-ratio cross-check holds for ANY root value because
        # both sides are the same affine function of sum(alpha); it guards the
        # transcription of the closed form, not the roots themselves
        model = tc_model(1.0, 0.45, 0.2)
        sec = tc_doublet_sector(model)
        for alpha in (0.0, 1.7, -42.0):
            energy_from_roots(model, sec, np.array([alpha]))  # must not raise

    def test_printed_mode_weight_differs_for_three_modes(self):
        model = ModelSpec(M=3, r=1, s=1, k=(1, 1, 1), w=(1.0, 0.7, 1.3),
                          g_prime=0.5, g=0.8)
        sec = sector_from_reference(model, Fraction(1),
                                    ReferenceState(Fraction(-1), (1, 2, 3)))
        state = solve_sector(model, sec)[0]
        s = complex(np.sum(state.roots))
        good = closed_form_energy(model, sec, s)
        bad = closed_form_energy(model, sec, s, printed_weight=True)
        assert good == pytest.approx(state.energy, rel=1e-9)
        assert abs(bad - state.energy) > 1e-2


class TestSolveSector:
    def test_two_site_quartet_matches_diagonalization(self):
        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(3, 2),
                                    ReferenceState(Fraction(-3, 2)))
        states = solve_sector(model, sec)
        assert len(states) == 4
        eig = jacobi_eigen(sector_matrices(model, sec).H).values
        np.testing.assert_allclose([st.energy for st in states], eig, atol=1e-10)
        bethe = [energy_from_roots(model, sec, st.roots) for st in states]
        np.testing.assert_allclose(np.sort(bethe), eig, atol=1e-9)

    def test_zero_coupling_path(self):
        model = tc_model(w=0.9, gp=0.5, g=0.0)
        sec = sector_from_reference(model, Fraction(3, 2),
                                    ReferenceState(Fraction(-3, 2), (2,)))
        states = solve_sector(model, sec)
        diag = np.sort(np.diag(sector_matrices(model, sec).H))
        np.testing.assert_allclose([st.energy for st in states], diag)
        for st in states:
            assert st.verified
            assert np.all(st.roots == 0)
            if st.roots.size >= 2:
                assert st.degenerate_roots

    def test_two_mode_sector_matches_oracle(self):
        model = ModelSpec(M=2, r=1, s=1, k=(1, 1), w=(0.9, 1.3),
                          g_prime=0.4, g=0.6)
        j = Fraction(1)
        sec = sector_from_reference(model, j, ReferenceState(Fraction(-1), (2, 1)))
        states = solve_sector(model, sec)
        blocks = [b for b in fock_oracle(model, j, 4) if b.labels == sec]
        oracle = jacobi_eigen(blocks[0].H).values
        np.testing.assert_allclose([st.energy for st in states], oracle,
                                   atol=1e-9)

    def test_states_sorted_by_energy(self):
        model = two_site_model(-1.2, 0.9)
        sec = sector_from_reference(model, Fraction(2), ReferenceState(Fraction(-2)))
        energies = [st.energy for st in solve_sector(model, sec)]
        assert energies == sorted(energies)


class TestNewtonRefine:
    def test_fixed_point_of_recovered_roots(self):
        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(3, 2),
                                    ReferenceState(Fraction(-3, 2)))
        state = recover_roots(model, sec, 1)
        refined = newton_refine_bae(model, sec, state)
        assert refined.refined
        np.testing.assert_allclose(
            np.sort(refined.roots.real), np.sort(state.roots.real), atol=1e-7)
        assert refined.max_residual() <= state.max_residual() + 1e-12

    def test_perturbed_seed_returns_to_roots(self):
        import dataclasses

        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(1), ReferenceState(Fraction(-1)))
        state = recover_roots(model, sec, 0)
        perturbed = dataclasses.replace(state, roots=state.roots + 1e-3)
        refined = newton_refine_bae(model, sec, perturbed)
        assert refined.refined
        got = np.sort_complex(refined.roots)
        want = np.sort_complex(state.roots)
        np.testing.assert_allclose(got, want, atol=1e-7)

    def test_empty_state_passthrough(self):
        model = tc_model()
        sec = sector_from_reference(model, Fraction(1, 2),
                                    ReferenceState(Fraction(-1, 2), (0,)))
        state = recover_roots(model, sec, 0)
        assert newton_refine_bae(model, sec, state) is state

    def test_solve_sector_with_refinement(self):
        model = two_site_model(0.5, 1.1)
        sec = sector_from_reference(model, Fraction(2), ReferenceState(Fraction(-2)))
        states = solve_sector(model, sec, refine=True)
        assert all(st.refined for st in states if st.roots.size)
        assert max(st.max_residual() for st in states) < 1e-10


class TestLiouville:
    def test_ratio_constant_at_solution(self):
        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(2), ReferenceState(Fraction(-2)))
        polys = extract_polynomials(build_hamiltonian_operator(model, sec))
        rng = np.random.default_rng(1)
        for state in solve_sector(model, sec):
            for _ in range(5):
                z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                if np.min(np.abs(z - state.roots)) < 0.3:
                    continue
                val = liouville_ratio(polys, state.roots, z)
                assert abs(val - state.energy) <= 1e-6 * max(1, abs(state.energy))

    def test_ratio_not_constant_off_solution(self):
        model = two_site_model(0.7, 0.4)
        sec = sector_from_reference(model, Fraction(2), ReferenceState(Fraction(-2)))
        polys = extract_polynomials(build_hamiltonian_operator(model, sec))
        fake = np.array([0.3 + 0.2j, -1.1 - 0.4j])
        vals = [liouville_ratio(polys, fake, z) for z in (0.9, 2.1 + 0.3j, -1.7j)]
        assert np.std(np.abs(vals)) > 1e-3


def test_poly_from_roots_roundtrip():
    roots = np.array([1.5, -0.5 + 2j, -0.5 - 2j])
    coeffs = poly_from_roots(roots)
    assert coeffs[-1] == 1.0
    vals = poly_eval(coeffs, roots)
    assert np.max(np.abs(vals)) < 1e-12


def test_state_serialization():
    model = tc_model(1.0, 0.45, 0.2)
    sec = tc_doublet_sector(model)
    state = recover_roots(model, sec, 1)
    d = state_to_dict(state)
    assert set(d) == {"E", "roots", "residual", "verified", "degenerate_roots",
                      "refined"}
    assert d["verified"] is True
    assert len(d["roots"]) == 1 and len(d["roots"][0]) == 2
