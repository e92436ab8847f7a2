"""Acceptance battery: every exit criterion at its stated tolerance.

Each test prints one pass/fail line; run with `pytest tests/test_acceptance.py -v -s`
(or plain pytest; the asserts carry the same bounds either way).
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from amproj import lalg
from amproj.angmom import clebsch_gordan, hypergeom_2f1_terminating
from amproj.bench import kernel_speedup_benchmark
from amproj.manybody import (FockSpace, fock_oracle, hf_energy, lowdin_one_body,
                             lowdin_two_body, overlap_kernel, ph_amplitude,
                             thouless_expand, two_ph_kernel)
from amproj.projector import (AxialStateVector, FockVector, ho_gamma_triangular_solve,
                              ho_projector_apply, integral_projector_matrix, lowdin_apply,
                              radial_projector_moment, radial_projector_moment_exact,
                              series_projector_matrix)
from amproj.spectrum import SpectrumRequest, compare_routes, energy_spectrum, norm_kernel
from tests.conftest import SEED
from tests.support import (TWO_SHELL_EPS_SUM, TWO_SHELL_G, random_model, random_state,
                           stretched_m2_model, two_shell_m1_model)


def report(num, ok, text):
    print(f"criterion {num:02d} {'PASS' if ok else 'FAIL'}: {text}")
    assert ok, f"criterion {num:02d}: {text}"


def _substituted(a, b, rows, cols):
    sub = np.array(a, dtype=float, copy=True)
    for r, c in zip(rows, cols):
        sub[:, c] = b[r]
    return sub


def test_criterion_01_generalized_cramer():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    cases = 0
    while cases < 200:
        n = int(rng.integers(2, 8))
        s = min(int(rng.integers(1, 4)), n)
        a = rng.uniform(-1, 1, (n, n))
        lu = lalg.lu_factor(a, allow_singular=True)
        if lu.singular:
            continue
        cases += 1
        b = rng.uniform(-1, 1, (s, n))
        det = lalg.determinant(lu)
        table = lalg.solve_columns(lu, b)
        cols = sorted(rng.choice(n, size=s, replace=False).tolist())
        got = lalg.replaced_determinant(det, table, list(range(s)), cols)
        want = lalg.brute_force_determinant(_substituted(a, b, range(s), cols))
        err = abs(got - want)
        bound = 1e-10 * abs(want) if abs(want) >= 1.0 else 1e-12
        worst = max(worst, err / bound if bound else 0.0)
        assert err <= bound
    elapsed = time.perf_counter() - start
    report(1, worst <= 1.0 and elapsed < 1.0,
           f"200 replaced-determinant cases vs cofactor oracle, worst margin "
           f"{worst:.3f} of bound, {elapsed * 1e3:.0f} ms")


def test_criterion_02_classical_cramer_reduction():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 8))
        a = rng.uniform(-1, 1, (n, n))
        lu = lalg.lu_factor(a, allow_singular=True)
        if lu.singular:
            continue
        b = rng.uniform(-1, 1, (1, n))
        det = lalg.determinant(lu)
        table = lalg.solve_columns(lu, b)
        i = int(rng.integers(0, n))
        got = det * table.values[0, i]
        want = lalg.brute_force_determinant(_substituted(a, b, [0], [i]))
        err = abs(got - want)
        bound = 1e-10 * abs(want) if abs(want) >= 1.0 else 1e-12
        assert err <= bound
        worst = max(worst, err / bound)
    report(2, worst <= 1.0,
           f"s = 1 reduction to classical Cramer, worst margin {worst:.3f} of bound")


def _kernel_models(n_models):
    rng = np.random.default_rng(SEED + 2)
    for _ in range(n_models):
        n_basis = int(rng.integers(4, 9))
        n_part = int(rng.integers(1, min(4, n_basis - 1) + 1))
        model = random_model(rng, n_basis, n_part)
        betas = rng.uniform(0.05, math.pi - 0.05, 5)
        yield model, betas


def test_criterion_03_kernel_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for model, betas in _kernel_models(50):
        phi = model.state
        for beta in betas:
            s = overlap_kernel(phi, float(beta))
            want = fock_oracle(phi, u=s.rotation)
            worst = max(worst, abs(s.overlap - want) / max(1.0, abs(want)))
            for i, j in itertools.combinations(phi.occupied, 2):
                for k, l in itertools.combinations(phi.unoccupied, 2):
                    got = two_ph_kernel(s, i, j, k, l)
                    ref = fock_oracle(phi, left=([i, j], [l, k]), u=s.rotation)
                    worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    elapsed = time.perf_counter() - start
    report(3, worst <= 1e-9 and elapsed < 30.0,
           f"overlap and 2p-2h kernels vs Fock oracle on 50 models, worst "
           f"{worst:.2e}, {elapsed:.1f} s")


def test_criterion_04_lowdin_kernels():
    worst = 0.0
    for model, betas in _kernel_models(50):
        phi = model.state
        for beta in betas:
            s = overlap_kernel(phi, float(beta))
            g1 = lowdin_one_body(s, model.t)
            w1 = fock_oracle(phi, left=model.t, u=s.rotation)
            g2 = lowdin_two_body(s, model.v)
            w2 = fock_oracle(phi, left=model.v, u=s.rotation)
            worst = max(worst, abs(g1 - w1) / max(1.0, abs(w1)),
                        abs(g2 - w2) / max(1.0, abs(w2)))
        # beta = 0 limit recovers the energy decomposition
        s0 = overlap_kernel(phi, 0.0)
        e1 = sum(model.t.matrix[i - 1, i - 1] for i in phi.occupied)
        e2 = sum(model.v.get(a, b, a, b)
                 for a, b in itertools.combinations(phi.occupied, 2))
        lim = max(abs(lowdin_one_body(s0, model.t) - e1),
                  abs(lowdin_two_body(s0, model.v) - e2),
                  abs(hf_energy(phi, model.t, model.v) - e1 - e2))
        assert lim <= 1e-12
    report(4, worst <= 1e-9,
           f"one-/two-body kernels vs Fock oracle with exact beta = 0 limits, "
           f"worst {worst:.2e}")


def test_criterion_05_thouless():
    rng = np.random.default_rng(SEED + 3)
    worst_rec = worst_coeff = 0.0
    count = 0
    for n_basis, n_part in [(4, 2), (6, 3)]:
        space = FockSpace(n_basis, n_part)
        for _ in range(10):
            phi = random_state(rng, n_basis, n_part)
            base = space.determinant_vector(phi.occupied)
            u = rng.uniform(-1, 1, (n_basis, n_basis)) + 1.5 * np.eye(n_basis)
            c0, table = thouless_expand(phi, u)
            count += 1
            xop = np.zeros((n_basis, n_basis))
            for r, k in enumerate(phi.unoccupied):
                for p, i in enumerate(phi.occupied):
                    xop[k - 1, i - 1] = table.values[r, p]
            vec = base.copy()
            term = base.copy()
            for order in range(1, min(n_part, n_basis - n_part) + 1):
                term = space.apply_one_body(term, xop) / order
                vec = vec + term
            target = space.slater_vector(u[:, [d - 1 for d in phi.occupied]])
            worst_rec = max(worst_rec, float(np.abs(c0 * vec - target).max()))
            for i, j in itertools.combinations(phi.occupied, 2):
                pi, pj = phi.occupied.index(i), phi.occupied.index(j)
                for k, l in itertools.combinations(phi.unoccupied, 2):
                    rk, rl = phi.unoccupied.index(k), phi.unoccupied.index(l)
                    x = table.values
                    want = x[rl, pi] * x[rk, pj] - x[rl, pj] * x[rk, pi]
                    got = fock_oracle(phi, left=([i, j], [k, l]), u=u) / c0
                    worst_coeff = max(worst_coeff,
                                      abs(got - want) / max(1.0, abs(want)))
    report(5, worst_rec <= 1e-9 and worst_coeff <= 1e-10 and count == 20,
           f"Thouless reconstruction on {count} transformations, worst "
           f"{worst_rec:.2e}; 2p-2h coefficients worst {worst_coeff:.2e}")


def test_criterion_06_projected_spectrum_fixture():
    model = two_shell_m1_model()
    cmp = compare_routes(SpectrumRequest(model=model, route="both"))
    res = cmp.result
    worst_norm = 0.0
    for two_j in (2, 4):
        c = clebsch_gordan(3, 1, 1, 1, two_j, 2)
        want = 2.0 * c * c / (two_j + 1)
        worst_norm = max(worst_norm, abs(res.entry(two_j).norm - want))
    worst_e = 0.0
    for two_j in (2, 4):
        want = TWO_SHELL_EPS_SUM + TWO_SHELL_G[two_j]
        e = res.entry(two_j)
        worst_e = max(worst_e, abs(e.energy_brillouin - want), abs(e.energy_lowdin - want))
    ok = (worst_norm <= 1e-9 and worst_e <= 1e-8
          and cmp.brillouin_residual_max == 0.0
          and max(cmp.deltas.values()) <= 1e-8)
    report(6, ok,
           f"M = 1 fixture: norms vs CG^2 worst {worst_norm:.2e}, energies vs "
           f"coupled oracle worst {worst_e:.2e}, stability residual "
           f"{cmp.brillouin_residual_max:.1e}, route deltas "
           f"{max(cmp.deltas.values()):.2e}")


def test_criterion_07_norm_completeness():
    worst = 0.0
    for model in (two_shell_m1_model(), stretched_m2_model()):
        norms = norm_kernel(SpectrumRequest(model=model))
        total = sum((tj + 1) / 2 * n for tj, n in norms.items())
        worst = max(worst, abs(total - 1.0))
    report(7, worst <= 1e-9,
           f"sum_J (2J+1)/2 n_J = 1 on the fixtures, worst deviation {worst:.2e}")


def test_criterion_08_oscillator_projector():
    rng = np.random.default_rng(SEED + 4)
    n_max = 12
    phi = FockVector(rng.uniform(-1, 1, n_max + 1))
    worst = 0.0
    for n in range(n_max + 1):
        once = ho_projector_apply(n, phi)
        want = np.zeros(n_max + 1)
        want[n] = phi.coefficients[n]
        worst = max(worst, float(np.abs(once.coefficients - want).max()))
        twice = ho_projector_apply(n, once)
        worst = max(worst, float(np.abs(twice.coefficients - once.coefficients).max()))
    gammas = ho_gamma_triangular_solve(0, 8).gammas
    exact = all(gammas[i] == Fraction((-1) ** i, math.factorial(i)) for i in range(9))
    report(8, worst <= 1e-12 and exact,
           f"oscillator extraction/idempotence at n_max = 12, worst {worst:.2e}; "
           f"n = 0 gammas equal (-1)^i/i! exactly: {exact}")


def test_criterion_09_lowdin_projector():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for two_m in (0, 1, 2, 3):
        two_j_max = two_m + 16  # j_max = m + 8
        nslots = (two_j_max - two_m) // 2 + 1
        phi = AxialStateVector(two_m, two_j_max, rng.uniform(-1, 1, nslots))
        total = np.zeros(nslots)
        for two_j in phi.two_j_values():
            once = lowdin_apply(two_j, two_m, phi)
            want = np.zeros(nslots)
            want[phi.slot(two_j)] = phi.coefficients[phi.slot(two_j)]
            worst = max(worst, float(np.abs(once.coefficients - want).max()))
            twice = lowdin_apply(two_j, two_m, once)
            worst = max(worst, float(np.abs(twice.coefficients - once.coefficients).max()))
            total += once.coefficients
            for two_l in phi.two_j_values():
                if two_l == two_j:
                    continue
                unit = np.zeros(nslots)
                unit[phi.slot(two_l)] = 1.0
                out = lowdin_apply(two_j, two_m, AxialStateVector(two_m, two_j_max, unit))
                worst = max(worst, float(np.abs(out.coefficients).max()))
        worst = max(worst, float(np.abs(total - phi.coefficients).max()))
    report(9, worst <= 1e-9,
           f"ladder-series extraction/idempotence/annihilation/completeness for "
           f"2m in {{0,1,2,3}} at j_max = m + 8, worst {worst:.2e}")


def test_criterion_10_hypergeometric_identities():
    worst = 0.0
    for n in range(1, 6):  # n plays j - m
        v1 = hypergeom_2f1_terminating(-n, Fraction(7, 2), Fraction(7, 2), 1)
        worst = max(worst, abs(float(v1)))
        for two_j in (n, n + 2, 2 * n + 1):
            v2 = hypergeom_2f1_terminating(-n, two_j + n + 1, two_j + 2, 1)
            worst = max(worst, abs(float(v2)))
    report(10, worst <= 1e-14,
           f"terminating series at z = 1 vanish (exact rationals), worst {worst:.1e}")


def test_criterion_11_integral_representation():
    start = time.perf_counter()
    worst_radial = 0.0
    for two_j in range(0, 9):
        for two_m in range(two_j % 2, two_j + 1, 2):
            if (two_j - two_m) // 2 > 4:
                continue
            for r in range(5):
                exact = float(radial_projector_moment_exact(two_j, two_m, r))
                quad = radial_projector_moment(two_j, two_m, r, 40)
                worst_radial = max(worst_radial, abs(quad - exact) / abs(exact))
    worst_int = 0.0
    for two_j, two_m in [(0, 0), (2, 0), (4, 0), (2, 2), (3, 1)]:
        two_j_max = two_j + 6
        mat = integral_projector_matrix(two_j, two_m, two_j_max, 40, 64)
        series = series_projector_matrix(two_j, two_m, two_j_max)
        const = mat[(two_j - two_m) // 2, (two_j - two_m) // 2]
        worst_int = max(worst_int, float(np.abs(mat / const - series).max()))
    elapsed = time.perf_counter() - start
    report(11, worst_radial <= 1e-10 and worst_int <= 1e-6 and elapsed < 60.0,
           f"radial identity worst {worst_radial:.2e}; disk integral vs series "
           f"worst {worst_int:.2e}; {elapsed:.1f} s")


def test_criterion_12_shared_factorization_speedup():
    result = kernel_speedup_benchmark(n_orbitals=20, n_particles=8, beta=0.7)
    ok = result.speedup >= 10.0 and result.max_abs_difference <= 1e-12
    report(12, ok,
           f"{result.n_kernels} kernels: shared {result.shared_seconds * 1e3:.1f} ms vs "
           f"naive {result.naive_seconds * 1e3:.1f} ms = {result.speedup:.1f}x "
           f"(values agree to {result.max_abs_difference:.1e})")
