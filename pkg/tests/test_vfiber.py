import itertools
import math
import random

from cherndirac.exact import ExactScalar, ONE, I, INV_SQRT2, exact_rank
from cherndirac.clifford import (
    Multivector, clifford_mul, complex_generators, omega_element, blade_grade,
)
from cherndirac.fock import SpinorFiber, canonical_model
from cherndirac.forms import FormFiber
from cherndirac.vfiber import (
    VFiber, v_mul, tensor, sigma_iso, sigma_inv, decomposable, chi, chi_inv,
    chi_multivector, algebra_product, fock_pairing, closed_form_product,
    clpq_spans_full_algebra, prod1form_identity_canonical,
    prod1form_identity_anticanonical, mat_mul,
)


def all_subsets(n):
    return list(range(1 << n))


def subset_tuple(mask):
    return tuple(j + 1 for j in range(mask.bit_length()) if mask >> j & 1)


def random_vfiber(rng, n, nterms=4):
    terms = {}
    for _ in range(nterms):
        key = (rng.randrange(1 << n), rng.randrange(1 << n))
        terms[key] = ExactScalar(rng.randint(-3, 3), rng.randint(-1, 1),
                                 rng.randint(-3, 3), 0)
    return VFiber(n, terms)


def test_dimension_counts():
    for n in (1, 2, 3):
        keys = [(a, b) for a in all_subsets(n) for b in all_subsets(n)]
        assert len(keys) == 4 ** n
        for p in range(n + 1):
            for q in range(n + 1):
                count = sum(1 for a, b in keys
                            if bin(a).count("1") == p and bin(b).count("1") == q)
                assert count == math.comb(n, p) * math.comb(n, q)


def test_left_and_right_are_module_structures():
    rng = random.Random(21)
    for n in (1, 2):
        gens = complex_generators(n)
        vecs = [g for pair in gens for g in pair] + \
            [Multivector.generator(n, j) for j in range(1, 2 * n + 1)]
        for side in ("L", "R"):
            for _ in range(15):
                v = vecs[rng.randrange(len(vecs))]
                w = vecs[rng.randrange(len(vecs))]
                xi = random_vfiber(rng, n)
                lhs = v_mul(side, v, v_mul(side, w, xi))
                rhs = v_mul(side, clifford_mul(v, w), xi)
                assert lhs == rhs


def test_real_vector_squares_to_minus_norm_both_sides():
    rng = random.Random(22)
    n = 2
    for side in ("L", "R"):
        for _ in range(10):
            coeffs = [rng.randint(-3, 3) for _ in range(2 * n)]
            v = Multivector(n, {1 << j: ExactScalar(c) for j, c in enumerate(coeffs)})
            xi = random_vfiber(rng, n)
            norm2 = sum(c * c for c in coeffs)
            assert v_mul(side, v, v_mul(side, v, xi)) == xi.scale(ExactScalar(-norm2))


def test_left_right_graded_commutation():
    # odd elements on opposite sides anticommute; even ones commute.
    rng = random.Random(23)
    n = 2
    e1 = Multivector.generator(n, 1)
    e2 = Multivector.generator(n, 2)
    e12 = clifford_mul(e1, e2)
    for _ in range(10):
        xi = random_vfiber(rng, n)
        lhs = v_mul("L", e1, v_mul("R", e2, xi))
        rhs = v_mul("R", e2, v_mul("L", e1, xi))
        assert lhs == -rhs
        assert v_mul("L", e12, v_mul("R", e2, xi)) == v_mul("R", e2, v_mul("L", e12, xi))
        assert v_mul("L", e12, v_mul("R", e12, xi)) == v_mul("R", e12, v_mul("L", e12, xi))


def test_omega_left_action_eigenvalues():
    # on the (p,q) component the left action of the fundamental form is (n-2p)i
    for n in (1, 2, 3):
        omega = omega_element(n)
        for ma in all_subsets(n):
            for mb in all_subsets(n):
                p = bin(ma).count("1")
                xi = VFiber.basis(n, ma, mb)
                assert v_mul("L", omega, xi) == xi.scale(I * ExactScalar(n - 2 * p))


def test_skew_adjointness_on_vfiber_both_sides():
    for n in (1, 2):
        gens = complex_generators(n)
        vecs = [g for pair in gens for g in pair] + [Multivector.generator(n, 2)]
        for side in ("L", "R"):
            for v in vecs:
                vbar = v.conjugate_coefficients()
                for ka in all_subsets(n):
                    for kb in all_subsets(n):
                        x1 = VFiber.basis(n, ka, kb)
                        x2 = VFiber.basis(n, kb, ka)
                        lhs = v_mul(side, v, x1).hermitian_pairing(x2)
                        rhs = x1.hermitian_pairing(v_mul(side, vbar, x2))
                        assert (lhs + rhs).is_zero()


def test_sigma_maps_basis_to_basis_isometrically():
    for n in (1, 2, 3):
        for mi in all_subsets(n):
            for mj in all_subsets(n):
                eta = FormFiber(n, {(mi, mj): ONE})
                xi = sigma_iso(eta)
                assert xi == VFiber.basis(n, mi, mj)
                assert xi.hermitian_pairing(xi) == ONE
                assert sigma_inv(xi) == eta


def test_sigma_unit_to_vacuum_and_inverse_random():
    rng = random.Random(31)
    n = 2
    assert sigma_iso(FormFiber.one(n)) == VFiber.vacuum(n)
    for _ in range(10):
        terms = {(rng.randrange(4), rng.randrange(4)):
                 ExactScalar(rng.randint(-2, 2), 1, 0, rng.randint(-1, 1))
                 for _ in range(3)}
        eta = FormFiber(n, terms)
        assert sigma_inv(sigma_iso(eta)) == eta


def test_sigma_commutes_with_clifford_actions():
    # sigma intertwines: sqrt2 eps^j ^ . on forms <-> epsbar_j left action
    # is exercised indirectly; here check norms match for random elements
    rng = random.Random(32)
    n = 2
    for _ in range(10):
        terms = {(rng.randrange(4), rng.randrange(4)): ExactScalar(rng.randint(-2, 2), 0, 1)
                 for _ in range(3)}
        eta = FormFiber(n, terms)
        assert sigma_iso(eta).hermitian_pairing(sigma_iso(eta)) == eta.hermitian_pairing(eta)


def test_chi_on_vacuum_is_rank_one_projector():
    n = 2
    mat = chi(VFiber.vacuum(n))
    for r in range(4):
        for c in range(4):
            expected = ONE if r == c == 0 else ExactScalar()
            assert mat[r][c] == expected


def test_chi_evaluates_first_slot():
    n = 2
    xi = VFiber.basis(n, 0b01, 0b10)
    mat = chi(xi)
    # input basis 0b01 maps to output basis 0b10
    assert mat[0b10][0b01] == ONE
    assert sum(1 for r in range(4) for c in range(4) if not mat[r][c].is_zero()) == 1
    assert chi_inv(mat, n) == xi


def test_chi_bijective_and_bigradation_spans():
    for n in (1, 2, 3):
        assert clpq_spans_full_algebra(n)


def test_chi_bigradation_blocks_intersect_trivially():
    # distinct (p,q) blocks occupy disjoint matrix positions
    n = 2
    positions = {}
    for ma in all_subsets(n):
        for mb in all_subsets(n):
            key = (bin(ma).count("1"), bin(mb).count("1"))
            mat = chi(VFiber.basis(n, ma, mb))
            pos = {(r, c) for r in range(4) for c in range(4) if not mat[r][c].is_zero()}
            positions.setdefault(key, set()).update(pos)
    keys = list(positions)
    for k1, k2 in itertools.combinations(keys, 2):
        assert not positions[k1] & positions[k2]


def test_chi_multivector_roundtrip():
    rng = random.Random(41)
    for n in (1, 2):
        model = canonical_model(n)
        for _ in range(8):
            xi = random_vfiber(rng, n, nterms=3)
            w = chi_multivector(xi)
            assert model.matrix(w) == chi(xi)


def test_chi_is_an_algebra_map_to_clifford():
    # chi_multivector turns the V-product into the Clifford product
    rng = random.Random(42)
    n = 2
    for _ in range(6):
        x1, x2 = random_vfiber(rng, n, 2), random_vfiber(rng, n, 2)
        w1, w2 = chi_multivector(x1), chi_multivector(x2)
        assert chi_multivector(algebra_product(x1, x2)) == clifford_mul(w1, w2)


def test_fock_pairing_orthonormal_values():
    n = 3
    for k in range(n + 1):
        for masks in itertools.combinations(range(1, n + 1), k):
            nu = FormFiber.basis(n, hol=masks)
            mu = FormFiber.basis(n, antihol=masks)
            assert fock_pairing(nu, mu) == ExactScalar(2 ** k)
    assert fock_pairing(FormFiber.basis(n, hol=(1,)), FormFiber.basis(n, antihol=(2,))).is_zero()


def test_product_closed_form_exhaustive_n2():
    n = 2
    for mi1, mj1, mi2, mj2 in itertools.product(all_subsets(n), repeat=4):
        nu1 = FormFiber.basis(n, hol=subset_tuple(mi1))
        mu1 = FormFiber.basis(n, antihol=subset_tuple(mj1))
        nu2 = FormFiber.basis(n, hol=subset_tuple(mi2))
        mu2 = FormFiber.basis(n, antihol=subset_tuple(mj2))
        x1 = decomposable(nu1, mu1)
        x2 = decomposable(nu2, mu2)
        via_chi = algebra_product(x1, x2)
        p2 = bin(mi2).count("1")
        q1 = bin(mj1).count("1")
        direct = closed_form_product(nu1, mu1, nu2, mu2, p2, q1)
        assert via_chi == direct


def test_product_closed_form_random_n3():
    rng = random.Random(55)
    n = 3
    cases = 0
    while cases < 40:
        mi1, mj1, mi2, mj2 = (rng.randrange(8) for _ in range(4))
        nu1 = FormFiber.basis(n, hol=subset_tuple(mi1))
        mu1 = FormFiber.basis(n, antihol=subset_tuple(mj1))
        nu2 = FormFiber.basis(n, hol=subset_tuple(mi2))
        mu2 = FormFiber.basis(n, antihol=subset_tuple(mj2))
        scale = ExactScalar(rng.randint(-2, 2), rng.randint(-1, 1), rng.randint(-2, 2), 0)
        if scale.is_zero():
            continue
        x1 = decomposable(nu1.scale(scale), mu1)
        x2 = decomposable(nu2, mu2)
        via_chi = algebra_product(x1, x2)
        direct = closed_form_product(nu1.scale(scale), mu1, nu2, mu2,
                                     bin(mi2).count("1"), bin(mj1).count("1"))
        assert via_chi == direct
        cases += 1


def test_prod1form_exhaustive_n2():
    n = 2
    real_oneforms = [FormFiber.real_coframe(n, a) for a in range(1, 2 * n + 1)]
    for lam in real_oneforms:
        for mask in all_subsets(n):
            mu = FormFiber.basis(n, antihol=subset_tuple(mask))
            lhs, rhs = prod1form_identity_canonical(lam, mu)
            assert lhs == rhs
            nu = FormFiber.basis(n, hol=subset_tuple(mask))
            lhs, rhs = prod1form_identity_anticanonical(lam, nu)
            assert lhs == rhs


def test_prod1form_both_terms_nonzero_case():
    n = 1
    lam = FormFiber.real_coframe(n, 1)
    mu = FormFiber.basis(n, antihol=(1,))
    lhs, rhs = prod1form_identity_canonical(lam, mu)
    assert lhs == rhs
    assert not lhs.is_zero()
    # wedge term vanishes but the contraction survives
    assert (FormFiber(n, {(0, 1): lam.terms.get((0, 1), ExactScalar())}).wedge(mu)).is_zero()


def test_vacuum_phase_invariance():
    # a global unit phase on the vacua rescales every construction coherently
    phase = ExactScalar(0, INV_SQRT2.b, 0, INV_SQRT2.b)  # (1+i)/sqrt2
    assert (phase * phase.conjugate()) == ONE
    n = 2
    psi_vac = SpinorFiber.vacuum(n).scale(phase)
    phi_vac = SpinorFiber.vacuum(n).scale(phase)
    rng = random.Random(77)
    for _ in range(8):
        terms = {(rng.randrange(4), rng.randrange(4)): ExactScalar(rng.randint(-2, 2), 1)
                 for _ in range(3)}
        eta = FormFiber(n, terms)
        rotated = sigma_iso(eta, phi_vac, psi_vac)
        plain = sigma_iso(eta)
        assert rotated == plain.scale(phase * phase)
        assert rotated.hermitian_pairing(rotated) == plain.hermitian_pairing(plain)


def test_tensor_matches_decomposable():
    n = 2
    nu = FormFiber.basis(n, hol=(1, 2))
    mu = FormFiber.basis(n, antihol=(2,))
    xi = decomposable(nu, mu)
    assert set(xi.bidegrees()) == {(2, 1)}
    # norms: unnormalized Clifford actions scale by 2^{k/2} per block
    assert xi.hermitian_pairing(xi) == ExactScalar(2 ** 3)
