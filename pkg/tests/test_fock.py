import itertools
import math
import random

import pytest

from cherndirac.exact import ExactScalar, ONE, I
from cherndirac.clifford import Multivector, clifford_mul, complex_generators, omega_element
from cherndirac.fock import (
    SpinorFiber, canonical_model, anticanonical_model, omega_eigendecomposition,
    alpha_iso, beta_iso, exact_eigenspace_dims,
)
from cherndirac.forms import FormFiber


def mat_mul(m1, m2):
    dim = len(m1)
    return [[sum((m1[r][k] * m2[k][c] for k in range(dim)), ExactScalar())
             for c in range(dim)] for r in range(dim)]


def mat_add(m1, m2):
    return [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m1, m2)]


def test_vacuum_annihilation_both_conventions():
    for n in (1, 2, 3):
        gens = complex_generators(n)
        vac = SpinorFiber.vacuum(n)
        for eps, epsbar in gens:
            # anticanonical vacuum killed by holomorphic vectors
            assert anticanonical_model(n).act(eps, vac).is_zero()
            # canonical vacuum killed by antiholomorphic vectors
            assert canonical_model(n).act(epsbar, vac).is_zero()


def test_representation_satisfies_generator_relations():
    for n in (1, 2, 3):
        for model in (canonical_model(n), anticanonical_model(n)):
            mats = [model.matrix(Multivector.generator(n, j)) for j in range(1, 2 * n + 1)]
            for j in range(2 * n):
                for k in range(2 * n):
                    anti = mat_add(mat_mul(mats[j], mats[k]), mat_mul(mats[k], mats[j]))
                    target = ExactScalar(-2 if j == k else 0)
                    for r in range(model.dim):
                        for c in range(model.dim):
                            expected = target if r == c else ExactScalar()
                            assert anti[r][c] == expected


def test_action_is_multiplicative():
    rng = random.Random(2)
    n = 2
    model = canonical_model(n)
    for _ in range(20):
        w1 = Multivector(n, {rng.randrange(16): ExactScalar(rng.randint(-2, 2), 1)})
        w2 = Multivector(n, {rng.randrange(16): ExactScalar(rng.randint(-2, 2), 0, 1)})
        psi = SpinorFiber(n, {rng.randrange(4): ExactScalar(1, 0, rng.randint(-2, 2))})
        assert model.act(clifford_mul(w1, w2), psi) == model.act(w1, model.act(w2, psi))


def test_anticommutator_through_representation():
    rng = random.Random(4)
    for n in (2, 3):
        gens = complex_generators(n)
        for model in (canonical_model(n), anticanonical_model(n)):
            for _ in range(10):
                j = rng.randrange(n)
                psi = SpinorFiber(n, {rng.randrange(1 << n): ExactScalar(rng.randint(1, 3), 0, 1)})
                eps, epsbar = gens[j]
                combo = clifford_mul(eps, epsbar) + clifford_mul(epsbar, eps)
                assert model.act(combo, psi) == psi.scale(ExactScalar(-2))


def test_omega_eigenstructure():
    for n in (1, 2, 3, 4):
        for conv in ("canonical", "anticanonical"):
            model = canonical_model(n) if conv == "canonical" else anticanonical_model(n)
            omega = omega_element(n)
            decomp = omega_eigendecomposition(n, conv)
            seen = 0
            for k, eigenvalue, masks in decomp:
                assert eigenvalue == I * ExactScalar(2 * k - n)
                assert len(masks) == math.comb(n, k)
                seen += len(masks)
                for mask in masks:
                    psi = SpinorFiber.basis(n, mask)
                    assert model.act(omega, psi) == psi.scale(eigenvalue)
            assert seen == 1 << n


def test_omega_eigenspaces_against_nullity_oracle():
    for n in (1, 2, 3):
        model = canonical_model(n)
        mat = model.matrix(omega_element(n))
        for k in range(n + 1):
            dim = exact_eigenspace_dims(mat, I * ExactScalar(2 * k - n))
            assert dim == math.comb(n, k)


def test_lowest_and_top_eigenspace_characterization():
    # lowest canonical eigenspace = common kernel of all antiholomorphic actions,
    # top = common kernel of all holomorphic ones
    for n in (1, 2, 3):
        model = canonical_model(n)
        gens = complex_generators(n)
        for mask in range(1 << n):
            psi = SpinorFiber.basis(n, mask)
            killed_by_bar = all(model.act(eb, psi).is_zero() for _, eb in gens)
            killed_by_hol = all(model.act(e, psi).is_zero() for e, _ in gens)
            assert killed_by_bar == (model.grade_of_mask(mask) == 0)
            assert killed_by_hol == (model.grade_of_mask(mask) == n)


def test_alpha_beta_basis_mapping_and_isometry():
    for n in (1, 2, 3):
        for masks in itertools.chain.from_iterable(
                itertools.combinations(range(1, n + 1), k) for k in range(n + 1)):
            k = len(masks)
            mu = FormFiber.basis(n, antihol=masks)
            psi = alpha_iso(mu, k)
            # alpha maps orthonormal basis forms to orthonormal basis spinors
            assert psi.hermitian_pairing(psi) == ONE
            assert canonical_model(n).grade_of_mask(next(iter(psi.terms))) == k
            nu = FormFiber.basis(n, hol=masks)
            phi = beta_iso(nu, k)
            assert phi.hermitian_pairing(phi) == ONE
            assert anticanonical_model(n).grade_of_mask(next(iter(phi.terms))) == n - k


def test_alpha_normalization_k0():
    n = 2
    psi = alpha_iso(FormFiber.one(n), 0)
    assert psi == SpinorFiber.vacuum(n)


def test_beta_output_omega_eigenvalue():
    # the image of a (k,0)-form sits in the (n-k)-th eigenspace
    n = 3
    omega = omega_element(n)
    model = anticanonical_model(n)
    for k in range(n + 1):
        for masks in itertools.combinations(range(1, n + 1), k):
            phi = beta_iso(FormFiber.basis(n, hol=masks), k)
            expected = I * ExactScalar(2 * (n - k) - n)
            assert model.act(omega, phi) == phi.scale(expected)


def test_alpha_rejects_wrong_bidegree():
    n = 2
    with pytest.raises(ValueError):
        alpha_iso(FormFiber.basis(n, hol=(1,)), 1)
    with pytest.raises(ValueError):
        beta_iso(FormFiber.basis(n, antihol=(1,)), 1)


def test_skew_adjointness_on_spinors():
    # h(c(v) s1, s2) + h(s1, c(vbar) s2) = 0 for complex grade-1 v
    for n in (1, 2, 3):
        gens = complex_generators(n)
        vecs = [g for pair in gens for g in pair]
        vecs.append(Multivector.generator(n, 1))
        for model in (canonical_model(n), anticanonical_model(n)):
            for v in vecs:
                vbar = v.conjugate_coefficients()
                for m1 in range(1 << n):
                    for m2 in range(1 << n):
                        s1, s2 = SpinorFiber.basis(n, m1), SpinorFiber.basis(n, m2)
                        lhs = model.act(v, s1).hermitian_pairing(s2)
                        rhs = s1.hermitian_pairing(model.act(vbar, s2))
                        assert (lhs + rhs).is_zero()


def test_hermitian_metric_invariant_under_real_vectors():
    # unit real vectors act as isometries
    for n in (1, 2):
        for model in (canonical_model(n), anticanonical_model(n)):
            for j in range(1, 2 * n + 1):
                e = Multivector.generator(n, j)
                for m1 in range(1 << n):
                    for m2 in range(1 << n):
                        s1, s2 = SpinorFiber.basis(n, m1), SpinorFiber.basis(n, m2)
                        lhs = model.act(e, s1).hermitian_pairing(model.act(e, s2))
                        assert lhs == s1.hermitian_pairing(s2)


def test_dual_action_identity():
    # anticanonical action = transpose of canonical action of the Clifford
    # conjugate, which is what makes "evaluate then tensor" consistent
    rng = random.Random(9)
    for n in (1, 2, 3):
        can, anti = canonical_model(n), anticanonical_model(n)
        for _ in range(12):
            mask = rng.randrange(1 << (2 * n))
            w = Multivector(n, {mask: ExactScalar(rng.randint(-2, 2), 1, rng.randint(-1, 1))})
            m_down = anti.matrix(w)
            m_up = can.matrix(w.clifford_conjugate())
            dim = 1 << n
            for r in range(dim):
                for c in range(dim):
                    assert m_down[r][c] == m_up[c][r]
