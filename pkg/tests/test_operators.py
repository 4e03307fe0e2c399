import numpy as np
import pytest

from cherndirac.torus import TorusHermitianStructure, MetricTerm
from cherndirac.frames import build_frames
from cherndirac.connection import build_geometry
from cherndirac.sections import BundleSpec, SectionField
from cherndirac.operators import OperatorContext, relative_residual, weighted_adjoint
from cherndirac.dirac import (
    assemble_partial_cd, chern_dirac, covariant_derivative_op, curvature_op,
    ThetaTwist, bott_chern_dirac, aeppli_dirac,
)
from cherndirac.operators import RetagOp, ComposeOp
from cherndirac import formops


def make_ctx(structure, N, band):
    return OperatorContext(build_geometry(build_frames(structure, N)), band)


def flat_ctx(n=1, N=12, band=3):
    return make_ctx(TorusHermitianStructure.flat(n), N, band)


def nonkahler_ctx(N=12, band=3):
    s = TorusHermitianStructure(2, 1, [MetricTerm(0, 0, (0, 0, 1, 0), 0.05)])
    return make_ctx(s, N, band)


def bumpy_n1_ctx(N=16, band=3):
    s = TorusHermitianStructure(1, 1, [MetricTerm(0, 0, (1, 0), 0.05)])
    return make_ctx(s, N, band)


def sigma_op(ctx):
    return RetagOp(ctx, ctx.forms, ctx.vspinor, "sigma")


def test_flat_partial_cd_kills_constants():
    ctx = flat_ctx()
    xi = ctx.zeros(ctx.vspinor)
    xi.coeffs[(ctx.band,) * 2 + (0,)] = 1.0  # constant section, vacuum fiber
    for which in ("DpL", "DppL", "DpR", "DppR"):
        out = assemble_partial_cd(ctx, which).apply(xi)
        assert ctx.norm(out) < 1e-14


def test_flat_dirac_symbol_oracle():
    # on the flat torus D'L sigma(f) = sqrt2 sigma(del f) with del the
    # hand-computed Fourier symbol: del e^{2pi i x1} = sqrt2*pi*i e^... eps^1
    ctx = flat_ctx(n=1, N=12, band=3)
    B = ctx.band
    f = ctx.zeros(ctx.forms)
    f.coeffs[(B + 1, B) + (0,)] = 1.0          # e^{2 pi i x_1}, function part
    sig = sigma_op(ctx)
    out = assemble_partial_cd(ctx, "DpL").apply(sig.apply(f))
    # expected: sqrt2 * (sqrt2 pi i) on the eps^1 fiber component (index 2)
    expected = ctx.zeros(ctx.vspinor)
    expected.coeffs[(B + 1, B) + (2,)] = np.sqrt(2.0) * np.sqrt(2.0) * np.pi * 1j
    assert relative_residual(ctx, out, expected) < 1e-13


def test_adjoint_apply_is_exact_flat_adjoint():
    rng = np.random.default_rng(3)
    ctx = nonkahler_ctx(N=12, band=3)
    ops = [assemble_partial_cd(ctx, "DpL"),
           assemble_partial_cd(ctx, "DppR"),
           formops.exterior_derivative_route_b(ctx, "d"),
           formops.del_route_a(ctx)]
    for op in ops:
        for _ in range(3):
            s1 = ctx.random_section(op.domain, rng, mode_band=2)
            s2 = ctx.random_section(op.codomain, rng, mode_band=2)
            lhs = ctx.inner(s2, op.apply(s1), weighted=False)
            rhs = ctx.inner(op.adjoint_apply(s2), s1, weighted=False)
            assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)


def test_weighted_adjoint_pairs_with_volume():
    rng = np.random.default_rng(4)
    ctx = nonkahler_ctx(N=12, band=3)
    op = formops.exterior_derivative_route_b(ctx, "del")
    ws = weighted_adjoint(op)
    for _ in range(3):
        s1 = ctx.random_section(ctx.forms, rng, mode_band=1)
        s2 = ctx.random_section(ctx.forms, rng, mode_band=1)
        lhs = ctx.inner(s2, op.apply(s1))
        rhs = ctx.inner(ws.apply(s2), s1)
        assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0)


def test_degree_shifts():
    rng = np.random.default_rng(5)
    ctx = nonkahler_ctx(N=12, band=3)
    shifts = {"DpL": (1, 0), "DppL": (-1, 0), "DpR": (0, -1), "DppR": (0, 1)}
    for which, (dp, dq) in shifts.items():
        op = assemble_partial_cd(ctx, which)
        for p in range(3):
            for q in range(3):
                xi = ctx.random_section(ctx.vspinor, rng, mode_band=1, bidegree=(p, q))
                out = op.apply(xi)
                weights = out.bidegree_weights()
                total = sum(weights.values())
                if total < 1e-20:
                    continue
                good = weights.get((p + dp, q + dq), 0.0)
                assert (total - good) / total < 1e-18


def test_partial_cd_squares_to_zero():
    # band 5 is needed to push the frame-field tail truncation under 1e-7
    rng = np.random.default_rng(6)
    ctx = nonkahler_ctx(N=16, band=5)
    for which in ("DpL", "DppR"):
        op = assemble_partial_cd(ctx, which)
        for _ in range(2):
            xi = ctx.random_section(ctx.vspinor, rng, mode_band=1)
            once = op.apply(xi)
            twice = op.apply(once)
            assert ctx.norm(twice) < 1e-7 * max(ctx.norm(once), 1e-30)


def test_adjoint_pair_identity_flat_and_curved():
    rng = np.random.default_rng(7)
    for ctx, tol in ((flat_ctx(n=2, N=8, band=2), 1e-12),
                     (nonkahler_ctx(N=16, band=3), 1e-8)):
        for side in ("L", "R"):
            dp = assemble_partial_cd(ctx, f"Dp{side}")
            dpp = assemble_partial_cd(ctx, f"Dpp{side}")
            worst = 0.0
            for _ in range(4):
                s1 = ctx.random_section(ctx.vspinor, rng, mode_band=1)
                s2 = ctx.random_section(ctx.vspinor, rng, mode_band=1)
                lhs = ctx.inner(s2, dp.apply(s1))
                rhs = ctx.inner(dpp.apply(s2), s1)
                worst = max(worst, abs(lhs - rhs))
            assert worst < tol


def test_sigma_conjugation_flat_n1():
    ctx = flat_ctx(n=1, N=12, band=3)
    rng = np.random.default_rng(8)
    sig = sigma_op(ctx)
    pairs = [("DpL", formops.exterior_derivative_route_b(ctx, "del")),
             ("DppR", formops.exterior_derivative_route_b(ctx, "delbar")),
             ("DppL", formops.adjoint_route_b(ctx, "del*")),
             ("DpR", formops.adjoint_route_b(ctx, "delbar*"))]
    for which, comparator in pairs:
        op = assemble_partial_cd(ctx, which)
        for _ in range(4):
            eta = ctx.random_section(ctx.forms, rng, mode_band=1)
            lhs = sig.adjoint_apply(op.apply(sig.apply(eta)))
            rhs = comparator.apply(eta) * np.sqrt(2.0)
            assert relative_residual(ctx, lhs, rhs) < 1e-10


def test_sigma_conjugation_bumpy_n1():
    ctx = bumpy_n1_ctx(N=16, band=5)
    rng = np.random.default_rng(9)
    sig = sigma_op(ctx)
    op = assemble_partial_cd(ctx, "DppR")
    comparator = formops.exterior_derivative_route_b(ctx, "delbar")
    for _ in range(4):
        eta = ctx.random_section(ctx.forms, rng, mode_band=1)
        lhs = sig.adjoint_apply(op.apply(sig.apply(eta)))
        rhs = comparator.apply(eta) * np.sqrt(2.0)
        assert relative_residual(ctx, lhs, rhs) < 1e-8


def test_route_a_equals_route_b():
    ctx = nonkahler_ctx(N=16, band=3)
    rng = np.random.default_rng(10)
    pairs = [
        (formops.del_route_a(ctx), formops.exterior_derivative_route_b(ctx, "del")),
        (formops.delbar_route_a(ctx), formops.exterior_derivative_route_b(ctx, "delbar")),
        (formops.del_star_route_a(ctx), formops.adjoint_route_b(ctx, "del*")),
        (formops.delbar_star_route_a(ctx), formops.adjoint_route_b(ctx, "delbar*")),
    ]
    for opA, opB in pairs:
        worst = 0.0
        for _ in range(4):
            eta = ctx.random_section(ctx.forms, rng, mode_band=1)
            worst = max(worst, relative_residual(ctx, opA.apply(eta), opB.apply(eta)))
        assert worst < 1e-6, (opA.label, worst)


def test_torsion_term_matters_on_nonkahler():
    # ablation: the same operator with torsion zeroed must differ
    ctx = nonkahler_ctx(N=12, band=3)
    rng = np.random.default_rng(11)
    full = assemble_partial_cd(ctx, "DpL")
    no_torsion = type(full)(ctx, full.domain, full.codomain,
                            [t for t in full.terms if t.deriv is not None],
                            "DpL_notorsion")
    xi = ctx.random_section(ctx.vspinor, rng, mode_band=1)
    a, b = full.apply(xi), no_torsion.apply(xi)
    assert relative_residual(ctx, a, b) > 1e-4


def test_leibniz_rule_for_clifford_multiplication():
    # D_X(c(w) s) = c(nabla_X w) s + c(w) D_X s for a frame 1-form field w
    ctx = nonkahler_ctx(N=16, band=5)
    rng = np.random.default_rng(12)
    geom = ctx.geom
    from cherndirac.fibers import clifford_generator_matrices
    from cherndirac.operators import TermOp, Term
    from cherndirac.fibers import SparseFiberMatrix
    gm = clifford_generator_matrices(ctx.n)
    # w = sum_j f_j eps_j with band-limited random f_j
    xs = geom.frames.structure.grid_coordinates(ctx.N)
    fj = []
    for j in range(ctx.n):
        mode = rng.integers(-1, 2, size=4)
        phase = sum(int(m) * x for m, x in zip(mode, xs))
        fj.append(np.exp(2j * np.pi * phase) * (rng.normal() + 1j * rng.normal()))
    spec = ctx.vspinor
    c_w = TermOp(ctx, spec, spec,
                 [Term(None, fj[j], SparseFiberMatrix(gm[("L", "eps", j)]))
                  for j in range(ctx.n)], "c(w)")
    which, idx = "eps", 0
    DX = covariant_derivative_op(ctx, spec, which, idx)
    # nabla_X w = sum_j X(f_j) eps_j + f_j nabla_X eps_j
    cfields = [None] * ctx.n
    for j in range(ctx.n):
        df = geom.frame_directional_derivative(fj[j], which, idx)
        cfields[j] = df
        for k in range(ctx.n):
            add = geom.a_eps[idx, j, k] * fj[k]
            cfields[j] = cfields[j] + add
    c_nabla_w = TermOp(ctx, spec, spec,
                       [Term(None, cfields[j], SparseFiberMatrix(gm[("L", "eps", j)]))
                        for j in range(ctx.n)], "c(nabla w)")
    xi = ctx.random_section(spec, rng, mode_band=1)
    lhs = DX.apply(c_w.apply(xi))
    rhs = c_nabla_w.apply(xi) + c_w.apply(DX.apply(xi))
    assert relative_residual(ctx, lhs, rhs) < 1e-7


def test_apply_is_pure():
    ctx = nonkahler_ctx(N=12, band=2)
    rng = np.random.default_rng(13)
    op = chern_dirac(ctx, "R")
    xi = ctx.random_section(ctx.vspinor, rng, mode_band=1)
    a = op.apply(xi)
    b = op.apply(xi)
    assert np.array_equal(a.coeffs, b.coeffs)


def test_dtheta_squares_to_zero():
    ctx = nonkahler_ctx(N=12, band=3)
    twist = ThetaTwist((0.37, 0.0, 0.0, 0.0), (((1, 0, 0, 0), 0.1),))
    dtheta = formops.exterior_derivative_route_b(ctx, "d", twist)
    rng = np.random.default_rng(14)
    for _ in range(3):
        eta = ctx.random_section(ctx.forms, rng, mode_band=1)
        once = dtheta.apply(eta)
        twice = dtheta.apply(once)
        assert ctx.norm(twice) < 1e-9 * max(ctx.norm(once), 1e-30)


def test_twisted_adjoint_pairs_with_reflected_twist():
    ctx = nonkahler_ctx(N=16, band=3)
    rng = np.random.default_rng(15)
    twist = ThetaTwist((0.37, 0.0, 0.0, 0.0))
    dp = assemble_partial_cd(ctx, "DpL", twist)
    dpp_reflected = assemble_partial_cd(ctx, "DppL", twist.reflected())
    worst = 0.0
    for _ in range(4):
        s1 = SectionField.random(dp.domain, ctx.band, ctx.N, rng, 1)
        s2 = SectionField.random(dpp_reflected.domain, ctx.band, ctx.N, rng, 1)
        lhs = ctx.inner(s2, SectionField(s2.spec, s2.band, s2.N,
                                         dp.apply(s1).coeffs))
        rhs = ctx.inner(SectionField(s1.spec, s1.band, s1.N,
                                     dpp_reflected.apply(s2).coeffs), s1)
        scale = max(ctx.norm(s1) * ctx.norm(s2), 1e-30)
        worst = max(worst, abs(lhs - rhs) / scale)
    assert worst < 1e-8


def test_bc_and_aeppli_are_adjoint():
    ctx = nonkahler_ctx(N=12, band=2)
    rng = np.random.default_rng(16)
    bc = bott_chern_dirac(ctx)
    ae = aeppli_dirac(ctx)
    s1 = ctx.random_section(ctx.vspinor, rng, mode_band=1)
    s2 = ctx.random_section(ctx.vspinor, rng, mode_band=1)
    lhs = ctx.inner(s2, bc.apply(s1))
    rhs = ctx.inner(ae.apply(s2), s1)
    assert abs(lhs - rhs) < 1e-7 * max(abs(lhs), 1.0)


def test_curvature_zero_on_flat():
    ctx = flat_ctx(n=2, N=8, band=2)
    rng = np.random.default_rng(17)
    R = curvature_op(ctx, ctx.vspinor, "eps", 0, "eps", 1)
    xi = ctx.random_section(ctx.vspinor, rng, mode_band=1)
    assert ctx.norm(R.apply(xi)) < 1e-12
