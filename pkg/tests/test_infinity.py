import math

import numpy as np
import pytest

import oracles as O
from carleman_lab import corpus as C
from carleman_lab import infinity as I
from carleman_lab.errors import DomainCoverage, RangeViolation, RTooSmall
from carleman_lab.exponents import Regime


def test_identity_map():
    smap = I.ScaleMap.at(1.0, (0, 0, 1))
    P = C.SingularPotential(0.4, 6.0, 1.3, cap=1e4, center=smap.x0)
    out = I.rescale(P, smap)
    assert out.factor == 1.0
    assert out.analytic_norm == pytest.approx(P.norm(1.0, 6.0), rel=1e-12)


def test_hand_scaling_factor():
    assert I.scaling_factor(4.0, 6.0, 1) == pytest.approx(2.0)
    assert I.scaling_factor(4.0, math.inf, 2) == 16.0
    assert I.scaling_factor(8.0, 3.0, 2) == pytest.approx(8.0)


def test_constant_potential():
    R, c, t, r = 5.0, 2.0, 9.0, 0.7
    out = I.rescale_constant(c, I.ScaleMap.at(R), t, r=r)
    want = R**2 * c * O.ball_volume(r) ** (1 / t)
    assert out.analytic_norm == pytest.approx(want, rel=1e-12)
    assert out.predicted_norm == pytest.approx(want, rel=1e-12)
    assert out.quadrature_norm == pytest.approx(want, rel=1e-4)


def test_random_pairs_scale_exactly():
    for P, smap in I.random_scaling_pairs(6, 11):
        out = I.rescale(P, smap)
        assert out.analytic_error < 1e-10
        assert out.quadrature_error < 1e-4


def test_off_center_potential_is_rejected():
    P = C.SingularPotential(0.3, 6.0, 1.0)
    with pytest.raises(DomainCoverage):
        I.rescale(P, I.ScaleMap.at(3.0))


def test_rescaled_solution_identity():
    sol = C.make_eigen_style({"kind": "sinc", "a": 10.0})
    smap = I.ScaleMap.at(2e-3, (1, 1, 0))
    out = I.rescale(sol, smap, radius=5.0)
    pts = C.sample_shell(0.1, 2.0, 50, 4)
    R = smap.R
    assert np.allclose(out.V(pts), R * R * 100.0)
    fd = O.fd_laplacian(out.u, pts, 1e-2 * np.ones(len(pts)))
    assert np.allclose(fd, out.lap(pts), rtol=1e-6, atol=1e-12)
    assert np.abs(out.residual(pts)).max() < 1e-10 * R * R
    with pytest.raises(DomainCoverage):
        I.rescale(sol, I.ScaleMap.at(1.0))


def test_scale_map_validation():
    with pytest.raises(RangeViolation):
        I.ScaleMap((0, 0, 0), 0.0)
    with pytest.raises(ValueError):
        I.ScaleMap((0, 0), 1.0)
    with pytest.raises(TypeError):
        I.rescale("V", I.ScaleMap.at(2.0))


def test_pi_examples():
    a, b = I.pi_sides(Regime(3, s=7.0, t=9.0))
    assert a == pytest.approx(16 / 7, abs=1e-12) and b == pytest.approx(16 / 7, abs=1e-12)
    a, b = I.pi_sides(Regime(3, t=7.0, mode="V-only"))
    assert a == pytest.approx(44 / 35, abs=1e-12) and b == pytest.approx(44 / 35, abs=1e-12)
    a, b = I.pi_sides(Regime(3))
    assert a == pytest.approx(2.0) and b == pytest.approx(2.0)


def test_pi_grid_covers_every_branch():
    rep = I.pi_consistency()
    assert rep.passed
    modes = {reg.mode for reg, _, _ in rep.rows}
    assert modes == {"VW", "W-only", "V-only"}
    assert {reg.n for reg, _, _ in rep.rows} == {3, 4, 5}


def test_m_of_R_hand_value():
    rep = I.m_of_R_report(I.MRQuery(10.0, Regime(3)))
    assert rep.Pi == pytest.approx(2.0)
    assert rep.C == pytest.approx(2.0)
    assert rep.log_bound == pytest.approx(-2 * 100 * math.log(10))
    assert rep.log_bound_unmaximized >= rep.log_bound - 1e-9


def test_m_of_R_monotone_and_flags():
    q = lambda R: I.MRQuery(R, Regime(3, s=7.0, t=9.0), A0=3.0)
    logs = [I.m_of_R_report(q(R)).log_bound for R in (math.e**2, math.e**3, math.e**4, math.e**5)]
    assert np.all(np.diff(logs) < 0)
    assert not I.m_of_R_report(q(math.e**2)).in_regime
    assert I.m_of_R_report(q(math.e**3)).in_regime
    with pytest.raises(RTooSmall):
        I.m_of_R_report(q(math.e))
    with pytest.raises(RangeViolation):
        I.MRQuery(10.0, Regime(3), A0=0.5)
    with pytest.raises(RangeViolation):
        I.MRQuery(10.0, Regime(3), c=0.0)


def test_log_c_enters_constant():
    base = I.mr_constant(I.MRQuery(10.0, Regime(3)))
    assert I.mr_constant(I.MRQuery(10.0, Regime(3), c=math.exp(-1))) == pytest.approx(base + 1.0)


def test_empirical_cosine():
    sol = I.cosine_solution(4.0)
    assert sol.residual_certificate < 1e-12
    rep = I.m_of_R_report(I.MRQuery(math.e**2, Regime(3), A0=16.0), sol, directions=16)
    assert 0.9 < rep.empirical <= 1.0 and rep.sound
    text = I.mr_reports_csv([rep])
    assert text.splitlines()[0] == "R,Pi,C,bound,log_bound,empirical,in_regime,sound"
