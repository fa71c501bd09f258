import math

import numpy as np
import pytest

from carleman_lab import carleman as K
from carleman_lab import corpus as C
from carleman_lab.errors import RangeViolation, TauBelowThreshold
from carleman_lab.exponents import Regime
from carleman_lab.spectral import HarmonicSpectrum, TGrid


def _zero(tg):
    sp = C.bump_mode(0, 0, -7.5, 3.5).spectrum(tg)
    return HarmonicSpectrum(tg, sp.degrees, np.zeros_like(sp.coeffs), 3, sp.sgrid)


def test_zero_field_is_vacuous(tgrid):
    z = _zero(tgrid)
    for rep in (K.verify_Lplus(z, 4.0), K.verify_Lminus_L2(z, 4.0), K.verify_main(z, 4.0)):
        assert rep.ratio == 0.0 and rep.passed


def test_bump_ratio_stable_over_tau(tgrid):
    u = C.bump_mode(0, 0, -7.5, 3.5)
    ratios = [K.verify_Lplus(u, tau, tgrid).ratio for tau in (2, 4, 8, 16, 32, 64)]
    assert all(math.isfinite(r) for r in ratios)
    steps = np.diff(ratios)
    assert np.all(steps > 0) and np.all(np.diff(steps) < 0)  # saturating, not blowing up
    assert ratios[-1] < 3.0


def test_frame_scale_is_irrelevant(tgrid):
    u = C.bump_mode(2, 0, -7.0, 3.0)
    a = K.verify_main(u, 10.0, tgrid=tgrid).ratio
    sp = u.spectrum(tgrid, u.sphere_grid(2))
    b = K.verify_main(sp.with_coeffs(1e5 * sp.coeffs), 10.0).ratio
    assert a == pytest.approx(b, rel=1e-12)


def test_lminus_lp_high_degree_uses_p_plus_only(tgrid):
    rep = K.verify_Lminus_Lp(C.bump_mode(12, 0, -7.5, 3.5), 4.0, 14 / 9, tgrid)
    assert rep.extras["cutoff_M"] == 8
    assert rep.extras["P-"] == 0.0 and rep.extras["P+"] > 0
    assert rep.extras["beta"] == pytest.approx(-0.25)


def test_lminus_l2_slope_on_packets(tgrid):
    spec = K.SweepSpec("L-L2")
    res = K.sweep(spec, [], taus=(8, 16, 32, 64), tgrid=tgrid)
    assert res.slopes["u"] <= -0.5 + 0.1


def test_main_rejects_bad_pq():
    with pytest.raises(RangeViolation):
        K.verify_main(C.bump_mode(0, 0, -7.5, 3.5), 4.0, p=1.0)


def test_potentials_vanish_reduces_to_main(tgrid):
    u = C.cut_harmonic(2, 0, tgrid)
    reg = Regime(3, s=7.0, t=9.0)
    rep = K.verify_with_potentials(u, 20.0, reg, None, None, tgrid, enforce_threshold=False)
    main = K.verify_main(u, 20.0, p=rep.p, q=2.0, tgrid=tgrid)
    assert rep.rhs == pytest.approx(main.rhs, rel=1e-12)
    assert rep.lhs_terms["u"] == pytest.approx(main.lhs_terms["u"], rel=1e-12)


def test_threshold_and_absorbability_flags(tgrid):
    reg = Regime(3, s=7.0, t=9.0)
    W, V = K.default_potentials(reg, math.exp(tgrid.t_max))
    u = C.cut_harmonic(1, 0, tgrid)
    rep = K.verify_with_potentials(u, 2.0, reg, W, V, tgrid)
    thr = rep.extras["threshold"]
    assert thr == pytest.approx(2.0)
    for side in rep.extras["side_terms"].values():
        assert side["holder_ok"]
        assert isinstance(side["absorbable"], bool)
    with pytest.raises(TauBelowThreshold):
        K.verify_with_potentials(u, thr / 4, reg, W, V, tgrid)
    low = K.verify_with_potentials(u, thr / 4, reg, W, V, tgrid, enforce_threshold=False)
    assert math.isfinite(low.ratio)


def test_sogge_closed_forms():
    x, w = K._zonal_grid(200)
    assert K.sogge_ratio(0, np.ones_like(x), x, w) == pytest.approx((4 * math.pi) ** (-2 / 3), rel=1e-12)
    Y = K._zonal_Y(5, x)
    want = K._lp(Y, w, 6.0) / K._lp(Y, w, 1.2)
    assert K.sogge_ratio(5, Y, x, w) == pytest.approx(want, rel=1e-10)


def test_mixed_projector_contractive_at_p2():
    assert K.verify_mixed_projector(0, 6, p=2.0)["ratio"] <= 1 + 1e-10
    zero = K.verify_mixed_projector(1, 3, coeffs=[0.0, 0.0, 0.0], p=2.0)
    assert zero["ratio"] == 0.0
    with pytest.raises(RangeViolation):
        K.verify_mixed_projector(1, 2, coeffs=[2.0, 0.0])


def test_sweep_counts_and_csv(tgrid):
    fields = C.carleman_corpus(4, 0, tgrid)
    res = K.sweep(K.SweepSpec("L+"), fields, taus=(2, 4), tgrid=tgrid, adapted=False)
    assert len(res.reports) == 8 and res.blowups == 0
    text = K.reports_csv(res.reports)
    assert text.splitlines()[0].startswith("inequality,u_kind,tau")
    assert len(text.splitlines()) == 9
    assert '"inequality": "L+"' in K.summary_json([res])


def test_expected_slopes():
    assert K.SweepSpec("main", 2.0, 2.0).expected == {"u": -1.5, "grad": -0.5}
    assert K.SweepSpec("L-Lp", p=14 / 9).expected["u"] == pytest.approx(-0.25)
    assert K.SweepSpec("V", regime=Regime(3, t=7.0, mode="V-only")).exponents == pytest.approx((14 / 9, 2.0))
    assert K.SweepSpec("L+").gated == ()


def test_tgrid_too_coarse():
    with pytest.raises(ValueError):
        TGrid(count=10)
