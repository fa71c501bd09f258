import math

import pytest

import oracles as O
from carleman_lab.errors import EpsilonOutOfRange, InadmissibleRegime, RangeViolation, RTooSmall
from carleman_lab.exponents import (
    CASE_LOW,
    CASE_MID,
    CASE_T_GE_S,
    CASE_V_HIGH,
    BoundInputs,
    Regime,
    beta,
    carleman_pq,
    check_admissible,
    classify,
    exponent_set,
    kappa,
    log_mr_lower_bound,
    mr_lower_bound,
    mu,
    pi_exponent,
    tau_threshold,
)


def test_inadmissible_s_names_the_bound():
    with pytest.raises(InadmissibleRegime) as exc:
        check_admissible(Regime(3, s=3.0, t=5.0))
    assert "(3n−2)/2" in str(exc.value.bound) or "3n" in str(exc.value)


@pytest.mark.parametrize(
    "reg, case",
    [
        (Regime(3, s=7.0, t=7.0), CASE_T_GE_S),
        (Regime(3, s=7.0, t=9.0), CASE_T_GE_S),
        (Regime(3, s=7.0, t=4.0), CASE_MID),
        (Regime(3, s=7.0, t=2.05), CASE_LOW),
        (Regime(3, s=7.0, t=2.1), CASE_LOW),  # closed endpoint t = sn/(s+n)
        (Regime(3, t=7.0, mode="V-only"), CASE_V_HIGH),
    ],
)
def test_case_tags(reg, case):
    assert classify(reg) == case


def test_kappa_hand_values():
    assert kappa(Regime(3, s=7.0, t=5.0)) == pytest.approx(4.0, abs=1e-14)
    assert kappa(Regime(3, s=7.0, t=1.7)) == pytest.approx(O.kappa_low(3, 7.0, 1.7), rel=1e-13)
    # 6.8 / ((13/3)·1.7 − 7) = 204/11; the rounded hand value 18.0 is off by 0.55
    assert kappa(Regime(3, s=7.0, t=1.7)) == pytest.approx(204 / 11, rel=1e-13)


def test_kappa_and_mu_limits():
    assert kappa(Regime(3, s=1e8, t=5.0)) == pytest.approx(2.0, abs=1e-6)
    assert mu(Regime(3, s=1e8, t=1e8)) == pytest.approx(2 / 3, abs=1e-6)
    assert kappa(Regime(3)) == 2.0 and mu(Regime(3)) == pytest.approx(2 / 3)


def test_mu_hand_values():
    assert mu(Regime(3, t=7.0, mode="V-only")) == pytest.approx(0.8, abs=1e-14)
    assert mu(Regime(3, s=7.0, t=7.0)) == pytest.approx(0.8, abs=1e-14)
    assert mu(Regime(3, s=7.0, t=4.0)) == pytest.approx(O.mu_mid(3, 7.0, 4.0), rel=1e-13)


def test_carleman_pq_hand_values():
    assert carleman_pq(Regime(3, s=7.0, t=9.0)) == pytest.approx((14 / 9, 2.0))
    p, q = carleman_pq(Regime(3, s=7.0, t=1.7))
    assert (p, q) == pytest.approx(O.pq_case3(3, 1.7))
    assert p == pytest.approx(10.2 / 7.7)
    assert carleman_pq(Regime(3, t=7.0, mode="V-only"))[0] == pytest.approx(14 / 9)


@pytest.mark.parametrize("n,p,q,want", [(3, 2, 2, (1.5, 0.5)), (3, 2, 6, (0.5, 0.5)), (3, 1.5, 2, (29 / 24, 5 / 24))])
def test_beta_hand_values(n, p, q, want):
    assert beta(n, p, q) == pytest.approx(want, abs=1e-14)


def test_beta_rejects_out_of_range():
    with pytest.raises(RangeViolation):
        beta(3, 1.0, 2.0)


def test_pi_values():
    assert pi_exponent(Regime(3, s=1e8, t=1e8)) == pytest.approx(2.0, abs=1e-6)
    assert pi_exponent(Regime(3, t=1e8, mode="V-only")) == pytest.approx(4 / 3, abs=1e-6)
    assert pi_exponent(Regime(3, s=7.0, t=9.0)) == pytest.approx(16 / 7, abs=1e-14)
    assert pi_exponent(Regime(3, t=7.0, mode="V-only")) == pytest.approx(44 / 35, abs=1e-14)


def test_tau_threshold_examples():
    ex = exponent_set(Regime(3))
    assert tau_threshold(ex, BoundInputs()) == pytest.approx(2.0)
    exw = exponent_set(Regime(3, s=7.0, t=9.0))
    got = tau_threshold(exw, BoundInputs(K=4.0, C1=1.0), mode="W-only")
    assert got == pytest.approx(4.0**exw.kappa)
    exv = exponent_set(Regime(3, t=7.0, mode="V-only"))
    assert tau_threshold(exv, BoundInputs(M=8.0, C2=2.0), mode="V-only") == pytest.approx(2 * 8**0.8, rel=1e-12)


def test_mr_lower_bound_examples():
    assert mr_lower_bound(math.e**2, 0.0, 1.0) == pytest.approx(math.exp(-2))
    assert log_mr_lower_bound(10.0, 2.0, 1.0) == pytest.approx(-100 * math.log(10))
    assert mr_lower_bound(20.0, 2.0, 1.0) < mr_lower_bound(10.0, 2.0, 1.0)
    with pytest.raises(RTooSmall):
        mr_lower_bound(2.0, 1.0, 1.0)


def test_v_only_low_branch_uses_epsilon():
    reg = Regime(3, t=2.5, mode="V-only")
    ex = exponent_set(reg)
    assert ex.eps > 0
    with pytest.raises(EpsilonOutOfRange):
        exponent_set(Regime(3, t=2.5, mode="V-only", eps=100.0))


def test_bound_inputs_range():
    with pytest.raises(RangeViolation):
        BoundInputs(K=0.5)


def test_beta_signs_over_admissible_grid():
    from carleman_lab.infinity import admissible_grid

    neg_v_only = 0
    for reg in admissible_grid():
        ex = exponent_set(reg)
        assert ex.beta0 > 0, reg
        if reg.mode == "V-only":
            neg_v_only += ex.beta1 <= 0  # unused on that chain; may go negative near the edge
        else:
            assert ex.beta1 > 0, reg
    assert neg_v_only > 0
