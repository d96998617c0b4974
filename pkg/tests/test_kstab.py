from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secantfano.chow import anticanonical_volume
from secantfano.errors import DivisionByZero, DomainError
from secantfano.kstab import (
    DivisorInvariants,
    FujitaBoundInput,
    alpha_upper_bound_witness,
    cubic_volume,
    equivariant_alpha,
    fujita_bound,
    s_invariant,
    tangent_surface_invariants,
    tangent_surface_volume,
    volume_scaling_identity_check,
    zhuang_check,
)
from secantfano.ledger import lct_from_ledger, secant_resolution_ledger
from secantfano.report import dumps
from secantfano.scalar import PiecewisePoly, UPoly, is_positive_on, leq_on, symbol_d

d = symbol_d()


def test_s_invariant_examples():
    V = anticanonical_volume(d)
    assert s_invariant(tangent_surface_volume(d), V) == F(1, 4)
    rect = PiecewisePoly([0, 1, 2], [UPoly((V,)), UPoly()])
    assert s_invariant(rect, V) == 1
    assert s_invariant(cubic_volume(24), 24) == F(1, 4)


def test_s_invariant_errors():
    with pytest.raises(DivisionByZero):
        s_invariant(cubic_volume(0), 0)
    with pytest.raises(ValueError):
        s_invariant(cubic_volume(24), 23)
    with pytest.raises(DomainError):
        s_invariant(PiecewisePoly([0, 1], [UPoly((5,))]), 5)


@given(st.fractions(min_value=F(1, 30), max_value=1000, max_denominator=30), st.integers(1, 4))
def test_s_invariant_scale_invariance(c, tau):
    base = cubic_volume(7, tau)
    assert s_invariant(cubic_volume(7 * c, tau), 7 * c) == s_invariant(base, 7) == F(tau, 4)


def test_tangent_surface_invariants():
    inv = tangent_surface_invariants(d)
    assert (inv.A, inv.S, inv.tau) == (1, F(1, 4), 1)
    assert inv.fujita_inequality_holds()
    assert DivisorInvariants("X", 1, tau=F(1, 4), S=F(1, 2)).fujita_inequality_holds() is False


def test_fujita_bound_examples():
    t = (d + 2) / (2 * d)
    factor = fujita_bound(FujitaBoundInput(3, t, F(1)))
    assert factor == (4 * d + 4) / (4 * (d + 2)) == (d + 1) / (d + 2)
    assert fujita_bound(FujitaBoundInput(3, F(1), F(1))) == F(3, 4)
    assert factor(4) == F(5, 6)
    assert fujita_bound(FujitaBoundInput(3, t, F(1), A=2 / (d - 2))) == 2 / (d - 2) * factor


def test_fujita_bound_input_guard():
    with pytest.raises(DomainError):
        FujitaBoundInput(3, F(0), F(1))
    with pytest.raises(DomainError):
        FujitaBoundInput(3, F(2), F(1))


def test_fujita_bound_monotone():
    grid = [F(p, q) for q in range(1, 8) for p in range(1, 3 * q)]
    for t in grid:
        for s in grid:
            if t > s:
                continue
            b = fujita_bound(FujitaBoundInput(3, t, s))
            for s2 in (s + F(1, 3), s * 2):
                assert fujita_bound(FujitaBoundInput(3, t, s2)) <= b
            for t2 in (t + (s - t) / 2, s):
                assert fujita_bound(FujitaBoundInput(3, t2, s)) <= b


def test_fujita_bound_monotone_symbolic():
    t = (d + 2) / (2 * d)
    base = fujita_bound(FujitaBoundInput(3, t, F(1)))
    assert leq_on(fujita_bound(FujitaBoundInput(3, t, F(3, 2))), base)
    assert leq_on(fujita_bound(FujitaBoundInput(3, (d + 3) / (2 * d), F(1))), base)


def test_volume_scaling_identity():
    V = cubic_volume(17, 1)
    assert volume_scaling_identity_check(1, F(1, 2), F(3, 4), V)
    assert volume_scaling_identity_check(1, F(1, 2), F(1, 2), V)
    # mutation: threshold of the model family differs from ord_D0
    assert not volume_scaling_identity_check(F(3, 2), F(1, 2), F(3, 4), V)
    with pytest.raises(DomainError):
        volume_scaling_identity_check(1, F(1, 2), F(1, 4), V)


def test_equivariant_alpha():
    assert equivariant_alpha(d) == (d + 2) / (2 * d)
    assert equivariant_alpha(4) == F(3, 4)
    with pytest.raises(DomainError):
        equivariant_alpha(3)


def test_alpha_matches_ledger_lct(rng):
    for n in rng.sample(range(4, 200), 20):
        a = equivariant_alpha(n)
        assert a == lct_from_ledger(secant_resolution_ledger(n), "T").value == F(n + 2, 2 * n)


def test_alpha_witness():
    w = alpha_upper_bound_witness(d)
    assert w["lct_upper_bound"] == F(1, 2)
    assert w["class_is_anticanonical"] is True
    assert w["multiplicity"] == 2
    assert alpha_upper_bound_witness(7)["lct_upper_bound"] == F(1, 2)


def test_zhuang_symbolic():
    rep = zhuang_check(d)
    assert rep.passed
    t_case, c_case = rep.checks
    assert t_case.detail["margin"] == F(3, 4)
    assert c_case.detail["margin_factor"] == 1 / (d + 2)
    assert is_positive_on(c_case.detail["margin_factor"])
    assert c_case.detail["bound_factor"] == (d + 1) / (d + 2)
    assert rep.data["verdict"] == "K-polystable"
    assert rep.data["delta"].startswith("1 (consequence")


def test_zhuang_at_4():
    rep = zhuang_check(4)
    assert rep.passed
    assert rep.checks[1].detail["margin_factor"] == F(1, 6)


def test_zhuang_adversarial_t():
    rep = zhuang_check(d, t=F(1, 2))
    assert not rep.passed
    assert rep.checks[1].detail["bound_factor"] == 1
    assert rep.checks[1].detail["margin_factor"] == 0
    assert rep.data["verdict"] == "inconclusive"


def test_zhuang_report_keys_and_determinism():
    a = dumps(zhuang_check(d).to_tree())
    assert a == dumps(zhuang_check(d).to_tree())
    for key in ('"case"', '"A"', '"S_or_bound"', '"margin"', '"citation"'):
        assert key in a
