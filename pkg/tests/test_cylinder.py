import random
from fractions import Fraction as F

import pytest
import sympy

from secantfano.cylinder import (
    AFFINE_PAIR,
    C3,
    C3_TARGET,
    CHART,
    GAMMA,
    GAMMA_INV,
    IOTA,
    P1xP1,
    SIGMA,
    SIGMA_AFFINE,
    MVPoly,
    PolyMap,
    complement_bookkeeping,
    conic,
    cylinder_full_verify,
    gamma_plane_check,
    identity_map,
    ideal_membership_check,
    poly_compose,
    preimage_line_decomposition_check,
    z_equation,
    z_equation_affine,
)
from secantfano.errors import DomainError
from secantfano.scalar import symbol_d


def rand_point(rng, n):
    return [F(rng.randint(-200, 200), rng.randint(1, 60)) for _ in range(n)]


# -- MVPoly ------------------------------------------------------------------


def test_mvpoly_basics():
    x, y = MVPoly.gens(("x", "y"))
    p = (x + y) ** 2
    assert p == x**2 + 2 * x * y + y**2
    assert (p - p).is_zero()
    assert p.degree() == 2
    assert str(x * x - 3 * y + 1) == "x^2 - 3*y + 1"
    q, r = divmod(p, x + y)
    assert q == x + y and r.is_zero()
    q, r = divmod(x**2 + 1, x + y)
    assert q * (x + y) + r == x**2 + 1
    with pytest.raises(ValueError):
        MVPoly(("x",), {(1, 2): 1})
    with pytest.raises(ValueError):
        x + MVPoly.var(("z",), "z")


def test_poly_compose_examples():
    ident = identity_map(C3)
    assert poly_compose(GAMMA, ident).components == GAMMA.components
    s, u = MVPoly.gens(AFFINE_PAIR)
    swap = PolyMap("swap", AFFINE_PAIR, AFFINE_PAIR, (u, s))
    assert poly_compose(SIGMA_AFFINE, swap).components == SIGMA_AFFINE.components
    assert poly_compose(GAMMA, GAMMA_INV).is_identity()
    assert poly_compose(GAMMA_INV, GAMMA).is_identity()
    with pytest.raises(ValueError):
        poly_compose(GAMMA, SIGMA)


# -- the four checks, symbolically -------------------------------------------


def test_ideal_membership():
    rep = ideal_membership_check()
    assert rep.passed and len(rep.checks) == 4
    assert IOTA.pullback(z_equation()).is_zero()


def test_ideal_membership_mutation():
    w0, w1, x, y = MVPoly.gens(CHART)
    bad = w0**2 + 2 * y * w0 * w1 + x * w1**2
    rep = ideal_membership_check(bad)
    assert not rep.passed
    s, u = MVPoly.gens(AFFINE_PAIR)
    assert IOTA.pullback(bad) == 2 * s**2 + 2 * s * u


def test_gamma_plane():
    rep = gamma_plane_check()
    assert rep.passed
    assert GAMMA_INV.pullback(z_equation_affine()) == MVPoly.var(C3_TARGET, "z'")
    assert GAMMA((1, 1, 1)) == (1, 1, 0)


def test_gamma_mutation():
    w0, x, y = MVPoly.gens(C3)
    bad = PolyMap("gamma", C3, C3_TARGET, (w0, y, w0**2 - y * w0 + x))
    assert not gamma_plane_check(bad, GAMMA_INV).passed


def test_preimage_line():
    rep = preimage_line_decomposition_check()
    assert rep.passed
    s, t, u, v = MVPoly.gens(P1xP1)
    assert SIGMA.pullback(MVPoly.var(("x", "y", "z"), "z")) == t * v
    assert SIGMA.pullback(conic()) == (t * u - s * v) ** 2 / 4


def test_preimage_line_mutation():
    s, t, u, v = MVPoly.gens(P1xP1)
    bad = PolyMap("sigma", P1xP1, ("x", "y", "z"), (s * u, (t * u - s * v) / 2, t * v))
    rep = preimage_line_decomposition_check(bad)
    assert not rep.passed
    assert "sigma^*(y^2 - xz) = (1/4)(tu - sv)^2" in [c.name for c in rep.failures()]


def test_complement_bookkeeping_marks_cited_steps():
    chk = complement_bookkeeping()
    assert chk.passed
    kinds = [s["kind"] for s in chk.detail["steps"]]
    assert any(k.startswith("cited") for k in kinds)
    assert "certificate" in kinds
    w0, x, y = MVPoly.gens(C3)
    bad = PolyMap("gamma", C3, C3_TARGET, (w0, y, w0**2 - y * w0 + x))
    assert not complement_bookkeeping(bad).passed


@pytest.mark.parametrize("d", ["symbolic", 4, 5, 11])
def test_full_verify(d):
    rep = cylinder_full_verify(d)
    assert rep.passed and len(rep.checks) == 5
    assert rep.data["cylinder"] == "C^1 x C^1 x C^*"
    assert bool(rep.notes) == (d == 4)


def test_full_verify_aborts_on_mutated_divisor():
    x = symbol_d()
    rep = cylinder_full_verify(x, divisor_scale=4 / (x + 1))
    assert not rep.passed
    assert rep.data["aborted_at"] == "divisor D ~ -K_Sigma"
    assert len(rep.checks) == 1


def test_full_verify_domain():
    with pytest.raises(DomainError):
        cylinder_full_verify(3)


# -- random-point redundancy -------------------------------------------------


def test_identities_at_random_points():
    rng = random.Random(4)
    F_chart = z_equation()
    F_aff = z_equation_affine()
    Q = conic()
    for _ in range(100):
        s, u = rand_point(rng, 2)
        assert F_chart.evaluate(IOTA((s, u))) == 0
        w0, x, y = rand_point(rng, 3)
        img = GAMMA((w0, x, y))
        assert GAMMA_INV(img) == (w0, x, y)
        assert img[2] == F_aff.evaluate((w0, x, y))
        assert GAMMA(GAMMA_INV((w0, x, y))) == (w0, x, y)
        pt = rand_point(rng, 4)
        a, b, c = SIGMA(pt)
        ps, pt_, pu, pv = pt
        assert c == pt_ * pv
        assert Q.evaluate((a, b, c)) == (pt_ * pu - ps * pv) ** 2 / 4


def test_random_points_catch_mutation():
    rng = random.Random(5)
    w0, w1, x, y = MVPoly.gens(CHART)
    bad = w0**2 + 2 * y * w0 * w1 + x * w1**2
    hits = sum(bad.evaluate(IOTA(rand_point(rng, 2))) != 0 for _ in range(100))
    assert hits > 90


# -- independent oracle ------------------------------------------------------


def test_sympy_oracle():
    s, t, u, v, w0, w1, x, y, yp, zp = sympy.symbols("s t u v w0 w1 x y yp zp")
    sig = (s * u, (t * u + s * v) / 2, t * v)
    assert sympy.expand(sig[1] ** 2 - sig[0] * sig[2] - (t * u - s * v) ** 2 / 4) == 0
    Fz = w0**2 - 2 * y * w0 * w1 + x * w1**2
    assert sympy.expand(Fz.subs({w0: s, w1: 1, x: s * u, y: (s + u) / 2}, simultaneous=True)) == 0
    gamma = (w0, y, w0**2 - 2 * y * w0 + x)
    inv = (w0, zp - w0**2 + 2 * yp * w0, yp)
    back = [sympy.expand(g.subs({x: inv[1], y: inv[2]}, simultaneous=True)) for g in gamma]
    assert back == [w0, yp, zp]
    # and the engine agrees term by term with sympy's expansion
    ours = SIGMA.pullback(conic())
    theirs = sympy.Poly(sympy.expand(sig[1] ** 2 - sig[0] * sig[2]), s, t, u, v)
    assert {m: F(int(c.p), int(c.q)) for m, c in theirs.terms()} == ours.terms
