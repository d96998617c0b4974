from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secantfano.errors import ConfigError, DomainError
from secantfano.ledger import (
    BlowupConfig,
    builtin_config,
    lct_from_ledger,
    load_config,
    log_discrepancy,
    minimax_ord_bound,
    ord_fd_case_checks,
    replay,
    scale_boundary,
    secant_resolution_ledger,
)
from secantfano.scalar import symbol_d

d = symbol_d()


def _rows(x):
    """The three displayed pullback rows of the resolution, at d = x."""
    return {
        "K": {"Z": -(x - 4) / (x - 2), "E1": 2 / (x - 2), "E2": 4 / (x - 2)},
        "T": {"T_tilde": 1, "Z": 2 / (x - 2), "E1": x / (x - 2), "E2": 2 * x / (x - 2)},
        "Z": {"Z": 1, "E1": 1, "E2": 2},
    }


def _matches(led, rows):
    return all(led.coefficient(t, p) == v for t, row in rows.items() for p, v in row.items())


def test_replay_symbolic_rows():
    led = secant_resolution_ledger(d)
    assert _matches(led, _rows(d))
    assert led.discrepancies == {"E1": 2 / (d - 2), "E2": 4 / (d - 2)}
    assert led.after_step(1)["T"]["E1"] == d / (d - 2)
    assert led.primes == ["T_tilde", "Z", "E1", "E2"]


def test_replay_concrete_range(rng):
    for n in rng.sample(range(4, 41), 20):
        assert _matches(secant_resolution_ledger(n), _rows(F(n)))


def test_degenerate_d4_has_crepant_z():
    led = secant_resolution_ledger(4)
    assert led.coefficient("K", "Z") == 0
    assert log_discrepancy(led, "Z") == 1


def test_empty_config_is_seeds():
    cfg = builtin_config(d)
    bare = BlowupConfig(cfg.name, cfg.primes, cfg.seeds, (), cfg.canonical, cfg.aliases)
    led = replay(bare)
    assert led.tracked["T"] == cfg.seeds["T"]
    assert led.discrepancies == {}
    assert len(led.history) == 1


def test_log_discrepancies():
    led = secant_resolution_ledger(d)
    assert log_discrepancy(led, "Z") == 2 / (d - 2)
    assert log_discrepancy(led, "E2") == (d + 2) / (d - 2)
    assert log_discrepancy(led, "E1") == d / (d - 2)
    assert log_discrepancy(led, "T") == 1
    with pytest.raises(KeyError):
        log_discrepancy(led, "E7")


def test_lct_of_t():
    res = lct_from_ledger(secant_resolution_ledger(d), "T")
    assert res.value == (d + 2) / (2 * d)
    assert res.argmin == "E2"
    assert lct_from_ledger(secant_resolution_ledger(4), "T").value == F(3, 4)


def test_lct_of_z_brute_force():
    led = secant_resolution_ledger(d)
    res = lct_from_ledger(led, "Z")
    assert res.value == 2 / (d - 2) and res.argmin == "Z"
    for n in range(4, 30):
        ln = secant_resolution_ledger(n)
        ratios = [log_discrepancy(ln, p) / ln.coefficient("Z", p) for p in ("Z", "E1", "E2")]
        assert min(ratios) == res.value(n)


def test_lct_unknown_boundary():
    with pytest.raises(KeyError):
        lct_from_ledger(secant_resolution_ledger(d), "W")


@given(st.fractions(min_value=F(1, 40), max_value=50, max_denominator=40))
def test_linearity_and_lct_scaling(c):
    cfg = builtin_config(d)
    base = replay(cfg)
    scaled = replay(scale_boundary(cfg, "T", c))
    for p in base.primes:
        assert scaled.coefficient("T", p) == c * base.coefficient("T", p)
    assert lct_from_ledger(scaled, "T").value == lct_from_ledger(base, "T").value / c


def test_negative_multiplicity_rejected():
    text = """
primes: [A]
seeds: {D: {A: 1}}
steps:
  - {exceptional: E, incident: {A: -1}}
"""
    with pytest.raises(ConfigError):
        replay(load_config(text, 5))


def test_unknown_name_and_reused_exceptional_rejected():
    bad_name = "primes: [A]\nseeds: {D: {A: 1}}\nsteps:\n  - {exceptional: E, incident: {B: 1}}\n"
    with pytest.raises(ConfigError):
        replay(load_config(bad_name, 5))
    reused = "primes: [A]\nseeds: {D: {A: 1}}\nsteps:\n  - {exceptional: A, incident: {A: 1}}\n"
    with pytest.raises(ConfigError):
        replay(load_config(reused, 5))


# -- minimax -----------------------------------------------------------------


def test_minimax_examples():
    sym = minimax_ord_bound(d)
    assert (sym.max_value, sym.argmax_a) == (4 / d, 4 / (d * (d - 2)))
    four = minimax_ord_bound(4)
    assert (four.max_value, four.argmax_a) == (1, F(1, 2))
    six = minimax_ord_bound(6)
    assert (six.max_value, six.argmax_a) == (F(2, 3), F(1, 6))


def grid_oracle(n):
    best, arg = None, None
    hi = F(2, n - 2)
    for q in range(1, 41):
        for p in range(0, 2 * q + 1):
            a = F(p, q)
            if a > hi:
                break
            v = min(a * (n - 2), F(4, n - 2) - 2 * a)
            if best is None or v > best:
                best, arg = v, a
    return best, arg


@pytest.mark.parametrize("n", range(4, 13))
def test_minimax_grid_oracle(n):
    best, arg = grid_oracle(n)
    res = minimax_ord_bound(n)
    assert best <= res.max_value
    if res.argmax_a.denominator <= 40:
        assert (best, arg) == (res.max_value, res.argmax_a)


# -- order estimate arithmetic -----------------------------------------------


@pytest.mark.parametrize("x", ["symbolic", 4, 5, 9])
def test_ord_fd_case_checks_pass(x):
    rep = ord_fd_case_checks(x)
    assert rep.passed, rep.failures()
    assert len(rep.checks) == 5


def test_ord_fd_mutated_e1_coefficient():
    rep = ord_fd_case_checks(d, boundary_e1_coeff=4 / (d - 1))
    assert [c.name for c in rep.failures()] == ["log pullback on B1"]


def test_ord_fd_mutated_halving():
    rep = ord_fd_case_checks(d, halving=F(1))
    assert [c.name for c in rep.failures()] == ["tangential case sums to 1"]


def test_domain_guard():
    with pytest.raises(DomainError):
        secant_resolution_ledger(3)
    with pytest.raises(DomainError):
        minimax_ord_bound(3)
