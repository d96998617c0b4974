"""Blow-up ledgers: total transforms and discrepancies through a chain of
blow-ups of a threefold along smooth curves.

Each tracked divisor W (a boundary such as T, or the relative canonical class
K = K_top - f^*K_bottom) is a coefficient vector over the prime divisors of the
current model.  Blowing up a curve contained in divisors V_1, ..., V_r with
multiplicities m_i gives the new exceptional divisor the coefficient

    ord_E(W) = sum_i coeff_W(V_i) * m_i

and for K one adds the codimension-minus-one increment (1 for a curve in a
threefold).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import yaml

from .chow import NamedDivisors, anticanonical_class
from .errors import ConfigError, DomainError
from .expr import ExprError, evaluate
from .report import Check, Report
from .scalar import (
    DOMAIN_LO,
    Scalar,
    UPoly,
    coerce_d,
    is_nonnegative_on,
    is_positive_on,
    is_symbolic,
    leq_on,
    require_domain,
)

BUILTIN_CONFIG = "enp-secant-resolution"


@dataclass(frozen=True)
class BlowupStep:
    center_name: str
    incident: tuple  # ((divisor name, multiplicity along the center), ...)
    exceptional_name: str
    discrepancy_increment: Scalar = Fraction(1)
    tangency_halving: Scalar | None = None


@dataclass(frozen=True)
class BlowupConfig:
    name: str
    primes: tuple
    seeds: dict
    steps: tuple
    canonical: str = "K"
    aliases: dict = field(default_factory=dict)


@dataclass
class BlowupLedger:
    config: BlowupConfig
    primes: list
    tracked: dict  # tracked name -> {prime name: coefficient}
    discrepancies: dict  # exceptional name -> coefficient in K
    history: list  # tracked dicts after each step, history[0] = seeds

    def coefficient(self, tracked: str, prime: str):
        if tracked not in self.tracked:
            raise KeyError(f"untracked divisor {tracked!r}")
        return self.tracked[tracked].get(self.resolve(prime), Fraction(0))

    def resolve(self, name: str) -> str:
        name = self.config.aliases.get(name, name)
        if name not in self.primes:
            raise KeyError(f"unknown divisor {name!r}")
        return name

    def after_step(self, n: int) -> dict:
        return self.history[n]


# ---------------------------------------------------------------------------
# config loading


def _parse_scalar(value, d):
    try:
        return evaluate(value, {"d": d})
    except (ExprError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad coefficient {value!r}: {exc}") from exc


def config_from_mapping(raw: dict, d="symbolic") -> BlowupConfig:
    """Build a config from parsed YAML, evaluating coefficient expressions at d."""
    d = coerce_d(d)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    try:
        primes = tuple(str(p) for p in raw["primes"])
        seeds_raw = raw.get("seeds", {}) or {}
        steps_raw = raw.get("steps", []) or []
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"config is missing {exc}") from exc
    canonical = str(raw.get("canonical", "K"))
    seeds = {}
    for tracked, vec in seeds_raw.items():
        if not isinstance(vec, dict):
            raise ConfigError(f"seed {tracked!r} must map divisor names to coefficients")
        seeds[str(tracked)] = {str(k): _parse_scalar(v, d) for k, v in vec.items()}
    steps = []
    for i, st in enumerate(steps_raw):
        if not isinstance(st, dict) or "exceptional" not in st or "incident" not in st:
            raise ConfigError(f"step {i} needs 'exceptional' and 'incident'")
        halving = st.get("tangency_halving")
        steps.append(
            BlowupStep(
                center_name=str(st.get("center", f"center{i + 1}")),
                incident=tuple((str(k), _parse_scalar(v, d)) for k, v in st["incident"].items()),
                exceptional_name=str(st["exceptional"]),
                discrepancy_increment=_parse_scalar(st.get("discrepancy_increment", 1), d),
                tangency_halving=None if halving is None else _parse_scalar(halving, d),
            )
        )
    aliases = {str(k): str(v) for k, v in (raw.get("aliases") or {}).items()}
    return BlowupConfig(
        name=str(raw.get("name", "unnamed")),
        primes=primes,
        seeds=seeds,
        steps=tuple(steps),
        canonical=canonical,
        aliases=aliases,
    )


def load_config(source, d="symbolic") -> BlowupConfig:
    """Load a config by built-in name, path, or YAML text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith((".yaml", ".yml"))):
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"no such config file: {path}")
        text = path.read_text()
    elif source == BUILTIN_CONFIG:
        text = resources.files("secantfano").joinpath(f"configs/{BUILTIN_CONFIG}.yaml").read_text()
    else:
        text = str(source)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    return config_from_mapping(raw, d)


def builtin_config(d="symbolic") -> BlowupConfig:
    return load_config(BUILTIN_CONFIG, d)


# ---------------------------------------------------------------------------
# replay


def _nonnegative(x) -> bool:
    return is_nonnegative_on(x) if is_symbolic(x) else x >= 0


def replay(config: BlowupConfig, upto: int | None = None) -> BlowupLedger:
    primes = list(config.primes)
    if len(set(primes)) != len(primes):
        raise ConfigError("duplicate prime divisor names")
    tracked = {}
    for name, vec in config.seeds.items():
        for p in vec:
            if p not in primes:
                raise ConfigError(f"seed {name!r} mentions unknown divisor {p!r}")
        tracked[name] = {p: c for p, c in vec.items() if c != 0}
    tracked.setdefault(config.canonical, {})
    history = [{k: dict(v) for k, v in tracked.items()}]
    discrepancies = {}
    steps = config.steps if upto is None else config.steps[:upto]
    for step in steps:
        if step.exceptional_name in primes:
            raise ConfigError(f"exceptional name {step.exceptional_name!r} is already used")
        for name, mult in step.incident:
            if name not in primes:
                raise ConfigError(f"step {step.center_name!r}: unknown divisor {name!r}")
            if not _nonnegative(mult):
                raise ConfigError(f"step {step.center_name!r}: negative multiplicity for {name!r}")
        new = {}
        for w, vec in tracked.items():
            c = sum((vec.get(name, Fraction(0)) * mult for name, mult in step.incident), Fraction(0))
            if w == config.canonical:
                c = c + step.discrepancy_increment
                discrepancies[step.exceptional_name] = c
            new[w] = c
        for w, c in new.items():
            if c != 0:
                tracked[w][step.exceptional_name] = c
        primes.append(step.exceptional_name)
        history.append({k: dict(v) for k, v in tracked.items()})
    return BlowupLedger(config, primes, tracked, discrepancies, history)


def secant_resolution_ledger(d="symbolic") -> BlowupLedger:
    """The built-in resolution Sigma <- B <- B1 <- B2, replayed at d."""
    d = coerce_d(d)
    require_domain(d)
    return replay(builtin_config(d))


def scale_boundary(config: BlowupConfig, tracked: str, c) -> BlowupConfig:
    """Same config with the seed of ``tracked`` multiplied by ``c``."""
    seeds = dict(config.seeds)
    seeds[tracked] = {k: c * v for k, v in seeds[tracked].items()}
    return BlowupConfig(config.name, config.primes, seeds, config.steps, config.canonical, config.aliases)


def log_discrepancy(ledger: BlowupLedger, name: str):
    """A(F) = 1 + ord_F(K_top - f^*K_bottom)."""
    prime = ledger.resolve(name)
    return 1 + ledger.tracked[ledger.config.canonical].get(prime, Fraction(0))


@dataclass
class LctResult:
    value: Scalar
    argmin: str
    ratios: dict
    minimizers: list

    def as_dict(self) -> dict:
        return {"lct": self.value, "argmin": self.argmin, "ratios": self.ratios}


def _positive(x) -> bool:
    return is_positive_on(x) if is_symbolic(x) else x > 0


def _leq(a, b, lo) -> bool:
    if is_symbolic(a) or is_symbolic(b):
        return leq_on(a, b, lo)
    return a <= b


def lct_from_ledger(ledger: BlowupLedger, boundary: str, lo=DOMAIN_LO) -> LctResult:
    """min over resolution divisors F of A(F) / ord_F(boundary).

    Symbolic values are compared on the whole range d >= lo, so the minimiser
    returned is a minimiser for every such d.
    """
    if boundary not in ledger.tracked:
        raise KeyError(f"boundary {boundary!r} is not tracked")
    ratios = {}
    for prime in ledger.primes:
        order = ledger.tracked[boundary].get(prime, Fraction(0))
        if order == 0:
            continue
        if not _positive(order):
            raise DomainError(f"negative order of {boundary} along {prime}")
        ratios[prime] = log_discrepancy(ledger, prime) / order
    if not ratios:
        raise DomainError(f"{boundary} has zero order along every divisor")
    names = list(ratios)
    best = None
    for name in names:
        if all(_leq(ratios[name], ratios[other], lo) for other in names):
            best = name
            break
    if best is None:
        raise DomainError("no divisor attains the minimum uniformly on the domain")
    minimizers = [n for n in names if ratios[n] == ratios[best]]
    return LctResult(ratios[best], best, ratios, minimizers)


# ---------------------------------------------------------------------------
# the order estimate for C-centred divisors


@dataclass
class MinimaxResult:
    max_value: Scalar
    argmax_a: Scalar


def _ord_bounds(d):
    """The two affine bounds on ord_Delta, as polynomials in a, and a's range."""
    p = UPoly((0, d - 2))  # a(d-2), from the restriction to Z
    q = UPoly((4 / (d - 2), -2))  # 4/(d-2) - 2a, from the restriction to T_tilde
    return p, q, (Fraction(0), 2 / (d - 2))


def minimax_ord_bound(d="symbolic") -> MinimaxResult:
    """max over a in [0, 2/(d-2)] of min(a(d-2), 4/(d-2) - 2a)."""
    d = coerce_d(d)
    require_domain(d)
    p, q, (a_lo, a_hi) = _ord_bounds(d)
    # p increases and q decreases in a, so the maximum of the min is at the crossing
    a_star = (_coef(q, 0) - _coef(p, 0)) / (_coef(p, 1) - _coef(q, 1))
    if is_symbolic(d):
        if not (leq_on(a_lo, a_star) and leq_on(a_star, a_hi)):
            raise DomainError("crossing point leaves the admissible interval")
    else:
        a_star = min(max(a_star, a_lo), a_hi)
    return MinimaxResult(min_value(p(a_star), q(a_star)), a_star)


def _coef(f: UPoly, i: int):
    return f.coeffs[i] if i < len(f.coeffs) else Fraction(0)


def min_value(x, y):
    if is_symbolic(x) or is_symbolic(y):
        return x if leq_on(x, y) else y
    return min(x, y)


# restriction data: xi and h restricted to Z = P1 x P1 and to T_tilde = P1 x P1,
# as bidegrees.  On Z, H|_Z = O(0, d) and h|_Z is the class of sigma^* of a line.
# On T_tilde = P(O(d-1) + O(d-1)) over the conic, xi is O(1, d-1) and h is O(0, 2).
def restriction_table(d) -> dict:
    return {
        "Z": {"xi": (Fraction(0), d), "h": (Fraction(1), Fraction(1))},
        "T_tilde": {"xi": (Fraction(1), d - 1), "h": (Fraction(0), Fraction(2))},
    }


DIAGONAL = (Fraction(1), Fraction(1))


def restrict(cls, surface: str, d) -> tuple:
    row = restriction_table(d)[surface]
    return tuple(cls.xi_coeff * x + cls.h_coeff * h for x, h in zip(row["xi"], row["h"]))


def _holds_on_box(f: UPoly, a_range, strict=False) -> bool:
    """f(a) >= 0 (or > 0) for all d >= 4 and a in a_range; f is affine in a."""
    test = is_positive_on if strict else is_nonnegative_on
    for a in a_range:
        v = f(a)
        if is_symbolic(v):
            if not test(v):
                return False
        elif (v <= 0) if strict else (v < 0):
            return False
    return True


def ord_fd_case_checks(d="symbolic", boundary_e1_coeff=None, halving=None) -> Report:
    """Arithmetic behind the bound ord_F D <= A(F) for divisors over the curve C.

    ``boundary_e1_coeff`` (default 4/d) and ``halving`` (default from the
    built-in config) exist so that mutated inputs can be shown to fail.
    """
    d = coerce_d(d)
    require_domain(d)
    a = UPoly.x()  # ord_Z of the pullback of D; ranges over [0, 2/(d-2)]
    div = NamedDivisors(d)
    _, _, a_range = _ord_bounds(d)
    rep = Report("ord_F D <= A(F) for C-centred F")
    ledger = replay(builtin_config(d))
    if boundary_e1_coeff is None:
        boundary_e1_coeff = 4 / d
    if halving is None:
        halving = ledger.config.steps[0].tangency_halving

    a_z = log_discrepancy(ledger, "Z")
    rep.add(
        Check(
            "ord_Z D <= A(Z)",
            _holds_on_box(UPoly((a_z,)) - a, a_range) and a_z == 2 / (d - 2),
            "ord_Z D = a <= 2/(d-2) = A(Z)",
            {"A_Z": a_z},
        )
    )

    # strict transform of D: beta^*(-K) - aZ
    strict = anticanonical_class(d) - a * div["Z"]
    ok_class = strict == (4 / (d - 2) - 2 * a) * div["H"] + (a * (d - 2)) * div["A"]
    on_z = restrict(strict, "Z", d)
    on_t = restrict(strict, "T_tilde", d)
    tangency_z = restrict(div["T_tilde"], "Z", d) == tuple(2 * x for x in DIAGONAL)
    tangency_t = restrict(div["Z"], "T_tilde", d) == tuple(2 * x for x in DIAGONAL)
    c = 4 / (d - 2) - 2 * a
    stated_z = tuple(c * x + a * (d - 2) * y for x, y in zip((Fraction(0), d), DIAGONAL))
    stated_t = tuple(2 * x + c * y for x, y in zip((Fraction(0), Fraction(2)), DIAGONAL))
    # ord_Delta of an effective (p, q) class is at most min(p, q)
    bound_z = on_z[0] if _holds_on_box(on_z[1] - on_z[0], a_range) else None
    bound_t = on_t[0] if _holds_on_box(on_t[1] - on_t[0], a_range) else None
    rep.add(
        Check(
            "bidegree bounds",
            ok_class
            and tangency_z
            and tangency_t
            and on_z == stated_z
            and on_t == stated_t
            and bound_z == UPoly((0, d - 2))
            and bound_t == UPoly((4 / (d - 2), -2)),
            "ord_Delta on Z <= a(d-2); on T_tilde <= 4/(d-2) - 2a",
            {
                "class_matches": ok_class,
                "T_tilde|Z = 2 Delta": tangency_z,
                "Z|T_tilde = 2 Delta": tangency_t,
                "bidegree_on_Z": [_fmt_affine(x) for x in on_z],
                "bidegree_on_T_tilde": [_fmt_affine(x) for x in on_t],
            },
        )
    )

    mm = minimax_ord_bound(d)
    rep.add(
        Check(
            "minimax of the two bounds",
            mm.max_value == 4 / d and mm.argmax_a == 4 / (d * (d - 2)),
            "min{a(d-2), 4/(d-2) - 2a} <= 4/d, equality iff a = 4/(d(d-2))",
            {"max": mm.max_value, "argmax_a": mm.argmax_a},
        )
    )

    # tangential case: order along Delta at most half the T_tilde bound
    total = halving * UPoly((4 / (d - 2), -2)) + a + UPoly(((d - 4) / (d - 2),))
    rep.add(
        Check(
            "tangential case sums to 1",
            total == UPoly((1,)),
            "(2/(d-2) - a) + a + (d-4)/(d-2) = 1",
            {"halving": halving, "sum": _fmt_affine(total)},
        )
    )

    # first case: K_B1 + (4/d)E1 + Z1 against (beta1 beta)^* K_Sigma
    k1 = ledger.after_step(1)[ledger.config.canonical]
    lhs = {
        "Z": k1.get("Z", Fraction(0)) + 1,
        "E1": k1.get("E1", Fraction(0)) + boundary_e1_coeff,
    }
    rhs = {"Z": 2 / (d - 2), "E1": 4 / d + 2 / (d - 2)}
    lc_pair = leq_on(boundary_e1_coeff, 1) if is_symbolic(d) else boundary_e1_coeff <= 1
    rep.add(
        Check(
            "log pullback on B1",
            lhs == rhs and lc_pair,
            "K_B1 + (4/d)E1 + Z1 = (beta1 beta)^* K_Sigma + (4/d + 2/(d-2))E1 + (2/(d-2))Z1",
            {"lhs": lhs, "rhs": rhs, "boundary_coefficients_at_most_1": lc_pair},
        )
    )
    return rep


def _fmt_affine(f: UPoly) -> str:
    from .scalar import format_scalar

    c0 = f.coeffs[0] if f.coeffs else Fraction(0)
    c1 = f.coeffs[1] if len(f.coeffs) > 1 else Fraction(0)
    if c1 == 0:
        return format_scalar(c0)
    return f"{format_scalar(c0)} + ({format_scalar(c1)})*a"
