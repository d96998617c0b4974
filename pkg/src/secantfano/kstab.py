"""K-stability invariants of Sigma and the equivariant S < A criterion.

Aut(Sigma) = PGL(2) has three orbits on Sigma: the curve C, T minus C, and the
complement of T.  An invariant prime divisor over Sigma is therefore either T
itself or has centre C; those two cases are all the criterion needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chow import anticanonical_volume, cylinder_divisor_check
from .errors import DivisionByZero, DomainError
from .ledger import lct_from_ledger, log_discrepancy, ord_fd_case_checks, secant_resolution_ledger
from .report import Check, Report
from .scalar import (
    PiecewisePoly,
    Scalar,
    UPoly,
    coerce_d,
    format_scalar,
    is_positive_on,
    is_symbolic,
    leq_on,
    piecewise_integrate,
    require_domain,
    vanishing_threshold,
)

DIMENSION = 3

# orbit decomposition of Sigma under Aut(Sigma) = PGL(2, C); taken as given
AUT_ORBITS = ("C", "T \\ C", "Sigma \\ T")
INVARIANT_CASES = ("T", "centre C")


@dataclass
class DivisorInvariants:
    name: str
    A: Scalar
    tau: Scalar | None = None
    S: Scalar | None = None
    S_is_bound: bool = False
    ord_on_boundary: Scalar | None = None

    def fujita_inequality_holds(self, n: int = DIMENSION) -> bool | None:
        """S <= n/(n+1) tau, when both are known exactly."""
        if self.S is None or self.tau is None or self.S_is_bound:
            return None
        return _leq(self.S, Fraction(n, n + 1) * self.tau)


def _leq(a, b) -> bool:
    if is_symbolic(a) or is_symbolic(b):
        return leq_on(a, b)
    return a <= b


def _positive(x) -> bool:
    return is_positive_on(x) if is_symbolic(x) else x > 0


@dataclass(frozen=True)
class FujitaBoundInput:
    n: int
    t: Scalar
    s: Scalar
    A: Scalar = Fraction(1)

    def __post_init__(self):
        if not _positive(self.t):
            raise DomainError(f"t = {format_scalar(self.t)} must be positive")
        if not _leq(self.t, self.s):
            raise DomainError(f"need t <= s, got t = {format_scalar(self.t)}, s = {format_scalar(self.s)}")


def fujita_bound(inp: FujitaBoundInput):
    """Upper bound (A/(n+1)) ((n-1)/s + 1/t) for S(F)."""
    return inp.A / (inp.n + 1) * ((inp.n - 1) / inp.s + 1 / inp.t)


def cubic_volume(V, tau=1, tail=1) -> PiecewisePoly:
    """x -> V (1 - x/tau)^3 on [0, tau), zero on [tau, tau + tail)."""
    tau = Fraction(tau)
    piece = UPoly((1, -1 / tau)) ** 3
    return PiecewisePoly([0, tau, tau + tail], [piece.scale(V), UPoly()])


def tangent_surface_volume(d="symbolic") -> PiecewisePoly:
    """vol(-K - xT); T ~ -K_Sigma so this is (1 - x)^3 (-K)^3."""
    return cubic_volume(anticanonical_volume(d), 1)


def s_invariant(volume: PiecewisePoly, anticanonical_vol):
    if anticanonical_vol == 0:
        raise DivisionByZero("anticanonical volume is zero")
    if volume(volume.lo) != anticanonical_vol:
        raise ValueError("volume function does not start at the anticanonical volume")
    if not volume.eventually_zero():
        raise DomainError("volume function must vanish past its domain")
    return piecewise_integrate(volume, volume.lo, volume.hi) / anticanonical_vol


def pseudoeffective_threshold(volume: PiecewisePoly):
    return vanishing_threshold(volume)


def volume_scaling_identity_check(ord_D0, s_inv_A, x, base_volume: PiecewisePoly, n: int = DIMENSION) -> bool:
    """vol(x) == ((ord - x)/(ord - s^-1 A))^n vol(s^-1 A) for the given volume."""
    ord_D0, s_inv_A, x = Fraction(ord_D0), Fraction(s_inv_A), Fraction(x)
    if not (s_inv_A <= x < ord_D0):
        raise DomainError(f"x = {x} must lie in [{s_inv_A}, {ord_D0})")
    rhs = ((ord_D0 - x) / (ord_D0 - s_inv_A)) ** n * base_volume(s_inv_A)
    return base_volume(x) == rhs


def tangent_surface_invariants(d="symbolic") -> DivisorInvariants:
    d = coerce_d(d)
    vol = tangent_surface_volume(d)
    ledger = secant_resolution_ledger(d)
    return DivisorInvariants(
        name="T",
        A=log_discrepancy(ledger, "T"),
        tau=pseudoeffective_threshold(vol),
        S=s_invariant(vol, anticanonical_volume(d)),
        ord_on_boundary=ledger.coefficient("T", "T"),
    )


def equivariant_alpha(d="symbolic"):
    """alpha_{Aut(Sigma)}(Sigma) = lct(Sigma, T).

    T is the only invariant prime divisor that is Q-linearly equivalent to
    -K_Sigma, so the equivariant alpha invariant is its lct.
    """
    d = coerce_d(d)
    require_domain(d)
    return lct_from_ledger(secant_resolution_ledger(d), "T").value


def alpha_upper_bound_witness(d="symbolic") -> dict:
    """D = 2 beta(pi^-1 l) ~ -K_Sigma has lct at most 1/2, so alpha(Sigma) <= 1/2."""
    d = coerce_d(d)
    require_domain(d)
    line_check = cylinder_divisor_check(d).checks[0]
    ratio = line_check.detail["ratio_to_minus_K"]
    multiplicity = 2
    a_line = Fraction(1)  # prime divisor on Sigma
    return {
        "divisor_description": "D = 2*beta(pi^-1(l)), l a line in P^2",
        "class_is_anticanonical": line_check.passed and multiplicity * ratio == 1,
        "multiplicity": multiplicity,
        "lct_upper_bound": a_line / multiplicity,
    }


def zhuang_check(d="symbolic", t=None) -> Report:
    """Check S < A for every Aut(Sigma)-invariant divisor over Sigma.

    ``t`` overrides the lct floor used for divisors centred on C; the default
    is the equivariant lct (d+2)/(2d).  With the plain alpha bound t = 1/2 the
    margin collapses to 0 and the verdict is inconclusive.
    """
    d = coerce_d(d)
    require_domain(d)
    rep = Report("equivariant S < A criterion")

    inv_t = tangent_surface_invariants(d)
    margin_t = inv_t.A - inv_t.S
    rep.add(
        Check(
            "T",
            _positive(margin_t) and bool(inv_t.fujita_inequality_holds()),
            "S(T) = int_0^1 (1-x)^3 dx = 1/4 < 1 = A(T)",
            {"case": "T", "A": inv_t.A, "S_or_bound": inv_t.S, "margin": margin_t, "tau": inv_t.tau},
        )
    )

    lct_floor = equivariant_alpha(d) if t is None else t
    s = Fraction(1)
    support = ord_fd_case_checks(d)
    factor = fujita_bound(FujitaBoundInput(DIMENSION, lct_floor, s, Fraction(1)))
    margin_c = 1 - factor
    rep.add(
        Check(
            "centre C",
            support.passed and _positive(margin_c),
            "S(F) <= (A(F)/4)(2/s + 1/t) with s = 1, t = lct(Sigma, T)",
            {
                "case": "centre C",
                "A": "A(F)",
                "S_or_bound": f"A(F) * {format_scalar(factor)}",
                "margin": f"A(F) * {format_scalar(margin_c)}",
                "t": lct_floor,
                "s": s,
                "bound_factor": factor,
                "margin_factor": margin_c,
                "order_estimate_checks_pass": support.passed,
            },
        )
    )

    polystable = rep.passed
    rep.data = {
        "d": d,
        "verdict": "K-polystable" if polystable else "inconclusive",
        "group": "Aut(Sigma) = PGL(2, C), reductive (assumed)",
        "orbits": list(AUT_ORBITS),
        "delta": (
            "1 (consequence: K-polystable, and not K-stable because Aut(Sigma) is infinite; not computed)"
            if polystable
            else "not derived"
        ),
    }
    return rep
