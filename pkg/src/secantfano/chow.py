"""Chow ring of B = P(E) over P^2 and divisor classes on B.

A class is a combination of the monomials h^i xi^j (h the pullback of a line,
xi the tautological class) reduced by h^3 = 0 and xi^2 = c1*h*xi - c2*h^2.
With the normalisation xi*h^2 = 1 (one point), degree-3 classes are read off
the coefficient of h^2*xi.

Chern data of E: c1 = d - 1 comes from det E = O(d - 1).  c2 is fixed by
requiring xi^3 = c1^2 - c2 to equal deg Sigma = (d-1)(d-2)/2, which gives
c2 = d(d - 1)/2; ``derive_c2`` redoes that solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial

from .errors import DomainError, VerificationError
from .report import Check, Report
from .scalar import Scalar, coerce_d, is_symbolic, require_domain

# monomials h^i xi^j surviving reduction, in storage order
BASIS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (2, 1))
POINT = (2, 1)
_INDEX = {m: k for k, m in enumerate(BASIS)}


def derive_c2(d) -> Scalar:
    """Solve (d-1)^2 - c2 = (d-1)(d-2)/2 for c2."""
    d = coerce_d(d)
    return (d - 1) ** 2 - (d - 1) * (d - 2) / 2


@dataclass(frozen=True, eq=False)
class ChowRing:
    d: Scalar

    @property
    def c1(self):
        return self.d - 1

    @property
    def c2(self):
        return self.d * (self.d - 1) / 2

    def __eq__(self, other):
        return isinstance(other, ChowRing) and self.d == other.d

    def __hash__(self):
        return hash(self.d)

    @cached_property
    def _reduced(self) -> dict:
        return {}

    def reduce_monomial(self, i: int, j: int) -> dict:
        """h^i xi^j as {basis monomial: coefficient}."""
        key = (i, j)
        cache = self._reduced
        if key in cache:
            return cache[key]
        if i >= 3:
            out = {}
        elif j <= 1:
            out = {key: Fraction(1)}
        else:
            # xi^j = xi^(j-2) * (c1 h xi - c2 h^2)
            out = {}
            for mono, coeff in ((( i + 1, j - 1), self.c1), ((i + 2, j - 2), -self.c2)):
                for m, c in self.reduce_monomial(*mono).items():
                    out[m] = out.get(m, 0) + coeff * c
            out = {m: c for m, c in out.items() if c != 0}
        cache[key] = out
        return out

    def element(self, coeffs: dict) -> "ChowClass":
        vec = [Fraction(0)] * len(BASIS)
        for (i, j), c in coeffs.items():
            for m, r in self.reduce_monomial(i, j).items():
                vec[_INDEX[m]] = vec[_INDEX[m]] + c * r
        return ChowClass(self, tuple(vec))

    @property
    def one(self) -> "ChowClass":
        return self.element({(0, 0): 1})

    @property
    def h(self) -> "ChowClass":
        return self.element({(1, 0): 1})

    @property
    def xi(self) -> "ChowClass":
        return self.element({(0, 1): 1})

    def pullback_from_sigma(self, multiple_of_H) -> "ChowClass":
        """beta^* of (multiple_of_H) * H, Pic(Sigma) being generated by H over Q."""
        return multiple_of_H * self.xi


@dataclass(frozen=True, eq=False)
class ChowClass:
    ring: ChowRing
    coeffs: tuple

    def coefficient(self, i: int, j: int):
        return self.coeffs[_INDEX[(i, j)]]

    def degrees(self) -> set:
        return {i + j for (i, j), c in zip(BASIS, self.coeffs) if c != 0}

    def is_divisor(self) -> bool:
        return self.degrees() <= {1}

    @property
    def h_coeff(self):
        return self.coefficient(1, 0)

    @property
    def xi_coeff(self):
        return self.coefficient(0, 1)

    def degree_number(self):
        return self.coefficient(*POINT)

    def _check_ring(self, other: "ChowClass"):
        if self.ring != other.ring:
            raise ValueError("classes live in different Chow rings")

    def __eq__(self, other):
        if not isinstance(other, ChowClass):
            if other == 0:
                return all(c == 0 for c in self.coeffs)
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __add__(self, other):
        if not isinstance(other, ChowClass):
            return NotImplemented
        self._check_ring(other)
        return ChowClass(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return ChowClass(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, ChowClass):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ChowClass):
            self._check_ring(other)
            prod = {}
            for (i1, j1), a in zip(BASIS, self.coeffs):
                if a == 0:
                    continue
                for (i2, j2), b in zip(BASIS, other.coeffs):
                    if b == 0:
                        continue
                    key = (i1 + i2, j1 + j2)
                    prod[key] = prod.get(key, 0) + a * b
            return self.ring.element(prod)
        try:
            return ChowClass(self.ring, tuple(other * a for a in self.coeffs))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.ring.one
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self):
        from .scalar import format_scalar

        terms = []
        for (i, j), c in zip(BASIS, self.coeffs):
            if c == 0:
                continue
            mono = "*".join(
                p for p in (f"h^{i}" if i > 1 else "h" * i, f"xi^{j}" if j > 1 else "xi" * j) if p
            ) or "1"
            terms.append(f"({format_scalar(c)})*{mono}")
        return "ChowClass(" + (" + ".join(terms) or "0") + ")"


def triple_intersection(a: ChowClass, b: ChowClass, c: ChowClass):
    for cls in (a, b, c):
        if not cls.is_divisor():
            raise ValueError(f"{cls!r} is not a divisor class")
    return (a * b * c).degree_number()


class NamedDivisors(dict):
    """Divisor classes on B by name, checked against the class relations."""

    NAMES = ("H", "A", "Z", "K_B", "T_tilde", "ell_fiber", "H0")

    def __init__(self, d="symbolic"):
        ring = ChowRing(coerce_d(d))
        self.ring = ring
        d = ring.d
        H, A = ring.xi, ring.h
        super().__init__(
            H=H,
            A=A,
            Z=2 * H - (d - 2) * A,
            K_B=-2 * H + (d - 4) * A,
            T_tilde=2 * A,  # pi^{-1} of the conic Q
            ell_fiber=A,  # pi^{-1} of a line
            H0=H,
        )
        self.verify()

    def verify(self) -> None:
        bad = [rel for rel, ok in self.relations().items() if not ok]
        if bad:
            raise VerificationError(f"divisor catalogue violates {bad}")

    def relations(self) -> dict:
        d = self.ring.d
        H, A = self["H"], self["A"]
        return {
            "Z = 2H - (d-2)A": self["Z"] == 2 * H - (d - 2) * A,
            "K_B = -2H + (d-4)A": self["K_B"] == -2 * H + (d - 4) * A,
            "K_B + Z + T_tilde = 0": self["K_B"] + self["Z"] + self["T_tilde"] == 0,
            "H0 = H": self["H0"] == H,
        }


def degree(d="symbolic"):
    """H^3 = deg Sigma."""
    ring = ChowRing(coerce_d(d))
    return triple_intersection(ring.xi, ring.xi, ring.xi)


def _solve_2x2(col_a, col_b, rhs):
    """Solve x*col_a + y*col_b = rhs for 2-vectors by Cramer's rule."""
    det = col_a[0] * col_b[1] - col_a[1] * col_b[0]
    if det == 0:
        raise ArithmeticError("singular 2x2 system")
    x = (rhs[0] * col_b[1] - rhs[1] * col_b[0]) / det
    y = (col_a[0] * rhs[1] - col_a[1] * rhs[0]) / det
    return x, y


def _xh(cls: ChowClass):
    return (cls.xi_coeff, cls.h_coeff)


def solve_anticanonical_coeffs(d="symbolic"):
    """(a, b) with -K_Sigma = a H and K_B = beta^* K_Sigma - b Z.

    Both sides are compared in the (xi, h) coordinates of Pic(B).
    """
    div = NamedDivisors(d)
    ring = div.ring
    if not is_symbolic(ring.d) and ring.d == 2:
        raise ArithmeticError("singular system at d = 2")
    # K_B = a * (-xi) + b * (-Z)
    a, b = _solve_2x2(_xh(-ring.xi), _xh(-div["Z"]), _xh(div["K_B"]))
    if -a * ring.xi - b * div["Z"] != div["K_B"]:
        raise VerificationError("anticanonical solve does not reproduce K_B")
    return a, b


def anticanonical_class(d="symbolic") -> ChowClass:
    """beta^*(-K_Sigma) on B."""
    a, _ = solve_anticanonical_coeffs(d)
    return ChowRing(coerce_d(d)).pullback_from_sigma(a)


def anticanonical_volume(d="symbolic"):
    a_cls = anticanonical_class(d)
    return triple_intersection(a_cls, a_cls, a_cls)


def solve_pullback_coeff(d="symbolic"):
    """c with beta^* T = T_tilde + c Z, using T ~ -K_Sigma."""
    div = NamedDivisors(d)
    rest = anticanonical_class(d) - div["T_tilde"]
    z = div["Z"]
    c = rest.xi_coeff / z.xi_coeff
    if c * z != rest:
        raise VerificationError("beta^*T - T_tilde is not a multiple of Z")
    return c


def cylinder_divisor_check(d="symbolic", scale=None) -> Report:
    """Class arithmetic behind D = scale * (beta(pi^-1 l) + beta(H0)) ~ -K_Sigma.

    ``scale`` defaults to 4/d; passing anything else is how the mutation tests
    confirm the check can fail.
    """
    div = NamedDivisors(d)
    ring = div.ring
    d = ring.d
    if scale is None:
        scale = 4 / d
    minus_k = anticanonical_class(d)
    a = minus_k.xi_coeff  # -K_Sigma = a H

    rep = Report("cylinder divisor class")
    # (i) pi^-1(l) + Z/(d-2) is a pullback from Sigma, and it is half of -K
    ell_pullback = div["ell_fiber"] + (1 / (d - 2)) * div["Z"]
    ell_multiple = ell_pullback.xi_coeff  # as a multiple of H
    ok_pullback = ell_pullback == ring.pullback_from_sigma(ell_multiple)
    ell_vs_k = ell_multiple / a
    rep.add(
        Check(
            "line preimage is -K/2",
            ok_pullback and ell_vs_k == Fraction(1, 2),
            "pi^-1(l) + Z/(d-2) = beta^* beta(pi^-1 l) ~ -(1/2) K_Sigma",
            {"beta_pullback_in_H": ell_multiple, "ratio_to_minus_K": ell_vs_k},
        )
    )
    # (ii) H0 ~ H ~ ((d-2)/4)(-K)
    h0_vs_k = div["H0"].xi_coeff / a
    rep.add(
        Check(
            "tautological section is ((d-2)/4)(-K)",
            div["H0"] == div["H"] and h0_vs_k == (d - 2) / 4,
            "beta(H0) ~ H ~ -((d-2)/4) K_Sigma",
            {"ratio_to_minus_K": h0_vs_k},
        )
    )
    # (iii) scale * (1/2 + (d-2)/4) = 1, and the same statement on classes
    total = scale * (ell_vs_k + h0_vs_k)
    d_class = scale * (ring.pullback_from_sigma(ell_multiple) + div["H0"])
    rep.add(
        Check(
            "D ~ -K_Sigma",
            total == 1 and d_class == minus_k,
            "D := (4/d)(beta(pi^-1 l) + beta(H0)) ~ -K_Sigma",
            {"scale": scale, "coefficient_of_minus_K": total},
        )
    )
    return rep


@dataclass(frozen=True)
class HigherSecant:
    k: int
    d: Scalar
    anticanonical_coeff: Scalar
    degree: Scalar
    anticanonical_volume: Scalar
    discrepancy_coeff: Scalar

    def as_dict(self) -> dict:
        return {
            "anticanonical_coeff": self.anticanonical_coeff,
            "degree": self.degree,
            "anticanonical_volume": self.anticanonical_volume,
            "discrepancy_coeff": self.discrepancy_coeff,
        }


def higher_secant_invariants(k: int, d="symbolic") -> HigherSecant:
    """Closed forms for the k-th secant variety Sigma_k of the degree-d curve.

    -K = 2(k+1)/(d-2k) H_k, deg = C(d-k, k+1), and Z_{k-1} has discrepancy
    coefficient (d-2k-2)/(d-2k).
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    d = coerce_d(d)
    if not is_symbolic(d) and d < 2 * k + 1:
        raise DomainError(f"need d >= 2k+1 = {2 * k + 1}, got d = {d}")
    coeff = 2 * (k + 1) / (d - 2 * k)
    deg = Fraction(1, factorial(k + 1))
    for i in range(k + 1):
        deg = (d - k - i) * deg
    return HigherSecant(
        k=k,
        d=d,
        anticanonical_coeff=coeff,
        degree=deg,
        anticanonical_volume=coeff ** (2 * k + 1) * deg,
        discrepancy_coeff=(d - 2 * k - 2) / (d - 2 * k),
    )


def check_domain(d) -> Scalar:
    d = coerce_d(d)
    require_domain(d)
    return d
