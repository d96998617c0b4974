"""Exact scalars: rationals, rational functions in one variable ``d``, and
piecewise polynomials in ``x``.

Concrete computations use :class:`fractions.Fraction`.  Symbolic ones use
:class:`RatFunc`, a canonical quotient of polynomials in ``d`` over Q.  Most of
the geometry code is written once against the shared operator protocol, so the
same function runs at ``d = 7`` or with ``d`` an indeterminate.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .errors import DivisionByZero, DomainError, IndefiniteSign, PoleError

__all__ = [
    "UPoly",
    "RatFunc",
    "PiecewisePoly",
    "Scalar",
    "symbol_d",
    "coerce_d",
    "is_symbolic",
    "rat_arith",
    "ratfunc_arith",
    "ratfunc_eval",
    "piecewise_integrate",
    "vanishing_threshold",
    "sign_range_on",
    "is_positive_on",
    "is_nonnegative_on",
    "leq_on",
    "lt_on",
    "definite_sign_on",
    "require_domain",
    "poly_gcd",
    "format_scalar",
    "split_num_den",
    "DOMAIN_LO",
]

# smallest degree of the rational normal curve for which Sigma is a singular threefold
DOMAIN_LO = Fraction(4)


def _lift(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(c, int):
        return Fraction(c)
    return c


class UPoly:
    """Dense univariate polynomial, coefficients stored low degree first.

    Coefficients may be Fractions or RatFuncs; anything supporting field
    arithmetic and ``== 0`` works.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_lift(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls) -> "UPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "UPoly":
        return cls((c,))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self):
        return f"UPoly({list(self.coeffs)!r})"

    def __eq__(self, other):
        other = _as_upoly(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_upoly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        zero = Fraction(0)
        return UPoly(
            (a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero)
            for i in range(n)
        )

    __radd__ = __add__

    def __neg__(self):
        return UPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _as_upoly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_upoly(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _as_upoly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = UPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "UPoly":
        return UPoly(c * a for a in self.coeffs)

    def __divmod__(self, other: "UPoly"):
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree()
        lc = other.lc()
        if len(rem) - 1 < dq:
            return UPoly(), self
        quo = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lc
            quo[k] = c
            if c == 0:
                continue
            for j, oj in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * oj
        return UPoly(quo), UPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        lc = self.lc()
        return UPoly(c / lc for c in self.coeffs)

    def derivative(self) -> "UPoly":
        return UPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def antiderivative(self) -> "UPoly":
        return UPoly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "UPoly") -> "UPoly":
        acc = UPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + UPoly.const(c)
        return acc


def _as_upoly(x):
    if isinstance(x, UPoly):
        return x
    if isinstance(x, (int, Fraction, RatFunc)) and not isinstance(x, bool):
        return UPoly.const(x)
    return None


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# rational functions in d


class RatFunc:
    """Element of Q(d) kept as num/den with gcd 1 and monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_upoly(num) if not isinstance(num, UPoly) else num
        den = UPoly.const(1) if den is None else (_as_upoly(den) if not isinstance(den, UPoly) else den)
        if num is None or den is None:
            raise TypeError("RatFunc needs polynomial numerator and denominator")
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = UPoly(), UPoly.const(1)
            return
        g = poly_gcd(num, den)
        if g.degree() > 0:
            num, den = num // g, den // g
        lc = den.lc()
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        self.num, self.den = num, den

    @classmethod
    def variable(cls) -> "RatFunc":
        return cls(UPoly.x())

    @classmethod
    def _raw(cls, num: UPoly, den: UPoly) -> "RatFunc":
        obj = object.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    def normalized(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.lc() / self.den.lc()

    def __repr__(self):
        return f"RatFunc({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant())
        return hash((self.num.coeffs, self.den.coeffs))

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.num.is_zero():
                raise DivisionByZero("zero to a negative power")
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc._raw(self.num ** n, self.den ** n).normalized() if n else RatFunc(1)

    def eval(self, n) -> Fraction:
        x = Fraction(n)
        den = self.den(x)
        if den == 0:
            raise PoleError(f"{self} has a pole at d = {x}")
        return self.num(x) / den

    __call__ = eval


def _coerce(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, Fraction)):
        return RatFunc._raw(UPoly.const(x) if x else UPoly(), UPoly.const(1))
    return None


Scalar = Union[Fraction, RatFunc]


def symbol_d() -> RatFunc:
    return RatFunc.variable()


def is_symbolic(x) -> bool:
    return isinstance(x, RatFunc)


def coerce_d(d) -> Scalar:
    """Normalise a user-facing ``d`` (int, Fraction, "symbolic" or RatFunc)."""
    if isinstance(d, RatFunc):
        return d
    if isinstance(d, str):
        if d.strip().lower() in ("symbolic", "d", "sym"):
            return symbol_d()
        return Fraction(int(d))
    if isinstance(d, bool):
        raise TypeError("d must be an integer")
    if isinstance(d, Fraction):
        if d.denominator != 1:
            raise DomainError(f"d must be an integer, got {d}")
        return d
    if isinstance(d, int):
        return Fraction(d)
    raise TypeError(f"cannot use {d!r} as d")


def require_domain(d: Scalar, lo=DOMAIN_LO) -> None:
    if not is_symbolic(d) and d < lo:
        raise DomainError(f"d = {d} is out of range; the secant variety is treated for d >= {lo}")


def rat_arith(a, b, op: str):
    a, b = Fraction(a), Fraction(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero(f"{a} / 0")
        return a / b
    if op == "cmp":
        return (a > b) - (a < b)
    raise ValueError(f"unknown op {op!r}")


def ratfunc_arith(f, g, op: str) -> RatFunc:
    f, g = _coerce(f), _coerce(g)
    if f is None or g is None:
        raise TypeError("ratfunc_arith needs rational functions or rationals")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown op {op!r}")


def ratfunc_eval(f, n) -> Fraction:
    if isinstance(f, RatFunc):
        return f.eval(n)
    return Fraction(f)


# ---------------------------------------------------------------------------
# sign analysis on [lo, oo)


def _sturm_chain(p: UPoly) -> list[UPoly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _variations(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _var_at(chain, x) -> int:
    return _variations([_sign(q(x)) for q in chain])


def _var_at_inf(chain) -> int:
    return _variations([_sign(q.lc()) for q in chain])


def _cauchy_bound(p: UPoly) -> Fraction:
    lc = p.lc()
    return 1 + max((abs(c / lc) for c in p.coeffs[:-1]), default=Fraction(0))


def _squarefree(p: UPoly) -> UPoly:
    g = poly_gcd(p, p.derivative())
    return p // g if g.degree() > 0 else p.monic()


def _split_point(p: UPoly, lo: Fraction, hi: Fraction) -> Fraction:
    width = hi - lo
    for k in (2, 3, 5, 7, 11, 13):
        m = lo + width / k
        if p(m) != 0:
            return m
    # p has finitely many roots so some dyadic point works
    k = 17
    while True:
        m = lo + width / k
        if p(m) != 0:
            return m
        k += 1


def _isolate(p: UPoly, chain, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    count = _var_at(chain, lo) - _var_at(chain, hi)
    if count == 0:
        return []
    if count == 1:
        return [(lo, hi)]
    mid = _split_point(p, lo, hi)
    return _isolate(p, chain, lo, mid) + _isolate(p, chain, mid, hi)


def _gap_signs(p: UPoly, lo: Fraction) -> tuple[set[int], bool]:
    """Signs p takes on the root-free gaps of [lo, oo), and whether it has a root there."""
    has_root = False
    x_minus_lo = UPoly((-lo, 1))
    while p.degree() > 0 and p(lo) == 0:
        # (x - lo)^k is positive on (lo, oo) and does not affect gap signs
        has_root = True
        p = p // x_minus_lo
    if p.degree() <= 0:
        return {_sign(p.lc())}, has_root
    sf = _squarefree(p)
    chain = _sturm_chain(sf)
    hi = max(_cauchy_bound(sf), lo) + 1
    intervals = _isolate(sf, chain, lo, hi)
    samples = [lo] + [b for _, b in intervals]
    return {_sign(p(x)) for x in samples}, has_root or bool(intervals)


def sign_range_on(f, lo=DOMAIN_LO) -> tuple[int, int]:
    """(min sign, max sign) of ``f`` over the real interval [lo, oo).

    Fractions are treated as constants.  Raises PoleError when the denominator
    vanishes inside the interval.
    """
    lo = Fraction(lo)
    if not isinstance(f, RatFunc):
        s = _sign(Fraction(f))
        return s, s
    if f.num.is_zero():
        return 0, 0
    den_signs, den_root = _gap_signs(f.den, lo)
    if den_root:
        raise PoleError(f"{f} has a pole on [{lo}, oo)")
    (sd,) = den_signs
    num_signs, num_root = _gap_signs(f.num, lo)
    signs = {s * sd for s in num_signs}
    if num_root:
        signs.add(0)
    return min(signs), max(signs)


def is_positive_on(f, lo=DOMAIN_LO) -> bool:
    return sign_range_on(f, lo)[0] > 0


def is_nonnegative_on(f, lo=DOMAIN_LO) -> bool:
    return sign_range_on(f, lo)[0] >= 0


def leq_on(f, g, lo=DOMAIN_LO) -> bool:
    """f <= g for every real d >= lo (or just f <= g for rationals)."""
    return is_nonnegative_on(g - f, lo)


def lt_on(f, g, lo=DOMAIN_LO) -> bool:
    return is_positive_on(g - f, lo)


def definite_sign_on(f, lo=DOMAIN_LO) -> int:
    smin, smax = sign_range_on(f, lo)
    if smin < 0 < smax:
        raise IndefiniteSign(f"{f} changes sign on [{lo}, oo)")
    return smin if smin else smax


# ---------------------------------------------------------------------------
# text form


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _format_int_poly(coeffs: Sequence[int], var: str) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _integer_parts(f: RatFunc) -> tuple[list[int], list[int]]:
    """Primitive integer coefficient lists proportional to (num, den)."""
    allc = list(f.num.coeffs) + list(f.den.coeffs)
    L = reduce(_lcm, (c.denominator for c in allc), 1)
    num = [int(c * L) for c in f.num.coeffs]
    den = [int(c * L) for c in f.den.coeffs]
    G = reduce(math.gcd, (abs(c) for c in num + den if c), 0) or 1
    return [c // G for c in num], [c // G for c in den]


def format_ratfunc(f: RatFunc, var: str = "d") -> str:
    if f.num.is_zero():
        return "0"
    num, den = _integer_parts(f)
    ns = _format_int_poly(num, var)
    if den == [1]:
        return ns
    ds = _format_int_poly(den, var)
    if sum(1 for c in num if c) > 1:
        ns = f"({ns})"
    if sum(1 for c in den if c) > 1 or "*" in ds:
        ds = f"({ds})"
    return f"{ns}/{ds}"


def format_scalar(x) -> str:
    if isinstance(x, RatFunc):
        return format_ratfunc(x)
    if isinstance(x, bool):
        return str(x).lower()
    return str(x)


def split_num_den(x) -> tuple[str, str]:
    """Numerator and denominator as separate strings (used by CSV output)."""
    if isinstance(x, RatFunc):
        if x.num.is_zero():
            return "0", "1"
        num, den = _integer_parts(x)
        return _format_int_poly(num, "d"), _format_int_poly(den, "d")
    x = Fraction(x)
    return str(x.numerator), str(x.denominator)


# ---------------------------------------------------------------------------
# piecewise polynomials in x


class PiecewisePoly:
    """Piecewise polynomial on [x_0, x_m]; piece i is valid on [x_i, x_{i+1}).

    Breakpoints are rationals.  Piece coefficients may be symbolic in d.
    """

    __slots__ = ("breakpoints", "pieces")

    def __init__(self, breakpoints: Sequence, pieces: Sequence):
        bps = tuple(Fraction(b) for b in breakpoints)
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        ps = tuple(p if isinstance(p, UPoly) else UPoly(p) for p in pieces)
        if len(ps) != len(bps) - 1:
            raise ValueError("need exactly one piece per interval")
        self.breakpoints = bps
        self.pieces = ps

    def __repr__(self):
        return f"PiecewisePoly({list(map(str, self.breakpoints))}, {list(self.pieces)})"

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def hi(self) -> Fraction:
        return self.breakpoints[-1]

    def _piece_index(self, x: Fraction) -> int:
        if x < self.lo or x > self.hi:
            raise DomainError(f"x = {x} outside [{self.lo}, {self.hi}]")
        for i in range(len(self.pieces)):
            if x < self.breakpoints[i + 1]:
                return i
        return len(self.pieces) - 1  # x == hi: left limit of the last piece

    def __call__(self, x):
        x = Fraction(x)
        return self.pieces[self._piece_index(x)](x)

    def scale(self, c) -> "PiecewisePoly":
        return PiecewisePoly(self.breakpoints, [p.scale(c) for p in self.pieces])

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        if bps[0] != self.lo or bps[0] != other.lo or bps[-1] != self.hi or bps[-1] != other.hi:
            raise DomainError("piecewise sum needs identical domains")
        pieces = [
            self.pieces[self._piece_index(a)] + other.pieces[other._piece_index(a)]
            for a in bps[:-1]
        ]
        return PiecewisePoly(bps, pieces)

    def eventually_zero(self) -> bool:
        last = self.pieces[-1]
        return last.is_zero() or last(self.hi) == 0


def piecewise_integrate(v: PiecewisePoly, lo, hi):
    """Exact integral of ``v`` over [lo, hi]; reversed bounds flip the sign."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        return -piecewise_integrate(v, hi, lo)
    if lo < v.lo or hi > v.hi:
        raise DomainError(f"[{lo}, {hi}] is not inside [{v.lo}, {v.hi}]")
    total = Fraction(0)
    for a, b, piece in zip(v.breakpoints, v.breakpoints[1:], v.pieces):
        a, b = max(a, lo), min(b, hi)
        if a >= b or piece.is_zero():
            continue
        F = piece.antiderivative()
        total = total + (F(b) - F(a))
    return total


def vanishing_threshold(v: PiecewisePoly) -> Fraction:
    """Infimum of the x beyond which ``v`` is identically zero.

    The input is read as extended by zero past its last breakpoint, so a last
    piece that reaches zero at the right end also counts as vanishing there.
    """
    if not v.eventually_zero():
        raise DomainError("volume function never vanishes on its domain")
    for i in range(len(v.pieces) - 1, -1, -1):
        if not v.pieces[i].is_zero():
            return v.breakpoints[i + 1]
    return v.lo
