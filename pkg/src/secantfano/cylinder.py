"""Polynomial certificates for the anticanonical polar cylinder in Sigma.

Everything here is an exact identity between polynomials with rational
coefficients; there are no tolerances.  The set-theoretic statements
(complements of divisors being affine spaces) are reduced to what the algebra
can certify: coordinate maps, their inverses, and defining equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chow import cylinder_divisor_check
from .report import Check, Report
from .scalar import coerce_d, is_symbolic, require_domain


class MVPoly:
    """Sparse polynomial over Q in a fixed, ordered list of variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: dict | None = None):
        self.vars = tuple(variables)
        clean = {}
        for mono, c in (terms or {}).items():
            if len(mono) != len(self.vars):
                raise ValueError(f"monomial {mono} does not match variables {self.vars}")
            if any(e < 0 for e in mono):
                raise ValueError("negative exponent")
            c = Fraction(c)
            if c != 0:
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def const(cls, variables, c) -> "MVPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "MVPoly":
        variables = tuple(variables)
        mono = tuple(1 if v == name else 0 for v in variables)
        if sum(mono) != 1:
            raise ValueError(f"{name!r} is not one of {variables}")
        return cls(variables, {mono: 1})

    @classmethod
    def gens(cls, variables) -> tuple:
        return tuple(cls.var(variables, v) for v in variables)

    def _lift(self, other):
        if isinstance(other, MVPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable lists differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MVPoly.const(self.vars, other)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, MVPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == MVPoly.const(self.vars, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MVPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MVPoly(self.vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MVPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        out = MVPoly.const(self.vars, 1)
        for _ in range(n):
            out = out * self
        return out

    def compose(self, images: Sequence["MVPoly"]) -> "MVPoly":
        """Substitute images[i] for the i-th variable."""
        if len(images) != len(self.vars):
            raise ValueError("need one image per variable")
        target = images[0].vars if images else ()
        if any(im.vars != target for im in images):
            raise ValueError("images must share a variable list")
        powers = [{0: MVPoly.const(target, 1)} for _ in images]
        out = MVPoly(target)
        for mono, c in self.terms.items():
            term = MVPoly.const(target, c)
            for i, e in enumerate(mono):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = images[i] ** e
                    term = term * cache[e]
            out = out + term
        return out

    def subs(self, values: dict) -> "MVPoly":
        """Replace some variables by constants; the variable list is kept."""
        images = []
        for v in self.vars:
            if v in values:
                images.append(MVPoly.const(self.vars, values[v]))
            else:
                images.append(MVPoly.var(self.vars, v))
        return self.compose(images)

    def evaluate(self, point) -> Fraction:
        if isinstance(point, dict):
            point = [point[v] for v in self.vars]
        point = [Fraction(x) for x in point]
        total = Fraction(0)
        for mono, c in self.terms.items():
            t = c
            for x, e in zip(point, mono):
                if e:
                    t *= x ** e
            total += t
        return total

    def leading(self) -> tuple:
        """Lex-leading (monomial, coefficient)."""
        m = max(self.terms)
        return m, self.terms[m]

    def __divmod__(self, g: "MVPoly"):
        """Multivariate division by one polynomial in lex order."""
        g = self._lift(g)
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        gm, gc = g.leading()
        q, r, p = MVPoly(self.vars), MVPoly(self.vars), self
        while not p.is_zero():
            pm, pc = p.leading()
            if all(a >= b for a, b in zip(pm, gm)):
                t = MVPoly(self.vars, {tuple(a - b for a, b in zip(pm, gm)): pc / gc})
                q = q + t
                p = p - t * g
            else:
                lt = MVPoly(self.vars, {pm: pc})
                r = r + lt
                p = p - lt
        return q, r

    def __repr__(self):
        return f"MVPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            c = self.terms[mono]
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, mono) if e]
            body = "*".join(factors)
            a = abs(c)
            if not body:
                text = str(a)
            elif a == 1:
                text = body
            else:
                text = f"{a}*{body}"
            parts.append(("-" if c < 0 else "+", text))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map source -> target; components are in the source variables."""

    name: str
    source: tuple
    target: tuple
    components: tuple

    def __post_init__(self):
        if len(self.components) != len(self.target):
            raise ValueError("one component per target variable")
        if any(c.vars != self.source for c in self.components):
            raise ValueError("components must be written in the source variables")

    def pullback(self, poly: MVPoly) -> MVPoly:
        if poly.vars != self.target:
            raise ValueError(f"{poly} is not in the target variables {self.target}")
        return poly.compose(self.components)

    def __call__(self, point):
        return tuple(c.evaluate(point) for c in self.components)

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            c == MVPoly.var(self.source, v) for c, v in zip(self.components, self.source)
        )


def poly_compose(f: PolyMap, g: PolyMap) -> PolyMap:
    """f o g."""
    if g.target != f.source:
        raise ValueError(f"cannot compose: {g.name} lands in {g.target}, {f.name} starts from {f.source}")
    comps = tuple(c.compose(g.components) for c in f.components)
    return PolyMap(f"{f.name}o{g.name}", g.source, f.target, comps)


def identity_map(variables) -> PolyMap:
    variables = tuple(variables)
    return PolyMap("id", variables, variables, MVPoly.gens(variables))


# ---------------------------------------------------------------------------
# the maps of the construction

P1xP1 = ("s", "t", "u", "v")
P2 = ("x", "y", "z")
AFFINE_PAIR = ("s", "u")
AFFINE_PLANE = ("x", "y")
CHART = ("w0", "w1", "x", "y")  # P^1 x C^2 = B minus pi^-1(l)
C3 = ("w0", "x", "y")  # further remove H0 = V(w1)
C3_TARGET = ("w0'", "y'", "z'")


def _sigma() -> PolyMap:
    s, t, u, v = MVPoly.gens(P1xP1)
    return PolyMap("sigma", P1xP1, P2, (s * u, (t * u + s * v) / 2, t * v))


def _sigma_affine() -> PolyMap:
    s, u = MVPoly.gens(AFFINE_PAIR)
    return PolyMap("sigma|C2", AFFINE_PAIR, AFFINE_PLANE, (s * u, (s + u) / 2))


def _iota() -> PolyMap:
    s, u = MVPoly.gens(AFFINE_PAIR)
    return PolyMap("iota", AFFINE_PAIR, CHART, (s, MVPoly.const(AFFINE_PAIR, 1), s * u, (s + u) / 2))


def _gamma() -> PolyMap:
    w0, x, y = MVPoly.gens(C3)
    return PolyMap("gamma", C3, C3_TARGET, (w0, y, w0**2 - 2 * y * w0 + x))


def _gamma_inverse() -> PolyMap:
    # solve the triangular system: w0 = w0', y = y', x = z' - w0'^2 + 2 y' w0'
    w0, y, z = MVPoly.gens(C3_TARGET)
    return PolyMap("gamma^-1", C3_TARGET, C3, (w0, z - w0**2 + 2 * y * w0, y))


SIGMA = _sigma()
SIGMA_AFFINE = _sigma_affine()
IOTA = _iota()
GAMMA = _gamma()
GAMMA_INV = _gamma_inverse()


def z_equation() -> MVPoly:
    """Z on P^1 x C^2: w0^2 - 2 y w0 w1 + x w1^2."""
    w0, w1, x, y = MVPoly.gens(CHART)
    return w0**2 - 2 * y * w0 * w1 + x * w1**2


def z_equation_affine() -> MVPoly:
    w0, x, y = MVPoly.gens(C3)
    return w0**2 - 2 * y * w0 + x


def conic() -> MVPoly:
    x, y, z = MVPoly.gens(P2)
    return y**2 - x * z


def dehomogenize_w1(poly: MVPoly) -> MVPoly:
    """Set w1 = 1 and drop it from the variable list (the chart where H0 is removed)."""
    w0, x, y = MVPoly.gens(C3)
    return poly.compose([w0, MVPoly.const(C3, 1), x, y])


# ---------------------------------------------------------------------------
# checks


def ideal_membership_check(F: MVPoly | None = None) -> Report:
    """iota(C^2) lies on V(F); F defaults to the equation of Z in the chart."""
    F = z_equation() if F is None else F
    rep = Report("strict transform equation")
    pulled = IOTA.pullback(F)
    rep.add(
        Check(
            "iota^* F = 0",
            pulled.is_zero(),
            "iota(C^2) = V(w0^2 - 2y w0 w1 + x w1^2)",
            {"F": str(F), "iota^*F": str(pulled)},
        )
    )
    chart = dehomogenize_w1(F)
    rep.add(
        Check(
            "affine chart w1 = 1",
            chart == z_equation_affine(),
            "Z|C3 = V(w0^2 - 2y w0 + x)",
            {"F|w1=1": str(chart)},
        )
    )
    # tangency points s = u still lie on Z
    s, _ = MVPoly.gens(AFFINE_PAIR)
    one = MVPoly.const(AFFINE_PAIR, 1)
    on_diag = F.compose([s, one, s * s, s])
    rep.add(
        Check(
            "diagonal points lie on Z",
            on_diag.is_zero(),
            "s = u: F(s, 1, s^2, s) = 0",
            {"F(s,1,s^2,s)": str(on_diag)},
        )
    )
    # s and u are the roots of X^2 - (s+u)X + su: F(X, 1, su, (s+u)/2) with X = u
    u = MVPoly.var(AFFINE_PAIR, "u")
    other_root = F.compose([u, one, IOTA.components[2], IOTA.components[3]])
    rep.add(
        Check(
            "both roots of the quadratic",
            other_root.is_zero(),
            "s, u are the zeros of X^2 - (s+u)X + su",
            {"F(u,1,su,(s+u)/2)": str(other_root)},
        )
    )
    return rep


def gamma_plane_check(gamma: PolyMap = GAMMA, gamma_inv: PolyMap = GAMMA_INV) -> Report:
    """gamma is an isomorphism of C^3 taking V(w0^2 - 2y w0 + x) to V(z')."""
    rep = Report("shear isomorphism")
    there = poly_compose(gamma, gamma_inv)
    back = poly_compose(gamma_inv, gamma)
    rep.add(
        Check(
            "gamma o gamma^-1 = id and gamma^-1 o gamma = id",
            there.is_identity() and back.is_identity(),
            "gamma(w0, x, y) = (w0, y, w0^2 - 2y w0 + x)",
            {
                "gamma o gamma^-1": [str(c) for c in there.components],
                "gamma^-1 o gamma": [str(c) for c in back.components],
            },
        )
    )
    zprime = MVPoly.var(C3_TARGET, "z'")
    pulled = gamma.pullback(zprime)
    pushed = gamma_inv.pullback(z_equation_affine())
    rep.add(
        Check(
            "Z|C3 maps to the coordinate plane z' = 0",
            pulled == z_equation_affine() and pushed == zprime,
            "V(w0^2 - 2y w0 + x) corresponds to a coordinate plane",
            {"gamma^* z'": str(pulled), "(gamma^-1)^* F": str(pushed)},
        )
    )
    image = gamma((1, 1, 1))
    rep.add(
        Check(
            "sample point",
            image == (1, 1, 0) and z_equation_affine().evaluate((1, 1, 1)) == image[2],
            "gamma(1, 1, 1) = (1, 1, 0)",
            {"gamma(1,1,1)": list(image)},
        )
    )
    return rep


def preimage_line_decomposition_check(sigma: PolyMap = SIGMA) -> Report:
    rep = Report("tangent line and its preimage")
    s, t, u, v = MVPoly.gens(P1xP1)
    x, y, z = MVPoly.gens(P2)
    pz = sigma.pullback(z)
    rep.add(
        Check(
            "sigma^* z = t v",
            pz == t * v,
            "sigma^-1(l) = V(v) u V(t)",
            {"sigma^*z": str(pz)},
        )
    )
    on_line = conic().subs({"z": 0})
    p = (1, 0, 0)
    rep.add(
        Check(
            "l is tangent to Q at P",
            on_line == y**2 and conic().evaluate(p) == 0 and z.evaluate(p) == 0,
            "l = V(z) tangent to Q = V(y^2 - xz) at P = [1,0,0]",
            {"Q|z=0": str(on_line)},
        )
    )
    pq = sigma.pullback(conic())
    delta = t * u - s * v
    q1, r1 = divmod(pq, delta)
    q2, r2 = divmod(q1, delta)
    rep.add(
        Check(
            "sigma^*(y^2 - xz) = (1/4)(tu - sv)^2",
            r1.is_zero() and r2.is_zero() and q2 == Fraction(1, 4) and pq == delta**2 / 4,
            "T_tilde and Z meet along the diagonal with multiplicity 2",
            {
                "sigma^*(y^2-xz)": str(pq),
                "quotient": str(q2),
                "remainders": [str(r1), str(r2)],
            },
        )
    )
    # the affine chart t = v = 1 recovers sigma|C2 and the base part of iota
    sa, ua = MVPoly.gens(AFFINE_PAIR)
    one = MVPoly.const(AFFINE_PAIR, 1)
    chart = [c.compose([sa, one, ua, one]) for c in sigma.components]
    rep.add(
        Check(
            "affine restriction",
            chart[2] == 1
            and chart[:2] == list(SIGMA_AFFINE.components)
            and list(IOTA.components[2:]) == list(SIGMA_AFFINE.components),
            "sigma|C2 (s, u) = (su, (s+u)/2)",
            {"sigma(s,1,u,1)": [str(c) for c in chart]},
        )
    )
    return rep


def complement_bookkeeping(gamma: PolyMap = GAMMA, gamma_inv: PolyMap = GAMMA_INV) -> Check:
    """The complement of Supp(D) as C^1 x C^1 x C^*.

    Algebraic certificates: H0 is V(w1) in the chart, Z restricted to C^3 is
    V(F|w1=1), and gamma carries it to V(z').  The identification of
    Sigma minus Supp(D) with B minus (pi^-1(l) u Z u H0) is a chart statement
    taken as given.
    """
    steps = [
        {"step": "Sigma - Supp(D) = B - (pi^-1(l) u Z u H0)", "kind": "cited: beta is an isomorphism off Z"},
        {"step": "B - pi^-1(l) = P^1 x C^2, coordinates [w0, w1] x (x, y)", "kind": "cited chart"},
        {"step": "H0 = V(w1) on P^1 x C^2, so the complement is C^3 with coordinates w0, x, y", "kind": "cited chart"},
    ]
    chart_eq = dehomogenize_w1(z_equation())
    ok_chart = chart_eq == z_equation_affine()
    steps.append({"step": "Z|C3 = V(w0^2 - 2y w0 + x)", "kind": "certificate", "passed": ok_chart})
    iso = poly_compose(gamma, gamma_inv).is_identity() and poly_compose(gamma_inv, gamma).is_identity()
    plane = gamma.pullback(MVPoly.var(C3_TARGET, "z'")) == z_equation_affine()
    steps.append({"step": "gamma: C^3 -> C^3 isomorphism with gamma^* z' = F|w1=1", "kind": "certificate", "passed": iso and plane})
    steps.append({"step": "C^3 - V(z') = C^1 x C^1 x C^*", "kind": "coordinate plane complement"})
    return Check(
        "complement is C^1 x C^1 x C^*",
        ok_chart and iso and plane,
        "Sigma - Supp(D) = C^1 x (C^1 x C^*)",
        {"steps": steps},
    )


def cylinder_full_verify(d="symbolic", divisor_scale=None) -> Report:
    """All five steps of the cylinder construction; stops at the first failure."""
    d = coerce_d(d)
    require_domain(d)
    rep = Report("anticanonical polar cylinder")
    stages = [
        ("divisor D ~ -K_Sigma", lambda: cylinder_divisor_check(d, divisor_scale)),
        ("strict transform equation", ideal_membership_check),
        ("shear isomorphism", gamma_plane_check),
        ("tangent line preimage", preimage_line_decomposition_check),
    ]
    for label, run in stages:
        sub = run()
        rep.add(Check(label, sub.passed, sub.title, {"checks": [c.to_tree() for c in sub.checks]}))
        if not sub.passed:
            rep.data = {"d": d, "aborted_at": label, "failing": [c.to_tree() for c in sub.failures()]}
            return rep
    rep.add(complement_bookkeeping())
    rep.data = {"d": d, "cylinder": "C^1 x C^1 x C^*" if rep.passed else "not certified"}
    if not is_symbolic(d) and d == 4:
        rep.notes.append("d = 4: Sigma is the cubic threefold V(x0*x1*x2 + x3^3 + x4^3) in P^4")
    return rep
