"""Exact arithmetic over cyclotomic-rational numbers and polynomials.

The coefficient field is Q(zeta_N) for a session-wide conductor N.  An
element is a vector of ``fractions.Fraction`` of length phi(N) in the power
basis 1, zeta, ..., zeta^(phi(N)-1), kept fully reduced modulo the N-th
cyclotomic polynomial.  All arithmetic is exact; there is no floating point
anywhere in this module.

Univariate polynomials (:class:`UniPoly`) are dense coefficient tuples over
the field.  Bivariate polynomials (:class:`BiPoly`) are sparse term maps
``(x_exponent, y_exponent) -> coefficient``; the ``laurent`` flag gates
negative y exponents.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    DivisionByZero,
    FieldTooSmall,
    NegativeExponentWithoutLaurent,
    ZeroPolynomial,
)

Rat = Fraction


def _euler_phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


@lru_cache(maxsize=None)
def _cyclotomic_int_coeffs(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, ascending."""
    # x^n - 1 divided by the cyclotomic polynomials of the proper divisors.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d:
            continue
        div = _cyclotomic_int_coeffs(d)
        quot = [0] * (len(poly) - len(div) + 1)
        rem = list(poly)
        for k in range(len(rem) - len(div), -1, -1):
            c = rem[k + len(div) - 1]
            if c:
                quot[k] = c
                for i, dc in enumerate(div):
                    rem[k + i] -= c * dc
        assert not any(rem), "cyclotomic division must be exact"
        poly = quot
    return tuple(poly)


class CycloField:
    """The field Q(zeta_N), with cached reduction data for the power basis."""

    _cache: dict[int, "CycloField"] = {}

    def __new__(cls, conductor: int) -> "CycloField":
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        inst = cls._cache.get(conductor)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(conductor)
            cls._cache[conductor] = inst
        return inst

    def _init(self, conductor: int) -> None:
        self.conductor = conductor
        self.degree = _euler_phi(conductor)
        self._modulus = tuple(Rat(c) for c in _cyclotomic_int_coeffs(conductor))
        d = self.degree
        self._head = tuple(-c for c in self._modulus[:d])  # zeta^d in the basis
        self.zero = CycloRational(self, (Rat(0),) * d)
        self.one = CycloRational(self, (Rat(1),) + (Rat(0),) * (d - 1))

    def rational(self, value: Rat | int) -> CycloRational:
        r = Rat(value)
        return CycloRational(self, (r,) + (Rat(0),) * (self.degree - 1))

    def zeta(self, power: int = 1) -> CycloRational:
        """zeta_N ** power."""
        power %= self.conductor
        if self.conductor == 1:
            return self.one
        coords = [Rat(0)] * self.conductor
        coords[power] = Rat(1)
        return self._reduce(coords)

    def zeta_of_order(self, order: int) -> CycloRational:
        """A primitive root of unity of the given order, if present.

        For odd N the field equals Q(zeta_2N), so orders dividing 2N are
        available there as well.
        """
        if order >= 1 and self.conductor % order == 0:
            return self.zeta(self.conductor // order)
        n = self.conductor
        if order >= 1 and n % 2 == 1 and (2 * n) % order == 0:
            doubled = -self.zeta((n + 1) // 2)  # a primitive 2N-th root
            return doubled ** (2 * n // order)
        raise FieldTooSmall(
            f"no primitive {order}-th root of unity in Q(zeta_{self.conductor})"
        )

    def from_coords(self, coords: Sequence[Rat]) -> CycloRational:
        if len(coords) != self.degree:
            raise ValueError("coordinate vector has wrong length")
        return CycloRational(self, tuple(Rat(c) for c in coords))

    def _reduce(self, coords: list[Rat]) -> CycloRational:
        """Reduce a raw power-basis vector of any length modulo the modulus."""
        d = self.degree
        coords = list(coords)
        if len(coords) < d:
            coords += [Rat(0)] * (d - len(coords))
        head = self._head
        for k in range(len(coords) - 1, d - 1, -1):
            c = coords[k]
            if not c:
                continue
            coords[k] = Rat(0)
            base = k - d
            for i, h in enumerate(head):
                if h:
                    coords[base + i] += c * h
        return CycloRational(self, tuple(coords[:d]))

    def __repr__(self) -> str:
        return f"CycloField({self.conductor})"


class CycloRational:
    """An element of Q(zeta_N) in the power basis.  Immutable."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: CycloField, coords: tuple[Rat, ...]):
        self.field = field
        self.coords = coords
        self._hash: int | None = None

    # -- coercion ---------------------------------------------------------
    def _pair(self, other) -> "tuple[CycloRational, CycloRational] | None":
        """Bring self and other into a common field, rationals promoting."""
        if isinstance(other, (int, Fraction)):
            return self, self.field.rational(other)
        if isinstance(other, CycloRational):
            if other.field is self.field:
                return self, other
            r = other.as_rational()
            if r is not None:
                return self, self.field.rational(r)
            r = self.as_rational()
            if r is not None:
                return other.field.rational(r), other
            raise ValueError("cannot mix elements of different cyclotomic fields")
        return None

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def as_rational(self) -> Rat | None:
        return self.coords[0] if self.is_rational() else None

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloRational(a.field, tuple(u + v for u, v in zip(a.coords, b.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloRational(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloRational(a.field, tuple(u - v for u, v in zip(a.coords, b.coords)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        rb = b.as_rational()
        if rb is not None:
            return CycloRational(a.field, tuple(u * rb for u in a.coords))
        ra = a.as_rational()
        if ra is not None:
            return CycloRational(b.field, tuple(v * ra for v in b.coords))
        d = a.field.degree
        raw = [Rat(0)] * (2 * d - 1)
        for i, u in enumerate(a.coords):
            if not u:
                continue
            for j, v in enumerate(b.coords):
                if v:
                    raw[i + j] += u * v
        return a.field._reduce(raw)

    __rmul__ = __mul__

    def inverse(self) -> "CycloRational":
        if self.is_zero():
            raise DivisionByZero("division by zero field element")
        r = self.as_rational()
        if r is not None:
            return self.field.rational(Rat(1) / r)
        # extended Euclid in Q[t] against the cyclotomic modulus
        mod = list(self.field._modulus)
        a = list(self.coords)
        inv = _poly_modular_inverse(a, mod)
        return self.field._reduce(inv)

    def __truediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b * a.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        try:
            pair = self._pair(other)
        except ValueError:
            return False
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coords == b.coords

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def sort_key(self) -> tuple[Rat, ...]:
        return self.coords

    # -- rendering -------------------------------------------------------------
    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mon = "zeta" if i == 1 else f"zeta^{i}"
                if c == 1:
                    parts.append(mon)
                elif c == -1:
                    parts.append(f"-{mon}")
                else:
                    parts.append(f"{c}*{mon}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"<{self} in Q(zeta_{self.field.conductor})>"


def _poly_modular_inverse(a: list[Rat], mod: list[Rat]) -> list[Rat]:
    """Inverse of the polynomial ``a`` modulo ``mod`` over Q (both ascending)."""

    def deg(p):
        d = len(p) - 1
        while d >= 0 and not p[d]:
            d -= 1
        return d

    def pdivmod(num, den):
        num = list(num)
        dd = deg(den)
        q = [Rat(0)] * max(deg(num) - dd + 1, 0)
        while deg(num) >= dd:
            k = deg(num) - dd
            c = num[deg(num)] / den[dd]
            q[k] = c
            for i in range(dd + 1):
                num[k + i] -= c * den[i]
        return q, num

    r0, r1 = list(mod), list(a)
    s0, s1 = [Rat(0)], [Rat(1)]
    while deg(r1) > 0:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        # s_next = s0 - q*s1
        prod = [Rat(0)] * (deg(q) + deg(s1) + 2 if deg(q) >= 0 and deg(s1) >= 0 else 1)
        for i, qc in enumerate(q):
            if not qc:
                continue
            for j, sc in enumerate(s1):
                if sc:
                    prod[i + j] += qc * sc
        ln = max(len(s0), len(prod))
        s0, s1 = s1, [
            (s0[i] if i < len(s0) else Rat(0)) - (prod[i] if i < len(prod) else Rat(0))
            for i in range(ln)
        ]
    if deg(r1) < 0:
        raise DivisionByZero("element is not invertible (shares a factor with the modulus)")
    c = r1[0]
    return [s / c for s in s1]


# ---------------------------------------------------------------------------
# univariate polynomials over the field
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial over Q(zeta_N), coefficients ascending."""

    __slots__ = ("field", "coeffs", "var")

    def __init__(self, field: CycloField, coeffs: Iterable[CycloRational | Rat | int], var: str = "z"):
        norm: list[CycloRational] = []
        for c in coeffs:
            if not isinstance(c, CycloRational):
                c = field.rational(c)
            norm.append(c)
        while norm and norm[-1].is_zero():
            norm.pop()
        self.field = field
        self.coeffs = tuple(norm)
        self.var = var

    @classmethod
    def zero(cls, field: CycloField, var: str = "z") -> "UniPoly":
        return cls(field, (), var)

    @classmethod
    def constant(cls, field: CycloField, value, var: str = "z") -> "UniPoly":
        return cls(field, (value,), var)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def leading(self) -> CycloRational:
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> CycloRational:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.field.zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.field, (self[i] + other[i] for i in range(n)), self.var)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.field, (self[i] - other[i] for i in range(n)), self.var)

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, (-c for c in self.coeffs), self.var)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction, CycloRational)):
            return UniPoly(self.field, (c * other for c in self.coeffs), self.var)
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.field, self.var)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return UniPoly(self.field, out, self.var)

    __rmul__ = __mul__

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        rem = list(self.coeffs)
        dd = other.degree()
        lead_inv = other.leading().inverse()
        q = [self.field.zero] * max(len(rem) - dd, 0)
        while len(rem) - 1 >= dd:
            c = rem[-1]
            if c.is_zero():
                rem.pop()
                continue
            k = len(rem) - 1 - dd
            factor = c * lead_inv
            q[k] = factor
            for i in range(dd + 1):
                rem[k + i] = rem[k + i] - factor * other.coeffs[i]
            rem.pop()
        return UniPoly(self.field, q, self.var), UniPoly(self.field, rem, self.var)

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = UniPoly.constant(self.field, 1, self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def derivative(self) -> "UniPoly":
        return UniPoly(self.field, (c * k for k, c in enumerate(self.coeffs) if k), self.var)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return self * inv

    def evaluate(self, point: CycloRational) -> CycloRational:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def compose_scale(self, factor: CycloRational) -> "UniPoly":
        """p(factor * var)."""
        out = []
        power = self.field.one
        for c in self.coeffs:
            out.append(c * power)
            power = power * factor
        return UniPoly(self.field, out, self.var)

    def shift_strip_root(self, root: CycloRational) -> "UniPoly":
        """Divide out (var - root); the root must be exact."""
        lin = UniPoly(self.field, (-root, self.field.one), self.var)
        return self.exact_div(lin)

    def root_multiplicity(self, point: CycloRational) -> int:
        """Multiplicity of ``point`` as a root, by repeated exact division."""
        m = 0
        p = self
        while not p.is_zero() and p.evaluate(point).is_zero():
            p = p.shift_strip_root(point)
            m += 1
        return m

    def coordinate_polys(self) -> list[list[Rat]]:
        """The rational coordinate polynomials in the field's power basis."""
        d = self.field.degree
        out: list[list[Rat]] = [[] for _ in range(d)]
        for c in self.coeffs:
            for i in range(d):
                out[i].append(c.coords[i])
        return out

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree(), -1, -1):
            c = self[k]
            if c.is_zero():
                continue
            cs = str(c)
            if k == 0:
                parts.append(cs)
                continue
            mon = self.var if k == 1 else f"{self.var}^{k}"
            if cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append(f"-{mon}")
            elif ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
                parts.append(f"({cs})*{mon}")
            else:
                parts.append(f"{cs}*{mon}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"UniPoly({self})"


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over the field."""
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def field_arith(a: CycloRational, b: CycloRational, op: str) -> CycloRational:
    """Basic field operation dispatch: add, sub, mul, div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise DivisionByZero("division by zero field element")
        return a / b
    raise ValueError(f"unknown op {op!r}")


def squarefree_decompose(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun decomposition: pairwise-coprime squarefree factors with multiplicities.

    The product of factor**multiplicity equals ``p`` up to a constant.
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot decompose the zero polynomial")
    if p.degree() == 0:
        return []
    d = p.derivative()
    g = poly_gcd(p, d)
    if g.degree() == 0:
        return [(p.monic(), 1)]
    c = p.exact_div(g)
    w = d.exact_div(g) - c.derivative()
    out: list[tuple[UniPoly, int]] = []
    i = 1
    while c.degree() > 0:
        a = poly_gcd(c, w)
        if a.degree() > 0:
            out.append((a.monic(), i))
        c_next = c.exact_div(a) if a.degree() > 0 else c
        w = (w.exact_div(a) if a.degree() > 0 else w) - c_next.derivative()
        c = c_next
        i += 1
    return out


# -- rational root machinery -------------------------------------------------


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to factor {n}")


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    stack = [abs(n)]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out

def _divisors(n: int) -> list[int]:
    fac = _factorize(n)
    out = [1]
    for p, e in fac.items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def _rational_roots(int_coeffs: list[int]) -> list[Rat]:
    """All rational roots of an integer polynomial (ascending coefficients)."""
    while int_coeffs and int_coeffs[-1] == 0:
        int_coeffs.pop()
    if not int_coeffs:
        return []
    roots: list[Rat] = []
    k = 0
    while int_coeffs[k] == 0:
        k += 1
    if k:
        roots.append(Rat(0))
        int_coeffs = int_coeffs[k:]
    if len(int_coeffs) <= 1:
        return roots

    def value(r: Rat) -> bool:
        acc = Rat(0)
        for c in reversed(int_coeffs):
            acc = acc * r + c
        return acc == 0

    for p in _divisors(int_coeffs[0]):
        for q in _divisors(int_coeffs[-1]):
            if math.gcd(p, q) != 1:
                continue
            cand = Rat(p, q)
            if value(cand):
                roots.append(cand)
            if value(-cand):
                roots.append(-cand)
    return roots


def _rational_gcd_roots(coord_polys: list[list[Rat]]) -> list[Rat]:
    """Rational roots common to all coordinate polynomials."""

    def deg(p):
        d = len(p) - 1
        while d >= 0 and not p[d]:
            d -= 1
        return d

    def pmod(num, den):
        num = list(num)
        dd = deg(den)
        while deg(num) >= dd:
            k = deg(num) - dd
            c = num[deg(num)] / den[dd]
            for i in range(dd + 1):
                num[k + i] -= c * den[i]
            while num and not num[-1]:
                num.pop()
        return num

    g: list[Rat] = []
    for p in coord_polys:
        p = list(p)
        while p and not p[-1]:
            p.pop()
        if not p:
            continue
        if not g:
            g = p
            continue
        a, b = g, p
        while b:
            a, b = b, pmod(a, b)
        g = a
        if deg(g) == 0:
            return []
    if not g:
        return []
    lcm = 1
    for c in g:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in g]
    cont = 0
    for c in ints:
        cont = math.gcd(cont, abs(c))
    if cont > 1:
        ints = [c // cont for c in ints]
    return _rational_roots(ints)


def roots_in_field(
    p: UniPoly, extra_candidates: Iterable[CycloRational] = ()
) -> tuple[list[tuple[CycloRational, int]], int]:
    """Roots of ``p`` that lie in the working field, with multiplicities.

    Returns ``(roots, unresolved_degree)`` where the unresolved degree counts
    roots (with multiplicity) outside the reach of the search: rational-root
    search lifted through the power basis (candidates ``r * zeta^j`` with r
    rational), linear factors, and the caller-supplied candidate points.
    Anything irreducible of degree >= 2 over that search is reported as
    unresolved rather than approximated.
    """
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial has every point as a root")
    field = p.field
    candidates = list(extra_candidates)
    roots: list[tuple[CycloRational, int]] = []
    unresolved = 0
    for factor, mult in squarefree_decompose(p):
        f = factor
        while f.degree() >= 1:
            if f.degree() == 1:
                roots.append((-(f[0] / f[1]), mult))
                f = UniPoly.constant(field, 1, f.var)
                break
            found = _find_one_root(f, candidates)
            if found is None:
                unresolved += mult * f.degree()
                break
            roots.append((found, mult))
            f = f.shift_strip_root(found)
    return roots, unresolved


def _find_one_root(f: UniPoly, candidates: list[CycloRational]) -> CycloRational | None:
    field = f.field
    for cand in candidates:
        if not isinstance(cand, CycloRational):
            cand = field.rational(cand)
        elif cand.field is not field:
            r = cand.as_rational()
            if r is None:
                continue
            cand = field.rational(r)
        if f.evaluate(cand).is_zero():
            return cand
    n = field.conductor
    for j in range(n):
        rotated = f if j == 0 else f.compose_scale(field.zeta(j))
        for r in _rational_gcd_roots(rotated.coordinate_polys()):
            root = field.zeta(j) * field.rational(r) if j else field.rational(r)
            if f.evaluate(root).is_zero():
                return root
    return None


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------


class BiPoly:
    """Sparse bivariate polynomial ``sum c[i,j] x^i y^j`` over the field.

    Negative y exponents require ``laurent=True``; x exponents are always
    non-negative.  No zero coefficients are stored.
    """

    __slots__ = ("field", "terms", "laurent")

    def __init__(
        self,
        field: CycloField,
        terms: dict[tuple[int, int], CycloRational] | None = None,
        laurent: bool = False,
    ):
        clean: dict[tuple[int, int], CycloRational] = {}
        for (i, j), c in (terms or {}).items():
            if not isinstance(c, CycloRational):
                c = field.rational(c)
            if c.is_zero():
                continue
            if i < 0:
                raise ValueError("negative x exponent")
            if j < 0 and not laurent:
                raise NegativeExponentWithoutLaurent(
                    f"term x^{i}*y^{j} needs Laurent mode"
                )
            clean[(i, j)] = c
        self.field = field
        self.terms = clean
        self.laurent = laurent

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, field: CycloField, laurent: bool = False) -> "BiPoly":
        return cls(field, {}, laurent)

    @classmethod
    def constant(cls, field: CycloField, value, laurent: bool = False) -> "BiPoly":
        return cls(field, {(0, 0): value}, laurent)

    @classmethod
    def variable(cls, field: CycloField, name: str, laurent: bool = False) -> "BiPoly":
        if name == "x":
            return cls(field, {(1, 0): field.one}, laurent)
        if name == "y":
            return cls(field, {(0, 1): field.one}, laurent)
        raise ValueError(name)

    def is_zero(self) -> bool:
        return not self.terms

    def _wrap(self, terms: dict[tuple[int, int], CycloRational]) -> "BiPoly":
        return BiPoly(self.field, terms, self.laurent or any(j < 0 for (_, j) in terms))

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            out[k] = c if s is None else s + c
        return self._wrap({k: c for k, c in out.items() if not c.is_zero()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            out[k] = -c if s is None else s - c
        return self._wrap({k: c for k, c in out.items() if not c.is_zero()})

    def __neg__(self) -> "BiPoly":
        return self._wrap({k: -c for k, c in self.terms.items()})

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, (int, Fraction, CycloRational)):
            if not isinstance(other, CycloRational):
                other = self.field.rational(other)
            if other.is_zero():
                return BiPoly.zero(self.field, self.laurent)
            return self._wrap({k: c * other for k, c in self.terms.items()})
        out: dict[tuple[int, int], CycloRational] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                prod = c1 * c2
                s = out.get(k)
                out[k] = prod if s is None else s + prod
        return BiPoly(
            self.field,
            {k: c for k, c in out.items() if not c.is_zero()},
            self.laurent or other.laurent,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = BiPoly.constant(self.field, 1, self.laurent)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- calculus -------------------------------------------------------------
    def diff_x(self) -> "BiPoly":
        return self._wrap(
            {(i - 1, j): c * i for (i, j), c in self.terms.items() if i}
        )

    def diff_y(self) -> "BiPoly":
        return self._wrap(
            {(i, j - 1): c * j for (i, j), c in self.terms.items() if j}
        )

    # -- structure ---------------------------------------------------------------
    def x_degree(self) -> int:
        return max((i for (i, _) in self.terms), default=-1)

    def y_content(self) -> int:
        """Largest E with y^E dividing the polynomial (min j over terms)."""
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no y-content")
        return min(j for (_, j) in self.terms)

    def shift_y(self, e: int) -> "BiPoly":
        """Multiply by y^e (e may be negative; result flags Laurent if needed)."""
        terms = {(i, j + e): c for (i, j), c in self.terms.items()}
        return BiPoly(self.field, terms, self.laurent or any(j < 0 for (_, j) in terms))

    def x_order_at_origin(self) -> int:
        """Order in x of p(x, 0); requires some term with y-exponent 0."""
        pure = [i for (i, j) in self.terms if j == 0]
        if not pure:
            raise ValueError("polynomial vanishes identically on y = 0")
        return min(pure)

    def x_coefficients(self) -> list[UniPoly]:
        """Coefficients as polynomials in y, indexed by x-degree.

        Requires non-Laurent terms (all y exponents non-negative).
        """
        if any(j < 0 for (_, j) in self.terms):
            raise ValueError("Laurent polynomial has no y-polynomial coefficients")
        nx = self.x_degree()
        cols: list[dict[int, CycloRational]] = [dict() for _ in range(nx + 1)]
        for (i, j), c in self.terms.items():
            cols[i][j] = c
        out = []
        for col in cols:
            if not col:
                out.append(UniPoly.zero(self.field, "y"))
                continue
            top = max(col)
            out.append(UniPoly(self.field, [col.get(k, self.field.zero) for k in range(top + 1)], "y"))
        return out

    @classmethod
    def from_x_coefficients(cls, field: CycloField, cols: Sequence[UniPoly]) -> "BiPoly":
        terms: dict[tuple[int, int], CycloRational] = {}
        for i, poly in enumerate(cols):
            for j, c in enumerate(poly.coeffs):
                if not c.is_zero():
                    terms[(i, j)] = c
        return cls(field, terms)

    def substitute_shear(self, c: CycloRational) -> "BiPoly":
        """Substitute y -> y + c*x (generic-coordinates shear)."""
        if any(j < 0 for (_, j) in self.terms):
            raise ValueError("cannot shear a Laurent polynomial")
        x = BiPoly.variable(self.field, "x")
        y = BiPoly.variable(self.field, "y")
        ycx = y + x * c
        out = BiPoly.zero(self.field)
        powers: dict[int, BiPoly] = {0: BiPoly.constant(self.field, 1)}

        def ypow(j: int) -> BiPoly:
            if j not in powers:
                powers[j] = ypow(j - 1) * ycx
            return powers[j]

        for (i, j), coef in self.terms.items():
            term = ypow(j) * coef
            if i:
                term = term * BiPoly(self.field, {(i, 0): self.field.one})
            out = out + term
        return out

    def substitute_x_scale(self, s: int) -> "BiPoly":
        """Substitute x -> x * y^(-s); the result may be Laurent."""
        terms = {(i, j - i * s): c for (i, j), c in self.terms.items()}
        return BiPoly(self.field, terms, True)

    # -- rendering ---------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, int], CycloRational]]:
        return sorted(self.terms.items(), key=lambda t: (-t[0][0], t[0][1]))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for (i, j), c in self.sorted_terms():
            mono = []
            if i:
                mono.append("x" if i == 1 else f"x^{i}")
            if j:
                mono.append("y" if j == 1 else (f"y^{j}" if j > 0 else f"y^({j})"))
            cs = str(c)
            if not mono:
                parts.append(cs if ("+" not in cs[1:] and " " not in cs) else f"({cs})")
            elif cs == "1":
                parts.append("*".join(mono))
            elif cs == "-1":
                parts.append("-" + "*".join(mono))
            elif ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
                parts.append(f"({cs})*" + "*".join(mono))
            else:
                parts.append(f"{cs}*" + "*".join(mono))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"BiPoly({self})"


def equal_up_to_constant(a: BiPoly, b: BiPoly) -> bool:
    """True when a = c*b for a nonzero field constant c."""
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    if set(a.terms) != set(b.terms):
        return False
    key = next(iter(a.terms))
    ratio = a.terms[key] / b.terms[key]
    return all(c == ratio * b.terms[k] for k, c in a.terms.items())
