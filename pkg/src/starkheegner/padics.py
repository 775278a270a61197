"""Truncated p-adic arithmetic in Z_p, Q_p and the unramified quadratic extension.

Elements carry an explicit absolute precision: a PadicNum represents
p^val * unit known modulo p^prec (so the unit is stored modulo
p^(prec - val)).  Every operation returns the precision it can prove,
following the usual non-archimedean rules (min of absolute precisions
for addition, valuations shift precision through multiplication).
Values are immutable; all functions here are pure.

The quadratic extension Q_p(sqrt(D)) is represented on the basis
(1, sqrt(D)) with D a positive non-square integer that is a
non-residue mod p, so the extension is unramified and
val(a + b*sqrt(D)) = min(val(a), val(b)).
"""

from __future__ import annotations

from fractions import Fraction


class NoSquareRoot(ArithmeticError):
    """Raised when the leading residue is not a square in the residue field."""


class ZeroResidue(ArithmeticError):
    """Raised by teichmuller() on a residue divisible by p."""


class ZeroArgument(ArithmeticError):
    """Raised when an operation needs a provably nonzero input."""


class PrecisionLoss(ArithmeticError):
    """Raised when an operation would eat every tracked digit."""


def _vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicNum:
    """An element of Q_p known modulo p^prec.

    Exact zero is the distinguished state val=None; an element all of
    whose tracked digits vanish is kept as O(p^prec) with val == prec.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val, unit: int, prec: int):
        self.p = p
        if val is None:  # exact zero
            self.val = None
            self.unit = 0
            self.prec = prec
            return
        if prec <= val or unit % p ** max(prec - val, 0) == 0:
            # indistinguishable from zero at this precision
            self.val = prec
            self.unit = 0
            self.prec = prec
            return
        unit %= p ** (prec - val)
        v_extra = _vp(unit, p)
        if v_extra:
            val += v_extra
            unit //= p ** v_extra
            unit %= p ** (prec - val)
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, p: int, prec: int | None = None) -> "PadicNum":
        z = object.__new__(cls)
        z.p, z.val, z.unit, z.prec = p, None, 0, prec
        return z

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> "PadicNum":
        if n == 0:
            return cls.zero(p, prec)
        v = _vp(n, p)
        return cls(p, v, n // p ** v, prec)

    @classmethod
    def from_rational(cls, x, p: int, prec: int) -> "PadicNum":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        num, den = x.numerator, x.denominator
        v = _vp(num, p) - _vp(den, p)
        num //= p ** max(_vp(num, p), 0)
        den //= p ** max(_vp(den, p), 0)
        rel = prec - v
        if rel <= 0:
            return cls(p, v, 1, prec)  # collapses to O(p^prec)
        inv = pow(den, -1, p ** rel)
        return cls(p, v, num * inv % p ** rel, prec)

    # -- predicates ---------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.val is None

    def is_zero(self) -> bool:
        """Indistinguishable from zero at the tracked precision."""
        return self.val is None or self.unit == 0

    def valuation(self) -> int:
        if self.val is None:
            raise ZeroArgument("exact zero has no finite valuation")
        return self.val

    def rel_prec(self) -> int:
        if self.is_zero():
            return 0
        return self.prec - self.val

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "PadicNum"):
        if self.p != other.p:
            raise ValueError(f"prime mismatch: {self.p} vs {other.p}")

    def __add__(self, other):
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.prec if self.prec is not None else 1)
        if not isinstance(other, PadicNum):
            return NotImplemented
        self._check(other)
        p = self.p
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        prec = min(self.prec, other.prec)
        if self.unit == 0 or other.unit == 0:
            # O(p^a) absorbs any digits at or above a
            if self.unit == 0 and other.unit == 0:
                return PadicNum(p, prec, 0, prec)
            known = other if self.unit == 0 else self
            return PadicNum(p, known.val, known.unit, prec)
        v = min(self.val, other.val)
        a = self.unit * p ** (self.val - v) + other.unit * p ** (other.val - v)
        return PadicNum(p, v, a, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero():
            return self
        return PadicNum(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.prec or 1)
        if not isinstance(other, PadicNum):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return PadicNum.zero(self.p, self.prec)
            v = _vp(other, self.p)
            if self.is_exact_zero():
                return self
            return PadicNum(self.p, self.val + v, self.unit * (other // self.p ** v),
                            self.prec + v)
        if not isinstance(other, PadicNum):
            return NotImplemented
        self._check(other)
        p = self.p
        if self.is_exact_zero() or other.is_exact_zero():
            return PadicNum.zero(p, None)
        if self.unit == 0 or other.unit == 0:
            # O(p^a) * x = O(p^(a + val(x)))
            prec = self.val + other.val
            return PadicNum(p, prec, 0, prec)
        rel = min(self.rel_prec(), other.rel_prec())
        val = self.val + other.val
        return PadicNum(p, val, self.unit * other.unit, val + rel)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNum":
        if self.is_zero():
            raise ZeroArgument("cannot invert (indistinguishable from) zero")
        rel = self.rel_prec()
        inv = pow(self.unit, -1, self.p ** rel)
        return PadicNum(self.p, -self.val, inv, -self.val + rel)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.prec + _vp(other, self.p) if other else 0)
        if not isinstance(other, PadicNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k == 0:
            return PadicNum.from_int(1, self.p, self.rel_prec() or (self.prec or 1))
        if k < 0:
            return self.inverse() ** (-k)
        rel = self.rel_prec()
        if rel == 0:
            if self.is_exact_zero():
                return self
            return PadicNum(self.p, k * self.val, 0, k * self.val)
        unit = pow(self.unit, k, self.p ** rel)
        return PadicNum(self.p, k * self.val, unit, k * self.val + rel)

    # -- comparisons / access ------------------------------------------

    def __eq__(self, other):
        """Agreement at the smaller of the two tracked precisions."""
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.prec if self.prec is not None else 64)
        if not isinstance(other, PadicNum):
            return NotImplemented
        self._check(other)
        d = self - other
        return d.is_zero()

    def __hash__(self):
        raise TypeError("PadicNum is not hashable (precision-dependent equality)")

    def residue(self, k: int | None = None) -> int:
        """The integer x mod p^k (default: full tracked precision)."""
        if k is None:
            k = self.prec
        if self.is_zero():
            return 0
        if self.val < 0:
            raise ZeroArgument(f"negative valuation {self.val}: not a p-adic integer")
        if k > self.prec:
            raise PrecisionLoss(f"residue mod p^{k} requested, only O(p^{self.prec}) known")
        return self.unit * self.p ** self.val % self.p ** k

    def with_prec(self, prec: int) -> "PadicNum":
        """Truncate (never pad) to absolute precision prec."""
        if self.is_exact_zero():
            return PadicNum.zero(self.p, prec)
        if prec > self.prec:
            raise PrecisionLoss(f"cannot pad O(p^{self.prec}) to O(p^{prec})")
        return PadicNum(self.p, self.val, self.unit, prec)

    def __repr__(self):
        return f"PadicNum({self!s})"

    def __str__(self):
        if self.is_exact_zero():
            return "0"
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        return f"{self.unit * self.p ** self.val if self.val >= 0 else Fraction(self.unit, self.p ** -self.val)} + O({self.p}^{self.prec})"


def teichmuller(r: int, p: int, prec: int) -> PadicNum:
    """The (p-1)-st root of unity congruent to r mod p, exact mod p^prec."""
    if r % p == 0:
        raise ZeroResidue(f"{r} is divisible by {p}")
    mod = p ** prec
    x = r % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return PadicNum(p, 0, x, prec)


def _tonelli_shanks(a: int, p: int) -> int:
    """Square root of a mod p (odd prime); raises NoSquareRoot."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise NoSquareRoot(f"{a} is a quadratic non-residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # general case
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_hensel(x: PadicNum) -> PadicNum:
    """Square root by Hensel lifting, smallest-residue tie-break.

    Requires even valuation; raises NoSquareRoot if the leading residue
    is a non-residue mod p.
    """
    if x.is_zero():
        raise ZeroArgument("square root of (indistinguishable from) zero")
    p = x.p
    if x.val % 2 != 0:
        raise NoSquareRoot(f"odd valuation {x.val}")
    rel = x.rel_prec()
    mod = p ** rel
    r = _tonelli_shanks(x.unit, p)
    # Newton iteration r <- (r + u/r)/2 mod p^rel
    inv2 = pow(2, -1, mod)
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        m = p ** k
        r = (r + x.unit * pow(r, -1, m)) * inv2 % m
    r %= mod
    if (-r) % mod < r:
        r = (-r) % mod
    return PadicNum(p, x.val // 2, r, x.val // 2 + rel)


class PadicQuad:
    """a + b*sqrt(D) in the unramified quadratic extension of Q_p."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a: PadicNum, b: PadicNum, D: int):
        if a.p != b.p:
            raise ValueError("component prime mismatch")
        self.a = a
        self.b = b
        self.D = D

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rationals(cls, a, b, D: int, p: int, prec: int) -> "PadicQuad":
        return cls(PadicNum.from_rational(a, p, prec),
                   PadicNum.from_rational(b, p, prec), D)

    @classmethod
    def from_num(cls, a: PadicNum, D: int) -> "PadicQuad":
        return cls(a, PadicNum.zero(a.p, a.prec), D)

    @classmethod
    def one(cls, D: int, p: int, prec: int) -> "PadicQuad":
        return cls.from_rationals(1, 0, D, p, prec)

    @classmethod
    def sqrtD(cls, D: int, p: int, prec: int) -> "PadicQuad":
        return cls.from_rationals(0, 1, D, p, prec)

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def prec(self):
        pa = self.a.prec if not self.a.is_exact_zero() else None
        pb = self.b.prec if not self.b.is_exact_zero() else None
        if pa is None:
            return pb
        if pb is None:
            return pa
        return min(pa, pb)

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_rational(self) -> bool:
        """True when the sqrt(D)-part vanishes at tracked precision."""
        return self.b.is_zero()

    def valuation(self) -> int:
        if self.is_zero():
            raise ZeroArgument("zero has no finite valuation")
        if self.a.is_zero():
            return self.b.valuation()
        if self.b.is_zero():
            return self.a.valuation()
        return min(self.a.valuation(), self.b.valuation())

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "PadicQuad":
        if isinstance(other, PadicQuad):
            if other.D != self.D:
                raise ValueError("sqrt(D) basis mismatch")
            return other
        if isinstance(other, PadicNum):
            return PadicQuad.from_num(other, self.D)
        if isinstance(other, (int, Fraction)):
            pr = self.prec
            return PadicQuad.from_rationals(other, 0, self.D, self.p, pr if pr is not None else 64)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PadicQuad(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return PadicQuad(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a = self.a * o.a + self.b * o.b * self.D
        b = self.a * o.b + self.b * o.a
        return PadicQuad(a, b, self.D)

    __rmul__ = __mul__

    def conj(self) -> "PadicQuad":
        """Frobenius conjugation a + b*sqrt(D) -> a - b*sqrt(D)."""
        return PadicQuad(self.a, -self.b, self.D)

    def norm(self) -> PadicNum:
        return (self * self.conj()).a

    def trace(self) -> PadicNum:
        return self.a + self.a

    def inverse(self) -> "PadicQuad":
        if self.is_zero():
            raise ZeroArgument("cannot invert zero")
        n = self.norm()
        c = self.conj()
        ninv = n.inverse()
        return PadicQuad(c.a * ninv, c.b * ninv, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        pr = self.prec
        result = PadicQuad.one(self.D, self.p, pr if pr is not None else 64)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a == o.a) and (self.b == o.b)

    def __hash__(self):
        raise TypeError("PadicQuad is not hashable")

    def residues(self, k: int) -> tuple[int, int]:
        """(a mod p^k, b mod p^k) as integers."""
        return self.a.residue(k), self.b.residue(k)

    def with_prec(self, prec: int) -> "PadicQuad":
        return PadicQuad(self.a.with_prec(prec), self.b.with_prec(prec), self.D)

    def __repr__(self):
        return f"PadicQuad({self!s})"

    def __str__(self):
        pr = self.prec
        tail = f" + O({self.p}^{pr})" if pr is not None else ""
        av = 0 if self.a.is_zero() else (self.a.unit * self.a.p ** self.a.val
                                         if self.a.val >= 0 else Fraction(self.a.unit, self.a.p ** -self.a.val))
        bv = 0 if self.b.is_zero() else (self.b.unit * self.b.p ** self.b.val
                                         if self.b.val >= 0 else Fraction(self.b.unit, self.b.p ** -self.b.val))
        return f"{av} + {bv}*sqrt({self.D}){tail}"


def parse_quad(s: str, D: int, p: int) -> PadicQuad:
    """Parse the textual form "a + b*sqrt(D) + O(p^N)" (test fixtures)."""
    s = s.replace(" ", "")
    prec = None
    if "+O(" in s:
        s, tail = s.split("+O(")
        base, exp = tail.rstrip(")").split("^")
        if int(base) != p:
            raise ValueError("prime mismatch in O(...) term")
        prec = int(exp)
    if prec is None:
        raise ValueError("missing O(p^N) precision marker")
    a_str, b_str = s.split("+")
    if not b_str.endswith(f"*sqrt({D})"):
        raise ValueError("malformed sqrt(D) term")
    b_str = b_str[: -len(f"*sqrt({D})")]
    return PadicQuad.from_rationals(Fraction(a_str), Fraction(b_str), D, p, prec)


def sqrt_hensel_quad(x: PadicQuad) -> PadicQuad:
    """Square root in Q_p(sqrt(D)); even valuation required.

    The two roots differ by a sign; the one returned has its first
    nonzero residue coordinate (a-part, then b-part) smallest.
    """
    if x.is_zero():
        raise ZeroArgument("square root of zero")
    p, D = x.p, x.D
    v = x.valuation()
    if v % 2 != 0:
        raise NoSquareRoot(f"odd valuation {v}")
    if v:
        shift = PadicNum(p, -v, 1, -v + 60)
        y = PadicQuad(x.a * shift, x.b * shift, D)
        r = sqrt_hensel_quad(y)
        back = PadicNum(p, v // 2, 1, v // 2 + 60)
        return PadicQuad(r.a * back, r.b * back, D)
    if x.b.is_zero():
        try:
            return PadicQuad.from_num(sqrt_hensel(x.a), D)
        except NoSquareRoot:
            # a/D is then a residue; sqrt = sqrt(a/D) * sqrt(D)
            r = sqrt_hensel(x.a / PadicNum.from_int(D, p, x.a.prec))
            return PadicQuad(PadicNum.zero(p, r.prec), r, D)
    # general case: find root in F_{p^2}, then Newton
    rel = min(x.a.rel_prec() if not x.a.is_zero() else 10 ** 9,
              x.b.rel_prec() if not x.b.is_zero() else 10 ** 9,
              x.prec)
    a0 = x.a.residue(1) if not x.a.is_zero() and x.a.val >= 0 else 0
    b0 = x.b.residue(1) if not x.b.is_zero() and x.b.val >= 0 else 0
    r0 = _sqrt_fp2(a0, b0, D, p)
    r = PadicQuad.from_rationals(r0[0], r0[1], D, p, rel)
    k = 1
    half = PadicQuad.from_rationals(Fraction(1, 2), 0, D, p, rel)
    while k < rel:
        k = min(2 * k, rel)
        r = (r + x.with_prec(min(k, x.prec) if x.prec is not None else k) / r) * half
    ra, rb = r.residues(1)
    if (p - ra) % p < ra or ((p - ra) % p == ra and (p - rb) % p < rb):
        r = -r
    return r.with_prec(min(rel, r.prec))


def _sqrt_fp2(a0: int, b0: int, D: int, p: int) -> tuple[int, int]:
    """Square root of a0 + b0*sqrt(D) in F_{p^2} by brute Tonelli via norms."""
    # Solve (c + d*sqrt(D))^2 = a0 + b0*sqrt(D):
    #   c^2 + D d^2 = a0, 2cd = b0.  Norm: (c^2 - D d^2)^2 = a0^2 - D b0^2.
    n = (a0 * a0 - D * b0 * b0) % p
    try:
        m = _tonelli_shanks(n, p)
    except NoSquareRoot:
        raise NoSquareRoot("norm is a non-residue: element has no square root")
    inv2 = pow(2, -1, p)
    for sign in (1, -1):
        c2 = (a0 + sign * m) * inv2 % p
        if c2 == 0:
            # root would be a pure sqrt(D)-multiple; needs b0 = 0
            if b0 % p:
                continue
            try:
                d = _tonelli_shanks(a0 * pow(D, -1, p) % p, p)
            except NoSquareRoot:
                continue
            return 0, d
        try:
            c = _tonelli_shanks(c2, p)
        except NoSquareRoot:
            continue
        d = b0 * inv2 % p * pow(c, -1, p) % p
        if (c * c + D * d * d - a0) % p == 0 and (2 * c * d - b0) % p == 0:
            return c % p, d % p
    raise NoSquareRoot("no square root in F_{p^2}")


def _digits_base(n: int, p: int) -> int:
    d = 0
    while n:
        n //= p
        d += 1
    return d


def _log_principal(x, one, target_rel: int, p: int):
    """log(1 + y) for val(y) >= 1, summed far enough that every dropped
    term y^k/k provably has valuation >= target_rel."""
    kmax = max(target_rel, 1)
    while kmax - (_digits_base(kmax, p) - 1) < target_rel:
        kmax += 1
    y = x - one
    acc = None
    term = one
    for k in range(1, kmax + 1):
        term = term * y
        piece = term / k if k > 1 else term
        piece = piece if k % 2 == 1 else -piece
        acc = piece if acc is None else acc + piece
    return acc


def iwasawa_log(u) -> PadicNum | PadicQuad:
    """The branch of log_p with log(p) = 0 (kills p-powers and torsion).

    Accepts PadicNum or PadicQuad; the result has the same type.
    """
    if isinstance(u, PadicNum):
        if u.is_zero():
            raise ZeroArgument("log of zero")
        rel = u.rel_prec()
        w = PadicNum(u.p, 0, u.unit, rel)  # strip p^val: log(p)=0
        e = u.p - 1
        w = w ** e
        one = PadicNum.from_int(1, u.p, rel)
        val = _log_principal(w, one, rel, u.p)
        return val / e
    if isinstance(u, PadicQuad):
        if u.is_zero():
            raise ZeroArgument("log of zero")
        v = u.valuation()
        pr = u.prec
        rel = pr - v
        shift = PadicNum(u.p, -v, 1, -v + rel)
        w = PadicQuad(u.a * shift, u.b * shift, u.D).with_prec(rel)
        e = u.p ** 2 - 1
        w = w ** e
        one = PadicQuad.one(u.D, u.p, rel)
        val = _log_principal(w, one, rel, u.p)
        return val / e
    raise TypeError(f"unsupported type {type(u)!r}")


def exp_small(x) -> PadicNum | PadicQuad:
    """exp on the region val(x) >= 1 (p odd), truncated sum of x^k/k!."""
    if isinstance(x, PadicNum):
        p, one = x.p, PadicNum.from_int(1, x.p, x.prec)
    elif isinstance(x, PadicQuad):
        p, one = x.p, PadicQuad.one(x.D, x.p, x.prec)
    else:
        raise TypeError(f"unsupported type {type(x)!r}")
    if not x.is_zero() and x.valuation() < 1:
        raise PrecisionLoss("exp needs valuation >= 1")
    prec = x.prec
    if prec is not None and prec >= p:
        raise PrecisionLoss("exp truncation requires prec < p (guard k! units)")
    acc = one
    term = one
    k = 0
    nterms = (prec if prec is not None else 32) + 1
    while k < nterms:
        k += 1
        term = term * x / k
        acc = acc + term
    return acc


def frobenius_conj(x: PadicQuad) -> PadicQuad:
    """Frobenius of K_p/Q_p: a + b*sqrt(D) -> a - b*sqrt(D)."""
    return x.conj()
