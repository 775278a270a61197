"""Multiplicative double integrals against the boundary measure system.

The weight-2 eigensymbol phi of level N = pM (a U_p-eigensymbol with
eigenvalue alpha = a_p = +-1, Fricke-eigenvalue -alpha at p) defines a
system of Z-valued measures on P^1(Q_p), one per pair of cusps:

    mu{x->y}( b + p^n Z_p ) = alpha^n * phi{ g^-1 x -> g^-1 y },
    g = [[p^n, b], [0, 1]],

together with the involution rule mu{x->y}(w U) = alpha * mu{wx->wy}(U)
for w = [[0, -1], [p, 0]] covering the balls around infinity.  The
overconvergent lift Psi supplies the moments of the same measures.

The multiplicative integral of (t - tau) over P^1(Q_p) is evaluated on
an adaptive cover: finite balls use (t - tau) = (b - tau)(1 + (t-b)/(b-tau)),
the infinity side uses the regularised integrand (t - tau)/t = 1 + p tau u
in the coordinate t = -1/(pu).  Indefinite integrals over arbitrary cusp
pairs are reduced to the standard path {0 -> infinity} through the
continued-fraction decomposition and the Gamma-invariance law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .modsym import INF, ModSymbol, _cf_unimodular_pieces, _mobius
from .ovconv import Distribution, OCSymbol, dist_act
from .padics import PadicNum, PadicQuad, exp_small, iwasawa_log


class TauOnBoundary(ArithmeticError):
    """tau reduced into P^1(Q_p) at working precision."""


@dataclass(frozen=True)
class QuadPoint:
    """An exact point x0 + y0*sqrt(D) of K_p - Q_p (rational coordinates)."""

    x0: Fraction
    y0: Fraction

    def __post_init__(self):
        if self.y0 == 0:
            raise TauOnBoundary("point lies in Q_p")

    def mobius(self, m) -> "QuadPoint":
        a, b, c, d = m
        det = a * d - b * c
        # denominator norm: (c x0 + d)^2 - c^2 y0^2 D is supplied by caller
        raise NotImplementedError  # replaced below with D-aware version


def _valp(x: Fraction, p: int) -> int:
    if x == 0:
        raise ZeroDivisionError("valuation of zero")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


class Tau:
    """tau = x0 + y0*sqrt(D) with exact rational coordinates."""

    __slots__ = ("x0", "y0", "D")

    def __init__(self, x0, y0, D: int):
        self.x0 = Fraction(x0)
        self.y0 = Fraction(y0)
        self.D = D
        if self.y0 == 0:
            raise TauOnBoundary("tau lies in Q_p")

    def mobius_inv(self, m) -> "Tau":
        """(m^-1) . tau for an integer matrix m of nonzero determinant."""
        a, b, c, d = m
        det = a * d - b * c
        # m^-1 = (d, -b; -c, a) / det; Mobius ignores the scalar
        return self.mobius((d, -b, -c, a))

    def mobius(self, m) -> "Tau":
        a, b, c, d = m
        nx = a * self.x0 + b
        ny = a * self.y0
        dx = c * self.x0 + d
        dy = c * self.y0
        norm = dx * dx - dy * dy * self.D
        if norm == 0:
            raise TauOnBoundary("Mobius image degenerates")
        x0 = (nx * dx - ny * dy * self.D) / norm
        y0 = (ny * dx - nx * dy) / norm
        return Tau(x0, y0, self.D)

    def val_minus(self, b: Fraction, p: int) -> int:
        """val_p(b - tau) = min(val(b - x0), val(y0))."""
        vy = _valp(self.y0, p)
        if b == self.x0:
            return vy
        return min(_valp(b - self.x0, p), vy)

    def val(self, p: int) -> int:
        if self.x0 == 0:
            return _valp(self.y0, p)
        return min(_valp(self.x0, p), _valp(self.y0, p))

    def to_padic(self, p: int, prec: int) -> PadicQuad:
        return PadicQuad.from_rationals(self.x0, self.y0, self.D, p, prec)

    def __repr__(self):
        return f"Tau({self.x0} + {self.y0}*sqrt({self.D}))"


@dataclass
class MultIntValue:
    """A class in K_p^x / q^Z: exact valuation part plus a unit
    representative (the full representative is p^ord * unit)."""

    ord: int
    unit: PadicQuad

    def rep(self, p: int) -> PadicQuad:
        shift = PadicNum(p, self.ord, 1, self.ord + (self.unit.prec or 16))
        return self.unit * PadicQuad.from_num(shift, self.unit.D)

    def mul(self, other: "MultIntValue") -> "MultIntValue":
        return MultIntValue(self.ord + other.ord, self.unit * other.unit)

    def inv(self) -> "MultIntValue":
        return MultIntValue(-self.ord, self.unit.inverse())

    def pow(self, k: int) -> "MultIntValue":
        if k < 0:
            return self.inv().pow(-k)
        out = MultIntValue(0, PadicQuad.one(self.unit.D, self.unit.p,
                                            self.unit.prec or 16))
        b = self
        while k:
            if k & 1:
                out = out.mul(b)
            b = b.mul(b)
            k >>= 1
        return out

    def log(self) -> PadicQuad:
        """Iwasawa log of the unit part (= branch log with log p = 0)."""
        return iwasawa_log(self.unit)


W_INVOLUTION = None  # set per-integrator: (0, -1, p, 0)


class DoubleIntegral:
    """Integration engine bound to one (phi, Psi, alpha, p, D) context."""

    def __init__(self, phi: ModSymbol, psi: OCSymbol, alpha: int,
                 p: int, D: int, M: int = 1):
        self.phi = phi
        self.psi = psi
        self.alpha = alpha
        self.p = p
        self.D = D
        self.M = M
        self.nmom = psi.nmom
        self.prec = psi.nmom  # working absolute precision for unit parts
        self._path_cache: dict = {}
        self._phi_cache: dict = {}
        self.w = (0, -1, p, 0)

    # ----------------------------------------------------------- measures

    def _phi_path(self, x, y) -> Fraction:
        key = (x, y)
        v = self._phi_cache.get(key)
        if v is None:
            v = self.phi.evaluate_path(x, y)
            self._phi_cache[key] = v
        return v

    def _psi_path(self, x, y) -> Distribution:
        key = (x, y)
        v = self._path_cache.get(key)
        if v is None:
            v = self.psi.evaluate_path(x, y)
            self._path_cache[key] = v
        return v

    def ball_measure(self, x, y, b: Fraction, n: int) -> int:
        """mu{x->y}(b + p^n Z_p) as an exact integer."""
        gx, gy = self._ball_pullback(x, y, b, n)
        val = self._phi_path(gx, gy)
        if val.denominator != 1:
            raise ArithmeticError("non-integral measure value")
        return int(val) if self.alpha == 1 or n % 2 == 0 else -int(val)

    def ball_moments(self, x, y, b: Fraction, n: int) -> Distribution:
        """Moments of z in mu restricted to b + p^n Z_p, t = b + p^n z.

        Includes the alpha^n twist; pairing f(t) against the ball means
        sum_k f_k(b, p^n) * moments[k]."""
        gx, gy = self._ball_pullback(x, y, b, n)
        dist = self._psi_path(gx, gy)
        if self.alpha == -1 and n % 2 == 1:
            dist = -dist
        return dist

    def _ball_pullback(self, x, y, b: Fraction, n: int):
        bf = Fraction(b)
        m = (bf.denominator, -bf.numerator, 0, bf.denominator * self.p ** n) \
            if n >= 0 else None
        if n >= 0:
            gx = _mobius(m, x)
            gy = _mobius(m, y)
        else:
            num, den = bf.numerator, bf.denominator
            m = (den * self.p ** (-n), -num * self.p ** (-n), 0, den)
            gx = _mobius(m, x)
            gy = _mobius(m, y)
        return gx, gy

    def total_measure_check(self, x, y) -> Fraction:
        """mu{x->y}(P^1) = phi{x->y} + alpha*phi{wx->wy}; zero iff the
        Fricke eigenvalue at p is -alpha (harmonicity)."""
        wx, wy = _mobius(self.w, x), _mobius(self.w, y)
        return self._phi_path(x, y) + self.alpha * self._phi_path(wx, wy)

    # ------------------------------------------------- standard-path factor

    def f_branch(self, tau: Tau, x, y) -> MultIntValue:
        """The regularised multiplicative integral of (t - tau) over
        P^1(Q_p) against mu{x->y}: finite side uses (t - tau), the
        infinity side (t - tau)/t."""
        p = self.p
        log_acc = PadicQuad.from_rationals(0, 0, self.D, p, self.prec + 1)
        unit_acc = PadicQuad.one(self.D, p, self.prec + 2)
        ord_acc = 0
        # finite side: adaptive cover of Z_p
        stack = [(Fraction(0), 0)]
        guard = 0
        while stack:
            b, n = stack.pop()
            guard += 1
            if guard > 200000:
                raise TauOnBoundary("cover refinement did not terminate")
            v = tau.val_minus(b, p)
            if v <= n - 1:
                mu = self.ball_measure(x, y, b, n)
                mom = self.ball_moments(x, y, b, n)
                center = PadicQuad.from_rationals(
                    b - tau.x0, -tau.y0, self.D, p, self.prec + 2 + v)
                if mu:
                    unit_acc = unit_acc * (center * PadicNum(
                        p, -v, 1, -v + self.prec + 2)) ** mu
                    ord_acc += v * mu
                c = PadicQuad.from_rationals(
                    Fraction(p ** n) / (b - tau.x0 - 0) if False else 0, 0,
                    self.D, p, 1)
                log_acc = log_acc + self._log_series(center, n, mom)
            else:
                if n + 1 > self.nmom + 4 + abs(tau.val(p)):
                    raise TauOnBoundary("tau too close to Q_p for this precision")
                step = Fraction(p ** n)
                for i in range(p):
                    stack.append((b + i * step, n + 1))
        # infinity side in the coordinate t = -1/(p u), u in Z_p
        wx, wy = _mobius(self.w, x), _mobius(self.w, y)
        stack = [(Fraction(0), 0)]
        guard = 0
        while stack:
            a, n = stack.pop()
            guard += 1
            if guard > 200000:
                raise TauOnBoundary("cover refinement did not terminate")
            # integrand 1 + p tau u = center * (1 + c (u - a)),
            # center = 1 + p tau a, c = p tau p^n / center
            cx = 1 + p * a * tau.x0
            cy = p * a * tau.y0
            if cx == 0 and cy == 0:
                vc = None
            else:
                vc = min(_valp(cx, p) if cx else 10 ** 9,
                         _valp(cy, p) if cy else 10 ** 9)
            ctau = 1 + n + tau.val(p)
            if vc is not None and ctau - vc >= 1:
                mu = self.ball_measure(wx, wy, a, n)
                if self.alpha == -1:
                    mu = -mu
                mom = self.ball_moments(wx, wy, a, n)
                if self.alpha == -1:
                    mom = -mom
                center = PadicQuad.from_rationals(
                    cx, cy, self.D, p, self.prec + 2 + vc)
                if mu:
                    unit_acc = unit_acc * (center * PadicNum(
                        p, -vc, 1, -vc + self.prec + 2)) ** mu
                    ord_acc += vc * mu
                log_acc = log_acc + self._log_series_inf(tau, a, n, center, vc, mom)
            else:
                if n + 1 > self.nmom + 4 + abs(tau.val(p)):
                    raise TauOnBoundary("tau too close to Q_p for this precision")
                step = Fraction(p ** n)
                for i in range(p):
                    stack.append((a + i * step, n + 1))
        value = unit_acc * exp_small(log_acc)
        return MultIntValue(ord_acc, value)

    def _log_series(self, center: PadicQuad, n: int, mom: Distribution) -> PadicQuad:
        """sum_k (-1)^(k+1)/k * (p^n / center)^k * m_k."""
        p = self.p
        c = PadicQuad.from_num(PadicNum(p, n, 1, n + self.prec + 2),
                               self.D) / center
        acc = PadicQuad.from_rationals(0, 0, self.D, p, self.prec + 1)
        ck = PadicQuad.one(self.D, p, self.prec + 2)
        for k in range(1, self.nmom):
            ck = ck * c
            term = ck * PadicQuad.from_num(mom.moments[k], self.D) / k
            acc = acc + (term if k % 2 == 1 else -term)
        return acc

    def _log_series_inf(self, tau: Tau, a: Fraction, n: int,
                        center: PadicQuad, vc: int, mom: Distribution) -> PadicQuad:
        """Same series with c = p^(n+1) tau / center on the u-side."""
        p = self.p
        taup = tau.to_padic(p, self.prec + 4 + abs(tau.val(p)))
        c = taup * PadicNum(p, n + 1, 1, n + 1 + self.prec + 2) / center
        acc = PadicQuad.from_rationals(0, 0, self.D, p, self.prec + 1)
        ck = PadicQuad.one(self.D, p, self.prec + 2)
        for k in range(1, self.nmom):
            ck = ck * c
            term = ck * PadicQuad.from_num(mom.moments[k], self.D) / k
            acc = acc + (term if k % 2 == 1 else -term)
        return acc

    # --------------------------------------------------- indefinite integral

    def mint(self, tau: Tau, x, y) -> MultIntValue:
        """The indefinite integral over the path {x -> y}, reduced to
        standard-position factors through the continued-fraction
        decomposition and the Gamma-invariance law."""
        out = MultIntValue(0, PadicQuad.one(self.D, self.p, self.prec + 2))
        for g, eps in self._path_letters(x, y):
            tj = tau.mobius_inv(g)
            if self.M == 1:
                factor = self.f_branch(tj, (0, 1), INF)
            else:
                gamma, r = self._coset_split(g)
                tj = tau.mobius_inv(gamma)
                r0 = (r[1], r[3]) if r[3] != 0 else INF
                r1 = _mobius(r, INF)
                factor = self.f_branch(tj, r0, r1)
            out = out.mul(factor if eps == 1 else factor.inv())
        return out

    def _path_letters(self, x, y):
        """Unimodular letters with {x -> y} = sum eps_j g_j {0 -> inf}."""
        letters = []
        for point, eps in ((y, 1), (x, -1)):
            if point == INF:
                continue
            for (a, b, c, d) in _cf_unimodular_pieces(point[0], point[1]):
                # piece is {g.0 -> g.inf} with g = (a, b; c, d), appearing
                # in {inf -> point}; direction reversed relative to 0->inf?
                letters.append(((a, b, c, d), eps))
        return letters

    def _coset_split(self, g):
        """g = gamma * r with gamma in Gamma_0(M), r a fixed coset rep."""
        from .modsym import _lift_to_sl2
        c, d = g[2] % self.M, g[3] % self.M
        r = _lift_to_sl2(c, d, self.M)
        rinv = (r[3], -r[1], -r[2], r[0])
        gamma = (g[0] * rinv[0] + g[1] * rinv[2], g[0] * rinv[1] + g[1] * rinv[3],
                 g[2] * rinv[0] + g[3] * rinv[2], g[2] * rinv[1] + g[3] * rinv[3])
        return gamma, r

    # ----------------------------------------------------------- laws

    def equal_mod_qZ(self, v1: MultIntValue, v2: MultIntValue,
                     q: PadicNum, digits: int) -> bool:
        """v1 = v2 in K_p^x/q^Z, to the stated number of digits."""
        vq = q.valuation()
        if (v1.ord - v2.ord) % vq != 0:
            return False
        k = (v1.ord - v2.ord) // vq
        qk = PadicQuad.from_num(q ** (-k) * PadicNum(
            self.p, k * vq, 1, k * vq + self.prec + 2), self.D)
        ratio = v1.unit / v2.unit * qk
        one = PadicQuad.one(self.D, self.p, digits)
        d = ratio - one
        return d.is_zero() or d.valuation() >= digits
