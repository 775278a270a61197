"""Real quadratic orders via indefinite binary quadratic forms.

Narrow class groups are computed as SL_2(Z)-classes of primitive
indefinite forms of discriminant D*c^2 (reduction cycles for the
equivalence test, Gauss composition for the group law), together with
Pell solutions, Heegner representatives relative to (M, delta), and
the finite-order characters of the class group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt


class SquareDiscriminant(ValueError):
    pass


class DiscriminantMismatch(ValueError):
    pass


class NoDelta(ValueError):
    pass


class BadRepresentative(RuntimeError):
    pass


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    t = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            t = -t
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


@dataclass(frozen=True)
class IndefForm:
    """Primitive integral form A x^2 + B xy + C y^2 of positive discriminant."""

    A: int
    B: int
    C: int

    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def content(self) -> int:
        return gcd(gcd(abs(self.A), abs(self.B)), abs(self.C))

    def is_reduced(self) -> bool:
        d = self.disc()
        # reduced iff |sqrt(d) - 2|A|| < B < sqrt(d) (forces B > 0, AC < 0)
        if self.B <= 0 or self.B * self.B > d:
            return False
        twoA = 2 * abs(self.A)
        # compare |sqrt(d)-2|A|| < B exactly: (2|A| - B)^2 < d < (2|A| + B)^2
        return (twoA - self.B) ** 2 < d < (twoA + self.B) ** 2

    def apply(self, m) -> "IndefForm":
        """Right action by an integral unimodular matrix [[a, b], [c, d]]."""
        a, b, c, d = m
        A, B, C = self.A, self.B, self.C
        A2 = A * a * a + B * a * c + C * c * c
        B2 = 2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d
        C2 = A * b * b + B * b * d + C * d * d
        return IndefForm(A2, B2, C2)

    def values(self, bound: int):
        """Primitively represented values F(x, y) for |x|, |y| <= bound."""
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                if gcd(x, y) == 1:
                    yield self.A * x * x + self.B * x * y + self.C * y * y, (x, y)

    def __str__(self):
        return f"({self.A},{self.B},{self.C})"


def _rho(f: IndefForm) -> IndefForm:
    """One step of the indefinite reduction operator."""
    d = f.disc()
    s = isqrt(d)
    C = f.C
    ac = abs(C)
    # r = -B mod 2C in the standard window
    if ac > s:
        lo = -ac + 1
    else:
        lo = s - 2 * ac + 1
    r = (-f.B - lo) % (2 * ac) + lo
    return IndefForm(C, r, (r * r - d) // (4 * C))


def reduce_form(f: IndefForm) -> IndefForm:
    d = f.disc()
    if d <= 0 or is_square(d):
        raise SquareDiscriminant(f"discriminant {d} not positive non-square")
    g = f
    for _ in range(10000):
        if g.is_reduced():
            return g
        g = _rho(g)
    raise RuntimeError("reduction did not terminate")


def cycle(f: IndefForm) -> list[IndefForm]:
    """The rho-cycle of reduced forms equivalent to f."""
    f0 = reduce_form(f)
    out = [f0]
    g = _rho(f0)
    while g != f0:
        out.append(g)
        g = _rho(g)
    return out


def equivalent(f: IndefForm, g: IndefForm) -> bool:
    if f.disc() != g.disc():
        return False
    return reduce_form(g) in cycle(f)


def principal_form(disc: int) -> IndefForm:
    b = isqrt(disc)
    if (b - disc) % 2:
        b -= 1
    return reduce_form(IndefForm(1, b, (b * b - disc) // 4))


def all_reduced_forms(disc: int) -> list[IndefForm]:
    """Every reduced primitive form of the given discriminant."""
    if disc <= 0 or is_square(disc):
        raise SquareDiscriminant(str(disc))
    s = isqrt(disc)
    out = []
    for B in range(1, s + 1):
        if (disc - B) % 2:
            continue
        ac = (B * B - disc) // 4  # negative
        for A in range(1, s + 1):
            if ac % A:
                continue
            for sA in (A, -A):
                f = IndefForm(sA, B, ac // sA)
                if f.content() == 1 and f.is_reduced():
                    out.append(f)
    return out


def pell_fundamental(disc: int) -> tuple[int, int]:
    """Minimal (r, s) with r^2 - disc*s^2 = 1, via continued fractions."""
    if disc <= 0 or is_square(disc):
        raise SquareDiscriminant(str(disc))
    a0 = isqrt(disc)
    m, d, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while True:
        m = d * a - m
        d = (disc - m * m) // d
        a = (a0 + m) // d
        if h * h - disc * k * k == 1:
            return h, k
        if h * h - disc * k * k == -1:
            return h * h + disc * k * k, 2 * h * k
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k


def _concordant_leading(g: IndefForm, m: int) -> IndefForm:
    """An SL_2(Z)-equivalent form whose (positive) leading coefficient is
    coprime to m, found by a deterministic spiral over primitive vectors."""
    for bound in (4, 8, 16, 32, 64, 128):
        best = None
        for val, (x, y) in g.values(bound):
            if val > 0 and gcd(val, m) == 1:
                if best is None or (val, x, y) < best:
                    best = (val, x, y)
        if best is not None:
            _, x, y = best
            d0, s, t = _xgcd(x, y)
            if d0 < 0:
                s, t = -s, -t
            return g.apply((x, -t, y, s))
    raise ArithmeticError(f"no represented value coprime to {m} found for {g}")


def compose(f: IndefForm, g: IndefForm) -> IndefForm:
    """Gauss composition via concordant forms, reduced representative."""
    if f.disc() != g.disc():
        raise DiscriminantMismatch(f"{f.disc()} != {g.disc()}")
    d = f.disc()
    f1 = _concordant_leading(f, 2 * d)
    g1 = _concordant_leading(g, 2 * d * f1.A)
    a1, a2 = f1.A, g1.A
    # common middle coefficient: B = b1 (mod 2a1), B = b2 (mod 2a2)
    g0 = gcd(2 * a1, 2 * a2)  # = 2, since gcd(a1, a2) = 1
    if (f1.B - g1.B) % g0:
        raise ArithmeticError("concordance failed: incompatible parities")
    m2 = 2 * a2 // g0
    t = (g1.B - f1.B) // g0 * pow(2 * a1 // g0, -1, m2) % m2 if m2 > 1 else 0
    B = f1.B + 2 * a1 * t
    A = a1 * a2
    C = (B * B - d) // (4 * A)
    return reduce_form(IndefForm(A, B, C))


@dataclass(frozen=True)
class RealQuadOrder:
    """Order of conductor c in the real quadratic field of fundamental
    discriminant D; its forms have discriminant D*c^2."""

    D: int
    c: int

    def __post_init__(self):
        if self.D <= 0 or self.D % 4 not in (0, 1):
            raise ValueError(f"{self.D} is not a positive discriminant")
        if is_square(self.D):
            raise SquareDiscriminant(str(self.D))

    @property
    def disc(self) -> int:
        return self.D * self.c * self.c


class ClassGroup:
    """Narrow Picard group of a real quadratic order, on form classes."""

    def __init__(self, order: RealQuadOrder):
        self.order = order
        disc = order.disc
        reduced = all_reduced_forms(disc)
        cycles: list[list[IndefForm]] = []
        seen: set[IndefForm] = set()
        for f in reduced:
            if f in seen:
                continue
            cyc = cycle(f)
            seen.update(cyc)
            cycles.append(cyc)
        # canonical representative: lexicographically least (A, B, C) in cycle
        reps = [min(c, key=lambda h: (h.A, h.B, h.C)) for c in cycles]
        ident = reduce_form(principal_form(disc))
        id_idx = next(i for i, c in enumerate(cycles) if ident in c)
        # put the identity first, keep the rest sorted
        perm = [id_idx] + sorted((i for i in range(len(reps)) if i != id_idx),
                                 key=lambda i: (reps[i].A, reps[i].B, reps[i].C))
        self.cycles = [cycles[i] for i in perm]
        self.reps = [reps[i] for i in perm]
        self._index = {f: i for i, c in enumerate(self.cycles) for f in c}
        n = len(self.reps)
        self.table = [[self._index[compose(self.reps[i], self.reps[j])]
                       for j in range(n)] for i in range(n)]

    @property
    def h(self) -> int:
        return len(self.reps)

    def class_of(self, f: IndefForm) -> int:
        if f.disc() != self.order.disc:
            raise DiscriminantMismatch(f"{f.disc()} != {self.order.disc}")
        return self._index[reduce_form(f)]

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return next(j for j in range(self.h) if self.table[i][j] == 0)

    def power(self, i: int, k: int) -> int:
        k %= self.element_order(i)
        r = 0
        for _ in range(k):
            r = self.table[r][i]
        return r

    def element_order(self, i: int) -> int:
        r, n = i, 1
        while r != 0:
            r = self.table[r][i]
            n += 1
        return n

    def decompose(self) -> list[tuple[int, int]]:
        """Basis (element index, order) with the group the direct sum of
        the cyclic subgroups generated by the basis elements."""
        if self.h == 1:
            return []
        return _abelian_basis(list(range(self.h)), self.table)

    def negation_class(self) -> int:
        """Class of the negated principal form: the kernel generator of
        the narrow-to-wide quotient (identity iff the order has a unit of
        norm -1)."""
        f = principal_form(self.order.disc)
        return self.class_of(IndefForm(-f.A, f.B, -f.C))

    def wide_transversal(self) -> list[int]:
        """One narrow class per wide class (coset of the negation class),
        deterministic: smallest index in each coset, identity first."""
        d = self.negation_class()
        out, seen = [], set()
        for i in range(self.h):
            if i in seen:
                continue
            out.append(i)
            seen.update({i, self.table[i][d]})
        return out


def _abelian_basis(elements, table) -> list[tuple[int, int]]:
    n = len(elements)

    def order_of(i):
        r, k = i, 1
        while r != 0:
            r = table[r][i]
            k += 1
        return k

    def powers(i):
        out, r = [0], table[0][i]
        while r != 0:
            out.append(r)
            r = table[r][i]
        return out

    g1 = max(range(n), key=order_of)
    n1 = order_of(g1)
    if n1 == n:
        return [(g1, n1)]
    H = set(powers(g1))
    # coset space representatives
    cosets: dict[frozenset, int] = {}
    for x in range(n):
        cs = frozenset(table[x][h] for h in H)
        cosets.setdefault(cs, x)
    coset_list = list(cosets.keys())
    idx = {cs: k for k, cs in enumerate(coset_list)}

    def find_coset(x):
        return idx[frozenset(table[x][h] for h in H)]

    q_table = [[find_coset(table[cosets[coset_list[i]]][cosets[coset_list[j]]])
                for j in range(len(coset_list))] for i in range(len(coset_list))]
    # re-root the quotient so the identity coset is index 0
    zero = find_coset(0)
    if zero != 0:
        swap = list(range(len(coset_list)))
        swap[0], swap[zero] = zero, 0
        remap = {old: new for new, old in enumerate(swap)}
        q_table = [[remap[q_table[swap[i]][swap[j]]] for j in range(len(swap))]
                   for i in range(len(swap))]
        coset_list = [coset_list[i] for i in swap]
    sub = _abelian_basis(list(range(len(coset_list))), q_table)
    out = [(g1, n1)]
    for q_gen, q_ord in sub:
        # lift: an element of the generator's coset whose order equals q_ord
        lift = None
        for x in sorted(coset_list[q_gen]):
            if order_of(x) == q_ord:
                lift = x
                break
        if lift is None:
            raise RuntimeError("no direct-summand lift found")
        out.append((lift, q_ord))
    return out


class RingClassChar:
    """A character of the narrow class group, valued in exact roots of unity.

    Values are exponents k meaning e^(2 pi i k / m) with m the group
    exponent; parity is 1 (totally even), -1 (totally odd) or None when
    undetermined.
    """

    def __init__(self, group: ClassGroup, exponents: list[int], modulus: int):
        self.group = group
        self.modulus = modulus
        self.exponents = exponents  # index -> k with value zeta_m^k

    def value_exponent(self, i: int) -> int:
        return self.exponents[i]

    def order(self) -> int:
        m = self.modulus
        g = m
        for e in self.exponents:
            g = gcd(g, e)
        return m // g if g else 1

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def is_quadratic(self) -> bool:
        return self.order() == 2

    def value_sign(self, i: int) -> int:
        """+/-1 value of a quadratic (or trivial) character."""
        if self.order() > 2:
            raise ValueError("not a quadratic character")
        return 1 if self.exponents[i] == 0 else -1

    @property
    def parity(self):
        return self._parity

    def __repr__(self):
        return f"RingClassChar(order={self.order()}, exps={self.exponents})"


def characters(group: ClassGroup) -> list[RingClassChar]:
    """All characters; the trivial one first, parity flags attached."""
    basis = group.decompose()
    h = group.h
    m = 1
    for _, n_i in basis:
        m = m * n_i // gcd(m, n_i)
    # coordinates of every element in the basis
    coords = _coordinates(group, basis)
    chars = []
    combos = [[]]
    for _, n_i in basis:
        combos = [c + [k] for c in combos for k in range(n_i)]
    for ks in combos:
        exps = []
        for i in range(h):
            e = sum(k * coords[i][j] * (m // n_i)
                    for j, ((_, n_i), k) in enumerate(zip(basis, ks))) % m
            exps.append(e)
        chars.append(RingClassChar(group, exps, m))
    chars.sort(key=lambda ch: (not ch.is_trivial(), ch.order(), ch.exponents))
    for ch in chars:
        ch._parity = _character_parity(ch)
    return chars


def _coordinates(group: ClassGroup, basis) -> list[list[int]]:
    """Exponent coordinates of each class in the direct-sum basis."""
    h = group.h
    index_of = {}
    combos = [([], 0)]
    for g_i, n_i in basis:
        new = []
        for ks, elt in combos:
            acc = elt
            for k in range(n_i):
                new.append((ks + [k], acc))
                acc = group.table[acc][g_i]
        combos = new
    coords = [None] * h
    for ks, elt in combos:
        coords[elt] = ks
    if any(c is None for c in coords):
        raise RuntimeError("basis does not span the group")
    return coords


def _prime_disc_blocks(disc: int) -> list[int]:
    """Prime discriminants whose product (up to square factors) carries
    the genus characters of disc."""
    blocks = []
    d = disc
    v2 = 0
    while d % 2 == 0:
        d //= 2
        v2 += 1
    for q in _odd_prime_divisors(disc):
        blocks.append(q if q % 4 == 1 else -q)
    if v2 >= 2:
        blocks.extend([-4, 8, -8])
    return blocks


def _odd_prime_divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    q = 3
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 2
    if n > 1 and n % 2:
        out.append(n)
    return out


def _genus_factorizations(disc: int) -> list[tuple[int, int]]:
    """Pairs (d1, d2) of discriminants with d1*d2 = disc, d1 a product of
    prime-discriminant blocks (at most one 2-adic block)."""
    odd_blocks = [q if q % 4 == 1 else -q for q in _odd_prime_divisors(disc)]
    v2 = 0
    d = disc
    while d % 2 == 0:
        d //= 2
        v2 += 1
    two_blocks = [1] + ([-4, 8, -8] if v2 >= 2 else [])
    out = []
    n = len(odd_blocks)
    for mask in range(1 << n):
        base = 1
        for i in range(n):
            if mask & (1 << i):
                base *= odd_blocks[i]
        for tb in two_blocks:
            d1 = base * tb
            if d1 == 1 or disc % d1:
                continue
            d2 = disc // d1
            if d1 % 4 not in (0, 1) or d2 % 4 not in (0, 1):
                continue
            if (d1, d2) not in out:
                out.append((d1, d2))
    return out


def _genus_char_value(d1: int, f: IndefForm, disc: int) -> int:
    """chi_{d1} evaluated on the narrow class of f via a positive
    represented value m with gcd(m, 2*disc) = 1."""
    for bound in (6, 12, 24, 48):
        for val, _xy in f.values(bound):
            if val > 0 and gcd(val, 2 * disc) == 1:
                return kronecker(d1, val)
    raise RuntimeError(f"no coprime represented value found for {f}")


def _character_parity(ch: RingClassChar):
    """Totally even (+1) / totally odd (-1) / None (undetermined).

    Odd-order characters factor through the quotient where complex
    conjugation acts trivially, hence are totally even.  For quadratic
    characters the parity is read off the genus factorization
    disc = d1 * d2: even iff both d1, d2 > 0.
    """
    if ch.order() % 2 == 1:
        return 1
    if not ch.is_quadratic():
        return None
    group = ch.group
    disc = group.order.disc
    for d1, d2 in _genus_factorizations(disc):
        if all(_genus_char_value(d1, group.reps[i], disc) == ch.value_sign(i)
               for i in range(group.h)):
            return 1 if d1 > 0 and d2 > 0 else -1
    return None


def narrow_class_group(order: RealQuadOrder) -> ClassGroup:
    return ClassGroup(order)


def heegner_representative(group: ClassGroup, idx: int, M: int, delta: int | None,
                           c: int, avoid_p: int | None = None) -> IndefForm:
    """A Heegner form (M | A, B = delta*c mod M) in the given class.

    Scans the reduction cycle and its unimodular images in a fixed
    deterministic order; with avoid_p set, also requires p to not
    divide A (needed to place tau at a unit of the standard lattice).
    """
    D = group.order.D
    if M > 1:
        if delta is None or (delta * delta - D) % M:
            raise NoDelta(f"delta^2 = D (mod {M}) violated")
    else:
        delta = 0

    def ok(f: IndefForm) -> bool:
        if f.A % M or (f.B - delta * c) % M:
            return False
        if avoid_p is not None and f.A % avoid_p == 0:
            return False
        return True

    cyc = group.cycles[idx]
    for f in cyc:
        if ok(f):
            return f
    # spiral over translations T^k and images under [[a,b],[c,d]] with
    # growing entries; deterministic order
    for radius in range(1, 40):
        for f in cyc:
            for k in (radius, -radius):
                g = f.apply((1, k, 0, 1))
                if ok(g):
                    return g
        for f in cyc:
            for x in range(-radius, radius + 1):
                for y in range(-radius, radius + 1):
                    if gcd(x, y) != 1:
                        continue
                    # complete (x, y) to a unimodular matrix
                    d0, u, v = _xgcd(x, y)
                    if d0 < 0:
                        u, v = -u, -v
                    m = (x, -v, y, u)
                    g = f.apply(m)
                    for k in range(-radius * M, radius * M + 1):
                        gg = g.apply((1, k, 0, 1))
                        if ok(gg):
                            return gg
    raise BadRepresentative(f"no admissible representative found in class {idx}")


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def tau_gamma(form: IndefForm, pell: tuple[int, int], c: int):
    """The fixed point tau = (-B + c*sqrt(D))/(2A) as an exact pair of
    rationals (x0, y0) meaning x0 + y0*sqrt(D), and the stabilizing
    matrix gamma in Gamma_0(M) built from the Pell solution."""
    r, s = pell
    A, B, C = form.A, form.B, form.C
    x0 = Fraction(-B, 2 * A)
    y0 = Fraction(c, 2 * A)
    gamma = (r - B * s, -2 * C * s, 2 * A * s, r + B * s)
    if gamma[0] * gamma[3] - gamma[1] * gamma[2] != 1:
        raise BadRepresentative("Pell matrix is not unimodular")
    return (x0, y0), gamma
