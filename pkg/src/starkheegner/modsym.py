"""Weight-2 modular symbols of level N over Q.

Manin presentation on P^1(Z/N), exact rational linear algebra for the
relation space, Hecke operators through the continued-fraction path
decomposition, and extraction of the integrally normalised eigensymbol
of a rational newform from its a_ell.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

INF = ("inf",)  # marker for the cusp at infinity


class NotIsolated(RuntimeError):
    """The Hecke data failed to cut out a one-dimensional eigenspace."""


class ManinBasis:
    """P^1(Z/N) with canonical representatives and the Manin relations."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N) if gcd(u, N) == 1] or [0]
        if N == 1:
            units = [0]
        seen = {}
        reps = []
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1:
                    continue
                key = min(((u * c) % N, (u * d) % N) for u in units)
                if key not in seen:
                    seen[key] = len(reps)
                    reps.append(key)
        self.reps = reps
        self._norm_cache = seen  # canonical tuple -> index
        self._full_cache: dict[tuple[int, int], int] = {}
        self._units = units

    @property
    def n_symbols(self) -> int:
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        key = (c % self.N, d % self.N)
        idx = self._full_cache.get(key)
        if idx is None:
            canon = min(((u * key[0]) % self.N, (u * key[1]) % self.N)
                        for u in self._units)
            idx = self._norm_cache[canon]
            self._full_cache[key] = idx
        return idx

    def relation_rows(self):
        """Rows (as index->coeff dicts) of the 2- and 3-term relations."""
        rows = []
        for c, d in self.reps:
            row: dict[int, int] = {}
            for cc, dd in ((c, d), (d, -c)):  # x + xS
                i = self.index(cc, dd)
                row[i] = row.get(i, 0) + 1
            rows.append(row)
            row = {}
            # x + xU + xU^2 with U = [[1,-1],[1,0]]: (c,d)U = (c+d, -c)
            cc, dd = c, d
            for _ in range(3):
                i = self.index(cc, dd)
                row[i] = row.get(i, 0) + 1
                cc, dd = (cc + dd) % self.N, (-cc) % self.N
            rows.append(row)
        return rows


def manin_basis(N: int) -> ManinBasis:
    return ManinBasis(N)


def _cf_unimodular_pieces(num: int, den: int):
    """Matrices g (det 1) with {infty -> num/den} = sum of {g.0 -> g.infty},
    via the continued-fraction convergents."""
    pieces = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = None, None
    # continued fraction of num/den with floor division (handles negatives)
    n, d = num, den
    if d < 0:
        n, d = -n, -d
    first = True
    while True:
        if d == 0:
            break
        a = n // d
        n, d = d, n - a * d
        if first:
            p_cur, q_cur = a, 1
            first = False
        else:
            p_cur, q_cur, p_prev, q_prev = (a * p_cur + p_prev,
                                            a * q_cur + q_prev, p_cur, q_cur)
        det = p_cur * q_prev - p_prev * q_cur
        if det == 1:
            pieces.append((p_cur, p_prev, q_cur, q_prev))
        else:
            pieces.append((p_cur, -p_prev, q_cur, -q_prev))
    return pieces


class ModSymbol:
    """A rational modular symbol given by its values on Manin generators."""

    def __init__(self, basis: ManinBasis, values: list[Fraction], sign: int):
        self.basis = basis
        self.values = values
        self.sign = sign

    # ------------------------------------------------------- evaluation

    def manin_value(self, c: int, d: int) -> Fraction:
        return self.values[self.basis.index(c, d)]

    def eval_to_cusp(self, x) -> Fraction:
        """Value on {infty -> x} for x rational (num, den) or INF."""
        if x == INF:
            return Fraction(0)
        num, den = x
        total = Fraction(0)
        for (a, b, c, d) in _cf_unimodular_pieces(num, den):
            total += self.values[self.basis.index(c, d)]
        return total

    def evaluate_path(self, x, y) -> Fraction:
        """Phi{x -> y}; endpoints are (num, den) pairs or INF."""
        return self.eval_to_cusp(y) - self.eval_to_cusp(x)

    # ---------------------------------------------------------- algebra

    def scaled(self, c: Fraction) -> "ModSymbol":
        return ModSymbol(self.basis, [v * c for v in self.values], self.sign)

    def __add__(self, other: "ModSymbol") -> "ModSymbol":
        return ModSymbol(self.basis,
                         [a + b for a, b in zip(self.values, other.values)],
                         self.sign)

    def __sub__(self, other: "ModSymbol") -> "ModSymbol":
        return ModSymbol(self.basis,
                         [a - b for a, b in zip(self.values, other.values)],
                         self.sign)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModSymbol) and self.values == other.values


def _mobius(m, x):
    """Apply an integer matrix to a cusp ((num, den) pair or INF)."""
    a, b, c, d = m
    if x == INF:
        num, den = a, c
    else:
        num, den = a * x[0] + b * x[1], c * x[0] + d * x[1]
    if num == 0 and den == 0:
        raise ZeroDivisionError("degenerate Mobius image")
    if den == 0:
        return INF
    g = gcd(num, den)
    if g:
        num, den = num // g, den // g
    if den < 0:
        num, den = -num, -den
    return (num, den)


def hecke_apply(phi: ModSymbol, ell: int) -> ModSymbol:
    """T_ell (ell coprime to the level) or U_ell (ell dividing it)."""
    N = phi.basis.N
    mats = [(1, j, 0, ell) for j in range(ell)]
    if N % ell != 0:
        mats.append((ell, 0, 0, 1))
    new_vals = []
    for c, d in phi.basis.reps:
        # a matrix with bottom row (c, d): any lift gives the same value
        g = _lift_to_sl2(c, d, N)
        x = _mobius(g, INF)                       # g . infty = a/c
        x0 = (g[1], g[3]) if g[3] != 0 else INF   # g . 0 = b/d
        total = Fraction(0)
        for m in mats:
            total += phi.evaluate_path(_mobius(m, x0), _mobius(m, x))
        new_vals.append(total)
    return ModSymbol(phi.basis, new_vals, phi.sign)


def _lift_to_sl2(c: int, d: int, N: int):
    """An integer matrix of determinant 1 with bottom row = (c, d) mod N."""
    c %= N
    d %= N
    if c == 0:
        c = N
    g = gcd(c, d)
    while g != 1:
        d += N
        g = gcd(c, d)
    # solve a*d - b*c = 1
    _, a, negb = _xgcd(d, c)
    return (a, -negb, c, d)


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def involution_matrix(basis: ManinBasis):
    """Index permutation of the w_infty involution (c:d) -> (-c:d)."""
    return [basis.index(-c, d) for c, d in basis.reps]


def _kernel_basis(rows, n):
    """Kernel of the sparse integer row system, as exact Fraction vectors."""
    mat = [[Fraction(row.get(j, 0)) for j in range(n)] for row in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, col in enumerate(pivots):
            v[col] = -mat[i][f]
        basis.append(v)
    return basis


def sturm_bound(N: int) -> int:
    idx = N
    n = N
    for ell in _prime_divisors(N):
        idx = idx // ell * (ell + 1)
    return -(-idx // 6)  # ceil


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def eigen_symbol(N: int, hecke_data, sign: int,
                 basis: ManinBasis | None = None) -> ModSymbol:
    """The unique (up to scale) symbol with the given T_ell/U_ell
    eigenvalues in the sign-eigenspace, integrally normalised.

    hecke_data: list of (ell, a_ell); enough primes up to the Sturm bound
    must be supplied to isolate a line, else NotIsolated.
    """
    if basis is None:
        basis = manin_basis(N)
    n = basis.n_symbols
    space = _kernel_basis(basis.relation_rows(), n)
    # sign eigenspace
    perm = involution_matrix(basis)
    space = _eigen_restrict(space, lambda v: [v[perm[i]] for i in range(n)], sign)
    bound = sturm_bound(N)
    used = []
    for ell, a_ell in sorted(hecke_data):
        if len(space) <= 1:
            break
        if ell > bound and len(space) > 1:
            break
        op = _hecke_on_vectors(basis, ell)
        space = _eigen_restrict(space, op, a_ell)
        used.append(ell)
    if len(space) != 1:
        raise NotIsolated(
            f"eigenspace dimension {len(space)} after primes {used}")
    v = space[0]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    content = 0
    for x in ints:
        content = gcd(content, x)
    ints = [x // content for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return ModSymbol(basis, [Fraction(x) for x in ints], sign)


def _hecke_on_vectors(basis: ManinBasis, ell: int):
    def op(v):
        phi = ModSymbol(basis, v, 0)
        return hecke_apply(phi, ell).values
    return op


def _eigen_restrict(space, op, eigval):
    """Basis of the eigval-eigenspace of op restricted to span(space)."""
    if not space:
        return space
    n = len(space[0])
    images = [op(list(v)) for v in space]
    # solve sum c_i (op - eig)(v_i) = 0
    rows = []
    for j in range(n):
        rows.append({i: images[i][j] - eigval * space[i][j]
                     for i in range(len(space))})
    combos = _kernel_basis_fractions(rows, len(space))
    out = []
    for combo in combos:
        vec = [sum(combo[i] * space[i][j] for i in range(len(space)))
               for j in range(n)]
        out.append(vec)
    return out


def _kernel_basis_fractions(rows, n):
    mat = [[Fraction(row.get(j, 0)) for j in range(n)] for row in rows]
    return _kernel_from_dense(mat, n)


def _kernel_from_dense(mat, n):
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [j for j in range(n) if j not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, col in enumerate(pivots):
            v[col] = -mat[i][f]
        out.append(v)
    return out


def fricke_eigenvalue(phi: ModSymbol) -> int:
    """Eigenvalue of the Fricke involution x -> -1/(Nx) on the symbol."""
    N = phi.basis.N
    w = (0, -1, N, 0)
    for c, d in phi.basis.reps:
        g = _lift_to_sl2(c, d, N)
        x0 = (g[1], g[3]) if g[3] != 0 else INF
        x1 = _mobius(g, INF)
        val = phi.evaluate_path(x0, x1)
        if val != 0:
            moved = phi.evaluate_path(_mobius(w, x0), _mobius(w, x1))
            ratio = moved / val
            if ratio not in (1, -1):
                raise ArithmeticError(f"non-involutive Fricke ratio {ratio}")
            return int(ratio)
    raise ZeroDivisionError("zero symbol")
