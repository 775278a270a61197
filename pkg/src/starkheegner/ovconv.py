"""Overconvergent (distribution-valued) modular symbols.

Distributions are truncated moment vectors with the U_p-stable
filtration (the j-th moment is meaningful mod p^(M-j)).  The classical
U_p-eigensymbol of an elliptic curve with multiplicative reduction at p
lifts to a unique eigensymbol with the same eigenvalue alpha = a_p; the
lift is computed by iterating alpha * U_p exactly M times from any
moment-lift, which contracts the kernel of specialisation.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .modsym import ManinBasis, ModSymbol, _cf_unimodular_pieces, _lift_to_sl2, _mobius, INF, hecke_apply
from .padics import PadicNum


class BadMatrix(ValueError):
    """Matrix outside the standard Sigma_0(p) monoid."""


class NotEigen(ValueError):
    """The classical symbol is not a U_p-eigensymbol with the given alpha."""


class Distribution:
    """Moment vector m_0..m_{M-1}; m_j carries absolute precision M - j."""

    __slots__ = ("p", "nmom", "moments")

    def __init__(self, p: int, moments: list[PadicNum]):
        self.p = p
        self.nmom = len(moments)
        self.moments = moments

    @classmethod
    def from_ints(cls, p: int, values, nmom: int) -> "Distribution":
        moms = []
        for j in range(nmom):
            v = values[j] if j < len(values) else 0
            moms.append(PadicNum.from_rational(Fraction(v), p, nmom - j))
        return cls(p, moms)

    @classmethod
    def zero(cls, p: int, nmom: int) -> "Distribution":
        return cls.from_ints(p, [], nmom)

    def __add__(self, other: "Distribution") -> "Distribution":
        return Distribution(self.p, [a + b for a, b in
                                     zip(self.moments, other.moments)])

    def __neg__(self):
        return Distribution(self.p, [-a for a in self.moments])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "Distribution":
        return Distribution(self.p, [c * a for a in self.moments])

    def __eq__(self, other):
        return isinstance(other, Distribution) and all(
            a == b for a, b in zip(self.moments, other.moments))

    def total_mass(self) -> PadicNum:
        return self.moments[0]

    def __repr__(self):
        return f"Distribution({[str(m) for m in self.moments]})"


def _action_matrix(g, p: int, nmom: int):
    """Rows A[j]: ((b + d z)/(a + c z))^j = sum_i A[j][i] z^i, truncated."""
    a, b, c, d = g
    if a % p == 0 or c % p != 0:
        raise BadMatrix(f"{g} is not in Sigma_0({p})")
    prec = nmom + 2
    one = PadicNum.from_int(1, p, prec)
    # base = (b + d z), expanded; inv = (a + c z)^{-1} as a series
    binv = []
    ainv = PadicNum.from_int(a, p, prec).inverse()
    ratio = PadicNum.from_int(c, p, prec) * ainv  # val >= 1
    term = one
    for i in range(nmom):
        binv.append(term * ainv)
        term = term * (-ratio)
    # f = (b + dz) * (a + cz)^{-1} as series coefficients
    f = [PadicNum.from_int(b, p, prec) * binv[0]]
    for i in range(1, nmom):
        f.append(PadicNum.from_int(b, p, prec) * binv[i]
                 + PadicNum.from_int(d, p, prec) * binv[i - 1])
    rows = []
    cur = [one] + [PadicNum.zero(p, prec)] * (nmom - 1)
    rows.append(cur)
    for j in range(1, nmom):
        nxt = [PadicNum.zero(p, prec)] * nmom
        for i1, x in enumerate(cur):
            if x.is_zero():
                continue
            for i2, y in enumerate(f):
                if i1 + i2 >= nmom:
                    break
                nxt[i1 + i2] = nxt[i1 + i2] + x * y
        rows.append(nxt)
        cur = nxt
    return rows


class _MatrixCache:
    def __init__(self, p: int, nmom: int):
        self.p, self.nmom = p, nmom
        self.cache: dict[tuple, list] = {}

    def get(self, g):
        key = tuple(g)
        m = self.cache.get(key)
        if m is None:
            m = _action_matrix(g, self.p, self.nmom)
            self.cache[key] = m
        return m


def dist_act(g, mu: Distribution, cache: _MatrixCache | None = None) -> Distribution:
    """Pushforward of mu under t -> (b + d t)/(a + c t) for g = (a,b,c,d)."""
    rows = (cache.get(g) if cache is not None
            else _action_matrix(g, mu.p, mu.nmom))
    out = []
    for j in range(mu.nmom):
        acc = None
        for i in range(mu.nmom):
            t = rows[j][i] * mu.moments[i]
            acc = t if acc is None else acc + t
        cap = mu.nmom - j
        if acc.prec is None or acc.prec > cap:
            acc = acc.with_prec(cap)
        out.append(acc)
    return Distribution(mu.p, out)


class OCSymbol:
    """Distribution-valued symbol on the Manin generators of level N."""

    def __init__(self, basis: ManinBasis, p: int, alpha: int,
                 values: list[Distribution], nmom: int):
        self.basis = basis
        self.p = p
        self.alpha = alpha
        self.values = values
        self.nmom = nmom
        self._cache = _MatrixCache(p, nmom)
        self._up_table = None

    # ------------------------------------------------------- evaluation

    def eval_to_cusp(self, x) -> Distribution:
        """Psi on the path {infty -> x} via the Manin decomposition."""
        if x == INF:
            return Distribution.zero(self.p, self.nmom)
        acc = None
        for (a, b, c, d) in _cf_unimodular_pieces(x[0], x[1]):
            i = self.basis.index(c, d)
            gi = _lift_to_sl2(*self.basis.reps[i], self.basis.N)
            # transport: value on g{0->infinity} = V[i] | (g_i g^{-1})
            gamma = _mat_mul(gi, (d, -b, -c, a))
            t = dist_act(gamma, self.values[i], self._cache)
            acc = t if acc is None else acc + t
        if acc is None:
            acc = Distribution.zero(self.p, self.nmom)
        return acc

    def evaluate_path(self, x, y) -> Distribution:
        return self.eval_to_cusp(y) - self.eval_to_cusp(x)

    def specialisation(self) -> list:
        return [d.total_mass() for d in self.values]


def _mat_mul(g, h):
    return (g[0] * h[0] + g[1] * h[2], g[0] * h[1] + g[1] * h[3],
            g[2] * h[0] + g[3] * h[2], g[2] * h[1] + g[3] * h[3])


def up_operator(psi: OCSymbol) -> OCSymbol:
    """U_p as the coset sum over (1, a; 0, p), a = 0..p-1."""
    p = psi.p
    if psi._up_table is None:
        table = []
        for i, (c, d) in enumerate(psi.basis.reps):
            gi = _lift_to_sl2(c, d, psi.basis.N)
            x1 = _mobius(gi, INF)
            x0 = (gi[1], gi[3]) if gi[3] != 0 else INF
            entries = []
            for a in range(p):
                h = (1, a, 0, p)
                y0, y1 = _mobius(h, x0), _mobius(h, x1)
                # decompose {y0 -> y1} and transport each piece, then |h
                for sgn, endpoint in ((1, y1), (-1, y0)):
                    if endpoint == INF:
                        continue
                    for (aa, bb, cc, dd) in _cf_unimodular_pieces(*endpoint):
                        j = psi.basis.index(cc, dd)
                        gj = _lift_to_sl2(*psi.basis.reps[j], psi.basis.N)
                        gamma = _mat_mul(gj, (dd, -bb, -cc, aa))
                        entries.append((sgn, j, _mat_mul(gamma, h)))
            table.append(entries)
        psi._up_table = table
    new_vals = []
    for entries in psi._up_table:
        acc = None
        for sgn, j, mat in entries:
            t = dist_act(mat, psi.values[j], psi._cache)
            if sgn < 0:
                t = -t
            acc = t if acc is None else acc + t
        if acc is None:
            acc = Distribution.zero(p, psi.nmom)
        new_vals.append(acc)
    out = OCSymbol(psi.basis, p, psi.alpha, new_vals, psi.nmom)
    out._cache = psi._cache
    out._up_table = psi._up_table
    return out


def lift_eigen(phi: ModSymbol, alpha: int, nmom: int,
               seed: int | None = None) -> OCSymbol:
    """The unique U_p-eigenlift of phi with eigenvalue alpha.

    Starts from an arbitrary moment-lift (seeded when reproducibility of
    the arbitrariness matters) and applies alpha * U_p exactly nmom
    times; the specialisation stays equal to phi throughout.
    """
    if alpha not in (1, -1):
        raise NotEigen(f"alpha must be +-1, got {alpha}")
    p = _p_of_level(phi.basis.N)
    up_phi = hecke_apply(phi, p)
    if up_phi.values != [alpha * v for v in phi.values]:
        raise NotEigen("classical symbol is not a U_p eigensymbol")
    rng = random.Random(seed)
    values = []
    for v in phi.values:
        if v.denominator != 1:
            raise NotEigen("expected an integrally normalised symbol")
        seeds = [int(v)] + [0 if seed is None else rng.randrange(p ** nmom)
                            for _ in range(nmom - 1)]
        values.append(Distribution.from_ints(p, seeds, nmom))
    psi = OCSymbol(phi.basis, p, alpha, values, nmom)
    for _ in range(nmom):
        nxt = up_operator(psi)
        if alpha == -1:
            scaled = OCSymbol(nxt.basis, p, alpha,
                              [v.scale(-1) for v in nxt.values], nxt.nmom)
            scaled._cache, scaled._up_table = nxt._cache, nxt._up_table
            nxt = scaled
        psi = nxt
    return psi


_P_OF_LEVEL = {}


def set_level_prime(N: int, p: int):
    """Register which prime of the level N = p*M plays the role of p."""
    _P_OF_LEVEL[N] = p


def _p_of_level(N: int) -> int:
    p = _P_OF_LEVEL.get(N)
    if p is None:
        raise KeyError(f"level {N}: call set_level_prime(N, p) first")
    return p


# -------------------------------------------------------- serialisation

FORMAT_TAG = "shp-oc/1"


def oc_to_dict(psi: OCSymbol) -> dict:
    return {
        "format": FORMAT_TAG,
        "level": psi.basis.N,
        "p": psi.p,
        "alpha": psi.alpha,
        "nmom": psi.nmom,
        "moments": [[[m.val if not m.is_zero() else None,
                      m.unit, m.prec] for m in d.moments]
                    for d in psi.values],
    }


def oc_from_dict(data: dict, basis: ManinBasis) -> OCSymbol:
    if data.get("format") != FORMAT_TAG:
        raise ValueError(f"cache format mismatch: {data.get('format')}")
    p, nmom = data["p"], data["nmom"]
    values = []
    for mom_list in data["moments"]:
        moms = []
        for val, unit, prec in mom_list:
            if val is None:
                moms.append(PadicNum(p, prec, 0, prec))
            else:
                moms.append(PadicNum(p, val, unit, prec))
        values.append(Distribution(p, moms))
    return OCSymbol(basis, p, data["alpha"], values, nmom)
