"""Dense univariate/bivariate polynomials, Sylvester resultants, real roots.

``Poly1`` holds ascending coefficients as plain Python numbers, which may be
floats or ``gmpy2.mpfr`` values.  ``Poly2`` holds a float64 coefficient
matrix ``c[i, j]`` for ``u**i * w**j``.

The resultant is computed by evaluation and interpolation in multiprecision
arithmetic.  Real roots are isolated with Sturm sequences in the same
arithmetic and refined by bisection plus one Newton step.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

import gmpy2
import numpy as np

from .errors import BothConstantInW, BothZero, ZeroPolynomial

DEFAULT_TRIM = 1e-9


class _Prec:
    """Scalar factory for a fixed decimal precision backed by gmpy2.

    Arithmetic on mpfr values follows the *active* gmpy2 context, so all
    multiprecision work runs inside ``with ctx:`` (contexts are thread-local).
    """

    def __init__(self, dps: int):
        self.dps = dps
        self._local = gmpy2.context(gmpy2.get_context(), precision=int(dps * 3.33) + 8)

    def __enter__(self):
        self._local.__enter__()
        return self

    def __exit__(self, *exc):
        return self._local.__exit__(*exc)

    mpf = staticmethod(gmpy2.mpfr)
    cos = staticmethod(gmpy2.cos)

    @property
    def pi(self):
        return gmpy2.const_pi()

    def eps(self, digits):
        return gmpy2.mpfr(10) ** (-digits)


def _mp_context(dps: int) -> _Prec:
    return _Prec(dps)


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------

class Poly1:
    """Univariate polynomial with ascending coefficients."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence = (), var: str = "x"):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self.var = var

    @classmethod
    def from_roots(cls, roots, var="x", lead=1.0):
        p = cls([lead], var)
        for r in roots:
            p = p * cls([-r, 1.0], var)
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scale_at(self, x) -> float:
        """``sum |a_i| |x|^i``, the natural magnitude for residuals at x."""
        ax = abs(x)
        acc = 0 * ax
        for c in reversed(self.coeffs):
            acc = acc * ax + abs(c)
        return acc

    def __add__(self, other):
        other = _as_poly1(other, self.var)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly1([x + y for x, y in zip(a, b)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly1([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-_as_poly1(other, self.var))

    def __rsub__(self, other):
        return _as_poly1(other, self.var) - self

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            return Poly1([c * other for c in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return Poly1([], self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly1(out, self.var)

    __rmul__ = __mul__

    def derivative(self):
        return Poly1([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def divmod(self, other):
        """Euclidean division; returns (quotient, remainder)."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return Poly1([], self.var), Poly1(rem, self.var)
        q = [0] * (len(rem) - db)
        lb = other.lead
        for k in range(len(rem) - 1 - db, -1, -1):
            coef = rem[k + db] / lb
            q[k] = coef
            for i, b in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - coef * b
        return Poly1(q, self.var), Poly1(rem[:db], self.var)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0)

    def to_float(self) -> "Poly1":
        return Poly1([float(c) for c in self.coeffs], self.var)

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.var))

    def __repr__(self):
        return f"Poly1({[float(c) for c in self.coeffs]}, var={self.var!r})"


def _as_poly1(x, var):
    return x if isinstance(x, Poly1) else Poly1([x], var)


# ---------------------------------------------------------------------------
# bivariate
# ---------------------------------------------------------------------------

class Poly2:
    """Bivariate polynomial ``sum c[i, j] u^i w^j``."""

    __slots__ = ("c",)

    def __init__(self, c):
        c = np.atleast_2d(np.asarray(c, dtype=float))
        # drop all-zero top rows/columns
        rows = np.nonzero(np.any(c != 0, axis=1))[0]
        cols = np.nonzero(np.any(c != 0, axis=0))[0]
        if rows.size == 0:
            c = np.zeros((1, 1))
        else:
            c = c[: rows[-1] + 1, : cols[-1] + 1]
        self.c = c

    @classmethod
    def zero(cls):
        return cls(np.zeros((1, 1)))

    @classmethod
    def u(cls):
        return cls([[0.0], [1.0]])

    @classmethod
    def w(cls):
        return cls([[0.0, 1.0]])

    @property
    def deg_u(self) -> int:
        return -1 if self.is_zero() else self.c.shape[0] - 1

    @property
    def deg_w(self) -> int:
        return -1 if self.is_zero() else self.c.shape[1] - 1

    def is_zero(self) -> bool:
        return not np.any(self.c)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.c)))

    def __add__(self, other):
        if not isinstance(other, Poly2):
            other = Poly2([[float(other)]])
        n = max(self.c.shape[0], other.c.shape[0])
        m = max(self.c.shape[1], other.c.shape[1])
        out = np.zeros((n, m))
        out[: self.c.shape[0], : self.c.shape[1]] += self.c
        out[: other.c.shape[0], : other.c.shape[1]] += other.c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly2(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly2) else -float(other))

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            return Poly2(self.c * float(other))
        a, b = self.c, other.c
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                if a[i, j] != 0.0:
                    out[i: i + b.shape[0], j: j + b.shape[1]] += a[i, j] * b
        return Poly2(out)

    __rmul__ = __mul__

    def scale(self, s: float) -> "Poly2":
        return Poly2(self.c * s)

    def __call__(self, u, w):
        return self.evaluate(u, w)

    def evaluate(self, u, w):
        uu = u ** np.arange(self.c.shape[0])
        ww = w ** np.arange(self.c.shape[1])
        return float(uu @ self.c @ ww)

    def evaluate_partial(self, u) -> Poly1:
        """Substitute ``u``; returns a Poly1 in w."""
        uu = np.asarray([u ** i for i in range(self.c.shape[0])], dtype=float)
        return Poly1(list(uu @ self.c), "w")

    def coeffs_in_w_at(self, u, ctx=None) -> list:
        """w-coefficients at u, in the formal degree, optionally in multiprecision."""
        if ctx is None:
            return list(np.asarray([u ** i for i in range(self.c.shape[0])]) @ self.c)
        out = []
        for j in range(self.c.shape[1]):
            acc = ctx.mpf(0)
            for i in range(self.c.shape[0] - 1, -1, -1):
                acc = acc * u + ctx.mpf(float(self.c[i, j]))
            out.append(acc)
        return out

    def __eq__(self, other):
        if isinstance(other, Poly2):
            return self.c.shape == other.c.shape and bool(np.all(self.c == other.c))
        return NotImplemented

    def __hash__(self):
        return hash(self.c.tobytes())

    def __repr__(self):
        return f"Poly2({self.c.tolist()})"


# ---------------------------------------------------------------------------
# trimming
# ---------------------------------------------------------------------------

def trim(p, rel_eps: float = DEFAULT_TRIM):
    """Zero coefficients below ``rel_eps * max|coeff|`` and drop vanished leading terms."""
    if isinstance(p, Poly2):
        if p.is_zero():
            return Poly2.zero()
        c = p.c.copy()
        c[np.abs(c) < rel_eps * np.max(np.abs(c))] = 0.0
        return Poly2(c)
    if isinstance(p, Poly1):
        if p.is_zero():
            return p
        m = p.max_abs()
        return Poly1([0 * c if abs(c) < rel_eps * m else c for c in p.coeffs], p.var)
    raise TypeError(f"cannot trim {type(p).__name__}")


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def sylvester_matrix(a: Sequence, b: Sequence):
    """Sylvester matrix of two coefficient lists (ascending), a-rows first.

    Works for any scalar type; returns a list of rows.
    """
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    zero = 0 * a[0]
    rows = []
    ad, bd = list(reversed(a)), list(reversed(b))
    for k in range(n):
        rows.append([zero] * k + ad + [zero] * (size - k - m - 1))
    for k in range(m):
        rows.append([zero] * k + bd + [zero] * (size - k - n - 1))
    return rows


def resultant_degree_bound(f: Poly2, g: Poly2) -> int:
    return g.deg_w * f.deg_u + f.deg_w * g.deg_u


def _cheb_nodes(n, ctx, half_width=1):
    return [ctx.mpf(half_width) * ctx.cos(ctx.pi * (2 * k + 1) / (2 * n)) for k in range(n)]


def interpolate_monomial(xs, ys, ctx) -> list:
    """Ascending monomial coefficients of the interpolant through (xs, ys).

    Newton divided differences followed by expansion of the Newton form.
    """
    n = len(xs)
    dd = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [ctx.mpf(0)] * n
    coeffs[0] = dd[n - 1]
    deg = 0
    for k in range(n - 2, -1, -1):
        # coeffs <- coeffs * (x - xs[k]) + dd[k]
        new = [ctx.mpf(0)] * n
        for i in range(deg + 1):
            new[i + 1] += coeffs[i]
            new[i] -= coeffs[i] * xs[k]
        new[0] += dd[k]
        coeffs = new
        deg += 1
    return coeffs


def _det(rows, ctx):
    """Determinant by Gaussian elimination with partial pivoting."""
    a = [list(r) for r in rows]
    n = len(a)
    det = ctx.mpf(1)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            return ctx.mpf(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pk = a[k][k]
        det *= pk
        rowk = a[k]
        for i in range(k + 1, n):
            fac = a[i][k] / pk
            if fac:
                ri = a[i]
                for j in range(k + 1, n):
                    ri[j] -= fac * rowk[j]
    return det


def sylvester_resultant_w(f: Poly2, g: Poly2, rel_eps: float = DEFAULT_TRIM,
                          dps: Optional[int] = None, half_width: float = 1.0) -> Poly1:
    """Res_w(f, g) as a polynomial in u (Sylvester determinant, f-rows first).

    Evaluates the Sylvester determinant at ``D + 1`` Chebyshev nodes, where
    ``D`` is the a-priori degree bound, and interpolates.  The result carries
    ``mpfr`` coefficients at ``dps`` digits and is trimmed at ``rel_eps``.
    """
    if f.is_zero() or g.is_zero():
        return Poly1([], "u")
    if f.deg_w < 1 and g.deg_w < 1:
        raise BothConstantInW("neither polynomial depends on w")
    bound = resultant_degree_bound(f, g)
    if dps is None:
        dps = 30 + bound
    with _mp_context(dps) as ctx:
        return _resultant_mp(f, g, bound, ctx, half_width, rel_eps)


def _resultant_mp(f, g, bound, ctx, half_width, rel_eps):
    if f.deg_w == 0:
        # Res(c, g) = c^deg g
        base = lambda u: f.coeffs_in_w_at(u, ctx)[0] ** g.deg_w
    elif g.deg_w == 0:
        base = lambda u: g.coeffs_in_w_at(u, ctx)[0] ** f.deg_w
    else:
        base = lambda u: _det(sylvester_matrix(f.coeffs_in_w_at(u, ctx), g.coeffs_in_w_at(u, ctx)), ctx)
    xs = _cheb_nodes(bound + 1, ctx, half_width)
    ys = [base(x) for x in xs]
    r = Poly1(interpolate_monomial(xs, ys, ctx), "u")
    # nothing below the working precision is meaningful
    return trim(r, max(rel_eps, 10.0 ** (10 - ctx.dps)))


# ---------------------------------------------------------------------------
# real roots
# ---------------------------------------------------------------------------

class RealRoot(float):
    """A real root; behaves as a float and carries its multiplicity."""

    multiplicity: int

    def __new__(cls, value, multiplicity=1):
        obj = super().__new__(cls, value)
        obj.multiplicity = multiplicity
        return obj

    def __repr__(self):
        return f"RealRoot({float(self)!r}, multiplicity={self.multiplicity})"


def _to_mp(p: Poly1, ctx) -> Poly1:
    return Poly1([ctx.mpf(c) for c in p.coeffs], p.var)


def _prim(p: Poly1, ctx) -> Poly1:
    """Scale so the largest coefficient magnitude is 1 (keeps the chain bounded)."""
    m = p.max_abs()
    return p if m == 0 else Poly1([c / m for c in p.coeffs], p.var)


def sturm_sequence(p: Poly1, ctx, rel_eps=None) -> List[Poly1]:
    """Sturm chain of p; remainders are trimmed against the dividend's scale."""
    if rel_eps is None:
        rel_eps = ctx.mpf(10) ** (-(ctx.dps * 2) // 3)
    seq = [_prim(p, ctx), _prim(p.derivative(), ctx)]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        _, r = seq[-2].divmod(seq[-1])
        scale = max(seq[-2].max_abs(), seq[-1].max_abs())
        r = Poly1([0 * c if abs(c) <= rel_eps * scale else c for c in r.coeffs], p.var)
        if r.is_zero():
            break
        seq.append(_prim(-r, ctx))
    if seq[-1].is_zero():
        seq.pop()
    return seq


def _sign_changes(values) -> int:
    n = 0
    last = 0
    for v in values:
        if v > 0:
            s = 1
        elif v < 0:
            s = -1
        else:
            continue
        if last and s != last:
            n += 1
        last = s
    return n


def _changes_at(seq, x) -> int:
    return _sign_changes([q(x) for q in seq])


def _changes_at_inf(seq, sign: int) -> int:
    vals = []
    for q in seq:
        lc = q.lead
        vals.append(lc if (sign > 0 or q.degree % 2 == 0) else -lc)
    return _sign_changes(vals)


def cauchy_bound(p: Poly1):
    lc = abs(p.lead)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=0)


def real_roots(p: Poly1, tol: float = 1e-12, dps: Optional[int] = None) -> List[RealRoot]:
    """All real roots of p, sorted, each a RealRoot with its multiplicity.

    Raises ZeroPolynomial for the zero polynomial.
    """
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no isolated roots")
    if p.degree == 0:
        return []
    if dps is None:
        dps = max(40, 20 + p.degree) + _dynamic_range_digits(p)
    with _mp_context(dps) as ctx:
        return _real_roots_mp(p, ctx, dps, tol)


def _dynamic_range_digits(p: Poly1) -> int:
    """Decimal digits spanned by the nonzero coefficient magnitudes."""
    mags = [abs(float(c)) for c in p.coeffs if c != 0]
    mags = [m for m in mags if m > 0]
    if len(mags) < 2:
        return 0
    return int(math.ceil(math.log10(max(mags) / min(mags))))


def _real_roots_mp(p, ctx, dps, tol):
    pm = _prim(_to_mp(p, ctx), ctx)
    seq = sturm_sequence(pm, ctx)
    total = _changes_at_inf(seq, -1) - _changes_at_inf(seq, 1)
    if total <= 0:
        return []

    # gcd chain for multiplicities: g1 = gcd(p, p'), g2 = gcd(g1, g1'), ...
    gcds = []
    g = seq[-1]
    while g.degree > 0:
        gcds.append(sturm_sequence(g, ctx))
        g = gcds[-1][-1]
    sqfree = pm.divmod(seq[-1])[0] if seq[-1].degree > 0 else pm

    bound = cauchy_bound(pm) * ctx.mpf(1.01)
    intervals = []
    stack = [(-bound, bound, _changes_at(seq, -bound), _changes_at(seq, bound))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n <= 0:
            continue
        if n == 1:
            intervals.append((a, b))
            continue
        m = (a + b) / 2
        if b - a < ctx.mpf(10) ** (-dps // 2) * max(1, abs(m)):
            # unresolvable cluster: report as one root
            intervals.append((a, b))
            continue
        vm = _changes_at(seq, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))

    out = []
    for a, b in intervals:
        x = _refine(sqfree, seq, a, b, ctx, tol)
        mult = 1
        for gs in gcds:
            if _changes_at(gs, a) - _changes_at(gs, b) > 0:
                mult += 1
            else:
                break
        out.append(RealRoot(float(x), mult))
    out.sort()
    return out


def _refine(sq: Poly1, seq, a, b, ctx, tol):
    """Shrink (a, b] to the root: sign-change bisection when possible, Sturm otherwise."""
    rel = ctx.mpf(10) ** -16
    fa, fb = sq(a), sq(b)
    if fb == 0:
        return b
    use_sign = fa * fb < 0
    va = _changes_at(seq, a) if not use_sign else None
    for _ in range(400):
        m = (a + b) / 2
        if b - a <= rel * max(1, abs(m)):
            break
        if use_sign:
            fm = sq(m)
            if fm == 0:
                return m
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        else:
            vm = _changes_at(seq, m)
            if va - vm > 0:
                b = m
            else:
                a, va = m, vm
    x = (a + b) / 2
    d = sq.derivative()
    dx = d(x)
    if dx != 0:
        xn = x - sq(x) / dx
        if a <= xn <= b:
            x = xn
    return x


def common_real_roots(p: Poly1, q: Poly1, tol: float = 1e-8) -> List[float]:
    """Real values where both p and q vanish (relative to their evaluation scale).

    Roots are taken from the lower-degree nonzero input and filtered by the
    other.  Raises BothZero when both are the zero polynomial.
    """
    pz, qz = p.is_zero(), q.is_zero()
    if pz and qz:
        raise BothZero("both polynomials are zero")
    if pz or qz:
        return [float(r) for r in real_roots(q if pz else p)]
    first, other = (p, q) if p.degree <= q.degree else (q, p)
    out = []
    for r in real_roots(first):
        if abs(other(r)) <= tol * max(other.scale_at(r), 1e-300):
            out.append(float(r))
    return out
