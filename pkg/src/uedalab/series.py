"""Truncated power series in one or several variables.

Coefficients are Python ``complex`` in float mode, or ``GaussianRational`` /
``Fraction`` / ``int`` in exact mode. Every binary operation truncates to the
smaller order of its operands.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Sequence, Tuple

from .exact import dump_scalar, is_exact, parse_scalar

Index = Tuple[int, ...]


class DegenerateImplicitProblem(ValueError):
    pass


class ImplicitSolveError(RuntimeError):
    pass


def _check_finite(c):
    if isinstance(c, (float, complex)) and not cmath.isfinite(c):
        raise OverflowError(f"non-finite coefficient {c!r}")


def grlex_key(a: Index):
    """Graded-lex sort key: total degree first, then lexicographically descending."""
    return (sum(a), tuple(-x for x in a))


@lru_cache(maxsize=None)
def monomials(r: int, d: int) -> Tuple[Index, ...]:
    """All multi-indices of r variables with total degree d, in graded-lex order."""
    if r == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomials(r - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def monomials_upto(r: int, lo: int, hi: int) -> Iterator[Index]:
    for d in range(lo, hi + 1):
        yield from monomials(r, d)


class MultiSeries:
    """Power series in ``num_vars`` variables truncated at total degree ``order``.

    Coefficients live in a dict keyed by multi-index; absent keys are zero.
    Instances are treated as immutable.
    """

    __slots__ = ("num_vars", "order", "coeffs")

    def __init__(self, num_vars: int, order: int, coeffs: Dict[Index, object] | None = None):
        if num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        if order < 0:
            raise ValueError("order must be >= 0")
        self.num_vars = num_vars
        self.order = order
        clean = {}
        for a, c in (coeffs or {}).items():
            a = tuple(int(x) for x in a)
            if len(a) != num_vars or min(a) < 0:
                raise ValueError(f"bad multi-index {a} for {num_vars} variables")
            if sum(a) > order or c == 0:
                continue
            _check_finite(c)
            clean[a] = c
        self.coeffs = clean

    # construction helpers
    @classmethod
    def zero(cls, num_vars: int, order: int) -> "MultiSeries":
        return cls(num_vars, order)

    @classmethod
    def constant(cls, num_vars: int, order: int, c) -> "MultiSeries":
        return cls(num_vars, order, {(0,) * num_vars: c})

    @classmethod
    def one(cls, num_vars: int, order: int) -> "MultiSeries":
        return cls.constant(num_vars, order, 1)

    @classmethod
    def variable(cls, num_vars: int, order: int, i: int, c=1) -> "MultiSeries":
        a = [0] * num_vars
        a[i] = 1
        return cls(num_vars, order, {tuple(a): c})

    def __getitem__(self, a) -> object:
        return self.coeffs.get(tuple(a), 0)

    def items(self) -> List[Tuple[Index, object]]:
        return sorted(self.coeffs.items(), key=lambda kv: grlex_key(kv[0]))

    def degree_part(self, d: int) -> Dict[Index, object]:
        return {a: c for a, c in self.coeffs.items() if sum(a) == d}

    def truncate(self, order: int) -> "MultiSeries":
        return MultiSeries(self.num_vars, min(order, self.order), self.coeffs)

    def with_order(self, order: int) -> "MultiSeries":
        """Change the declared order; raising it asserts the missing terms are zero."""
        return MultiSeries(self.num_vars, order, self.coeffs)

    def constant_term(self):
        return self.coeffs.get((0,) * self.num_vars, 0)

    def max_abs(self) -> float:
        return max((float(abs(c)) for c in self.coeffs.values()), default=0.0)

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs.values())

    def map(self, fn: Callable) -> "MultiSeries":
        return MultiSeries(self.num_vars, self.order, {a: fn(c) for a, c in self.coeffs.items()})

    # arithmetic
    def _compat(self, other: "MultiSeries"):
        if other.num_vars != self.num_vars:
            raise ValueError(f"mismatched num_vars: {self.num_vars} vs {other.num_vars}")
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            return self + MultiSeries.constant(self.num_vars, self.order, other)
        order = self._compat(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0) + c
        return MultiSeries(self.num_vars, order, out)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiSeries":
        return self.map(lambda x: x * c)

    def __mul__(self, other):
        if isinstance(other, MultiSeries):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        return self.map(lambda x: x / c)

    def __pow__(self, k: int) -> "MultiSeries":
        out = MultiSeries.one(self.num_vars, self.order)
        for _ in range(k):
            out = mul(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        terms = ", ".join(f"{a}: {c}" for a, c in self.items())
        return f"MultiSeries(vars={self.num_vars}, order={self.order}, {{{terms}}})"

    # serialization
    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "order": self.order,
            "coeffs": [dict(index=list(a), **dump_scalar(c)) for a, c in self.items()],
        }

    @classmethod
    def from_json(cls, obj: dict, exact: bool = False) -> "MultiSeries":
        coeffs = {}
        for t in obj["coeffs"]:
            coeffs[tuple(t["index"])] = parse_scalar(t, exact)
        return cls(int(obj["vars"]), int(obj["order"]), coeffs)


def mul(f: MultiSeries, g: MultiSeries) -> MultiSeries:
    """Truncated product."""
    order = f._compat(g)
    by_deg: List[List[Tuple[Index, object]]] = [[] for _ in range(order + 1)]
    for b, c in g.coeffs.items():
        d = sum(b)
        if d <= order:
            by_deg[d].append((b, c))
    out: Dict[Index, object] = {}
    for a, fa in f.coeffs.items():
        da = sum(a)
        for d in range(order - da + 1):
            for b, gb in by_deg[d]:
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + fa * gb
    return MultiSeries(f.num_vars, order, out)


def substitute(
    f: MultiSeries, gs: Sequence[MultiSeries], cache: Dict[Index, MultiSeries] | None = None
) -> MultiSeries:
    """f(g^1, ..., g^r), each g^mu with zero constant term.

    ``cache`` may be shared between calls with the same inner series (and the
    same truncation order) to reuse the monomial products g^a.
    """
    if len(gs) != f.num_vars:
        raise ValueError(f"need {f.num_vars} inner series, got {len(gs)}")
    r_out = gs[0].num_vars
    for mu, g in enumerate(gs):
        if g.num_vars != r_out:
            raise ValueError("inner series have mismatched num_vars")
        if g.constant_term() != 0:
            raise ValueError(f"inner series {mu} has nonzero constant term")
    order = min([f.order] + [g.order for g in gs])
    gs = [g.truncate(order) for g in gs]
    if cache is None:
        cache = {}
    cache.setdefault((0,) * f.num_vars, MultiSeries.one(r_out, order))

    def power(a: Index) -> MultiSeries:
        if a in cache:
            return cache[a]
        mu = next(i for i, x in enumerate(a) if x)
        prev = a[:mu] + (a[mu] - 1,) + a[mu + 1 :]
        p = mul(power(prev), gs[mu])
        cache[a] = p
        return p

    out: Dict[Index, object] = {}
    for a, c in f.items():
        if sum(a) > order:
            continue
        for b, pb in power(a).coeffs.items():
            out[b] = out.get(b, 0) + c * pb
    return MultiSeries(r_out, order, out)


def reciprocal_one_minus(u: MultiSeries) -> MultiSeries:
    """Truncation of 1/(1-u) for u with zero constant term."""
    if u.constant_term() != 0:
        raise ValueError("reciprocal_one_minus needs a zero constant term")
    one = MultiSeries.one(u.num_vars, u.order)
    out = one
    for _ in range(u.order):
        out = one + mul(u, out)
    return out


def inverse(f: MultiSeries) -> MultiSeries:
    """Multiplicative inverse of a series with nonzero constant term."""
    c = f.constant_term()
    if c == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    u = MultiSeries.one(f.num_vars, f.order) - f / c
    return reciprocal_one_minus(u) / c


def majorize(f):
    """Coefficient-wise modulus."""
    if isinstance(f, UniSeries):
        return UniSeries([abs(c) for c in f.coeffs])
    return f.map(abs)


def embed(f: MultiSeries, num_vars: int, order: int) -> MultiSeries:
    """View f as a series in more variables (new ones appended, not occurring)."""
    pad = (0,) * (num_vars - f.num_vars)
    return MultiSeries(num_vars, order, {a + pad: c for a, c in f.coeffs.items()})


def solve_implicit(
    F_eval: Callable[[List[MultiSeries], MultiSeries], MultiSeries],
    r: int,
    M: int,
    *,
    floor: float = 1e-12,
    rtol: float = 1e-12,
) -> MultiSeries:
    """Solve F(X, Y(X)) = 0 for the jet Y with Y(0) = 0 by Newton iteration.

    ``F_eval`` receives the coordinate jets X^1..X^r and a jet Y, all in a
    common ring, and returns F(X, Y) in that ring. It is called on series with
    one extra variable so that dF/dY comes out of the same evaluation.
    """
    R = r + 1
    X = [MultiSeries.variable(R, M + 1, i) for i in range(r)]
    eps = MultiSeries.variable(R, M + 1, r)
    Y = MultiSeries.zero(r, M)
    cap = int(2 * math.log2(max(M, 2))) + 4
    for it in range(cap + 1):
        Z = F_eval(X, embed(Y, R, M + 1) + eps)
        F0: Dict[Index, object] = {}
        F1: Dict[Index, object] = {}
        for a, c in Z.coeffs.items():
            if a[-1] == 0:
                F0[a[:-1]] = c
            elif a[-1] == 1:
                F1[a[:-1]] = c
        F0s = MultiSeries(r, M, F0)
        F1s = MultiSeries(r, M, F1)
        exact = Z.is_exact()
        if it == 0:
            d0 = F1s.constant_term()
            if abs(d0) <= (0 if exact else floor):
                raise DegenerateImplicitProblem("degenerate implicit problem")
            c0 = F0s.constant_term()
            if abs(c0) > (0 if exact else floor * max(1.0, Z.max_abs())):
                raise ValueError("F(0, 0) must vanish")
        if exact:
            if not F0s.coeffs:
                return Y
        elif F0s.max_abs() <= rtol * max(1.0, Z.max_abs()):
            return Y
        if it == cap:
            break
        Y = Y - mul(F0s, inverse(F1s))
    raise ImplicitSolveError(f"Newton on jets did not converge in {cap} steps")


class UniSeries:
    """Univariate truncated series, coefficients of degrees 0..order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = list(coeffs)
        if not cs:
            raise ValueError("UniSeries needs at least the constant coefficient")
        for c in cs:
            _check_finite(c)
        self.coeffs = cs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, order: int) -> "UniSeries":
        return cls([0] * (order + 1))

    @classmethod
    def x(cls, order: int) -> "UniSeries":
        return cls([0, 1] + [0] * (order - 1)) if order >= 1 else cls([0])

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k <= self.order else 0

    def truncate(self, order: int) -> "UniSeries":
        return UniSeries(self.coeffs[: order + 1])

    def __add__(self, other):
        if not isinstance(other, UniSeries):
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return UniSeries(cs)
        n = min(self.order, other.order)
        return UniSeries([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return UniSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UniSeries):
            return UniSeries([c * other for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            s = 0
            for i in range(k + 1):
                if a[i] != 0 and b[k - i] != 0:
                    s = s + a[i] * b[k - i]
            out.append(s)
        return UniSeries(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"UniSeries({self.coeffs})"

    def to_multi(self) -> MultiSeries:
        return MultiSeries(1, self.order, {(k,): c for k, c in enumerate(self.coeffs)})

    @classmethod
    def from_multi(cls, f: MultiSeries) -> "UniSeries":
        if f.num_vars != 1:
            raise ValueError("expected a univariate series")
        return cls([f[(k,)] for k in range(f.order + 1)])

    def to_json(self) -> dict:
        return self.to_multi().to_json()


def compose(f: UniSeries, g: UniSeries) -> UniSeries:
    """f(g(X)) truncated at min(f.order, g.order); requires g(0) = 0."""
    if g.coeffs[0] != 0:
        raise ValueError("compose needs g(0) = 0")
    n = min(f.order, g.order)
    g = g.truncate(n)
    out = UniSeries([f[n]] + [0] * n)
    for k in range(n - 1, -1, -1):
        out = out * g + f[k]
    return out
