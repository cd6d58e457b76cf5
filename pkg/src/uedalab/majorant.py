"""Majorant series certifying convergence of the formal linearization.

Three majorants live here:

* the toy one, A = X + sum A_m X^m with A_m = K_m [X^m] M A^2/(1 - A);
  for constant K it solves (1 + KM) A^2 - (1 + X) A + X = 0, i.e.
  (A - X)(1 - A) = KM A^2, which gives the closed form used as oracle;
* the general implicit one, F(X, A(X)) = 0 with
  F = -Y + C M (Pi - 1 - R sum_nu (X^nu + Y)) + 3 C Theta Y (Pi - 1),
  Pi = prod_nu 1/(1 - R(X^nu + Y)), C = 14 M0 Theta K^2 (1 + Theta);
* a fiber majorant built from the per-order primitive bounds of one system,
  which is what domination_check compares computed coefficients against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .series import (
    Index,
    MultiSeries,
    monomials,
    reciprocal_one_minus,
    solve_implicit,
)


@dataclass(frozen=True)
class ToyMajorantSpec:
    M: float
    K: float = 2.0
    order: int = 30
    K_seq: Optional[Mapping[int, float]] = None  # per-order K_m overriding K

    def __post_init__(self):
        if not self.M > 0 and self.M != 0:
            raise ValueError("M must be >= 0")
        if self.K_seq is None and self.K < 1:
            raise ValueError("K must be >= 1")
        if self.order < 2:
            raise ValueError("order must be >= 2")

    @property
    def R(self):
        return 1

    def K_at(self, m: int):
        return self.K if self.K_seq is None else self.K_seq[m]


def diophantine_K_seq(K: float, A: float, alpha: float, order: int) -> Dict[int, float]:
    """K_m = K m^alpha / A, the per-order constant a Diophantine bound supports."""
    return {m: K * m ** alpha / A for m in range(2, order + 1)}


@dataclass(frozen=True)
class GeneralMajorantSpec:
    M0: int = 1
    Theta: float = 2
    K: float = 2
    M: float = 1
    R: float = 1
    r: int = 1
    order: int = 12

    def __post_init__(self):
        if self.M0 < 1 or self.r < 1:
            raise ValueError("M0 and r must be >= 1")
        if not self.Theta > 1:
            raise ValueError("Theta must exceed 1")
        if not self.K > 1:
            raise ValueError("K must exceed 1")
        if self.M < 0 or not self.R > 0:
            raise ValueError("M must be >= 0 and R > 0")

    @property
    def C(self):
        return 14 * self.M0 * self.Theta * self.K ** 2 * (1 + self.Theta)


@dataclass(frozen=True)
class FiberMajorantSpec:
    M: float
    R: float
    r: int
    K_seq: Mapping[int, float]
    order: int


@dataclass
class MajorantSeries:
    series: MultiSeries
    spec: object
    radius: Optional[float] = None

    @property
    def order(self) -> int:
        return self.series.order

    def coefficient(self, a) -> object:
        if isinstance(a, int):
            a = (a,) if self.series.num_vars == 1 else None
            if a is None:
                raise ValueError("use a multi-index for multivariate majorants")
        return self.series[a]

    def diagonal(self) -> List:
        """Coefficients of A(X, ..., X): sums over |a| = d."""
        out = [0] * (self.order + 1)
        for a, c in self.series.coeffs.items():
            out[sum(a)] += c
        return out


def toy_majorant(spec: ToyMajorantSpec) -> MajorantSeries:
    """Term recursion; uses G = A/(1 - A) = A + A G so each step is O(m)."""
    n = spec.order
    A = [0] * (n + 1)
    G = [0] * (n + 1)
    A[1] = 1
    G[1] = 1
    for m in range(2, n + 1):
        ag = 0
        for i in range(1, m):
            ag += A[i] * G[m - i]
        A[m] = spec.K_at(m) * spec.M * ag
        G[m] = A[m] + ag
    ser = MultiSeries(1, n, {(k,): c for k, c in enumerate(A)})
    return MajorantSeries(ser, spec)


def toy_closed_form(K, M, order: int) -> List:
    """Coefficients of ((1+X) - sqrt((1+X)^2 - 4(1+KM)X)) / (2(1+KM)).

    The square root is expanded by the recurrence s^2 = D, s_0 = 1.
    """
    c = 1 + K * M
    D = [0] * (order + 1)
    D[0] = 1
    if order >= 1:
        D[1] = 2 - 4 * c
    if order >= 2:
        D[2] = 1
    s = [0] * (order + 1)
    s[0] = 1
    for k in range(1, order + 1):
        acc = D[k]
        for i in range(1, k):
            acc -= s[i] * s[k - i]
        s[k] = acc / 2
    one_x = [1, 1] + [0] * (order - 1)
    return [(one_x[k] - s[k]) / (2 * c) for k in range(order + 1)]


def toy_radius(K, M) -> float:
    """Smaller root of (1 + X)^2 = 4(1 + KM) X."""
    b = 2 * (1 + K * M) - 1
    return b - math.sqrt(b * b - 1)


def _pi_terms(Xs: Sequence[MultiSeries], Y: MultiSeries, R):
    """(Pi, S) with Pi = prod 1/(1 - R(X^nu + Y)) and S = sum (X^nu + Y)."""
    Pi = None
    S = None
    for x in Xs:
        w = x + Y
        f = reciprocal_one_minus(w * R)
        Pi = f if Pi is None else Pi * f
        S = w if S is None else S + w
    return Pi, S


def general_F(spec: GeneralMajorantSpec) -> Callable[[List[MultiSeries], MultiSeries], MultiSeries]:
    C, M, R, Th = spec.C, spec.M, spec.R, spec.Theta

    def F(Xs: List[MultiSeries], Y: MultiSeries) -> MultiSeries:
        Pi, S = _pi_terms(Xs, Y, R)
        return -Y + (Pi - 1 - S * R) * (C * M) + Y * (Pi - 1) * (3 * C * Th)

    return F


def general_majorant(spec: GeneralMajorantSpec) -> MajorantSeries:
    """Solve F(X, A) = 0 by Newton on jets (dF/dY(0, 0) = -1)."""
    A = solve_implicit(general_F(spec), spec.r, spec.order)
    return MajorantSeries(A, spec)


def general_residual(spec: GeneralMajorantSpec, A: MajorantSeries) -> float:
    Xs = [MultiSeries.variable(spec.r, A.order, i) for i in range(spec.r)]
    return general_F(spec)(Xs, A.series).max_abs()


def b_bounds(spec: GeneralMajorantSpec, A_partial: MajorantSeries, m: int):
    """B_m: largest degree-(m+1) coefficient of
    (1+Theta) M (Pi - 1 - R S) + 3 (1+Theta) Theta A (Pi - 1).

    B_1 = (1 + Theta) M R^2, and A_{m+1} = 14 M0 Theta K^2 B_m for r = 1.
    """
    n = m + 1
    if A_partial.order < m:
        raise ValueError(f"need A through order {m}")
    r, R, Th, M = spec.r, spec.R, spec.Theta, spec.M
    Y = A_partial.series.truncate(m).with_order(n)
    Xs = [MultiSeries.variable(r, n, i) for i in range(r)]
    Pi, S = _pi_terms(Xs, Y, R)
    G = (Pi - 1 - S * R) * ((1 + Th) * M) + Y * (Pi - 1) * (3 * (1 + Th) * Th)
    vals = [G[a] for a in monomials(r, n)]
    return max(vals, key=lambda v: float(v))


def fiber_majorant(M, R, r: int, K_seq: Mapping[int, float], order: int) -> MajorantSeries:
    """A_a = K_|a| [X^a] M (prod 1/(1 - R(X^nu + A)) - 1 - R sum (X^nu + A)).

    With K_m bounding the primitive of every order-m equation of a system
    whose nonlinear data satisfy |f_a| <= M R^|a|, this dominates |F_{j,a}|.
    """
    A = MultiSeries.zero(r, order)
    for m in range(2, order + 1):
        Y = A.truncate(m - 1).with_order(m)
        Xs = [MultiSeries.variable(r, m, i) for i in range(r)]
        Pi, S = _pi_terms(Xs, Y, R)
        rhs = (Pi - 1 - S * R) * M
        new = dict(A.coeffs)
        for a, c in rhs.degree_part(m).items():
            new[a] = K_seq[m] * c
        A = MultiSeries(r, order, new)
    return MajorantSeries(A, FiberMajorantSpec(M, R, r, dict(K_seq), order))


def radius_estimate(A: Union[MajorantSeries, Sequence]) -> float:
    """1/limsup estimate from a linear fit of log A_m against m over the top half."""
    coeffs = A.diagonal() if isinstance(A, MajorantSeries) else list(A)
    pts = [(m, float(c)) for m, c in enumerate(coeffs) if m >= 1 and float(c) > 0]
    if len(pts) < 8:
        raise ValueError("too few nonzero coefficients for a radius estimate")
    top = pts[len(pts) // 2 :]
    ms = np.array([m for m, _ in top], dtype=float)
    logs = np.array([math.log(c) for _, c in top])
    slope = np.polyfit(ms, logs, 1)[0]
    return float(math.exp(-slope))


class EnvelopeViolation(ValueError):
    def __init__(self, edge: int, lam: int, a: Index, value, bound):
        super().__init__(
            f"input coefficient f[edge {edge + 1}, component {lam + 1}, {a}] = {value} "
            f"exceeds M R^|a| = {bound}"
        )
        self.edge, self.lam, self.index = edge, lam, a


@dataclass
class DominationReport:
    passed: bool
    violation: Optional[Tuple[int, int, Index, float, float]]  # (chart, lam, a, |F|, bound)
    min_margin: float  # min over nonzero F of bound/|F|
    checked: int
    margins: Dict[int, float] = field(default_factory=dict)  # per order

    def __bool__(self):
        return self.passed


def check_envelope(system, M, R, rtol: float = 1e-12) -> None:
    for e, lam, a, c in system.f_coefficients():
        bound = M * R ** sum(a)
        if float(abs(c)) > float(bound) * (1 + rtol):
            raise EnvelopeViolation(e, lam, a, c, bound)


def domination_check(
    system,
    result,
    majorant: MajorantSeries,
    stage_map: Optional[Callable[[int], int]] = None,
    *,
    rtol: float = 1e-9,
) -> DominationReport:
    """Check |F_{j,a}^(lam)| <= A_a for every computed coefficient.

    ``stage_map`` sends an order to the majorant order it is compared with;
    single-fiber runs use the identity. The Cauchy envelope of the system is
    checked first against the majorant's (M, R).
    """
    spec = majorant.spec
    check_envelope(system, spec.M, spec.R)
    stage = stage_map or (lambda m: m)
    uni = majorant.series.num_vars == 1 and system.r > 1
    margin = math.inf
    margins: Dict[int, float] = {}
    checked = 0
    for j, row in enumerate(result.F):
        for lam, ser in enumerate(row):
            for a, c in ser.items():
                m = sum(a)
                sm = stage(m)
                if sm > majorant.order:
                    raise ValueError(f"majorant order {majorant.order} too small for order {m}")
                if uni:
                    bound = majorant.series[(sm,)]
                else:
                    bound = majorant.series[a if sm == m else tuple(a)]
                bound = float(bound)
                v = float(abs(c))
                checked += 1
                if v > bound * (1 + rtol):
                    return DominationReport(False, (j + 1, lam, a, v, bound), bound / v, checked, margins)
                if v > 0:
                    ratio = bound / v
                    margin = min(margin, ratio)
                    margins[m] = min(margins.get(m, math.inf), ratio)
    return DominationReport(True, None, margin, checked, margins)


def system_majorant(system, M, R, order: Optional[int] = None) -> MajorantSeries:
    """Fiber majorant with K_m taken from the system's own order covers."""
    from .linearize import order_constants

    n = order or system.max_order
    return fiber_majorant(M, R, system.r, order_constants(system, n), n)
