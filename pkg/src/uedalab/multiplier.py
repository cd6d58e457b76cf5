"""Unit-circle multipliers, small-divisor profiles and the arc boxes W_{m,nu}.

The rotation number is stored as an exact ``Fraction``: either the true value
(rational multipliers) or a high-precision rational approximation (sampled
irrationals). Then m*theta mod 1 is an exact integer reduction, so d(1, sigma^m)
stays trustworthy far beyond double precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

BOX_TOL = 1e-14


def circle_distance(theta1: float, theta2: float) -> float:
    """Distance on R/Z: min over integers n of |theta1 - theta2 - n|."""
    x = (theta1 - theta2) % 1.0
    return min(x, 1.0 - x)


@dataclass(frozen=True)
class Multiplier:
    """sigma = exp(2 pi i theta) with theta held exactly (or to many digits)."""

    theta: Fraction
    kind: str = "irrational-sampled"
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("rational", "irrational-sampled"):
            raise ValueError(f"unknown multiplier kind {self.kind!r}")
        object.__setattr__(self, "theta", Fraction(self.theta))

    @classmethod
    def rational(cls, p: int, q: int) -> "Multiplier":
        if q <= 0:
            raise ValueError("denominator must be positive")
        t = Fraction(p, q)
        return cls(t, "rational", f"{t.numerator}/{t.denominator}")

    @classmethod
    def from_decimal(cls, text: str, label: str = "") -> "Multiplier":
        return cls(Fraction(Decimal(text.strip())), "irrational-sampled", label or text.strip())

    @classmethod
    def from_float(cls, theta: float, label: str = "") -> "Multiplier":
        return cls(Fraction(theta), "irrational-sampled", label or repr(theta))

    @classmethod
    def golden_mean(cls, digits: int = 60) -> "Multiplier":
        """theta = (sqrt 5 - 1)/2 to ``digits`` decimal places."""
        with localcontext() as ctx:
            ctx.prec = digits + 10
            v = (Decimal(5).sqrt() - 1) / 2
            v = v.quantize(Decimal(1).scaleb(-digits))
        return cls(Fraction(v), "irrational-sampled", "golden")

    @classmethod
    def liouville(cls, K: int, base: int = 10) -> "Multiplier":
        """theta_L(K) = sum_{k=1}^K base^{-k!}, held exactly."""
        t = sum(Fraction(1, base ** math.factorial(k)) for k in range(1, K + 1))
        return cls(t, "irrational-sampled", f"liouville({K})")

    @classmethod
    def from_continued_fraction(cls, quotients: Sequence[int], label: str = "") -> "Multiplier":
        """theta = [a0; a1, a2, ...] evaluated exactly.

        A finite expansion is rational, but with huge trailing quotients it
        behaves like a Liouville-type number at every order that matters here.
        """
        if not quotients:
            raise ValueError("need at least one partial quotient")
        t = Fraction(quotients[-1])
        for a in reversed(quotients[:-1]):
            t = a + 1 / t
        return cls(t, "irrational-sampled", label or f"cf{list(quotients)}")

    @property
    def p(self) -> Optional[int]:
        return self.theta.numerator if self.kind == "rational" else None

    @property
    def q(self) -> Optional[int]:
        return self.theta.denominator if self.kind == "rational" else None

    @property
    def sigma(self) -> complex:
        return self.sigma_power(1)

    def frac(self, m: int) -> Fraction:
        """m*theta mod 1, exactly."""
        x = m * self.theta
        return x - math.floor(x)

    def sigma_power(self, m: int) -> complex:
        """sigma^m from the exact reduction of m*theta (no accumulated drift)."""
        f = self.frac(m)
        if f == 0:
            return complex(1.0, 0.0)
        return cmath.exp(2j * math.pi * float(f))

    def divisor(self, m: int) -> float:
        """d(1, sigma^m)."""
        P, Q = self.theta.numerator, self.theta.denominator
        r = (m * P) % Q
        return min(r, Q - r) / Q

    def is_torsion_at(self, m: int) -> bool:
        return (m * self.theta.numerator) % self.theta.denominator == 0


@dataclass(frozen=True)
class DivisorProfile:
    multiplier: Multiplier
    max_order: int
    values: Tuple[float, ...]

    def __getitem__(self, m: int) -> float:
        """d(1, sigma^m) for 1 <= m <= max_order."""
        if not 1 <= m <= self.max_order:
            raise IndexError(m)
        return self.values[m - 1]


def divisor_profile(mult: Multiplier, M: int) -> DivisorProfile:
    if M < 1:
        raise ValueError("M must be >= 1")
    P, Q = mult.theta.numerator, mult.theta.denominator
    vals = []
    r = 0
    for _ in range(M):
        r += P
        r %= Q
        vals.append(min(r, Q - r) / Q)
    return DivisorProfile(mult, M, tuple(vals))


@dataclass(frozen=True)
class DiophantineResult:
    passed: bool
    violating_m: Optional[int]
    A: float
    alpha: float
    M: int
    min_scaled: float  # min over m of d_m * m^alpha

    def __bool__(self):
        return self.passed


def diophantine_check(mult: Multiplier, A: float, alpha: float, M: int) -> DiophantineResult:
    """Check d(1, sigma^m) >= A m^-alpha for 1 <= m <= M.

    Returns the smallest violating m when the check fails.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if A <= 0 or alpha <= 0:
        raise ValueError("A and alpha must be positive")
    P, Q = mult.theta.numerator, mult.theta.denominator
    r = 0
    best = math.inf
    for m in range(1, M + 1):
        r = (r + P) % Q
        d = min(r, Q - r) / Q
        scaled = d * m ** alpha
        best = min(best, scaled)
        if scaled < A:
            return DiophantineResult(False, m, A, alpha, M, best)
    return DiophantineResult(True, None, A, alpha, M, best)


@dataclass(frozen=True)
class ArcBox:
    """Closed box |Re xi - nu/n| <= 1/(2n), |Im xi| <= 1/(4n) with n = M0*m."""

    m: int
    nu: int
    M0: int = 1

    def __post_init__(self):
        if self.m < 1 or self.M0 < 1:
            raise ValueError("m and M0 must be positive")
        if not 0 <= self.nu < self.n:
            raise ValueError(f"nu must lie in [0, {self.n - 1}]")

    @property
    def n(self) -> int:
        """Torsion order M0*m of the box's centre."""
        return self.M0 * self.m

    @property
    def center(self) -> Fraction:
        return Fraction(self.nu, self.n)

    @property
    def re_half_width(self) -> float:
        return 1.0 / (2 * self.n)

    @property
    def im_half_width(self) -> float:
        return 1.0 / (4 * self.n)

    @property
    def torsion_point(self) -> complex:
        """zeta_n^nu, the unique s in the box with s^n = 1."""
        return unit_root(self.nu, self.n)

    def contains_xi(self, xi: complex, tol: float = BOX_TOL) -> bool:
        dx = (xi.real - float(self.center) + 0.5) % 1.0 - 0.5
        return abs(dx) <= self.re_half_width + tol and abs(xi.imag) <= self.im_half_width + tol

    def contains(self, s: complex, tol: float = BOX_TOL) -> bool:
        """Membership of a parameter s in the annulus image of the box."""
        if s == 0:
            return False
        return self.contains_xi(cmath.log(s) / (2j * math.pi), tol)

    def xi_to_s(self, xi: complex) -> complex:
        return cmath.exp(2j * math.pi * xi)


def unit_root(nu: int, n: int) -> complex:
    """exp(2 pi i nu/n), exact at the quarter points."""
    f = Fraction(nu, n) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if f in exact:
        return exact[f]
    return cmath.exp(2j * math.pi * float(f))


def arc_partition(m: int, M0: int = 1) -> List[ArcBox]:
    if m < 1 or M0 < 1:
        raise ValueError("m and M0 must be positive")
    return [ArcBox(m, nu, M0) for nu in range(M0 * m)]


EPSILON = 4.0


def epsilon_constant() -> float:
    """The constant eps with eps*d(1, sigma) <= |1 - sigma| on all of U(1)."""
    return EPSILON


def verify_epsilon(grid: int = 100_000) -> float:
    """Minimum of |1 - e^{2 pi i t}| / d(1, e^{2 pi i t}) over t in (0, 1/2].

    Raises if it falls below eps (it equals eps exactly at t = 1/2).
    """
    worst = math.inf
    for i in range(1, grid + 1):
        t = 0.5 * i / grid
        ratio = abs(1 - cmath.exp(2j * math.pi * t)) / circle_distance(0.0, t)
        worst = min(worst, ratio)
    if worst < EPSILON - 1e-9:
        raise AssertionError(f"epsilon check failed: min ratio {worst}")
    return worst


def convergent_denominators(quotients: Sequence[int]) -> List[int]:
    """q_n of the convergents of [a0; a1, ...]; used to locate approximant orders."""
    qs = [1]
    prev = 0
    for a in quotients[1:]:
        qs, prev = qs + [a * qs[-1] + prev], qs[-1]
    return qs


def multiplier_from_json(obj: dict) -> Multiplier:
    """{"rational": [p, q]} | {"real": "0.618..."} | {"golden": digits} |
    {"liouville": K} | {"cf": [a0, a1, ...]}"""
    if "rational" in obj:
        p, q = obj["rational"]
        return Multiplier.rational(int(p), int(q))
    if "real" in obj:
        return Multiplier.from_decimal(str(obj["real"]))
    if "golden" in obj:
        return Multiplier.golden_mean(int(obj["golden"]) if obj["golden"] is not True else 60)
    if "liouville" in obj:
        return Multiplier.liouville(int(obj["liouville"]), int(obj.get("base", 10)))
    if "cf" in obj:
        return Multiplier.from_continued_fraction([int(a) for a in obj["cf"]])
    raise ValueError(f"unrecognized theta spec {obj!r}")
