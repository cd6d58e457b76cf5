"""Cochains depending polynomially on the parameter s, solved arc by arc.

The template cover has trivial weights except s^n on edge (N, 1), where n is
the declared order exponent. Its telescoped scalar is then the polynomial
A(s) = sum_e alpha_e(s), and the first primitive component is

    beta_1(s) = -A(s) / (1 - s^n).

At a torsion point zeta (zeta^n = 1) this has a removable singularity exactly
when A(zeta) = 0; we then write A(s) = (s - zeta) q(s) and
1 - s^n = -(s - zeta) P(s) with P(s) = sum_{i<n} s^i zeta^{n-1-i}, so that
beta_1 = q/P is regular on the whole arc box around zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import cech
from .cech import CycleCover
from .exact import GaussianRational, dump_scalar, is_exact, parse_scalar
from .multiplier import ArcBox, Multiplier, epsilon_constant

NAIVE_K = 2.0  # measured Ueda-lemma constant for N = 3, see cech.ueda_bound_check


class TorsionObstructionError(ValueError):
    """The telescoped scalar does not vanish at the arc's torsion point."""

    def __init__(self, zeta, value):
        super().__init__(f"class nonzero at torsion point zeta={zeta}: A(zeta)={value}")
        self.zeta = zeta
        self.value = value


class MaximumPrincipleViolation(AssertionError):
    pass


# polynomial helpers, coefficients low-to-high
def poly_eval(p: Sequence, s):
    out = 0
    for c in reversed(p):
        out = out * s + c
    return out


def poly_add(p: Sequence, q: Sequence) -> Tuple:
    n = max(len(p), len(q))
    return tuple((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def poly_deriv(p: Sequence) -> Tuple:
    return tuple(i * p[i] for i in range(1, len(p))) or (0,)


def synthetic_division(p: Sequence, z) -> Tuple[Tuple, object]:
    """p(s) = (s - z) q(s) + rem."""
    if len(p) <= 1:
        return (0,), (p[0] if p else 0)
    n = len(p) - 1
    q = [0] * n
    acc = p[n]
    for i in range(n - 1, -1, -1):
        q[i] = acc
        acc = p[i] + acc * z
    return tuple(q), acc


def divide_one_minus_power(p: Sequence, n: int) -> Optional[Tuple]:
    """Exact quotient p / (1 - s^n) if the division leaves no remainder, else None."""
    rem = list(p)
    deg = len(rem) - 1
    q = [0] * max(deg - n + 1, 1)
    # divide by -(s^n - 1) from the top
    for i in range(deg, n - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        # c s^i = -c s^{i-n} (1 - s^n) + c s^{i-n}
        q[i - n] = q[i - n] - c
        rem[i] = 0
        rem[i - n] = rem[i - n] + c
    if any(c != 0 for c in rem):
        return None
    return tuple(q)


@dataclass(frozen=True)
class ParamCochain1:
    """One polynomial per cycle edge; the template twist is s^m_prime on (N, 1)."""

    m_prime: int
    polys: Tuple[Tuple, ...]

    def __post_init__(self):
        if self.m_prime < 1:
            raise ValueError("m_prime must be >= 1")
        if len(self.polys) < 3:
            raise ValueError("need at least 3 edges")
        object.__setattr__(self, "polys", tuple(tuple(p) if len(p) else (0,) for p in self.polys))

    @property
    def N(self) -> int:
        return len(self.polys)

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.polys) - 1

    def at(self, s) -> Tuple:
        return tuple(poly_eval(p, s) for p in self.polys)

    def telescoped(self) -> Tuple:
        """A(s); every partial product before the twist edge is 1."""
        A: Tuple = (0,)
        for p in self.polys:
            A = poly_add(A, p)
        return A

    def cover_at(self, s) -> CycleCover:
        return CycleCover.twisted(self.N, s ** self.m_prime)

    def is_exact(self) -> bool:
        return all(is_exact(c) for p in self.polys for c in p)

    def is_zero(self) -> bool:
        return all(c == 0 for p in self.polys for c in p)

    def to_json(self) -> dict:
        edges = []
        for e, p in enumerate(self.polys):
            edges.append({"edge": [e + 1, (e + 1) % self.N + 1], "poly": [dump_scalar(c) for c in p]})
        return {"m_prime": self.m_prime, "edges": edges}


def param_cochain_from_json(obj: dict, exact: bool = False) -> ParamCochain1:
    charts = [int(x) for ed in obj["edges"] for x in ed["edge"]]
    N = int(obj.get("N", max([3] + charts)))
    probe = CycleCover.twisted(N, 1)
    polys: List[Tuple] = [(0,)] * N
    for ed in obj["edges"]:
        j, k = ed["edge"]
        polys[probe.edge_index(int(j), int(k))] = tuple(parse_scalar(c, exact) for c in ed["poly"])
    return ParamCochain1(int(obj["m_prime"]), tuple(polys))


def _zeta(arc: ArcBox, exact: bool):
    z = arc.torsion_point
    if exact and z in (1, -1, 1j, -1j):
        return GaussianRational(int(z.real), int(z.imag))
    return z


def torsion_value(alpha: ParamCochain1, arc: ArcBox):
    """A(zeta) at the arc's torsion point."""
    return poly_eval(alpha.telescoped(), _zeta(arc, alpha.is_exact()))


def _check_vanishing(alpha: ParamCochain1, arc: ArcBox, tol: float):
    if arc.n != alpha.m_prime:
        raise ValueError(f"order exponent {alpha.m_prime} does not match arc order M0*m = {arc.n}")
    A = alpha.telescoped()
    zeta = _zeta(arc, alpha.is_exact())
    Az = poly_eval(A, zeta)
    scale = max(1.0, sum(float(abs(c)) for c in A))
    bad = Az != 0 if (is_exact(zeta) and alpha.is_exact()) else abs(Az) > tol * scale
    if bad:
        raise TorsionObstructionError(zeta, Az)
    return A, zeta, Az


def _removable(q: Sequence, zeta, n: int):
    """s -> q(s)/P(s), the regular form of beta_1 near zeta."""

    def beta1(s):
        P = 0
        for i in range(n):
            P = P + s ** i * zeta ** (n - 1 - i)
        return poly_eval(q, s) / P

    return beta1


@dataclass(frozen=True)
class ArcSolveReport:
    """Arc-wise solution on the unit-circle arc of a box (Im xi = 0).

    ``interior_max``/``boundary_max`` are the largest |beta_1| (which equals
    |s^n A(s)/(1 - s^n)| on U(1)) over interior samples and over the two arc
    endpoints; ``beta_max`` is the largest |beta_j| over all samples and
    charts; ``uniform_bound`` is (6/eps) max|alpha| with the max over the arc.
    """

    arc: ArcBox
    torsion_obstruction: object
    samples: Tuple[complex, ...]
    beta_samples: Tuple[Tuple, ...]
    zeta_index: int
    alpha_max: float
    beta_max: float
    interior_max: float
    boundary_max: float
    uniform_bound: float

    @property
    def bound_holds(self) -> bool:
        return self.beta_max <= self.uniform_bound * (1 + 1e-9) + 1e-300

    @property
    def beta_at_zeta(self) -> Tuple:
        return self.beta_samples[self.zeta_index]


def family_solve(alpha: ParamCochain1, arc: ArcBox, samples: int = 33, *, tol: float = 1e-10) -> ArcSolveReport:
    """Solve the parametrized cocycle on the arc of ``arc`` through its torsion point.

    Off the torsion point beta comes from cech.solve at the substituted
    weight; at zeta it is the removable limit beta_1(zeta) = A'(zeta)/(n zeta^{n-1}).
    """
    if samples < 16:
        raise ValueError("need at least 16 samples")
    A, zeta, Az = _check_vanishing(alpha, arc, tol)
    n = alpha.m_prime
    if samples % 2 == 0:
        samples += 1
    ts = np.linspace(-1.0, 1.0, samples)
    center = float(arc.center)
    mid = samples // 2
    ss: List[complex] = []
    betas: List[Tuple] = []
    b1_abs: List[float] = []
    amax = 0.0
    dA = poly_deriv(A)
    for i, t in enumerate(ts):
        if i == mid:
            s = zeta
            b1 = poly_eval(dA, zeta) / (n * zeta ** (n - 1))
            vals = alpha.at(s)
            beta = [b1]
            acc = b1
            for e in range(alpha.N - 1):
                acc = acc + vals[e]
                beta.append(acc)
            beta = tuple(beta)
        else:
            s = arc.xi_to_s(center + t * arc.re_half_width)
            vals = alpha.at(s)
            beta = cech.solve(alpha.cover_at(s), vals).beta
        amax = max([amax] + [float(abs(v)) for v in vals])
        ss.append(complex(s))
        betas.append(beta)
        b1_abs.append(float(abs(beta[0])))
    beta_max = max(float(abs(b)) for beta in betas for b in beta)
    ends = [b1_abs[0], b1_abs[-1]]
    inner = b1_abs[1:-1]
    bound = (6.0 / epsilon_constant()) * amax
    return ArcSolveReport(
        arc, Az, tuple(ss), tuple(betas), mid, amax, beta_max, max(inner), max(ends), bound
    )


def _cheb(k: int) -> np.ndarray:
    return np.cos(np.pi * np.arange(k) / (k - 1))


def max_principle_bound(
    alpha: ParamCochain1,
    arc: ArcBox,
    boundary_samples: int = 64,
    interior_samples: int = 25,
    *,
    tol: float = 1e-10,
) -> Tuple[float, float]:
    """Max of |s^n A(s)/(1 - s^n)| over the box interior and over its boundary.

    The quotient is evaluated in its regular form -s^n q(s)/P(s), so the
    torsion point needs no special casing. Raises if the interior maximum
    exceeds the boundary maximum by more than 1e-6 relative.
    """
    if boundary_samples < 64:
        raise ValueError("need at least 64 boundary samples per side")
    A, zeta, _ = _check_vanishing(alpha, arc, tol)
    if alpha.is_zero():
        return 0.0, 0.0
    n = alpha.m_prime
    zc = complex(zeta)
    q, _ = synthetic_division([complex(c) for c in A], zc)
    qn = np.array(q[::-1])  # numpy order, high-to-low
    c = float(arc.center)
    hx, hy = arc.re_half_width, arc.im_half_width

    def quotient(xi: np.ndarray) -> np.ndarray:
        s = np.exp(2j * np.pi * xi)
        P = sum(s ** i * zc ** (n - 1 - i) for i in range(n))
        return np.abs(-(s ** n) * np.polyval(qn, s) / P)

    t = _cheb(boundary_samples)
    sides = np.concatenate(
        [
            c + t * hx - 1j * hy,
            c + t * hx + 1j * hy,
            c - hx + 1j * t * hy,
            c + hx + 1j * t * hy,
        ]
    )
    k = interior_samples if interior_samples % 2 else interior_samples + 1
    u = np.linspace(-1, 1, k + 2)[1:-1]
    X, Y = np.meshgrid(c + u * hx, u * hy)
    inner = (X + 1j * Y).ravel()
    bmax = float(quotient(sides).max())
    imax = float(quotient(inner).max())
    if imax > bmax * (1 + 1e-6):
        raise MaximumPrincipleViolation(f"interior max {imax} exceeds boundary max {bmax} on {arc}")
    return imax, bmax


def beta_polynomials(alpha: ParamCochain1) -> Optional[Tuple[Tuple, ...]]:
    """beta_j as polynomials when 1 - s^n divides A exactly, else None."""
    q = divide_one_minus_power(alpha.telescoped(), alpha.m_prime)
    if q is None:
        return None
    b1 = tuple(-c for c in q)
    out = [b1]
    acc = b1
    for e in range(alpha.N - 1):
        acc = poly_add(acc, alpha.polys[e])
        out.append(acc)
    return tuple(out)


def vanishing_generator(N: int = 3, seed: int = 0, max_shift: int = 2, exact: bool = False):
    """alpha_e(s) = c_e s^{k_e} (1 - s^n): vanishes at every n-th root of unity.

    c_e is drawn from the unit disc (or small Gaussian rationals in exact
    mode), k_e from 0..max_shift; the draw depends only on (seed, n).
    """

    def gen(n: int) -> ParamCochain1:
        rng = np.random.default_rng([seed, n])
        polys = []
        for _ in range(N):
            k = int(rng.integers(0, max_shift + 1))
            if exact:
                c = GaussianRational(int(rng.integers(-8, 9)), int(rng.integers(-8, 9))) / 16
            else:
                c = complex(math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()))
            p = [0] * (k + n + 1)
            p[k] = c
            p[k + n] = -c
            polys.append(tuple(p))
        return ParamCochain1(n, tuple(polys))

    return gen


def zero_generator(N: int = 3):
    def gen(n: int) -> ParamCochain1:
        return ParamCochain1(n, tuple((0,) for _ in range(N)))

    return gen


@dataclass(frozen=True)
class ComparisonRow:
    m: int
    theta: str
    divisor: float  # d(1, sigma^m)
    alpha_max: float  # sup of |alpha| over the arc containing sigma
    naive_bound: float  # K max|alpha| / d(1, sigma^m)
    family_bound: float  # (6/eps) max|alpha|
    family_sup: float  # solved sup |beta| over the arc containing sigma
    worst_arc_ratio: float  # max over all arcs of sup|beta| / sup|alpha|
    arcs_ok: bool  # uniform bound held on every arc of this order
    interior_max: float
    boundary_max: float


def _arc_of(mult: Multiplier, n: int, M0: int) -> ArcBox:
    nu = int(round(float(mult.frac(1)) * n)) % n
    return ArcBox(n // M0, nu, M0)


def improved_vs_naive(
    theta_family: Sequence[Multiplier],
    m_max: int,
    alpha_generator: Callable[[int], ParamCochain1],
    *,
    M0: int = 1,
    samples: int = 17,
    K: float = NAIVE_K,
) -> List[ComparisonRow]:
    """Per order m: the fiberwise small-divisor bound against the arcwise one.

    Every arc of every order is solved (the arc sweep does not depend on
    theta); the row for (theta, m) reports the arc containing sigma = e^{2 pi i theta}.
    """
    rows: List[ComparisonRow] = []
    for m in range(1, m_max + 1):
        n = M0 * m
        alpha = alpha_generator(n)
        reports = [family_solve(alpha, arc, samples) for arc in (ArcBox(m, nu, M0) for nu in range(n))]
        ok = all(rep.bound_holds for rep in reports)
        worst = max(
            (rep.beta_max / rep.alpha_max for rep in reports if rep.alpha_max > 0), default=0.0
        )
        for mult in theta_family:
            arc = _arc_of(mult, n, M0)
            rep = reports[arc.nu]
            d = mult.divisor(m)
            naive = math.inf if d == 0 else K * rep.alpha_max / d
            if rep.alpha_max == 0:
                naive = 0.0
            imax, bmax = max_principle_bound(alpha, arc)
            rows.append(
                ComparisonRow(
                    m, mult.label, d, rep.alpha_max, naive, rep.uniform_bound, rep.beta_max,
                    worst, ok, imax, bmax,
                )
            )
    return rows
