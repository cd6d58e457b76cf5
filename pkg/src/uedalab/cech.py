"""Flat line bundles on an N-chart cycle cover: coboundary, obstruction, solver.

Edges are (1,2), (2,3), ..., (N,1), indexed 0..N-1 in that order. A line
bundle is one nonzero constant weight rho per edge, and the coboundary of a
0-cochain beta is

    alpha_{jk} = -beta_j + rho_{jk} * beta_k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .exact import GaussianRational, is_exact, parse_scalar, to_exact
from .multiplier import circle_distance

# below this |1 - holonomy| (times 1 + |holonomy|) the holonomy counts as 1
DIVISOR_FLOOR = 1e-14
# above the floor but below this gap a solve is flagged near-resonant
NEAR_RESONANT_GAP = 1e-8


class ObstructedError(ValueError):
    """Raised when the holonomy is 1 and the weighted cycle sum does not vanish."""

    def __init__(self, obstruction, message: str = "obstructed: nonzero class"):
        super().__init__(f"{message} (A = {obstruction})")
        self.obstruction = obstruction


@dataclass(frozen=True)
class CycleCover:
    N: int
    weights: Tuple  # weight of edge i, i.e. of (i+1, i+2 mod N), 1-based charts
    twist_edge: int = -1  # edge index; -1 means (N, 1)

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("a cycle cover needs N >= 3 charts")
        if len(self.weights) != self.N:
            raise ValueError(f"need {self.N} edge weights, got {len(self.weights)}")
        if any(w == 0 for w in self.weights):
            raise ValueError("edge weights must be nonzero")
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "twist_edge", self.twist_edge % self.N)

    @classmethod
    def twisted(cls, N: int, sigma, twist_edge: int = -1) -> "CycleCover":
        """Trivial weights except ``sigma`` on one edge (default (N,1))."""
        one = GaussianRational(1) if is_exact(sigma) else 1.0 + 0j
        w = [one] * N
        w[twist_edge % N] = sigma
        return cls(N, tuple(w), twist_edge)

    @property
    def edges(self):
        return [(i + 1, (i + 1) % self.N + 1) for i in range(self.N)]

    def edge_index(self, j: int, k: int) -> int:
        for i, e in enumerate(self.edges):
            if e == (j, k):
                return i
        raise ValueError(f"({j},{k}) is not an oriented edge of the {self.N}-cycle")

    @property
    def holonomy(self):
        h = 1
        for w in self.weights:
            h = h * w
        return h

    def partial_products(self):
        """P_1..P_{N+1} with P_1 = 1 and P_{i+1} = P_i * rho_i; P_{N+1} is the holonomy."""
        ps = [1]
        for w in self.weights:
            ps.append(ps[-1] * w)
        return ps

    def is_exact(self) -> bool:
        return all(is_exact(w) for w in self.weights)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return all(abs(abs(complex(w)) - 1) <= tol for w in self.weights)


@dataclass(frozen=True)
class SolveReport:
    beta: Optional[Tuple]
    obstruction: object
    holonomy: object
    resonant: bool
    used_normalization: bool
    near_resonant: bool
    bound_ratio: Optional[float]


def coboundary(cover: CycleCover, beta: Sequence) -> Tuple:
    if len(beta) != cover.N:
        raise ValueError("0-cochain length must equal N")
    N = cover.N
    return tuple(-beta[i] + cover.weights[i] * beta[(i + 1) % N] for i in range(N))


def obstruction(cover: CycleCover, alpha: Sequence):
    """Telescoped cycle sum A = sum_i P_i alpha_i.

    With trivial holonomy, [alpha] = 0 iff A = 0. For N = 3 and trivial
    weights, A = alpha_12 + alpha_23 + alpha_31.
    """
    if len(alpha) != cover.N:
        raise ValueError("1-cochain length must equal N")
    ps = cover.partial_products()
    A = 0
    for p, a in zip(ps, alpha):
        A = A + p * a
    return A


def _exact_mode(cover: CycleCover, alpha) -> bool:
    return cover.is_exact() and all(is_exact(a) for a in alpha)


def holonomy_gap(cover: CycleCover) -> Tuple[bool, bool]:
    """(resonant, near_resonant) classification of the cover's holonomy."""
    H = cover.holonomy
    if cover.is_exact():
        return H == 1, False
    gap = abs(1 - H)
    floor = DIVISOR_FLOOR * (1 + abs(H))
    return gap <= floor, floor < gap < NEAR_RESONANT_GAP


def solve(
    cover: CycleCover, alpha: Sequence, *, beta1=0, rtol: float = 1e-10, atol: float = 0.0
) -> SolveReport:
    """Find beta with coboundary(beta) = alpha.

    Nontrivial holonomy: the unique primitive. Trivial holonomy: solvable iff
    the cycle sum vanishes (|A| <= max(rtol*max|alpha|, atol) in float mode,
    exact equality otherwise); the primitive is then normalized by
    beta_1 := beta1.
    """
    alpha = tuple(alpha)
    A = obstruction(cover, alpha)
    H = cover.holonomy
    exact = _exact_mode(cover, alpha)
    if exact:
        alpha = tuple(to_exact(a) for a in alpha)
        A = to_exact(A)
        resonant, near = H == 1, False
    else:
        resonant, near = holonomy_gap(cover)
    amax = max(float(abs(a)) for a in alpha)
    if resonant:
        if exact:
            vanishes = A == 0
        else:
            vanishes = abs(A) <= max(rtol * amax, atol)
        if not vanishes:
            raise ObstructedError(A)
        b1 = to_exact(beta1) if exact else beta1
    else:
        b1 = -A / (1 - H)
    ps = cover.partial_products()
    beta = [b1]
    s = b1
    for j in range(1, cover.N):
        s = s + ps[j - 1] * alpha[j - 1]
        beta.append(s / ps[j])
    ratio = None
    if not resonant and amax > 0 and cover.is_unitary():
        d = circle_distance(0.0, cmath.phase(complex(H)) / (2 * math.pi))
        ratio = d * max(float(abs(b)) for b in beta) / amax
    return SolveReport(tuple(beta), A, H, resonant, resonant, near, ratio)


def primitive_bound(cover: CycleCover) -> float:
    """K0 with max|beta| <= K0 max|alpha| for the primitive returned by solve.

    Unit weights give N/|1 - H| + N - 1, and N - 1 when H = 1 (2 for N = 3).
    """
    ps = [float(abs(p)) for p in cover.partial_products()]
    S = sum(ps[: cover.N])
    resonant, _ = holonomy_gap(cover) if not cover.is_exact() else (cover.holonomy == 1, False)
    lead = 0.0 if resonant else S / float(abs(1 - cover.holonomy))
    best = 0.0
    acc = 0.0
    for j in range(cover.N):
        best = max(best, (lead + acc) / ps[j])
        acc += ps[j]
    return best


def ueda_bound_check(cover: CycleCover, trials: int, seed: int) -> float:
    """Largest d(1, H) * max|beta| / max|alpha| over random unit-ball cochains."""
    if not cover.is_unitary():
        raise ValueError("ueda_bound_check needs unitary weights")
    if holonomy_gap(cover)[0]:
        raise ValueError("ueda_bound_check needs holonomy != 1")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rad = np.sqrt(rng.random(cover.N))
        ang = rng.random(cover.N) * 2 * math.pi
        alpha = tuple(complex(x) for x in rad * np.exp(1j * ang))
        rep = solve(cover, alpha)
        if rep.bound_ratio is not None:
            worst = max(worst, rep.bound_ratio)
    return worst


def nodal_ell(a_plus, a_minus, s, m: int):
    """l = (s^m a_+ - a_-)/(1 - s^m), so that a_+ + l = s^{-m}(a_- + l)."""
    w = s ** m
    exact = all(is_exact(x) for x in (a_plus, a_minus, s))
    if (w == 1) if exact else abs(1 - w) <= DIVISOR_FLOOR * (1 + abs(w)):
        raise ValueError("torsion parameter: nodal correction undefined")
    return (w * a_plus - a_minus) / (1 - w)


def nodal_bound_constant(K0: float) -> float:
    """K1 = e^{2 pi} K0 (1 + 3 e^{2 pi})."""
    e = math.exp(2 * math.pi)
    return e * K0 * (1 + 3 * e)


def cover_from_json(obj: dict, exact: bool = False) -> CycleCover:
    """{"N": int, "twist_edge": [j, k], "sigma": {"re", "im"}} or explicit "weights"."""
    N = int(obj["N"])
    if "weights" in obj:
        w = tuple(parse_scalar(x, exact) for x in obj["weights"])
        return CycleCover(N, w)
    sigma = parse_scalar(obj.get("sigma", 1), exact)
    tw = obj.get("twist_edge", [N, 1])
    probe = CycleCover.twisted(N, sigma)
    return CycleCover.twisted(N, sigma, probe.edge_index(int(tw[0]), int(tw[1])))
