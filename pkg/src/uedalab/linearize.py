"""Order-by-order linearization of constant-coefficient transition systems.

Chart j carries coordinates w_j = (w_j^1, ..., w_j^r). On the cycle edge
(j, k) = (j, j+1) the gluing is

    t_jk^(lam) * w_k^(lam) = g_kj^(lam)(w_j),   g = identity + nonlinear part,

with t_jk^(lam) = 1/rho_jk^(lam) and rho the per-component flat weights of
the cover. We look for w_j = phi_j(wh_j) = wh_j + sum_{|a|>=2} F_{j,a} wh_j^a
such that the new coordinates glue linearly. At total degree m this is the
coboundary equation

    -F_{j,a}^(lam) + rho_jk^(lam)^-1 prod_mu (rho_jk^(mu))^{a_mu} F_{k,a}^(lam) = h_{kj,a}^(lam)

where h collects the degree-m terms of g's nonlinear part evaluated at the
already-known part of phi_j. For r = 1 the edge weight is rho^{m-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cech
from .cech import CycleCover
from .exact import GaussianRational, dump_scalar, is_exact, parse_scalar
from .series import Index, MultiSeries, monomials, substitute

RESONANCE_RTOL = 1e-10


@dataclass(frozen=True)
class TransitionSystem:
    """Constant-coefficient gluing data on an N-cycle.

    ``weights[lam][e]`` is rho^(lam) on edge e; ``maps[e][lam]`` is the full
    series g_kj^(lam) for edge e = (j, k), whose linear part must be w^(lam).
    """

    N: int
    r: int
    weights: Tuple[Tuple, ...]
    maps: Tuple[Tuple[MultiSeries, ...], ...]
    max_order: int
    nonlinear: Tuple[Tuple[MultiSeries, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.weights) != self.r or any(len(w) != self.N for w in self.weights):
            raise ValueError("weights must be r rows of N edge weights")
        if len(self.maps) != self.N or any(len(g) != self.r for g in self.maps):
            raise ValueError("maps must be N edges of r component series")
        nl = []
        for e, comps in enumerate(self.maps):
            row = []
            for lam, g in enumerate(comps):
                if g.num_vars != self.r:
                    raise ValueError(f"edge {e} component {lam}: expected {self.r} variables")
                if g.constant_term() != 0:
                    raise ValueError(f"edge {e} component {lam}: nonzero constant term")
                for mu in range(self.r):
                    a = tuple(1 if i == mu else 0 for i in range(self.r))
                    if g[a] != (1 if mu == lam else 0):
                        raise ValueError(
                            f"edge {e} component {lam}: linear part must be w^({lam + 1})"
                        )
                row.append(
                    MultiSeries(
                        self.r, g.order, {a: c for a, c in g.coeffs.items() if sum(a) >= 2}
                    )
                )
            nl.append(tuple(row))
        object.__setattr__(self, "nonlinear", tuple(nl))
        for row in self.weights:
            CycleCover(self.N, row)  # validates nonzero weights

    @classmethod
    def from_nonlinear(
        cls,
        N: int,
        r: int,
        weights: Sequence[Sequence],
        nonlinear: Sequence[Sequence[MultiSeries]],
        max_order: int,
    ) -> "TransitionSystem":
        maps = []
        for e in range(N):
            row = []
            for lam in range(r):
                lin = MultiSeries.variable(r, max_order, lam)
                row.append(lin + nonlinear[e][lam].with_order(max_order))
            maps.append(tuple(row))
        return cls(N, r, tuple(tuple(w) for w in weights), tuple(maps), max_order)

    @classmethod
    def univariate(
        cls, N: int, sigma, f: Dict[int, Dict[int, object]], max_order: int, twist_edge: int = -1
    ) -> "TransitionSystem":
        """r = 1 system; ``f[e][m]`` is the coefficient f_{kj,m} on edge e (m >= 2)."""
        cover = CycleCover.twisted(N, sigma, twist_edge)
        nonlin = []
        for e in range(N):
            cs = {(m,): c for m, c in f.get(e, {}).items() if m <= max_order}
            if any(m < 2 for (m,) in cs):
                raise ValueError("nonlinear coefficients start at degree 2")
            nonlin.append((MultiSeries(1, max_order, cs),))
        return cls.from_nonlinear(N, 1, [cover.weights], nonlin, max_order)

    def cover(self, lam: int) -> CycleCover:
        return CycleCover(self.N, self.weights[lam])

    def f_coefficients(self):
        """Yield (edge, lam, a, f) for every stored nonlinear coefficient."""
        for e in range(self.N):
            for lam in range(self.r):
                for a, c in self.nonlinear[e][lam].items():
                    yield e, lam, a, c

    def is_exact(self) -> bool:
        return all(is_exact(w) for row in self.weights for w in row) and all(
            g.is_exact() for row in self.maps for g in row
        )

    def to_json(self) -> dict:
        edges = []
        for e in range(self.N):
            j, k = e + 1, (e + 1) % self.N + 1
            edges.append({"from": k, "to": j, "components": [g.to_json() for g in self.maps[e]]})
        return {
            "N": self.N,
            "r": self.r,
            "max_order": self.max_order,
            "weights": [[dump_scalar(w) for w in row] for row in self.weights],
            "edges": edges,
        }


def system_from_json(obj: dict, exact: bool = False, max_order: Optional[int] = None) -> TransitionSystem:
    """Parse a system JSON (cover block plus edges).

    The cover block is either explicit per-component "weights" or "sigma"
    (one value, or a list of r values) with an optional "twist_edge".
    Missing edges glue by the identity.
    """
    N = int(obj["N"])
    r = int(obj.get("r", 1))
    M = int(max_order if max_order is not None else obj.get("max_order", 20 if r == 1 else 10))
    if "weights" in obj:
        weights = [[parse_scalar(x, exact) for x in row] for row in obj["weights"]]
        if r == 1 and weights and not isinstance(obj["weights"][0], list):
            weights = [[parse_scalar(x, exact) for x in obj["weights"]]]
    else:
        sig = obj.get("sigma", 1)
        sigmas = sig if isinstance(sig, list) else [sig] * r
        if len(sigmas) != r:
            raise ValueError(f"need {r} sigma values")
        tw = obj.get("twist_edge", [N, 1])
        probe = CycleCover.twisted(N, 1)
        te = probe.edge_index(int(tw[0]), int(tw[1]))
        weights = [CycleCover.twisted(N, parse_scalar(s, exact), te).weights for s in sigmas]
    nonlin: List[List[MultiSeries]] = [[MultiSeries.zero(r, M) for _ in range(r)] for _ in range(N)]
    probe = CycleCover.twisted(N, 1)
    seen = set()
    for ed in obj.get("edges", []):
        k, j = int(ed["from"]), int(ed["to"])
        e = probe.edge_index(j, k)
        if e in seen:
            raise ValueError(f"edge ({j},{k}) given twice")
        seen.add(e)
        comps = ed["components"]
        if len(comps) != r:
            raise ValueError(f"edge ({j},{k}): need {r} components")
        for lam, cj in enumerate(comps):
            g = MultiSeries.from_json(cj, exact)
            if g.num_vars != r:
                raise ValueError(f"edge ({j},{k}) component {lam}: expected {r} variables")
            lin = MultiSeries.variable(r, g.order, lam)
            if any(g[a] != lin[a] for a in monomials(r, 1)) or g.constant_term() != 0:
                raise ValueError(f"edge ({j},{k}) component {lam}: linear part must be w^({lam + 1})")
            nonlin[e][lam] = MultiSeries(r, M, {a: c for a, c in g.coeffs.items() if sum(a) >= 2})
    return TransitionSystem.from_nonlinear(N, r, weights, nonlin, M)


def _recip(w):
    return Fraction(1) / w if is_exact(w) else 1 / w


def order_weights(system: TransitionSystem, lam: int, a: Index) -> Tuple:
    """Per-edge weights rho^(lam)^-1 prod_mu (rho^(mu))^{a_mu} of the (lam, a) equation."""
    if sum(a) < 2:
        raise ValueError("order weights are defined for |a| >= 2")
    out = []
    for e in range(system.N):
        w = _recip(system.weights[lam][e])
        for mu, k in enumerate(a):
            if k:
                w = w * system.weights[mu][e] ** k
        out.append(w)
    return tuple(out)


def order_cover(system: TransitionSystem, lam: int, a: Index) -> CycleCover:
    return CycleCover(system.N, order_weights(system, lam, a))


def _phi(F_j: Sequence[MultiSeries], r: int, order: int) -> List[MultiSeries]:
    return [MultiSeries.variable(r, order, mu) + F_j[mu].truncate(order).with_order(order) for mu in range(r)]


def compute_h(system: TransitionSystem, F: Sequence[Sequence[MultiSeries]], m: int) -> Dict[Tuple[int, Index], Tuple]:
    """Right-hand sides h_{kj,a}^(lam) for |a| = m, keyed by (lam, a), one value per edge.

    ``F[j][lam]`` must hold all coefficients of degree < m (higher ones are ignored).
    """
    r, N = system.r, system.N
    per_edge = []
    for e in range(N):
        Fj = [F[e][mu].truncate(m - 1) for mu in range(r)]
        phi = _phi(Fj, r, m)
        cache: Dict = {}
        comps = []
        for lam in range(r):
            nl = system.nonlinear[e][lam].truncate(m)
            comps.append(substitute(nl.with_order(m), phi, cache).degree_part(m) if nl.coeffs else {})
        per_edge.append(comps)
    out = {}
    for a in monomials(r, m):
        for lam in range(r):
            out[(lam, a)] = tuple(per_edge[e][lam].get(a, 0) for e in range(N))
    return out


@dataclass
class LinearizationResult:
    N: int
    r: int
    max_order: int
    F: Tuple[Tuple[MultiSeries, ...], ...]  # F[j][lam], charts 0-based
    obstructions: Dict[int, Dict[Tuple[int, Index], object]]
    residual_norms: Dict[int, float]
    status: str  # "linearized" or "finite-type"
    finite_type_order: Optional[int] = None
    near_resonant: List[Tuple[int, int, Index]] = field(default_factory=list)
    gauge: object = 0

    @property
    def order_reached(self) -> int:
        return self.max_order if self.status == "linearized" else self.finite_type_order - 1

    @property
    def status_label(self) -> str:
        if self.status == "linearized":
            return f"linearized-to-order-{self.max_order}"
        return f"finite-type-at-order-{self.finite_type_order}"

    def coefficient(self, j: int, lam: int, a: Index):
        """F_{j,a}^(lam) with 1-based chart j."""
        return self.F[j - 1][lam][tuple(a)]

    def max_abs_order(self, m: int) -> float:
        return max(
            (float(abs(c)) for row in self.F for s in row for a, c in s.coeffs.items() if sum(a) == m),
            default=0.0,
        )

    def max_obstruction(self, m: int) -> float:
        return max((float(abs(v)) for v in self.obstructions.get(m, {}).values()), default=0.0)

    def to_json(self) -> dict:
        F = []
        for j, row in enumerate(self.F):
            for lam, s in enumerate(row):
                F.append({"chart": j + 1, "component": lam + 1, "series": s.to_json()})
        obs = []
        for m in sorted(self.obstructions):
            for (lam, a), v in sorted(self.obstructions[m].items(), key=lambda kv: (kv[0][0], [-x for x in kv[0][1]])):
                obs.append(dict(order=m, component=lam + 1, index=list(a), **dump_scalar(v)))
        return {
            "status": self.status_label,
            "N": self.N,
            "r": self.r,
            "max_order": self.max_order,
            "order_reached": self.order_reached,
            "F": F,
            "obstructions": obs,
            "residuals": [{"order": m, "value": float(v)} for m, v in sorted(self.residual_norms.items())],
            "near_resonant": [
                {"order": m, "component": lam + 1, "index": list(a)} for m, lam, a in self.near_resonant
            ],
        }


def linearize(
    system: TransitionSystem,
    *,
    max_order: Optional[int] = None,
    gauge=0,
    check_residual: bool = True,
) -> LinearizationResult:
    """Solve for F order by order up to ``max_order`` (default: the system's).

    ``gauge`` is the value given to beta_1 at resonant orders whose class
    vanishes (the kernel of the coboundary there).
    """
    M = system.max_order if max_order is None else max_order
    r, N = system.r, system.N
    exact = system.is_exact()
    coeffs = [[{} for _ in range(r)] for _ in range(N)]
    obstructions: Dict[int, Dict] = {}
    near: List = []
    status, ft_order = "linearized", None

    def frozen():
        return tuple(tuple(MultiSeries(r, M, coeffs[j][lam]) for lam in range(r)) for j in range(N))

    for m in range(2, M + 1):
        h = compute_h(system, frozen(), m)
        hmax = max((float(abs(v)) for vals in h.values() for v in vals), default=0.0)
        atol = RESONANCE_RTOL * hmax
        order_obs = {}
        pending = []
        obstructed = False
        for a in monomials(r, m):
            for lam in range(r):
                cover = order_cover(system, lam, a)
                alpha = h[(lam, a)]
                resonant = cover.holonomy == 1 if cover.is_exact() else cech.holonomy_gap(cover)[0]
                if resonant:
                    A = cech.obstruction(cover, alpha)
                    order_obs[(lam, a)] = A
                try:
                    rep = cech.solve(cover, alpha, beta1=gauge, rtol=0.0, atol=atol)
                except cech.ObstructedError:
                    obstructed = True
                    continue
                if rep.near_resonant:
                    near.append((m, lam, a))
                pending.append((lam, a, rep.beta))
        if order_obs:
            obstructions[m] = order_obs
        if obstructed:
            status, ft_order = "finite-type", m
            break
        for lam, a, beta in pending:
            for j in range(N):
                if beta[j] != 0:
                    coeffs[j][lam][a] = beta[j]
    result = LinearizationResult(
        N, r, M, frozen(), obstructions, {}, status, ft_order, near, gauge
    )
    if check_residual:
        result.residual_norms = verify_residual(system, result)
    return result


def verify_residual(system: TransitionSystem, result: LinearizationResult) -> Dict[int, object]:
    """Max |coefficient| per degree of t_jk phi_k(T_kj wh) - g_kj(phi_j(wh)) over all edges.

    Checked through the highest order the result reached.
    """
    M = result.order_reached
    r, N = system.r, system.N
    out: Dict[int, object] = {d: 0 for d in range(1, M + 1)}
    if M < 1:
        return out
    phis = [_phi(result.F[j], r, M) for j in range(N)]
    for e in range(N):
        j, k = e, (e + 1) % N
        lin = [MultiSeries.variable(r, M, mu, system.weights[mu][e]) for mu in range(r)]
        cache_k: Dict = {}
        cache_j: Dict = {}
        for lam in range(r):
            lhs = substitute(phis[k][lam], lin, cache_k)
            w = system.weights[lam][e]
            lhs = lhs * _recip(w)
            rhs = substitute(system.maps[e][lam].truncate(M).with_order(M), phis[j], cache_j)
            diff = lhs - rhs
            for a, c in diff.coeffs.items():
                d = sum(a)
                if d >= 1 and abs(c) > out[d]:
                    out[d] = abs(c)
    return out


def residual_scale(system: TransitionSystem, result: LinearizationResult) -> float:
    """Size of the data the residual is compared against: max(1, |f|, |F|)."""
    s = 1.0
    for *_, c in system.f_coefficients():
        s = max(s, float(abs(c)))
    for row in result.F:
        for ser in row:
            s = max(s, ser.max_abs())
    return s


def ueda_class(system: TransitionSystem, m: int) -> Dict[Tuple[int, Index], object]:
    """Obstruction of the order-m cochain for every (lam, |a| = m).

    Nonzero only at resonant (lam, a); by convention 0 elsewhere since the
    class group vanishes there. Requires solvability through order m-1.
    """
    if m < 2:
        raise ValueError("Ueda classes start at order 2")
    prev = linearize(system, max_order=m - 1, check_residual=False) if m > 2 else None
    if prev is not None and prev.status != "linearized":
        raise ValueError(f"not solvable through order {m - 1}: {prev.status_label}")
    r, N = system.r, system.N
    F = prev.F if prev is not None else tuple(
        tuple(MultiSeries.zero(r, max(m - 1, 1)) for _ in range(r)) for _ in range(N)
    )
    h = compute_h(system, F, m)
    out = {}
    for a in monomials(r, m):
        for lam in range(r):
            cover = order_cover(system, lam, a)
            resonant = cover.holonomy == 1 if cover.is_exact() else cech.holonomy_gap(cover)[0]
            out[(lam, a)] = cech.obstruction(cover, h[(lam, a)]) if resonant else 0
    return out


def order_constants(system: TransitionSystem, max_order: int) -> Dict[int, float]:
    """K_m = max over (lam, |a| = m) of the primitive bound of the order cover."""
    out = {}
    for m in range(2, max_order + 1):
        out[m] = max(
            cech.primitive_bound(order_cover(system, lam, a))
            for a in monomials(system.r, m)
            for lam in range(system.r)
        )
    return out


def _random_unit(rng, exact: bool, den: int = 64):
    if exact:
        # |u| <= 1/sqrt(2) with small denominators
        re_ = Fraction(int(rng.integers(-den // 2, den // 2 + 1)), den)
        im_ = Fraction(int(rng.integers(-den // 2, den // 2 + 1)), den)
        return GaussianRational(re_, im_)
    rad = math.sqrt(rng.random())
    return complex(rad * np.exp(2j * math.pi * rng.random()))


def random_system(
    N: int,
    sigmas: Sequence,
    max_order: int,
    *,
    M=1.0,
    R=1.0,
    seed: int = 0,
    exact: bool = False,
    twist_edge: int = -1,
) -> TransitionSystem:
    """Random system inside the Cauchy envelope |f_{kj,a}| <= M R^{|a|}.

    ``sigmas`` gives one twist per component (r = len(sigmas)).
    """
    r = len(sigmas)
    rng = np.random.default_rng(seed)
    if exact:
        M, R = Fraction(M), Fraction(R)
    weights = [CycleCover.twisted(N, s, twist_edge).weights for s in sigmas]
    nonlin = []
    for _ in range(N):
        row = []
        for _ in range(r):
            cs = {}
            for d in range(2, max_order + 1):
                for a in monomials(r, d):
                    cs[a] = _random_unit(rng, exact) * (M * R ** d)
            row.append(MultiSeries(r, max_order, cs))
        nonlin.append(row)
    return TransitionSystem.from_nonlinear(N, r, weights, nonlin, max_order)
