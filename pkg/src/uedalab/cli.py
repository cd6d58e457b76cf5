"""Command line driver.

Exit codes: 0 success, 1 bad input, 2 finite type / obstruction / failed
Diophantine check, 3 a claimed bound was violated (family or domination).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from . import cech, family, linearize, majorant, multiplier
from .exact import dump_scalar, parse_scalar
from .multiplier import ArcBox, Multiplier, multiplier_from_json

log = logging.getLogger("uedalab")

EXIT_OK, EXIT_INPUT, EXIT_FINITE, EXIT_BOUND = 0, 1, 2, 3


class InputError(Exception):
    pass


def workers() -> int:
    try:
        n = int(os.environ.get("UEDALAB_THREADS", "1"))
    except ValueError:
        raise InputError("UEDALAB_THREADS must be an integer")
    return max(1, min(n, os.cpu_count() or 1))


def pool_map(fn, items: Sequence) -> List:
    """Order-preserving map, fanned out over processes when UEDALAB_THREADS > 1."""
    n = workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            return repr(v)
        return format(v, ".17g")
    return str(v)


def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if path:
            fh.close()


def write_json(path: Optional[str], obj) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def out_paths(out: Optional[str]):
    """(json_path, csv_path) from --out; a bare stem gets both suffixes."""
    if not out:
        return None, None
    p = Path(out)
    if p.suffix in (".json", ".csv"):
        stem = p.with_suffix("")
    else:
        stem = p
    return str(stem.with_suffix(".json")), str(stem.with_suffix(".csv"))


def load_input(path: Optional[str]) -> dict:
    if not path:
        raise InputError("--input is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


# subcommands
def cmd_linearize(args) -> int:
    obj = load_input(args.input)
    exact = args.precision == "exact"
    system = linearize.system_from_json(obj, exact=exact, max_order=args.order)
    res = linearize.linearize(system)
    jpath, cpath = out_paths(args.out)
    payload = res.to_json()
    payload["residual_scale"] = linearize.residual_scale(system, res)
    if jpath:
        write_json(jpath, payload)
    rows = []
    for m in range(2, res.order_reached + 1 if res.status == "linearized" else res.finite_type_order + 1):
        rows.append((m, res.max_abs_order(m), res.max_obstruction(m), float(res.residual_norms.get(m, 0))))
    if cpath or not jpath:
        write_csv(cpath, ("m", "max_abs_F", "obstruction", "residual"), rows)
    say(args, res.status_label)
    if res.status != "linearized":
        obs = res.obstructions[res.finite_type_order]
        for (lam, a), v in obs.items():
            if v != 0:
                say(args, f"obstruction at order {res.finite_type_order}, component {lam + 1}, index {list(a)}: {v}")
        return EXIT_FINITE
    return EXIT_OK


def _classify(mult: Multiplier, A: float, alpha: float, M: int) -> str:
    if mult.kind == "rational":
        return f"torsion(q={mult.q})"
    for m in range(1, M + 1):
        if mult.is_torsion_at(m):
            return f"torsion(q={m})"
    res = multiplier.diophantine_check(mult, A, alpha, M)
    if res.passed:
        return "diophantine"
    return f"non-diophantine(m={res.violating_m})"


def _sweep_one(task):
    spec, A, alpha, M, order, seed, Mb, R, N = task
    mult = multiplier_from_json(spec)
    cls = _classify(mult, A, alpha, M)
    min_md = min(m * mult.divisor(m) for m in range(1, M + 1))
    sysm = linearize.random_system(N, [mult.sigma], order, M=Mb, R=R, seed=seed)
    res = linearize.linearize(sysm)
    growth, spike, spike_at = 0.0, 0.0, 0
    prev = 1.0
    for m in range(2, res.order_reached + 1):
        v = res.max_abs_order(m)
        if v > 0:
            growth = max(growth, v ** (1.0 / m))
            # a small divisor at order m shows up as a jump in |F_m| / |F_{m-1}|
            if v / prev > spike:
                spike, spike_at = v / prev, m
            prev = v
    resid = max((float(v) for v in res.residual_norms.values()), default=0.0)
    scale = linearize.residual_scale(sysm, res)
    return (mult.label, cls, min_md, growth, spike_at, spike, resid / scale, res.status_label)


def cmd_sweep(args) -> int:
    obj = load_input(args.input)
    specs = obj.get("multipliers")
    if not isinstance(specs, list) or not specs:
        raise InputError("sweep input needs a non-empty 'multipliers' list")
    A = float(obj.get("A", 0.25))
    alpha = float(obj.get("alpha", 1.0))
    M = int(obj.get("M", 1000))
    order = int(args.order or obj.get("order", 20))
    seed = int(args.seed if args.seed is not None else obj.get("seed", 0))
    tasks = [
        (s, A, alpha, M, order, seed, float(obj.get("Mbound", 1.0)), float(obj.get("R", 1.0)), int(obj.get("N", 3)))
        for s in specs
    ]
    for s in specs:
        multiplier_from_json(s)  # validate before fanning out
    rows = pool_map(_sweep_one, tasks)
    _, cpath = out_paths(args.out)
    write_csv(
        cpath,
        ("theta", "classification", "min_m_d", "growth", "spike_order", "spike_ratio", "residual", "status"),
        rows,
    )
    return EXIT_OK


def cmd_family(args) -> int:
    obj = load_input(args.input)
    exact = args.precision == "exact"
    samples = args.samples or int(obj.get("samples", 33))
    M0 = int(args.m0 or obj.get("M0", 1))
    _, cpath = out_paths(args.out)
    header = ("m", "theta", "naive_bound", "family_bound", "interior_max", "boundary_max")
    if "thetas" in obj:
        mults = [multiplier_from_json(t) for t in obj["thetas"]]
        m_max = int(args.order or obj.get("m_max", 20))
        gen_spec = obj.get("generator", {"kind": "vanishing"})
        seed = int(args.seed if args.seed is not None else gen_spec.get("seed", 0))
        if gen_spec.get("kind", "vanishing") == "zero":
            gen = family.zero_generator(int(gen_spec.get("N", 3)))
        else:
            gen = family.vanishing_generator(int(gen_spec.get("N", 3)), seed, int(gen_spec.get("max_shift", 2)))
        theta_of = {m.label: m.theta for m in mults}
        rows = family.improved_vs_naive(mults, m_max, gen, M0=M0, samples=max(samples, 16))
        write_csv(
            cpath,
            header,
            [(r.m, float(theta_of[r.theta]), r.naive_bound, r.family_bound, r.interior_max, r.boundary_max) for r in rows],
        )
        bad = [r for r in rows if not r.arcs_ok]
        if bad:
            say(args, f"uniform bound violated at order {bad[0].m}")
            return EXIT_BOUND
        return EXIT_OK
    alpha = family.param_cochain_from_json(obj, exact)
    n = alpha.m_prime
    if n % M0:
        raise InputError(f"m_prime={n} is not a multiple of M0={M0}")
    m = n // M0
    if "arc" in obj:
        arcs = [ArcBox(int(obj["arc"].get("m", m)), int(obj["arc"]["nu"]), M0)]
    else:
        arcs = multiplier.arc_partition(m, M0)
    rows = []
    status = EXIT_OK
    for arc in arcs:
        try:
            rep = family.family_solve(alpha, arc, samples)
            imax, bmax = family.max_principle_bound(alpha, arc)
        except family.TorsionObstructionError as exc:
            say(args, f"arc nu={arc.nu}: {exc}")
            status = EXIT_BOUND
            continue
        except family.MaximumPrincipleViolation as exc:
            say(args, f"arc nu={arc.nu}: {exc}")
            status = EXIT_BOUND
            continue
        # fiberwise bound at the sample fiber nearest the torsion point
        d_near = 1.0 / (len(rep.samples) - 1)
        naive = family.NAIVE_K * rep.alpha_max / d_near
        rows.append((arc.m, float(arc.center), naive, rep.uniform_bound, imax, bmax))
        if not rep.bound_holds:
            say(args, f"arc nu={arc.nu}: sup|beta|={rep.beta_max} exceeds {rep.uniform_bound}")
            status = EXIT_BOUND
    write_csv(cpath, header, rows)
    return status


def cmd_majorant(args) -> int:
    obj = load_input(args.input)
    kind = obj.get("kind", "toy")
    order = int(args.order or obj.get("order", 30 if kind == "toy" else 12))
    summary = {"kind": kind, "order": order}
    if kind == "toy":
        spec = majorant.ToyMajorantSpec(float(obj.get("M", 1.0)), float(obj.get("K", 2.0)), order)
        A = majorant.toy_majorant(spec)
        # B_m is the bracket coefficient [X^m] M A^2/(1 - A), i.e. A_m / K_m
        rows = [(m, float(A.coefficient(m)), float(A.coefficient(m)) / spec.K_at(m) if m >= 2 else 0.0)
                for m in range(1, order + 1)]
        summary["radius_closed_form"] = majorant.toy_radius(spec.K, spec.M) if spec.M > 0 else None
    elif kind == "general":
        spec = majorant.GeneralMajorantSpec(
            int(obj.get("M0", 1)), obj.get("Theta", 2), obj.get("K", 2), obj.get("M", 1),
            obj.get("R", 1), int(obj.get("r", 1)), order,
        )
        A = majorant.general_majorant(spec)
        diag = A.diagonal()
        rows = []
        for m in range(1, order + 1):
            B = majorant.b_bounds(spec, A, m - 1) if 2 <= m <= order else 0
            rows.append((m, float(diag[m]), float(B) if m >= 2 else 0.0))
        summary["residual"] = majorant.general_residual(spec, A)
    else:
        raise InputError(f"unknown majorant kind {kind!r}")
    try:
        summary["radius"] = majorant.radius_estimate(A)
    except ValueError:
        summary["radius"] = None
    status = EXIT_OK
    if "system" in obj:
        sys_obj = obj["system"]
        if isinstance(sys_obj, str):
            sys_obj = load_input(sys_obj)
        system = linearize.system_from_json(sys_obj, max_order=int(obj.get("system_order", sys_obj.get("max_order", 20))))
        res = linearize.linearize(system, check_residual=False)
        M, R = float(obj.get("M", 1.0)), float(obj.get("R", 1.0))
        fib = majorant.system_majorant(system, M, R)
        rep = majorant.domination_check(system, res, fib)
        summary["domination"] = "pass" if rep.passed else "fail"
        summary["domination_min_margin"] = rep.min_margin if math.isfinite(rep.min_margin) else None
        if rep.violation:
            summary["domination_violation"] = {
                "chart": rep.violation[0], "component": rep.violation[1] + 1,
                "index": list(rep.violation[2]), "abs_F": rep.violation[3], "bound": rep.violation[4],
            }
            status = EXIT_BOUND
    jpath, cpath = out_paths(args.out)
    write_csv(cpath, ("m", "A_m", "B_m"), rows)
    if jpath:
        write_json(jpath, summary)
    elif not args.quiet:
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return status


def cmd_diophantine(args) -> int:
    obj = load_input(args.input)
    mult = multiplier_from_json(obj["theta"])
    A = float(obj.get("A", 0.25))
    alpha = float(obj.get("alpha", 1.0))
    M = int(args.order or obj.get("M", 1000))
    res = multiplier.diophantine_check(mult, A, alpha, M)
    prof = multiplier.divisor_profile(mult, M)
    _, cpath = out_paths(args.out)
    write_csv(cpath, ("m", "d_m", "A_m_pow"), ((m, prof[m], A * m ** -alpha) for m in range(1, M + 1)))
    if res.passed:
        say(args, f"pass: d_m >= {A} m^-{alpha} for all m <= {M}")
        return EXIT_OK
    say(args, f"violation at m = {res.violating_m}")
    return EXIT_FINITE


def cmd_cech_solve(args) -> int:
    obj = load_input(args.input)
    exact = args.precision == "exact"
    cover = cech.cover_from_json(obj, exact)
    alpha = [parse_scalar(a, exact) for a in obj["alpha"]]
    if len(alpha) != cover.N:
        raise InputError(f"alpha must have {cover.N} entries")
    out = {"obstruction": dump_scalar(cech.obstruction(cover, alpha)), "holonomy": dump_scalar(cover.holonomy)}
    status = EXIT_OK
    try:
        rep = cech.solve(cover, alpha)
        out.update(
            beta=[dump_scalar(b) for b in rep.beta],
            resonant=rep.resonant,
            near_resonant=rep.near_resonant,
            used_normalization=rep.used_normalization,
            bound_ratio=rep.bound_ratio,
        )
    except cech.ObstructedError:
        out.update(beta=None, resonant=True, error="obstructed: nonzero class")
        status = EXIT_FINITE
    jpath, _ = out_paths(args.out)
    write_json(jpath, out)
    return status


COMMANDS = {
    "linearize": cmd_linearize,
    "sweep": cmd_sweep,
    "family": cmd_family,
    "majorant": cmd_majorant,
    "diophantine": cmd_diophantine,
    "cech-solve": cmd_cech_solve,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uedalab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", "-i", help="input JSON")
        s.add_argument("--out", "-o", help="output path (stem, .json or .csv)")
        s.add_argument("--order", type=int, help="truncation order / m_max / M")
        s.add_argument("--seed", type=int)
        s.add_argument("--samples", type=int, help="arc sample count")
        s.add_argument("--precision", choices=("float", "exact"), default="float")
        s.add_argument("--m0", type=int, help="arc refinement M0")
        s.add_argument("--quiet", "-q", action="store_true")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
