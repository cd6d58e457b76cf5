"""Majorant tables: toy recursion vs closed form, the general implicit series,
and domination of seeded linearizations by their fiber majorant."""

import argparse
import time

from uedalab import linearize, majorant
from uedalab.multiplier import Multiplier


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=100)
    ap.add_argument("--order", type=int, default=15)
    args = ap.parse_args()

    print("toy majorant, K=2 M=1")
    spec = majorant.ToyMajorantSpec(1.0, 2.0, 30)
    A = majorant.toy_majorant(spec)
    ref = majorant.toy_closed_form(2.0, 1.0, 30)
    for m in (2, 3, 5, 10, 20, 30):
        print(f"  A_{m:<2} = {float(A.coefficient(m)):.10g}   closed form {ref[m]:.10g}")
    print(f"  radius estimate {majorant.radius_estimate(A):.5f} vs {majorant.toy_radius(2, 1):.5f}")

    g = majorant.GeneralMajorantSpec()
    G = majorant.general_majorant(g)
    d = G.diagonal()
    print(f"general majorant C={g.C}: A_2={d[2]} A_3={d[3]} residual={majorant.general_residual(g, G)}")

    sigma = Multiplier.golden_mean().sigma
    worst, t0 = float("inf"), time.perf_counter()
    for seed in range(args.systems):
        sysm = linearize.random_system(3, [sigma], args.order, seed=seed)
        res = linearize.linearize(sysm, check_residual=False)
        rep = majorant.domination_check(sysm, res, majorant.system_majorant(sysm, 1.0, 1.0))
        if not rep.passed:
            print(f"  seed {seed}: violation {rep.violation}")
            return 1
        worst = min(worst, rep.min_margin)
    print(f"domination: {args.systems} systems to order {args.order}, min margin {worst:.3f}, "
          f"{time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
