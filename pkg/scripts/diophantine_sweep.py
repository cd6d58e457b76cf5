"""Brute-force Diophantine classification of a handful of rotation numbers."""

import argparse

from uedalab.multiplier import Multiplier, convergent_denominators, diophantine_check

CANDIDATES = [
    Multiplier.golden_mean(60),
    Multiplier.from_decimal("0.41421356237309504880168872420969807856967187537694", "sqrt2-1"),
    Multiplier.liouville(3),
    Multiplier.liouville(4),
    Multiplier.from_continued_fraction([0, 7, 10**9, 10**40], "cf[0;7,1e9,1e40]"),
    Multiplier.rational(3, 11),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--A", type=float, default=0.25)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--M", type=int, default=100_000)
    args = ap.parse_args()
    print(f"{'theta':>20} {'verdict':>8} {'first bad m':>12} {'min m^a d_m':>14}")
    for mult in CANDIDATES:
        res = diophantine_check(mult, args.A, args.alpha, args.M)
        bad = "-" if res.passed else str(res.violating_m)
        print(f"{mult.label:>20} {'pass' if res.passed else 'fail':>8} {bad:>12} {res.min_scaled:>14.6g}")
    q = convergent_denominators([0, 7, 10**9, 10**40])
    print("convergent denominators of cf[0;7,1e9,1e40]:", q[:4])


if __name__ == "__main__":
    main()
