"""Cartan data of exp(-t A_alpha) over a small (alpha, t) table."""
import argparse

import numpy as np

from sl2c_semigroups import metaplectic as MP


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    ap.add_argument("--t", type=float, default=1.0)
    args = ap.parse_args()

    print(f"{'alpha':>6} {'lambda_1':>10} {'lambda_2':>10} {'reassembly':>11} {'det SL2C - 1':>13}")
    for a in args.alphas:
        doc = MP.pipeline(a, args.t)
        l1, l2 = doc["cartan_lambdas"]
        r = doc["residuals"]
        print(f"{a:6.3g} {l1:10.6f} {l2:10.6f} {r['reassembly']:11.2e} {r['sl2c_det']:13.2e}")
    print("SL(2,C) image at alpha =", args.alphas[-1])
    print(np.array2string(doc["sl2c"], precision=6))


if __name__ == "__main__":
    main()
