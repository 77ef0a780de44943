"""Monte Carlo estimate of the conditional characteristic function of the
Levy area as the number of paths grows, against x/sinh(x) * psi_t(x)."""
import argparse

from sl2c_semigroups import oracle as O


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--x", type=float, default=1.0)
    ap.add_argument("--n-steps", type=int, default=1024)
    ap.add_argument("--max-paths", type=int, default=1 << 18)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n = 1 << 14
    print(f"{'paths':>9} {'estimate':>10} {'stderr':>9} {'target':>9} {'b':>9} {'b/2':>9}")
    while n <= args.max_paths:
        spec = O.AreaSimSpec(n_paths=n, n_steps=args.n_steps, seed=args.seed)
        r = O.conditional_area_cf(args.t, args.x, spec)
        print(f"{n:9d} {r.estimate:10.5f} {r.stderr:9.5f} {r.target:9.5f} {r.raw[0]:9.5f} {r.raw[1]:9.5f}")
        n *= 4


if __name__ == "__main__":
    main()
