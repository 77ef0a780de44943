"""Tabulate q_t on a grid for several times and report mass and oracle error."""
import argparse

import numpy as np

from sl2c_semigroups import kernels as K
from sl2c_semigroups import oracle as O


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--times", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    ap.add_argument("--xi-max", type=float, default=10.0)
    ap.add_argument("--n", type=int, default=21)
    args = ap.parse_args()

    xi = np.linspace(-args.xi_max, args.xi_max, args.n)
    print(f"{'t':>6} {'mass - 1':>12} {'max |series - quad|':>20} {'max bound':>12} {'M':>4}")
    for t in args.times:
        res = K.qt_series(t, xi)
        quad = np.array([O.fourier_invert_psi(t, x) for x in xi])
        mass = K.density_mass(lambda z: K.qt_density(t, z))
        print(f"{t:6.3g} {mass - 1:12.2e} {np.max(np.abs(res.value - quad)):20.2e} "
              f"{np.max(res.bound):12.2e} {res.n_terms:4d}")


if __name__ == "__main__":
    main()
