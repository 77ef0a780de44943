"""Scan the complementary parameter across the t = |w| boundary.

For fixed w, prints the atom mass, the continuous mass and the Godement
reconstruction error as t moves from the subcritical regime into the
square-integrable one.
"""
import argparse

import numpy as np

from sl2c_semigroups import kernels as K
from sl2c_semigroups.special import SpectralPoint, levy_exponent_psi, spherical_phi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=0.8)
    ap.add_argument("--x", type=float, default=1.1)
    ap.add_argument("--n", type=int, default=9)
    args = ap.parse_args()

    w = SpectralPoint.complementary(args.omega)
    target_phi = spherical_phi(w, args.x)
    print(f"{'t':>8} {'regime':>14} {'atom mass':>11} {'continuous':>11} {'recon error':>12}")
    for t in np.linspace(0.1, 1.5 * abs(args.omega), args.n):
        dec = K.kernel_decomposition(t, w)
        atom = dec.atom.mass if dec.atom else 0.0
        err = abs(K.godement_reconstruction(t, w, args.x) - target_phi * levy_exponent_psi(t, args.x))
        print(f"{t:8.4f} {dec.regime:>14} {atom:11.6f} {dec.total_mass_check - atom:11.6f} {err:12.2e}")


if __name__ == "__main__":
    main()
