"""Plane-representation mass for several states and grid sizes.

Shows that (1/2pi) int int Omega dx dy converges to 1/2 (equivalently
(1/pi) int int Omega = 1) and that the two-half-ray formula recovers the
characteristic function where a single half-ray does not.
"""

import math

import numpy as np

from tomochannels import bosonic as bo
from tomochannels.numerics import trapezoid_weights


def main():
    states = [bo.Vacuum(), bo.Coherent(1.5, -1.0), bo.Thermal(0.5), bo.Fock(3), bo.Squeezed(0.3, 0.7)]
    for grid in (bo.OpticalGrid(8, 201, 32), bo.OpticalGrid(8, 401, 64), bo.OpticalGrid(10, 801, 128)):
        print(f"grid L={grid.L} n_x={grid.n_x} n_phi={grid.n_phi}")
        for st in states:
            omega = bo.tomogram_from_charfn(bo.char_fn(st), grid)
            plane = bo.plane_distribution(omega)
            F = bo.char_fn(st)
            rn = plane.radial_nodes()
            w = trapezoid_weights(rn)
            t, j = 1.0, 3
            exact = complex(F(t * math.cos(plane.phi[j]), t * math.sin(plane.phi[j])))
            single = complex(np.sum(w * np.exp(1j * t * rn) * plane.radial_density()[j]))
            print(f"  {type(st).__name__:<9} (1/2pi) mass {plane.normalization():.10f}   "
                  f"two half-rays err {abs(plane.charfn_on_ray(t, j) - exact):.2e}   "
                  f"one half-ray err {abs(single - exact):.2e}")


if __name__ == "__main__":
    main()
