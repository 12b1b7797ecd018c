"""Compare uncorrected and corrected forms of the qubit kernel and angle shifts.

For each variant, report the worst node-wise deviation between the kernel
path and the direct channel path on the default 8x4 grid, and the worst
entrywise violation of the conjugation identity for the angle maps.
"""

import math

import numpy as np

from tomochannels import qstate as qs
from tomochannels import qubit_kernels as qk
from tomochannels import qubit_tomography as qt
from tomochannels.verification import random_states, shifted_angle_point

GRID = qt.AngularGrid()
PTS = list(GRID.points())
WT = np.broadcast_to(GRID.weights, GRID.shape).ravel()


def as_matrix(fn):
    return np.array([[fn(x, y) for y in PTS] for x in PTS]) * WT


def unscaled(t, lam):
    def k(x, y):
        if x.m != y.m:
            return 0.0
        n, n2 = x.direction(), y.direction()
        m, a, b = x.m, x.alpha, x.beta
        first = 0.5 * (1 - m * math.cos(a) * math.sin(b) * t[0] - m * math.sin(a) * math.sin(b) * t[1]
                       + m * math.cos(a) * t[2])
        return first + 1.5 * (-n[0] * n2[0] * lam[0] - n[1] * n2[1] * lam[1] + n[2] * n2[2] * lam[2])
    return k


def cos_alpha_tz(t, lam):
    def k(x, y):
        if x.m != y.m:
            return 0.0
        s = qt.pauli_direction(x.alpha, x.beta)
        s[2] = math.cos(x.alpha)
        return 0.5 * (1 + 2 * x.m * float(s @ t)) + 1.5 * float(np.sum(np.asarray(lam) * x.direction() * y.direction()))
    return k


def corrected(t, lam):
    kern = qk.general_kernel(t, lam)
    return lambda x, y: kern(x, y)


def dual_path_error(fn, ch, states):
    mat = as_matrix(fn)
    return max(
        float(np.max(np.abs(mat @ qt.sample_tomogram(r, GRID).values.ravel()
                            - qk.direct_output_tomogram(ch, r, GRID).values.ravel())))
        for r in states
    )


def main():
    rng = np.random.default_rng(0)
    states = random_states(rng, 10)
    cases = {
        "identity": ((0, 0, 0), (1, 1, 1)),
        "sigma_z": ((0, 0, 0), (-1, -1, 1)),
        "amplitude damping 0.36": ((0, 0, 0.36), (0.8, 0.8, 0.64)),
        "extreme (0.8, 0.6, +)": ((0, 0, 0.48), (0.8, 0.6, 0.48)),
    }
    print(f"{'channel':<24} {'unscaled':>10} {'cos(a) t_z':>11} {'corrected':>10}")
    for name, (t, lam) in cases.items():
        ch = qs.AffineQubitChannel(t, lam)
        errs = [dual_path_error(f(t, lam), ch, states) for f in (unscaled, cos_alpha_tz, corrected)]
        print(f"{name:<24} " + " ".join(f"{e:>10.3g}" for e in errs))

    print("\nconjugation identity, 500 random points")
    for axis in qs.AXES:
        s = qs.pauli(axis)
        shift = inv = 0.0
        for _ in range(500):
            x = qt.TomoPoint(0.5, rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi))
            lhs = s @ qt.dequantizer(x) @ s
            shift = max(shift, np.max(np.abs(lhs - qt.dequantizer(shifted_angle_point(axis, x)))))
            inv = max(inv, np.max(np.abs(lhs - qt.dequantizer(qk.angle_involution(axis, x)))))
        print(f"  sigma_{axis}: quarter-turn shifts {shift:.3g}, involution {inv:.3g}")


if __name__ == "__main__":
    main()
