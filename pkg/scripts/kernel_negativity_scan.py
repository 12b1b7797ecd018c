"""Minimum value of each qubit kernel as the scan grid is refined.

Usage: python scripts/kernel_negativity_scan.py [--sizes 8,4 16,8 32,16 64,32]
"""

import argparse

from tomochannels import qstate as qs
from tomochannels import qubit_kernels as qk


def kernels():
    ad = qs.extreme_point_channel(0.8, 0.8)
    yield "identity", qk.identity_kernel()
    for a in qs.AXES:
        yield f"K_{a}", qk.pauli_kernel(a)
    yield "depolarizing", qk.mixture_kernel(qs.PauliMixture(0.25, 0.25, 0.25, 0.25))
    yield "amplitude damping 0.36", qk.general_kernel(ad.t, ad.lam)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", default=["8,4", "16,8", "32,16", "64,32"])
    args = ap.parse_args()
    rows = []
    for size in args.sizes:
        na, nb = (int(v) for v in size.split(","))
        pts = qk.scan_points(na, nb)
        for name, k in kernels():
            mat = k.matrix(pts, pts)
            rows.append({"scan": size, "kernel": name, "min": float(mat.min()), "max": float(mat.max())})
    width = max(len(r["kernel"]) for r in rows)
    for r in rows:
        print(f"{r['scan']:>6}  {r['kernel']:<{width}}  min {r['min']:+.15f}  max {r['max']:+.6f}")


if __name__ == "__main__":
    main()
