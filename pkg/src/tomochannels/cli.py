"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
CSV goes to ``--output`` (stdout by default); JSON reports go to ``--report``
(stderr by default, stdout for ``verify``).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from . import bosonic as bo
from . import qstate as qs
from . import qubit_kernels as qk
from . import qubit_tomography as qt
from .exceptions import TruncationWarning
from .verification import run_suite

QUBIT_DUAL_TOL = 1e-8
BOSON_DUAL_TOL = 1e-6


class UsageError(Exception):
    pass


def _floats(text: str, n: int | None = None, what: str = "value") -> list:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _complex_matrix(obj) -> np.ndarray:
    def entry(v):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise UsageError(f"complex entries are [re, im] pairs, got {v!r}")
            return complex(v[0], v[1])
        return complex(v)

    try:
        return np.array([[entry(v) for v in row] for row in obj], dtype=complex)
    except TypeError:
        raise UsageError(f"cannot read matrix {obj!r}") from None


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None


def parse_qubit_state(text: str) -> qs.DensityMatrix:
    """``bloch:x,y,z`` or ``matrix:<json 2x2>``."""
    kind, _, body = text.partition(":")
    if kind == "bloch":
        return qs.bloch_to_density(_floats(body, 3, "Bloch vector"))
    if kind == "matrix":
        return qs.DensityMatrix(_complex_matrix(_json(body)))
    raise UsageError(f"unknown qubit state descriptor {text!r}")


def parse_qubit_channel(text: str) -> qs.ChannelSpec:
    """Shorthand (identity, pauli:..., affine:..., extreme:..., damping:...,
    kraus:<json>) or a JSON object with a ``kind`` key."""
    text = text.strip()
    if text.startswith("{"):
        return _channel_from_json(_json(text))
    kind, _, body = text.partition(":")
    if kind == "identity":
        return qs.KrausChannel.identity()
    if kind == "pauli":
        return qs.PauliMixture(*_floats(body, 4, "Pauli probabilities"))
    if kind == "affine":
        v = _floats(body, 6, "affine parameters tx,ty,tz,lx,ly,lz")
        return qs.AffineQubitChannel(tuple(v[:3]), tuple(v[3:]))
    if kind == "extreme":
        lx, ly, sign = _floats(body, 3, "extreme-point parameters lx,ly,sign")
        return qs.extreme_point_channel(lx, ly, int(math.copysign(1, sign)))
    if kind in ("damping", "amplitude-damping"):
        return qs.KrausChannel.amplitude_damping(_floats(body, 1, "damping rate")[0])
    if kind == "kraus":
        return qs.KrausChannel(tuple(_complex_matrix(m) for m in _json(body)))
    raise UsageError(f"unknown qubit channel descriptor {text!r}")


def _channel_from_json(obj: dict) -> qs.ChannelSpec:
    kind = obj.get("kind")
    if kind == "pauli":
        return qs.PauliMixture(*obj["probs"])
    if kind == "affine":
        return qs.AffineQubitChannel(tuple(obj["t"]), tuple(obj["lambda"]))
    if kind == "kraus":
        return qs.KrausChannel(tuple(_complex_matrix(m) for m in obj["operators"]))
    raise UsageError(f"unknown channel kind {kind!r}")


def parse_boson_state(text: str) -> bo.BosonicState:
    kind, _, body = text.partition(":")
    if kind == "vacuum":
        return bo.Vacuum()
    if kind == "coherent":
        return bo.Coherent(*_floats(body, 2, "coherent amplitude q,p"))
    if kind == "thermal":
        return bo.Thermal(_floats(body, 1, "mean photon number")[0])
    if kind == "fock":
        n = _floats(body, 1, "Fock index")[0]
        return bo.Fock(int(n) if n == int(n) else n)
    if kind == "squeezed":
        return bo.Squeezed(*_floats(body, 2, "squeezing r,theta"))
    raise UsageError(f"unknown bosonic state descriptor {text!r}")


def _grid(text: str) -> qt.AngularGrid:
    na, nb = _floats(text, 2, "grid n_alpha,n_beta")
    if na != int(na) or nb != int(nb) or na < 1 or nb < 1:
        raise UsageError(f"grid sizes must be positive integers, got {text!r}")
    grid = qt.AngularGrid(int(na), int(nb))
    grid.require_exact()
    return grid


def _optical_grid(text: str | None) -> bo.OpticalGrid:
    if text is None:
        return bo.OpticalGrid()
    L, nx, nphi = _floats(text, 3, "grid L,n_x,n_phi")
    return bo.OpticalGrid(L, int(nx), int(nphi))


@contextmanager
def _sink(path, default):
    if path is None or path == "-":
        yield default
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_report(report: dict, path, default):
    with _sink(path, default) as fh:
        fh.write(json.dumps(report, indent=2) + "\n")


def cmd_qubit_tomogram(args) -> int:
    rho = parse_qubit_state(args.state)
    w = qt.sample_tomogram(rho, _grid(args.grid))
    with _sink(args.output, sys.stdout) as fh:
        qt.write_tomogram_csv(w, fh)
    return 0


def cmd_qubit_channel(args) -> int:
    spec = parse_qubit_channel(args.channel)
    rho = parse_qubit_state(args.state)
    grid = _grid(args.grid)
    cp = qs.is_cp(qs.choi_of(spec))
    direct = qk.direct_output_tomogram(spec, rho, grid)
    kernel = qk.apply_kernel(qk.kernel_for(spec), qt.sample_tomogram(rho, grid))
    out = kernel if args.path == "kernel" else direct
    with _sink(args.output, sys.stdout) as fh:
        qt.write_tomogram_csv(out, fh)
    if args.path != "both":
        if not cp:
            print(f"warning: channel is not completely positive "
                  f"(choi_min_eigenvalue {cp.min_eigenvalue:.6g})", file=sys.stderr)
        return 0
    dev = float(np.max(np.abs(direct.values - kernel.values)))
    report = {
        "path": "both",
        "max_deviation": dev,
        "threshold": QUBIT_DUAL_TOL,
        "passed": dev < QUBIT_DUAL_TOL,
        "choi_min_eigenvalue": cp.min_eigenvalue,
        "cp": cp.is_cp,
    }
    if not cp:
        report["warning"] = "channel is not completely positive: choi_min_eigenvalue < 0"
    _emit_report(report, args.report, sys.stderr)
    return 0 if dev < QUBIT_DUAL_TOL else 1


def cmd_qubit_kernel(args) -> int:
    kernel = qk.kernel_for(parse_qubit_channel(args.channel))
    with _sink(args.output, sys.stdout) as fh:
        qk.write_kernel_csv(kernel, _grid(args.grid), fh)
    return 0


def cmd_qubit_diagnostics(args) -> int:
    kernel = qk.kernel_for(parse_qubit_channel(args.channel))
    diag = qk.kernel_diagnostics(kernel, _grid(args.grid))
    _emit_report(diag.to_dict(), args.report, sys.stdout)
    return 0


def _boson_params(args) -> bo.GaussianChannelParams:
    if args.channel_json:
        obj = _json(args.channel_json)
        try:
            return bo.GaussianChannelParams(obj["kind"], float(obj["k"]), float(obj["alpha"]))
        except KeyError as exc:
            raise UsageError(f"channel JSON lacks key {exc}") from None
    if args.k is None or args.alpha is None:
        raise UsageError("give --k and --alpha, or --channel-json")
    return bo.GaussianChannelParams(args.kind, args.k, args.alpha)


def cmd_boson(args) -> int:
    state = parse_boson_state(args.state)
    params = _boson_params(args)
    grid = _optical_grid(args.grid)
    F = bo.char_fn(state)
    omega = bo.tomogram_from_charfn(F, grid)
    direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, params), grid)
    kernel = bo.apply_gaussian_kernel(omega, params)
    if args.representation == "plane":
        direct_out = bo.plane_distribution(direct)
        kernel_out = bo.apply_plane_channel(bo.plane_distribution(omega), params)
    else:
        direct_out, kernel_out = direct, kernel
    out = kernel_out if args.path == "kernel" else direct_out
    with _sink(args.output, sys.stdout) as fh:
        out.to_csv(fh)

    mean, var = kernel.moments()
    marg = bo.kernel_marginals(params)
    report = {
        "channel": params.to_dict(),
        "representation": args.representation,
        "path": args.path,
        "output_variance": float(np.mean(var)),
        "output_variance_range": [float(var.min()), float(var.max())],
        "output_mean": [float(v) for v in mean],
        "phi": [float(v) for v in grid.phi],
        "normalization_max_dev": float(np.max(np.abs(kernel.normalization() - 1))),
        "kernel_output_marginal": marg.output_integral,
        "kernel_input_marginal": None if marg.input_divergent else marg.input_integral,
        "kernel_input_marginal_divergent": marg.input_divergent,
    }
    if args.representation == "plane":
        report["plane_normalization"] = out.normalization()
    code = 0
    if args.path == "both":
        dev = float(np.max(np.abs(direct_out.values - kernel_out.values)))
        report.update(max_deviation=dev, threshold=BOSON_DUAL_TOL, passed=dev < BOSON_DUAL_TOL)
        code = 0 if dev < BOSON_DUAL_TOL else 1
    _emit_report(report, args.report, sys.stderr)
    return code


def cmd_verify(args) -> int:
    report = run_suite(args.suite)
    _emit_report(report.to_dict(), args.report, sys.stdout)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomochannels",
        description="Quantum channels acting on qubit and optical tomograms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qubit-tomogram", help="sample a qubit tomogram to CSV")
    p.add_argument("--state", required=True, help="bloch:x,y,z or matrix:<json>")
    p.add_argument("--grid", default="8,4", help="n_alpha,n_beta (default 8,4)")
    p.add_argument("--output", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_qubit_tomogram)

    p = sub.add_parser("qubit-channel", help="apply a qubit channel to a tomogram")
    p.add_argument("--channel", required=True,
                   help="identity | pauli:p0,px,py,pz | affine:tx,ty,tz,lx,ly,lz | "
                        "extreme:lx,ly,sign | amplitude-damping:gamma | kraus:<json> | <json object>")
    p.add_argument("--state", required=True)
    p.add_argument("--path", choices=("direct", "kernel", "both"), default="both")
    p.add_argument("--grid", default="8,4")
    p.add_argument("--output")
    p.add_argument("--report", help="JSON report path (default stderr)")
    p.set_defaults(func=cmd_qubit_channel)

    p = sub.add_parser("qubit-kernel", help="dump a channel kernel on grid node pairs")
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", default="8,4")
    p.add_argument("--output")
    p.set_defaults(func=cmd_qubit_kernel)

    p = sub.add_parser("qubit-diagnostics", help="kernel normalisation, negativity and CP report")
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", default="8,4")
    p.add_argument("--report", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_qubit_diagnostics)

    p = sub.add_parser("boson", help="apply a one-mode Gaussian channel")
    p.add_argument("--state", required=True,
                   help="vacuum | coherent:q,p | thermal:n | fock:n | squeezed:r,theta")
    p.add_argument("--kind", choices=("covariant", "contravariant"), default="covariant")
    p.add_argument("--k", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--channel-json", help='{"kind": ..., "k": ..., "alpha": ...}')
    p.add_argument("--representation", choices=("tomogram", "plane"), default="tomogram")
    p.add_argument("--path", choices=("direct", "kernel", "both"), default="both")
    p.add_argument("--grid", help="L,n_x,n_phi (default 8,401,64)")
    p.add_argument("--output")
    p.add_argument("--report", help="JSON report path (default stderr)")
    p.set_defaults(func=cmd_boson)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("suite", choices=("qubit", "boson", "all"))
    p.add_argument("--report", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default", TruncationWarning)
            return args.func(args)
    except (UsageError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
