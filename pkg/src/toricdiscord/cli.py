"""Command line: ``sweep``, ``check`` and ``discord`` subcommands."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import ising, model, quantum
from .lattice import SpinPairKind, build_lattice, edges_to_vertex_support, resolve_pair
from .scan import SweepConfig, detect_critical_point, render_svg, run_sweep, write_csv


def read_density_matrix(path) -> np.ndarray:
    """Plain-text matrix: dimension, then row-major entries as ``re im`` pairs.

    Whitespace and line breaks are interchangeable; ``#`` starts a comment.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read density matrix from {path}: {exc.strerror or exc}") from exc
    tokens = []
    for line in text.splitlines():
        tokens += line.split("#", 1)[0].split()
    if not tokens:
        raise ValueError(f"{path}: empty density-matrix file")
    dim = int(tokens[0])
    numbers = [float(t) for t in tokens[1:]]
    if len(numbers) != 2 * dim * dim:
        raise ValueError(f"{path}: expected {2 * dim * dim} numbers for dimension {dim}, got {len(numbers)}")
    pairs = np.array(numbers).reshape(dim, dim, 2)
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_density_matrix(path, rho) -> None:
    rho = np.asarray(rho, dtype=complex)
    lines = [str(rho.shape[0])]
    for row in rho:
        lines.append("  ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _cmd_sweep(args) -> int:
    config = SweepConfig(
        beta_min=args.beta_min,
        beta_max=args.beta_max,
        steps=args.steps,
        L=args.L,
        ising_size=args.ising_size,
        methods=args.methods,
        pair_kinds=args.pair_kinds,
        output_path=args.output_path,
        emit_svg=args.emit_svg,
        lambda0=args.lambda0,
        lambda1=args.lambda1,
        workers=args.workers,
    )
    rows = run_sweep(config)
    out = Path(config.output_path)
    write_csv(rows, out, config)
    written = [str(out)]
    if config.emit_svg:
        local = [c for c in ("mi_vertex_sharing", "mi_plaquette_parallel")
                 if not math.isnan(getattr(rows[0], c))]
        if local:
            p = out.with_name(out.stem + "_local.svg")
            render_svg(rows, local, p, title="two-spin mutual information")
            written.append(str(p))
        p = out.with_name(out.stem + "_global.svg")
        render_svg(rows, ["discord_global", "mi_global"], p, title="spin vs rest of lattice")
        written.append(str(p))
    summary = {"rows": len(rows), "written": written}
    if len(rows) >= 5:
        summary["beta_star_discord_global"] = detect_critical_point(rows, "discord_global")
    print(json.dumps(summary))
    return 0


def _check_lines():
    """Eigenstate and cross-method checks; yields (name, ok, detail)."""
    for L in (2, 3):
        lat = build_lattice(L)
        worst = 0.0
        for beta in (0.0, 0.25, ising.BETA_C, 0.8):
            worst = max(worst, model.eigen_residual(model.build_ground_state(lat, beta)))
        yield f"eigenstate L={L}", worst < 1e-10, f"max residual {worst:.2e}"

    for L in (2, 3):
        lat = build_lattice(L)
        gs = model.build_ground_state(lat, 0.4)
        im = ising.IsingModel(L, L, 0.4)
        worst = 0.0
        for e in range(lat.n_edges):
            for edges in ([0, e], [e]) if e else ([0],):
                val = model.expectation(gs, model.PauliString.z(*edges))
                ref = ising.brute_force_moment(im, edges_to_vertex_support(lat, edges)).value
                worst = max(worst, abs(val - ref))
        yield f"ising mapping L={L}", worst < 1e-12, f"max deviation {worst:.2e}"

    for Lx, Ly in ((3, 3), (4, 3)):
        m = ising.IsingModel(Lx, Ly, 0.3)
        dz = abs(ising.transfer_matrix_log_partition(m) - ising.brute_force_log_partition(m))
        sets = [(0, 1), (0, Lx), (1, Lx), (0, 1, Lx, Lx + 1), (0, 2 * Lx + 2)]
        tms = ising.transfer_matrix_moments(m, sets)
        dm = max(abs(t.value - ising.brute_force_moment(m, s).value) for t, s in zip(tms, sets))
        worst = max(dz, dm)
        yield f"transfer vs brute force {Lx}x{Ly}", worst < 1e-10, f"max deviation {worst:.2e}"

    val = ising.onsager_nn_correlation(ising.BETA_C)
    yield "closed form at beta_c", abs(val - math.sqrt(0.5)) < 1e-6, f"{val:.10f}"

    lat = build_lattice(3)
    gs = model.build_ground_state(lat, ising.BETA_C)
    worst = 0.0
    for kind in SpinPairKind:
        pair = resolve_pair(lat, kind)
        worst = max(worst, quantum.quantum_discord(model.reduced_two_spin(gs, pair.i, pair.j)))
    yield "local discord L=3", worst < 1e-8, f"max {worst:.2e}"


def _cmd_check(args) -> int:
    failed = 0
    for name, ok, detail in _check_lines():
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 1 if failed else 0


def _cmd_discord(args) -> int:
    rho = read_density_matrix(args.path)
    if rho.shape[0] != 4:
        raise ValueError(f"discord needs a 4x4 two-qubit state, got {rho.shape[0]}x{rho.shape[0]}")
    rho = quantum.check_density_matrix(rho, 4)
    res = quantum.discord_details(rho, grid=args.grid)
    report = {
        "S_A": quantum.von_neumann_entropy(quantum.partial_trace_B(rho)),
        "S_B": quantum.von_neumann_entropy(quantum.partial_trace_A(rho)),
        "S_AB": quantum.von_neumann_entropy(rho),
        "mutual_information": res.mutual_information,
        "classical_correlation": res.classical_correlation,
        "discord": res.discord,
        "theta": res.basis.theta,
        "phi": res.basis.phi,
    }
    if args.json:
        print(json.dumps(report))
    else:
        for k, v in report.items():
            print(f"{k:22s} {v:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricdiscord", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    d = SweepConfig()
    s = sub.add_parser("sweep", help="observables over a beta grid, written as CSV")
    s.add_argument("--beta-min", type=float, default=d.beta_min)
    s.add_argument("--beta-max", type=float, default=d.beta_max)
    s.add_argument("--steps", type=int, default=d.steps)
    s.add_argument("--L", type=int, default=None, help="exact state-vector lattice size (2-4)")
    s.add_argument("--ising-size", type=int, default=d.ising_size)
    s.add_argument("--methods", type=_csv_list, default=d.methods,
                   help="comma list of BruteForce, TransferMatrix, Onsager")
    s.add_argument("--pair-kinds", type=_csv_list, default=d.pair_kinds,
                   help="comma list of vertex_sharing, plaquette_parallel")
    s.add_argument("--output-path", default=d.output_path)
    s.add_argument("--emit-svg", action="store_true")
    s.add_argument("--lambda0", type=float, default=d.lambda0)
    s.add_argument("--lambda1", type=float, default=d.lambda1)
    s.add_argument("--workers", type=int, default=d.workers)
    s.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("check", help="eigenstate and cross-method self-checks")
    c.set_defaults(func=_cmd_check)

    q = sub.add_parser("discord", help="discord report for a two-qubit density matrix file")
    q.add_argument("path")
    q.add_argument("--grid", type=int, default=64)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=_cmd_discord)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # reported as one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
