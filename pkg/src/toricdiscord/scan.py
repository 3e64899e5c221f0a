"""Sweeps of every correlation observable over a grid of beta values."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .ising import (
    BETA_C,
    BRUTE_FORCE_MAX_SITES,
    TRANSFER_MAX_WIDTH,
    IsingModel,
    Method,
    brute_force_moment,
    onsager_nn_correlation,
    transfer_matrix_moments,
)
from .lattice import SpinPairKind, build_lattice, edges_to_vertex_support, resolve_pair
from .model import (
    MAX_STATE_L,
    PauliString,
    build_ground_state,
    eigen_residual,
    expectation,
    global_discord,
    reduced_two_spin,
    spin_vs_rest,
    two_spin_from_moments,
)
from .quantum import mutual_information, quantum_discord

BETA_CAP = 3.0
STATE_VECTOR = "StateVector"
EIGEN_TOL = 1e-8


@dataclass(frozen=True)
class SweepConfig:
    beta_min: float = 0.0
    beta_max: float = 1.5
    steps: int = 151
    L: int | None = None  # quantum lattice size; None uses the Ising route
    ising_size: int = 12
    methods: tuple[str, ...] = ("Onsager", "TransferMatrix")
    pair_kinds: tuple[str, ...] = ("vertex_sharing", "plaquette_parallel")
    output_path: str | None = "sweep.csv"
    emit_svg: bool = False
    lambda0: float = 1.0
    lambda1: float = 1.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(Method(m).value for m in self.methods))
        object.__setattr__(
            self, "pair_kinds", tuple(SpinPairKind(k).value for k in self.pair_kinds)
        )
        if not 0.0 <= self.beta_min < self.beta_max <= BETA_CAP:
            raise ValueError(
                f"need 0 <= beta_min < beta_max <= {BETA_CAP}, got [{self.beta_min}, {self.beta_max}]"
            )
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if self.lambda0 <= 0 or self.lambda1 <= 0:
            raise ValueError("lambda0 and lambda1 must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.L is None and not self.methods:
            raise ValueError("the Ising route needs at least one method")

    @property
    def betas(self) -> np.ndarray:
        return np.linspace(self.beta_min, self.beta_max, self.steps)

    @property
    def kinds(self) -> tuple[SpinPairKind, ...]:
        return tuple(SpinPairKind(k) for k in self.pair_kinds)

    @property
    def global_method(self) -> str:
        if self.L is not None:
            return STATE_VECTOR
        for m in (Method.Onsager, Method.TransferMatrix, Method.BruteForce):
            if m.value in self.methods:
                return m.value
        raise ValueError("no method available for global quantities")

    @property
    def local_method(self) -> str:
        if self.L is not None:
            return STATE_VECTOR
        if Method.BruteForce.value in self.methods and Method.TransferMatrix.value not in self.methods:
            return Method.BruteForce.value
        # the closed form has no two-spin correlators; fall back to the transfer matrix
        return Method.TransferMatrix.value

    def check_feasible(self):
        """Raise with the offending limit if a requested method cannot run."""
        if self.L is not None:
            if not 2 <= self.L <= MAX_STATE_L:
                raise ValueError(f"StateVector: L={self.L} outside [2, {MAX_STATE_L}]")
            return
        n = self.ising_size
        used = {self.global_method, self.local_method}
        if n < 2:
            raise ValueError(f"ising_size must be >= 2, got {n}")
        if Method.TransferMatrix.value in used and n > TRANSFER_MAX_WIDTH:
            raise ValueError(f"TransferMatrix: ising_size={n} exceeds width limit {TRANSFER_MAX_WIDTH}")
        if Method.BruteForce.value in used and n * n > BRUTE_FORCE_MAX_SITES:
            raise ValueError(
                f"BruteForce: ising_size={n} gives {n * n} sites, limit {BRUTE_FORCE_MAX_SITES}"
            )


@dataclass(frozen=True)
class SweepRow:
    beta: float
    sigma_z: float
    theta_theta_nn: float
    mi_vertex_sharing: float
    mi_plaquette_parallel: float
    discord_local: float
    a_sq: float
    discord_global: float
    mi_global: float
    global_method: str
    local_method: str
    finite_size_flag: bool

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


_MI_COLUMN = {
    SpinPairKind.VertexSharing: "mi_vertex_sharing",
    SpinPairKind.PlaquetteParallel: "mi_plaquette_parallel",
}


def _local_columns(states: Mapping[SpinPairKind, np.ndarray]) -> dict[str, float]:
    out = {col: math.nan for col in _MI_COLUMN.values()}
    discords = []
    for kind, rho in states.items():
        out[_MI_COLUMN[kind]] = mutual_information(rho)
        discords.append(quantum_discord(rho))
    out["discord_local"] = max(discords) if discords else math.nan
    return out


def _state_vector_row(beta: float, config: SweepConfig) -> SweepRow:
    lat = build_lattice(config.L)
    gs = build_ground_state(lat, beta)
    residual = eigen_residual(gs, config.lambda0, config.lambda1)
    if residual > EIGEN_TOL:
        raise RuntimeError(f"eigenstate self-check failed at beta={beta}: residual {residual:.3e}")
    edge = lat.horizontal_edge(0, 0)
    a_sq, b_sq = spin_vs_rest(gs, edge)
    states = {}
    for kind in config.kinds:
        pair = resolve_pair(lat, kind)
        states[kind] = reduced_two_spin(gs, pair.i, pair.j)
    d, mi = global_discord(a_sq, b_sq)
    return SweepRow(
        beta=float(beta),
        sigma_z=expectation(gs, PauliString.z(edge)),
        theta_theta_nn=a_sq - b_sq,
        a_sq=a_sq,
        discord_global=d,
        mi_global=mi,
        global_method=STATE_VECTOR,
        local_method=STATE_VECTOR,
        finite_size_flag=False,
        **_local_columns(states),
    )


def _ising_row(beta: float, config: SweepConfig) -> SweepRow:
    n = config.ising_size
    model = IsingModel(n, n, float(beta))
    lat = build_lattice(n)
    gmeth, lmeth = config.global_method, config.local_method

    edge = lat.horizontal_edge(0, 0)
    sets = [edges_to_vertex_support(lat, [edge])]
    for kind in config.kinds:
        pair = resolve_pair(lat, kind)
        sets += [
            edges_to_vertex_support(lat, [pair.i]),
            edges_to_vertex_support(lat, [pair.j]),
            edges_to_vertex_support(lat, [pair.i, pair.j]),
        ]
    if lmeth == Method.TransferMatrix.value:
        values = [m.value for m in transfer_matrix_moments(model, sets)]
    else:
        values = [brute_force_moment(model, s).value for s in sets]

    states = {
        kind: two_spin_from_moments(*values[1 + 3 * i: 4 + 3 * i])
        for i, kind in enumerate(config.kinds)
    }
    if gmeth == Method.Onsager.value:
        nn = onsager_nn_correlation(float(beta))
    elif gmeth == lmeth:
        nn = values[0]
    elif gmeth == Method.TransferMatrix.value:
        nn = transfer_matrix_moments(model, sets[:1])[0].value
    else:
        nn = brute_force_moment(model, sets[0]).value
    a_sq, b_sq = (1.0 + nn) / 2.0, (1.0 - nn) / 2.0
    d, mi = global_discord(a_sq, b_sq)
    return SweepRow(
        beta=float(beta),
        sigma_z=nn,
        theta_theta_nn=nn,
        a_sq=a_sq,
        discord_global=d,
        mi_global=mi,
        global_method=gmeth,
        local_method=lmeth,
        finite_size_flag=gmeth == Method.Onsager.value,
        **_local_columns(states),
    )


def evaluate_point(beta: float, config: SweepConfig) -> SweepRow:
    """All observables at a single beta."""
    if not 0.0 <= beta <= BETA_CAP:
        raise ValueError(f"beta must lie in [0, {BETA_CAP}], got {beta}")
    config.check_feasible()
    if config.L is not None:
        return _state_vector_row(beta, config)
    return _ising_row(beta, config)


def _evaluate(args):
    return evaluate_point(*args)


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    config.check_feasible()
    jobs = [(float(b), config) for b in config.betas]
    if config.workers == 1:
        return [_evaluate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(_evaluate, jobs))


# ------------------------------------------------------------ critical point


def _column(rows: Sequence[Any], column: str) -> np.ndarray:
    out = []
    for r in rows:
        out.append(r[column] if isinstance(r, Mapping) else getattr(r, column))
    return np.asarray(out, dtype=float)


def _flat(profile: np.ndarray) -> bool:
    top = profile.max()
    if top <= 0:
        return True
    med = np.median(profile)
    return med > 0 and top / med < 2.0


def locate_peak(betas: Sequence[float], values: Sequence[float]) -> float | None:
    """beta where the curve changes fastest, or None if nothing stands out.

    Uses the peak of |dy/dbeta| (central differences).  When that profile is
    flat, a kink still shows up as an isolated peak of |d2y/dbeta2|.
    """
    b = np.asarray(betas, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(b) < 5 or len(b) != len(y):
        raise ValueError("need at least 5 (beta, value) points")
    steps = np.diff(b)
    h = steps[0]
    if h <= 0 or not np.allclose(steps, h, rtol=1e-6, atol=0.0):
        raise ValueError("beta grid must be uniform and increasing")
    inner = b[1:-1]
    slope = np.abs(y[2:] - y[:-2]) / (2 * h)
    if not _flat(slope):
        return float(inner[np.argmax(slope)])
    curvature = np.abs(y[2:] - 2 * y[1:-1] + y[:-2]) / h**2
    # rounding noise of the second difference
    floor = 64 * np.finfo(float).eps * max(np.abs(y).max(), 1.0) / h**2
    curvature = np.where(curvature > floor, curvature, 0.0)
    if _flat(curvature):
        return None
    return float(inner[np.argmax(curvature)])


def detect_critical_point(rows: Sequence[Any], column: str) -> float | None:
    return locate_peak(_column(rows, "beta"), _column(rows, column))


# ------------------------------------------------------------------- output


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(rows: Iterable[SweepRow], path, config: SweepConfig | None = None) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            if config is not None:
                fh.write("# toricdiscord sweep\n")
                for key, value in asdict(config).items():
                    fh.write(f"# {key} = {json.dumps(value)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SweepRow.columns())
            for row in rows:
                writer.writerow([_format(getattr(row, c)) for c in SweepRow.columns()])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> list[dict[str, Any]]:
    """Rows of a sweep CSV, numeric columns as floats."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        row: dict[str, Any] = {}
        for k, v in rec.items():
            if v in ("true", "false"):
                row[k] = v == "true"
            else:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def render_svg(rows: Sequence[Any], columns: Sequence[str], path, title: str | None = None) -> None:
    """Static plot of ``columns`` against beta with a marker at beta_c."""
    if len(rows) < 2:
        raise ValueError("need at least 2 rows to plot")
    if not columns:
        raise ValueError("no columns to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    beta = _column(rows, "beta")
    styles = ["-", "--", ":", "-."]
    path = Path(path)
    # fixed hash salt and no timestamp keep reruns byte-identical; text stays text
    with plt.rc_context({"svg.hashsalt": "toricdiscord", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        try:
            for i, col in enumerate(columns):
                ax.plot(beta, _column(rows, col), styles[i % len(styles)], color="k", label=col)
            ax.axvline(BETA_C, color="tab:red", lw=0.8, ls="--", label="beta_c")
            ax.set_xlabel("beta")
            ax.set_ylabel(", ".join(columns))
            if title:
                ax.set_title(title)
            ax.legend(frameon=False)
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write SVG to {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
