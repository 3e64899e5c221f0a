"""Exact spin moments of the zero-field 2D Ising model on a torus.

Three independent routes to <prod theta_s>:

* brute-force enumeration (small lattices, the reference for everything else),
* a row transfer matrix contracted exactly on the torus,
* the thermodynamic-limit nearest-neighbour correlation in closed form.

Sites are indexed row-major, ``v = r * Lx + c``; rows run along the transfer
direction.  Every site is bonded to its right and lower neighbour, so a
width-2 torus carries doubled bonds, matching the edge-spin lattice.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

BRUTE_FORCE_MAX_SITES = 20
TRANSFER_MAX_WIDTH = 16
TRANSFER_MAX_ARITY = 6
# widths up to this keep whole matrix powers in memory; wider ones stream column chunks
_DENSE_MAX_WIDTH = 12
_CHUNK_BYTES = 64 * 2**20
_GROUP_SITES = 6

BETA_C = 0.5 * math.log(1.0 + math.sqrt(2.0))


class Method(str, enum.Enum):
    BruteForce = "BruteForce"
    TransferMatrix = "TransferMatrix"
    Onsager = "Onsager"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class IsingModel:
    """Ferromagnetic Ising model H = -sum_<ss'> theta_s theta_s' on an Lx x Ly torus."""

    Lx: int
    Ly: int
    beta: float
    boundary: str = "torus"

    def __post_init__(self):
        if int(self.Lx) != self.Lx or int(self.Ly) != self.Ly or self.Lx < 2 or self.Ly < 2:
            raise ValueError(f"torus dimensions must be integers >= 2, got {self.Lx}x{self.Ly}")
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if self.boundary != "torus":
            raise ValueError("only torus boundary conditions are supported")

    @property
    def n_sites(self) -> int:
        return self.Lx * self.Ly

    def site(self, r: int, c: int) -> int:
        return (r % self.Ly) * self.Lx + (c % self.Lx)

    def bonds(self) -> np.ndarray:
        out = []
        for r in range(self.Ly):
            for c in range(self.Lx):
                out.append((self.site(r, c), self.site(r, c + 1)))
                out.append((self.site(r, c), self.site(r + 1, c)))
        return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class IsingMoment:
    vertex_set: tuple[int, ...]
    method: Method
    value: float
    error_bound: float = 0.0
    finite_size: bool = False


def reduce_vertex_set(model: IsingModel, vertex_set: Iterable[int]) -> tuple[int, ...]:
    """Sorted vertices appearing an odd number of times (theta**2 = 1)."""
    counts = Counter()
    for v in vertex_set:
        v = int(v)
        if not 0 <= v < model.n_sites:
            raise ValueError(f"vertex {v} outside [0, {model.n_sites})")
        counts[v] += 1
    return tuple(sorted(v for v, n in counts.items() if n % 2))


# ---------------------------------------------------------------- brute force


@lru_cache(maxsize=4)
def _enumerate(Lx: int, Ly: int) -> tuple[np.ndarray, np.ndarray]:
    """All spin configurations and their bond sums sum_<ss'> theta_s theta_s'."""
    n = Lx * Ly
    idx = np.arange(2**n, dtype=np.uint32)
    spins = (1 - 2 * ((idx[:, None] >> np.arange(n, dtype=np.uint32)) & 1)).astype(np.int8)
    bond_sum = np.zeros(2**n, dtype=np.int16)
    for a, b in IsingModel(Lx, Ly, 0.0).bonds():
        bond_sum += spins[:, a] * spins[:, b]
    spins.setflags(write=False)
    bond_sum.setflags(write=False)
    return spins, bond_sum


def _check_brute_force_size(model: IsingModel):
    if model.n_sites > BRUTE_FORCE_MAX_SITES:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_SITES} sites, "
            f"{model.Lx}x{model.Ly} has {model.n_sites}"
        )


def _weights(model: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    spins, bond_sum = _enumerate(model.Lx, model.Ly)
    top = 2 * model.n_sites
    # weights relative to the fully aligned configuration
    w = np.exp(model.beta * (bond_sum.astype(np.float64) - top))
    return spins, w


def brute_force_log_partition(model: IsingModel) -> float:
    _check_brute_force_size(model)
    _, w = _weights(model)
    return float(np.log(w.sum()) + model.beta * 2 * model.n_sites)


def brute_force_moment(model: IsingModel, vertex_set: Iterable[int]) -> IsingMoment:
    _check_brute_force_size(model)
    verts = reduce_vertex_set(model, vertex_set)
    if not verts:
        return IsingMoment(verts, Method.BruteForce, 1.0)
    spins, w = _weights(model)
    prod = np.prod(spins[:, list(verts)], axis=1, dtype=np.int8)
    value = float(np.dot(w, prod) / w.sum())
    return IsingMoment(verts, Method.BruteForce, value)


def constrained_partition_fraction(model: IsingModel, r: int, s: int, sign: int) -> float:
    """Share of Z carried by configurations with theta_r * theta_s == sign."""
    _check_brute_force_size(model)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    r, s = int(r), int(s)
    for v in (r, s):
        if not 0 <= v < model.n_sites:
            raise ValueError(f"vertex {v} outside [0, {model.n_sites})")
    spins, w = _weights(model)
    keep = spins[:, r] * spins[:, s] == sign
    return float(w[keep].sum() / w.sum())


# ------------------------------------------------------------ transfer matrix


class _RowTransfer:
    """Scaled row-to-row transfer operator T(s, s') = W(s) K(s, s').

    W carries the bonds inside a row, K the vertical bonds to the next row.
    Both are divided by exp(beta * Lx) so the entries of T stay in (0, 1];
    ``log_scale`` is the per-row factor removed.
    """

    def __init__(self, Lx: int, Ly: int, beta: float):
        self.Lx, self.Ly, self.beta = Lx, Ly, beta
        self.dim = 2**Lx
        self.log_scale = 2.0 * beta * Lx
        n = np.arange(self.dim)
        # column 0 is the most significant bit, matching the Kronecker ordering of K
        self.spins = 1 - 2 * ((n[:, None] >> (Lx - 1 - np.arange(Lx))) & 1)
        row_bonds = (self.spins * np.roll(self.spins, -1, axis=1)).sum(axis=1)
        self.row_weight = np.exp(beta * (row_bonds - Lx))
        site = np.array([[1.0, math.exp(-2.0 * beta)], [math.exp(-2.0 * beta), 1.0]])
        self.factors = []
        remaining = Lx
        while remaining:
            g = min(_GROUP_SITES, remaining)
            f = np.ones((1, 1))
            for _ in range(g):
                f = np.kron(f, site)
            self.factors.append(f)
            remaining -= g
        self.dense = Lx <= _DENSE_MAX_WIDTH
        self._powers: dict[int, np.ndarray] = {}

    def apply(self, X: np.ndarray) -> np.ndarray:
        """T @ X for X of shape (dim, m), using the Kronecker structure of K."""
        m = X.shape[1]
        Y = X
        pre = 1
        for f in self.factors:
            d = f.shape[0]
            post = self.dim // (pre * d)
            Y = np.matmul(f, Y.reshape(pre, d, post * m)).reshape(self.dim, m)
            pre *= d
        return self.row_weight[:, None] * Y

    def power(self, g: int) -> np.ndarray:
        if g in self._powers:
            return self._powers[g]
        below = [h for h in self._powers if h < g]
        if below:
            h = max(below)
            P = self._powers[h]
        else:
            h = 0
            P = np.eye(self.dim)
        for step in range(h + 1, g + 1):
            P = self.apply(P)
            # keep the penultimate power too: torus traces need T^(Ly-1) right after T^Ly
            if step == g - 1:
                self._powers[step] = P
        self._powers[g] = P
        return P

    def chain_trace(self, row_diags: dict[int, np.ndarray]) -> float:
        """Tr prod_{r=0}^{Ly-1} (D_r T) with D_r = 1 for rows not in ``row_diags``."""
        Ly = self.Ly
        if not row_diags:
            return float(np.trace(self.power(Ly))) if self.dense else self._chunked([], [Ly])
        rows = sorted(row_diags)
        gaps = [rows[i + 1] - rows[i] for i in range(len(rows) - 1)] + [Ly - rows[-1] + rows[0]]
        # rotate so the widest gap comes last and is served from the power cache
        k = int(np.argmax(gaps))
        rows = rows[k + 1:] + rows[: k + 1]
        gaps = gaps[k + 1:] + gaps[: k + 1]
        diags = [row_diags[r] for r in rows]
        if not self.dense:
            return self._chunked(diags, gaps)
        Y = diags[-1][:, None] * self.power(gaps[-1])
        for d, g in zip(reversed(diags[:-1]), reversed(gaps[:-1])):
            for _ in range(g):
                Y = self.apply(Y)
            Y = d[:, None] * Y
        return float(np.trace(Y))

    def _chunked(self, diags: Sequence[np.ndarray], gaps: Sequence[int]) -> float:
        total = 0.0
        width = max(1, _CHUNK_BYTES // (8 * self.dim))
        diags = list(diags) if diags else [np.ones(self.dim)]
        for start in range(0, self.dim, width):
            cols = np.arange(start, min(start + width, self.dim))
            Y = np.zeros((self.dim, len(cols)))
            Y[cols, np.arange(len(cols))] = 1.0
            for d, g in zip(reversed(diags), reversed(gaps)):
                for _ in range(g):
                    Y = self.apply(Y)
                Y = d[:, None] * Y
            total += float(Y[cols, np.arange(len(cols))].sum())
        return total

    def row_diagonals(self, model: IsingModel, verts: Sequence[int]) -> dict[int, np.ndarray]:
        diags: dict[int, np.ndarray] = {}
        for v in verts:
            r, c = divmod(v, model.Lx)
            col = self.spins[:, c].astype(np.float64)
            diags[r] = diags[r] * col if r in diags else col
        return diags


def _check_transfer_size(model: IsingModel):
    if model.Lx > TRANSFER_MAX_WIDTH:
        raise ValueError(
            f"transfer matrix limited to width {TRANSFER_MAX_WIDTH} "
            f"(dimension 2^{TRANSFER_MAX_WIDTH}), got Lx={model.Lx}"
        )


@lru_cache(maxsize=1)
def _transfer(model: IsingModel) -> _RowTransfer:
    return _RowTransfer(model.Lx, model.Ly, model.beta)


def transfer_matrix_log_partition(model: IsingModel) -> float:
    _check_transfer_size(model)
    tm = _transfer(model)
    return math.log(tm.chain_trace({})) + model.Ly * tm.log_scale


def transfer_matrix_moments(model: IsingModel, vertex_sets: Iterable[Iterable[int]]) -> list[IsingMoment]:
    """Several moments at one temperature, sharing the cached matrix powers."""
    _check_transfer_size(model)
    reduced = [reduce_vertex_set(model, vs) for vs in vertex_sets]
    for verts in reduced:
        if len(verts) > TRANSFER_MAX_ARITY:
            raise ValueError(
                f"transfer-matrix moments support at most {TRANSFER_MAX_ARITY} vertices, "
                f"got {len(verts)}"
            )
    tm = _transfer(model)
    z = tm.chain_trace({})
    out = []
    for verts in reduced:
        value = tm.chain_trace(tm.row_diagonals(model, verts)) / z if verts else 1.0
        out.append(IsingMoment(verts, Method.TransferMatrix, float(value)))
    return out


def transfer_matrix_moment(model: IsingModel, vertex_set: Iterable[int]) -> IsingMoment:
    return transfer_matrix_moments(model, [vertex_set])[0]


def moment(model: IsingModel, vertex_set: Iterable[int], method: Method | str) -> IsingMoment:
    method = Method(method)
    if method is Method.BruteForce:
        return brute_force_moment(model, vertex_set)
    if method is Method.TransferMatrix:
        return transfer_matrix_moment(model, vertex_set)
    raise ValueError("the closed form covers only the nearest-neighbour moment; use onsager_nn_correlation")


# ---------------------------------------------------------- thermodynamic limit


def _agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def _elliptic_K_complement(kp: float) -> float:
    """K expressed through the complementary modulus k' = sqrt(1 - k^2)."""
    if kp <= 0.0:
        raise ValueError("complete elliptic integral diverges at k = 1")
    return math.pi / (2.0 * _agm(1.0, kp))


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention K(k).

    K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), evaluated by the
    arithmetic-geometric mean.
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"elliptic_K requires 0 <= k < 1, got {k}")
    return _elliptic_K_complement(math.sqrt((1.0 - k) * (1.0 + k)))


def onsager_nn_correlation(beta: float) -> float:
    """Infinite-lattice nearest-neighbour correlation <theta_0 theta_1>.

    coth(2b) * [1/2 + (2 tanh^2(2b) - 1) K(k1) / pi],  k1 = 2 sinh(2b) / cosh^2(2b).

    The prefactor (2 tanh^2 - 1) equals +-k1' in magnitude, so the product
    with K(k1) is computed from k1' directly and vanishes smoothly at the
    critical point, where K(k1) diverges.
    """
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    if beta == 0.0:
        return 0.0
    if beta < 1e-3:
        # high-temperature series, t = tanh(beta)
        t = math.tanh(beta)
        return t + 2 * t**3 + 4 * t**5
    sh, ch = math.sinh(2 * beta), math.cosh(2 * beta)
    prefactor = (sh - 1.0) * (sh + 1.0) / (ch * ch)
    kp = abs(prefactor)
    term = 0.0 if kp == 0.0 else prefactor * _elliptic_K_complement(kp)
    return (ch / sh) * (0.5 + term / math.pi)
