"""Exact ground state of the deformed toric code and its reduced states.

The ground state in the sector of the fully magnetized state |0> is a
superposition over the star-operator orbit of |0>, each configuration x
weighted by exp(beta * sum_i sigma_i(x) / 2).  Configurations are stored as
integer bitstrings over the edges (bit e set = spin e flipped down).

Group elements are enumerated as vertex labellings theta with theta_0
pinned, since flipping every theta gives the same configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .ising import (
    IsingModel,
    Method,
    brute_force_moment,
    onsager_nn_correlation,
    transfer_matrix_moments,
)
from .lattice import SpinPairKind, TorusLattice, build_lattice, edges_to_vertex_support, resolve_pair
from .quantum import shannon_entropy

MAX_STATE_L = 4


@dataclass(frozen=True, eq=False)
class GroundState:
    lattice: TorusLattice
    beta: float
    configs: np.ndarray  # sorted uint64 bitstrings
    amplitudes: np.ndarray
    # log of sum_{g in G} exp(beta * sum_i sigma_i(g)); the Ising Z is twice this
    log_normalizer: float

    def __len__(self) -> int:
        return len(self.configs)

    @property
    def ising_log_partition(self) -> float:
        return self.log_normalizer + math.log(2.0)

    def index(self, xs: np.ndarray) -> np.ndarray:
        """Positions of ``xs`` in the support, -1 where absent."""
        xs = np.asarray(xs, dtype=np.uint64)
        pos = np.searchsorted(self.configs, xs)
        pos = np.minimum(pos, len(self.configs) - 1)
        return np.where(self.configs[pos] == xs, pos, -1)

    def amplitude(self, x: int) -> float:
        i = int(self.index(np.array([x], dtype=np.uint64))[0])
        return float(self.amplitudes[i]) if i >= 0 else 0.0


@dataclass(frozen=True)
class SparseState:
    configs: np.ndarray
    values: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _orbit(lattice: TorusLattice) -> np.ndarray:
    n = lattice.n_vertices
    # bit s of t is 1 when theta_s = -1; vertex 0 stays at theta = +1
    t = np.arange(2 ** (n - 1), dtype=np.uint64) << np.uint64(1)
    x = np.zeros_like(t)
    one = np.uint64(1)
    for e, (a, b) in enumerate(lattice.edge_endpoints):
        bit = ((t >> np.uint64(a)) ^ (t >> np.uint64(b))) & one
        x |= bit << np.uint64(e)
    return np.sort(x)


def build_ground_state(lattice: TorusLattice, beta: float) -> GroundState:
    if lattice.L > MAX_STATE_L:
        raise ValueError(
            f"state-vector construction limited to L <= {MAX_STATE_L} "
            f"(orbit size 2^(L^2-1)), got L={lattice.L}"
        )
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    configs = _orbit(lattice)
    magnetization = lattice.n_edges - 2 * _popcount(configs)
    log_w = 0.5 * beta * magnetization.astype(np.float64)
    top = log_w.max()
    log_norm = 2 * top + math.log(np.exp(2 * (log_w - top)).sum())
    amps = np.exp(log_w - 0.5 * log_norm)
    configs.setflags(write=False)
    amps.setflags(write=False)
    return GroundState(lattice, float(beta), configs, amps, float(log_norm))


def min_orbit_distance(state: GroundState) -> int:
    """Smallest Hamming distance between two distinct orbit configurations.

    The orbit is a group under XOR, so this is the lightest nonzero element.
    """
    weights = _popcount(state.configs)
    return int(weights[weights > 0].min())


def apply_hamiltonian(
    state: GroundState, lambda0: float = 1.0, lambda1: float = 1.0, beta: float | None = None
) -> SparseState:
    """H |state> for the deformed toric-code Hamiltonian.

    ``beta`` is the deformation inside H; it defaults to the state's own
    value.  Star flips keep the orbit closed, so the result lives on the
    same support.
    """
    if lambda0 <= 0 or lambda1 <= 0:
        raise ValueError("lambda0 and lambda1 must be positive")
    beta = state.beta if beta is None else float(beta)
    lat = state.lattice
    x, psi = state.configs, state.amplitudes
    out = np.zeros_like(psi)
    for p in range(lat.n_plaquettes):
        mask = np.uint64(lat.plaquette_mask(p))
        out -= lambda0 * (1 - 2 * (_popcount(x & mask) & 1)) * psi
    for s in range(lat.n_vertices):
        mask = np.uint64(lat.star_mask(s))
        idx = state.index(x ^ mask)
        if np.any(idx < 0):
            raise RuntimeError("star flip left the orbit support")
        # sum of sigma^z over the star: 4 minus twice the number of down spins
        star_sum = 4 - 2 * _popcount(x & mask)
        out += lambda1 * (np.exp(-beta * star_sum) * psi - psi[idx])
    return SparseState(x, out)


def eigen_residual(
    state: GroundState, lambda0: float = 1.0, lambda1: float = 1.0, beta: float | None = None
) -> float:
    """|| H|GS> + lambda0 * L^2 |GS> ||."""
    h = apply_hamiltonian(state, lambda0, lambda1, beta)
    target = -lambda0 * state.lattice.n_plaquettes * state.amplitudes
    return float(np.linalg.norm(h.values - target))


_PAULI = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    ops: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for e, p in dict(self.ops).items():
            p = p.upper()
            if p not in _PAULI:
                raise ValueError(f"unknown Pauli label {p!r}")
            if int(e) < 0:
                raise ValueError(f"negative edge index {e}")
            if p != "I":
                clean[int(e)] = p
        object.__setattr__(self, "ops", clean)

    @classmethod
    def z(cls, *edges: int) -> "PauliString":
        return cls({e: "Z" for e in edges})

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse tokens like ``"Z0 X5 Y12"``."""
        ops = {}
        for tok in text.split():
            e = int(tok[1:])
            if e in ops:
                raise ValueError(f"edge {e} appears twice in {text!r}")
            ops[e] = tok[0]
        return cls(ops)

    @property
    def x_mask(self) -> int:
        return sum(1 << e for e, p in self.ops.items() if p in "XY")

    @property
    def z_mask(self) -> int:
        return sum(1 << e for e, p in self.ops.items() if p in "ZY")

    @property
    def n_y(self) -> int:
        return sum(p == "Y" for p in self.ops.values())


def expectation(state: GroundState, op: PauliString) -> float:
    lat = state.lattice
    lat.check_edges(op.ops)
    x, psi = state.configs, state.amplitudes
    # Y = i X Z, so P|x> = i^nY (-1)^{|x & zmask|} |x ^ xmask>
    idx = state.index(x ^ np.uint64(op.x_mask))
    hit = idx >= 0
    sign = 1 - 2 * (_popcount(x[hit] & np.uint64(op.z_mask)) & 1)
    total = (1j ** op.n_y) * np.sum(psi[hit] * sign * psi[idx[hit]])
    if abs(total.imag) > 1e-12:
        raise RuntimeError(f"non-Hermitian expectation {total}")
    return float(total.real)


def reduced_density_matrix(state: GroundState, edges: tuple[int, ...]) -> np.ndarray:
    """Partial trace of |GS><GS| onto ``edges``; the first edge is the leading factor."""
    lat = state.lattice
    edges = tuple(lat.check_edges(edges))
    if len(set(edges)) != len(edges):
        raise ValueError(f"repeated edge in {edges}")
    x = state.configs
    local = np.zeros(len(x), dtype=np.int64)
    keep = np.uint64(0)
    for e in edges:
        local = 2 * local + ((x >> np.uint64(e)) & np.uint64(1)).astype(np.int64)
        keep |= np.uint64(1 << e)
    rest_keys, rest = np.unique(x & ~keep, return_inverse=True)
    M = np.zeros((len(rest_keys), 2 ** len(edges)))
    M[rest, local] = state.amplitudes
    return (M.T @ M).astype(complex)


def reduced_two_spin(state: GroundState, i: int, j: int) -> np.ndarray:
    if int(i) == int(j):
        raise ValueError("the two spins must be distinct edges")
    return reduced_density_matrix(state, (int(i), int(j)))


def two_spin_from_moments(m_i: float, m_j: float, c_ij: float) -> np.ndarray:
    """Diagonal two-spin state from <Z_i>, <Z_j>, <Z_i Z_j>, basis |00>,|01>,|10>,|11>."""
    probs = [
        (1 + si * m_i + sj * m_j + si * sj * c_ij) / 4
        for si in (1, -1)
        for sj in (1, -1)
    ]
    return np.diag(probs).astype(complex)


def reduced_two_spin_via_ising(
    ising: IsingModel,
    lattice: TorusLattice,
    kind: SpinPairKind,
    method: Method | str = Method.TransferMatrix,
) -> np.ndarray:
    if not ising.Lx == ising.Ly == lattice.L:
        raise ValueError(
            f"Ising torus {ising.Lx}x{ising.Ly} does not match lattice L={lattice.L}"
        )
    pair = resolve_pair(lattice, kind)
    sets = [
        edges_to_vertex_support(lattice, [pair.i]),
        edges_to_vertex_support(lattice, [pair.j]),
        edges_to_vertex_support(lattice, [pair.i, pair.j]),
    ]
    method = Method(method)
    if method is Method.TransferMatrix:
        values = [m.value for m in transfer_matrix_moments(ising, sets)]
    elif method is Method.BruteForce:
        values = [brute_force_moment(ising, s).value for s in sets]
    else:
        raise ValueError("two-spin states need a finite-lattice method")
    return two_spin_from_moments(*values)


StateSource = Union[GroundState, IsingModel, float]


def spin_vs_rest(
    source: StateSource, k: int = 0, method: Method | str | None = None
) -> tuple[float, float]:
    """Schmidt weights (a^2, b^2) of spin ``k`` against the rest of the lattice.

    ``source`` may be a ground state (read off the amplitudes), an Ising model
    on a square torus (nearest-neighbour moment across edge k), or a bare
    beta (thermodynamic-limit closed form; k is irrelevant by symmetry).
    """
    if isinstance(source, GroundState):
        lat = source.lattice
        (k,) = lat.check_edges([k])
        x, psi = source.configs, source.amplitudes
        down = ((x >> np.uint64(k)) & np.uint64(1)).astype(bool)
        rest = x & ~np.uint64(1 << k)
        # the two branches must have disjoint supports on the rest of the lattice
        if np.intersect1d(rest[down], rest[~down]).size:
            raise RuntimeError("branches of the bipartition overlap")
        b_sq = float(np.sum(psi[down] ** 2))
        a_sq = float(np.sum(psi[~down] ** 2))
        return a_sq, b_sq

    if isinstance(source, IsingModel):
        if source.Lx != source.Ly:
            raise ValueError("edge spins live on a square torus")
        lat = build_lattice(source.Lx)
        verts = edges_to_vertex_support(lat, [k])
        method = Method(method or Method.TransferMatrix)
        if method is Method.TransferMatrix:
            nn = transfer_matrix_moments(source, [verts])[0].value
        elif method is Method.BruteForce:
            nn = brute_force_moment(source, verts).value
        else:
            nn = onsager_nn_correlation(source.beta)
    else:
        nn = onsager_nn_correlation(float(source))
    return (1.0 + nn) / 2.0, (1.0 - nn) / 2.0


def bipartition_state(a_sq: float, b_sq: float) -> np.ndarray:
    """a|00> + b|11> as a 4x4 density matrix; second factor is the local spin."""
    psi = np.array([math.sqrt(a_sq), 0.0, 0.0, math.sqrt(b_sq)])
    return np.outer(psi, psi).astype(complex)


def global_discord(a_sq: float, b_sq: float) -> tuple[float, float]:
    """Discord and mutual information (bits) of spin-vs-rest with weights a^2, b^2."""
    if a_sq < 0 or b_sq < 0:
        raise ValueError(f"weights must be non-negative, got {a_sq}, {b_sq}")
    if abs(a_sq + b_sq - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {a_sq + b_sq}")
    d = shannon_entropy([a_sq, b_sq])
    return d, 2.0 * d
