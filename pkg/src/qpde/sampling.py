"""Shot sampling and stochastic depolarizing noise.

Noise model: after every two-qubit gate, with probability p_depol a
uniformly random non-identity two-qubit Pauli is inserted on that gate's
pair.  Each shot is one such stochastic trajectory followed by a single
ancilla measurement, which emulates how gate errors on a real device
degrade the interference contrast while leaving the peak position
unbiased on average.  Only genuine two-qubit gates carry noise; compact
multi-qubit blocks and single-qubit rotations are treated as clean.

`noisy_trajectory_p0` is the literal, gate-by-gate trajectory average for
an arbitrary circuit.  `EvolutionTrajectorySampler` is the fast path used
inside sweeps: it factors the interference probability through the
branch overlap z = <chi_0| U_swap^dag |chi_1>, which lets one batch of
trajectories serve every shot at a sweep point, with segments between
Pauli insertions applied via precomputed prefix products.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, Circuit, Gate,
                          Statevector, ancilla_p0, apply_gate)

#: The 15 non-identity two-qubit Paulis, in a fixed order.
TWO_QUBIT_PAULIS = tuple(
    np.kron(a, b)
    for idx, (a, b) in enumerate(
        (p, q) for p in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
        for q in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z))
    if idx != 0)


@dataclass(frozen=True)
class SamplerSpec:
    """How sweep probabilities are turned into data.

    mode "exact" returns ideal probabilities, "shots" adds binomial
    sampling, "noisy" adds depolarizing trajectories plus one measurement
    per shot.  All randomness derives from `seed`.
    """

    mode: str = "exact"
    shots: int = 5000
    p_depol: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "shots", "noisy"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")
        if self.shots < 1:
            raise ValueError("shot count must be at least 1")
        if not 0.0 <= self.p_depol <= 1.0:
            raise ValueError("p_depol must lie in [0, 1]")


def derived_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent stream for a (seed, indices...) coordinate.

    Streams depend only on their coordinates, so results are identical no
    matter in which order sweep points are evaluated.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=path))


def sample_p0(true_p: float, shots: int, rng: np.random.Generator) -> float:
    """Binomial frequency estimate k/shots of a probability."""
    if not 0.0 <= true_p <= 1.0:
        raise ValueError(f"probability {true_p!r} outside [0, 1]")
    return float(rng.binomial(shots, true_p)) / shots


def _random_pauli_gate(pair: tuple[int, int], rng: np.random.Generator) -> Gate:
    return Gate.two(pair[0], pair[1], TWO_QUBIT_PAULIS[rng.integers(15)])


def noisy_trajectory_p0(circuit: Circuit, p_depol: float, rng: np.random.Generator,
                        shots: int, ancilla_index: int,
                        initial_state: Statevector | None = None) -> float:
    """Average ancilla |0> probability over stochastic Pauli trajectories.

    With p_depol = 0 every trajectory is the noiseless circuit and the
    exact probability is returned.
    """
    if not 0.0 <= p_depol <= 1.0:
        raise ValueError("p_depol must lie in [0, 1]")
    if initial_state is None:
        initial_state = Statevector.basis_state(circuit.n_qubits, 0)
    n_trajectories = 1 if p_depol == 0 else shots  # noiseless trajectories are identical
    total = 0.0
    for _ in range(n_trajectories):
        state = initial_state
        for gate in circuit.gates:
            state = apply_gate(state, gate)
            if len(gate.support) == 2 and p_depol > 0 and rng.random() < p_depol:
                state = apply_gate(state, _random_pauli_gate(gate.support, rng))
        total += ancilla_p0(state, ancilla_index)
    return total / n_trajectories


def _embed_two_qubit(matrix: np.ndarray, pair: tuple[int, int], n: int) -> np.ndarray:
    """Full 2^n x 2^n embedding of a 4x4 operator on an ordered pair."""
    dim = 2 ** n
    out = np.empty((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    tensor = eye.reshape([2] * n + [dim])
    tensor = np.moveaxis(tensor, pair, (0, 1))
    flat = tensor.reshape(4, -1)
    flat = matrix @ flat
    tensor = flat.reshape([2, 2] + [2] * (n - 2) + [dim])
    out[:] = np.moveaxis(tensor, (0, 1), pair).reshape(dim, dim)
    return out


def _distinct_sorted_positions(rng: np.random.Generator, n_gates: int,
                               m: int, rows: int) -> np.ndarray:
    """(rows, m) arrays of distinct gate indices, each row sorted.

    Rejection sampling is cheap while collisions are rare (m << n_gates,
    the p_depol << 1 regime); dense draws fall back to random-key sorting.
    """
    if m * m >= n_gates:
        keys = rng.random((rows, n_gates))
        pos = np.argpartition(keys, m - 1, axis=1)[:, :m]
        pos.sort(axis=1)
        return pos
    pos = rng.integers(0, n_gates, size=(rows, m))
    pos.sort(axis=1)
    while True:
        bad = np.any(pos[:, 1:] == pos[:, :-1], axis=1) if m > 1 else np.zeros(rows, bool)
        if not bad.any():
            return pos
        redraw = rng.integers(0, n_gates, size=(int(bad.sum()), m))
        redraw.sort(axis=1)
        pos[bad] = redraw


class EvolutionTrajectorySampler:
    """Batched trajectory sampling of the interference probability.

    Both interferometer branches see the same register operations, so a
    trajectory is evolved as an (dim, 2) pair of columns; the resulting
    branch overlap z gives p0 = (1 + Re(e^{i delta_eps t} z)) / 2, and a
    single ancilla measurement is drawn per shot.
    """

    def __init__(self, branch0: np.ndarray, branch1: np.ndarray,
                 excitation: np.ndarray, evolution_gates: list[Gate],
                 n_qubits: int, p_depol: float):
        self.n_gates = len(evolution_gates)
        self.p_depol = float(p_depol)
        dim = 2 ** n_qubits
        self.psi = np.column_stack([branch0, branch1]).astype(complex)
        self.excitation_dag = np.asarray(excitation, dtype=complex).conj().T

        embedded = {}
        for gate in evolution_gates:
            if gate.kind != "two":
                raise ValueError("trajectory sampler expects two-qubit evolution gates")
            key = (gate.targets, gate.matrix.tobytes())
            if key not in embedded:
                embedded[key] = _embed_two_qubit(gate.matrix, gate.targets, n_qubits)
        self.prefixes = np.empty((self.n_gates + 1, dim, dim), dtype=complex)
        self.prefixes[0] = np.eye(dim)
        gate_pairs = []
        for g, gate in enumerate(evolution_gates):
            key = (gate.targets, gate.matrix.tobytes())
            self.prefixes[g + 1] = embedded[key] @ self.prefixes[g]
            gate_pairs.append(gate.targets)
        self.prefixes_dag = self.prefixes.conj().transpose(0, 2, 1).copy()

        pairs = sorted(set(gate_pairs))
        self.pair_index = {pair: k for k, pair in enumerate(pairs)}
        self.gate_pair = np.array([self.pair_index[p] for p in gate_pairs], dtype=int) \
            if gate_pairs else np.zeros(0, dtype=int)
        self.pauli_ops = np.stack([
            np.stack([_embed_two_qubit(p, pair, n_qubits) for p in TWO_QUBIT_PAULIS])
            for pair in pairs]) if pairs else None

        chi = self.prefixes[-1] @ self.psi
        self.z_clean = complex(np.vdot(chi[:, 0], self.excitation_dag @ chi[:, 1]))

    def exact_p0(self, phase: float) -> float:
        return float(np.clip(0.5 * (1.0 + np.real(np.exp(1j * phase) * self.z_clean)),
                             0.0, 1.0))

    def branch_overlaps(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Per-shot branch overlap z after stochastic Pauli insertions."""
        z = np.full(shots, self.z_clean, dtype=complex)
        if self.p_depol == 0.0 or self.n_gates == 0:
            return z
        counts = rng.binomial(self.n_gates, self.p_depol, size=shots)
        for m in np.unique(counts):
            if m == 0:
                continue
            rows = np.nonzero(counts == m)[0]
            pos = _distinct_sorted_positions(rng, self.n_gates, int(m), rows.size)
            paulis = rng.integers(0, 15, size=(rows.size, int(m)))
            state = np.broadcast_to(self.psi, (rows.size,) + self.psi.shape).copy()
            prev = np.zeros(rows.size, dtype=int)
            for j in range(int(m)):
                after = pos[:, j] + 1
                state = np.matmul(self.prefixes_dag[prev], state)
                state = np.matmul(self.prefixes[after], state)
                ops = self.pauli_ops[self.gate_pair[pos[:, j]], paulis[:, j]]
                state = np.matmul(ops, state)
                prev = after
            state = np.matmul(self.prefixes_dag[prev], state)
            state = np.matmul(self.prefixes[-1][None, :, :], state)
            v = np.einsum("ij,bj->bi", self.excitation_dag, state[:, :, 1])
            z[rows] = np.einsum("bi,bi->b", state[:, :, 0].conj(), v)
        return z

    def sample_p0(self, phase: float, shots: int, rng: np.random.Generator) -> float:
        """One measurement per trajectory, averaged over `shots` shots."""
        z = self.branch_overlaps(shots, rng)
        p = np.clip(0.5 * (1.0 + np.real(np.exp(1j * phase) * z)), 0.0, 1.0)
        outcomes = rng.random(shots) < p
        return float(np.mean(outcomes))
