"""Exact and Trotterized time evolution under Heisenberg Hamiltonians.

A first-order product formula splits exp(-iHt) into n_steps repetitions
of the per-coupling pair exponentials, applied in a fixed (i, j) order so
runs are reproducible (the first-order error depends on term order).
Each pair factor is exact, so the circuit is unitary for any step count,
and for a single-coupling system one step is already the exact evolution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eigendecomposition
from .spin import SPIN_X, SPIN_Y, SPIN_Z, SpinSystem, system_eigensystem
from .statevector import Circuit, Gate


@dataclass(frozen=True)
class TrotterPlan:
    """Evolution time and step count; term order is (i, j) ascending."""

    t: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.t < 0:
            raise ValueError("evolution time must be non-negative")


def pair_hamiltonian(strength: float) -> np.ndarray:
    """Two-site term -2J (S_i . S_j) as a 4x4 matrix."""
    h = np.zeros((4, 4), dtype=complex)
    for op in (SPIN_X, SPIN_Y, SPIN_Z):
        h -= 2.0 * strength * np.kron(op, op)
    return h


def pair_term_unitary(strength: float, dt: float) -> np.ndarray:
    """exp(-i h dt) for one coupling term, via spectral decomposition.

    The term's eigenvalues are -J/2 on the triplet sector and +3J/2 on
    the singlet, so the gate is a pure two-sector phase.
    """
    values, vectors = hermitian_eigendecomposition(pair_hamiltonian(strength))
    phases = np.exp(-1j * values * dt)
    return (vectors * phases) @ vectors.conj().T


def trotter_circuit(system: SpinSystem, plan: TrotterPlan) -> Circuit:
    """First-order product-formula circuit on the spin register."""
    dt = plan.t / plan.n_steps
    ordered = sorted(system.couplings)
    step_gates = [Gate.two(i - 1, j - 1, pair_term_unitary(strength, dt))
                  for i, j, strength in ordered]
    circuit = Circuit(system.n_spins)
    for _ in range(plan.n_steps):
        for gate in step_gates:
            circuit.append(gate)
    return circuit


def exact_evolution(system: SpinSystem, t: float) -> np.ndarray:
    """Whole-register unitary exp(-iHt) from exact diagonalization."""
    values, vectors = system_eigensystem(system)
    phases = np.exp(-1j * values * t)
    return (vectors * phases) @ vectors.conj().T
