"""Ancilla-interferometer gap measurement and the iterative refinement loop.

Measurement primitive (one trial phase delta_eps, one evolution time t):

    ancilla H -> controlled excitation swap -> free evolution exp(-iHt)
    on the register -> controlled inverse swap -> phase gate
    diag(1, e^{i delta_eps t}) on the ancilla -> ancilla H -> P(|0>).

For eigenstate preparations the outcome is the pure interference fringe
p0 = (1 + cos((gap - delta_eps) t)) / 2, so scanning delta_eps and
locating the peak reads off the gap directly; `analytic_p0` evaluates the
general mixture formula as an independent oracle.

The estimation loop keeps a Gaussian belief over the gap.  Each iteration
sweeps delta_eps across the prior's +-1 sigma window, fits a Gaussian
surrogate to the fringe, and multiplies prior and fit.  A fitted mean
outside the +-lambda_restart * sigma window triggers an adaptive restart:
the fitted mean becomes the new prior mean, the prior sigma and the
current (t, n_steps) are kept.  Otherwise the evolution time grows on a
half-cycle schedule t ~ pi / (2 sigma) until the posterior sigma drops
below the convergence threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .evolution import TrotterPlan, exact_evolution, trotter_circuit
from .fitting import FitResult, GaussianEstimate, fit_gaussian, multiply_gaussians
from .optimizer import collapse_register_block
from .sampling import EvolutionTrajectorySampler, SamplerSpec, derived_rng, sample_p0
from .spin import SpinSystem, exact_gap, named_state
from .statevector import (HADAMARD, Circuit, Gate, Statevector, ancilla_p0,
                          apply_gate, phase_shift)

ORTHOGONALITY_ATOL = 1e-10


@dataclass(frozen=True)
class PriorSpec:
    """Initial belief; uniform means flat on [mu - sigma, mu + sigma]."""

    shape: str
    mu: float
    sigma: float

    def __post_init__(self):
        if self.shape not in ("gaussian", "uniform"):
            raise ValueError(f"prior shape {self.shape!r} not recognized")
        if not self.sigma > 0:
            raise ValueError("prior sigma must be positive")


@dataclass(frozen=True)
class EstimatorConfig:
    lambda_restart: float = 0.6
    e_thre: float = 0.4
    grid_points: int = 21
    initial_t: float = 0.2
    steps_per_unit_time: float = 150.0
    max_iterations: int = 12
    evolution: str = "trotter"
    time_growth_factor: float = 5.0
    restart_limit: int = 3
    fit_retry_limit: int = 3
    explicit_schedule: tuple[tuple[float, int], ...] | None = None

    def __post_init__(self):
        if not 0 < self.lambda_restart < 1:
            raise ValueError("lambda_restart must lie in (0, 1)")
        if not self.e_thre > 0:
            raise ValueError("e_thre must be positive")
        if self.grid_points < 5:
            raise ValueError("grid_points must be at least 5")
        if self.evolution not in ("exact", "trotter"):
            raise ValueError(f"evolution mode {self.evolution!r} not recognized")
        if self.explicit_schedule is not None:
            sched = tuple((float(t), int(n)) for t, n in self.explicit_schedule)
            for t, n in sched:
                if t <= 0 or n < 1:
                    raise ValueError(f"bad schedule entry ({t}, {n})")
            object.__setattr__(self, "explicit_schedule", sched)


@dataclass(frozen=True)
class SweepPoint:
    delta_eps: float
    p0: float
    p0_exact: float


@dataclass(frozen=True)
class IterationRecord:
    t: float
    n_steps: int
    prior: GaussianEstimate
    fit: FitResult
    posterior: GaussianEstimate
    restarted: bool
    points: tuple[SweepPoint, ...] = ()


@dataclass
class EstimationResult:
    final: GaussianEstimate
    trace: list[IterationRecord] = field(default_factory=list)
    converged: bool = False
    exact_gap: float | None = None
    accuracy: float | None = None


def build_excitation_unitary(phi0: Statevector, phi1: Statevector) -> np.ndarray:
    """Swap-reflection unitary exchanging the two preparation states.

    U = |phi1><phi0| + |phi0><phi1| + (identity on the orthogonal
    complement); Hermitian and involutory.  The second state is
    orthogonalized against the first internally, so the construction is
    exactly unitary; inputs further than 1e-10 from orthogonal are
    rejected.
    """
    if phi0.n_qubits != phi1.n_qubits:
        raise ValueError("states have different qubit counts")
    a = phi0.amplitudes
    b = phi1.amplitudes
    overlap = complex(np.vdot(a, b))
    if abs(overlap) > ORTHOGONALITY_ATOL:
        raise ValueError(f"preparation states are not orthogonal "
                         f"(|<phi0|phi1>| = {abs(overlap):.3e})")
    b = b - overlap * a
    b = b / np.linalg.norm(b)
    dim = a.size
    return (np.outer(b, a.conj()) + np.outer(a, b.conj())
            + np.eye(dim, dtype=complex) - np.outer(a, a.conj()) - np.outer(b, b.conj()))


@lru_cache(maxsize=4096)
def _evolution_gate(system: SpinSystem, t: float, evolution: str,
                    n_steps: int | None) -> Gate:
    targets = tuple(range(system.n_spins))
    if evolution == "exact":
        return Gate.register(targets, exact_evolution(system, t))
    if evolution == "trotter":
        if n_steps is None:
            raise ValueError("trotter evolution requires n_steps")
        # Same register block collapse_register_block would produce, but
        # built as a matrix power of the single-step unitary.
        one_step = collapse_register_block(
            trotter_circuit(system, TrotterPlan(t / n_steps, 1)),
            max_qubits=system.n_spins).gates[0].matrix
        return Gate.register(targets, np.linalg.matrix_power(one_step, n_steps))
    raise ValueError(f"evolution mode {evolution!r} not recognized")


def qpde_circuit(system: SpinSystem, excitation: np.ndarray, t: float,
                 delta_eps: float, evolution: str = "exact",
                 n_steps: int | None = None) -> Circuit:
    """Interferometer circuit on n_spins register qubits plus one ancilla
    (the last qubit)."""
    n = system.n_spins
    ancilla = n
    register = tuple(range(n))
    circuit = Circuit(n + 1)
    circuit.append(Gate.single(ancilla, HADAMARD))
    circuit.append(Gate.controlled(ancilla, register, excitation))
    circuit.append(_evolution_gate(system, t, evolution, n_steps))
    circuit.append(Gate.controlled(ancilla, register, excitation.conj().T))
    circuit.append(Gate.single(ancilla, phase_shift(delta_eps * t)))
    circuit.append(Gate.single(ancilla, HADAMARD))
    return circuit


def _pre_phase_state(phi0: Statevector, system: SpinSystem, excitation: np.ndarray,
                     t: float, evolution: str, n_steps: int | None) -> Statevector:
    """State after everything up to the ancilla phase gate.

    Only the trial phase depends on delta_eps, so one prefix serves a
    whole sweep."""
    n = system.n_spins
    ancilla = n
    register = tuple(range(n))
    state = phi0.tensor(Statevector.basis_state(1, 0))
    state = apply_gate(state, Gate.single(ancilla, HADAMARD))
    state = apply_gate(state, Gate.controlled(ancilla, register, excitation))
    state = apply_gate(state, _evolution_gate(system, t, evolution, n_steps))
    state = apply_gate(state, Gate.controlled(ancilla, register, excitation.conj().T))
    return state


def _finish_p0(pre_phase: Statevector, phase: float, ancilla: int) -> float:
    state = apply_gate(pre_phase, Gate.single(ancilla, phase_shift(phase)))
    state = apply_gate(state, Gate.single(ancilla, HADAMARD))
    return ancilla_p0(state, ancilla)


def qpde_p0(phi0: Statevector, phi1: Statevector, system: SpinSystem, t: float,
            delta_eps: float, evolution: str = "exact",
            n_steps: int | None = None,
            excitation: np.ndarray | None = None) -> float:
    """Ancilla |0> probability of one interferometer run (ideal, no shots)."""
    if phi0.n_qubits != system.n_spins:
        raise ValueError("preparation state does not match the system size")
    if excitation is None:
        excitation = build_excitation_unitary(phi0, phi1)
    pre = _pre_phase_state(phi0, system, excitation, t, evolution, n_steps)
    return _finish_p0(pre, delta_eps * t, system.n_spins)


def analytic_p0(coeffs_c: np.ndarray, coeffs_d: np.ndarray, energies: np.ndarray,
                t: float, delta_eps: float) -> float:
    """Interference probability from eigenstate overlaps:

        p0 = [1 + sum_jk |c_j|^2 |d_k|^2 cos((E_k - E_j - delta_eps) t)] / 2
    """
    c2 = np.abs(np.asarray(coeffs_c)) ** 2
    d2 = np.abs(np.asarray(coeffs_d)) ** 2
    if abs(c2.sum() - 1.0) > 1e-10 or abs(d2.sum() - 1.0) > 1e-10:
        raise ValueError("overlap coefficients must be normalized")
    energies = np.asarray(energies, dtype=float)
    gaps = energies[None, :] - energies[:, None]
    weights = np.outer(c2, d2)
    return float(0.5 * (1.0 + np.sum(weights * np.cos((gaps - delta_eps) * t))))


def sweep_grid(prior_mu: float, prior_sigma: float, grid_points: int) -> np.ndarray:
    return np.linspace(prior_mu - prior_sigma, prior_mu + prior_sigma, grid_points)


class _SweepEvaluator:
    """Evaluates one iteration's sweep under the configured sampler."""

    def __init__(self, phi0: Statevector, phi1: Statevector, system: SpinSystem,
                 excitation: np.ndarray, config: EstimatorConfig,
                 sampler: SamplerSpec):
        self.phi0, self.phi1 = phi0, phi1
        self.system = system
        self.excitation = excitation
        self.config = config
        self.sampler = sampler
        if sampler.mode == "noisy" and config.evolution != "trotter":
            raise ValueError("noisy sampling requires trotterized evolution")
        self._cache: dict[tuple[float, int | None], object] = {}

    def _trajectory_sampler(self, t: float, n_steps: int) -> EvolutionTrajectorySampler:
        key = (t, n_steps)
        if key not in self._cache:
            gates = trotter_circuit(self.system, TrotterPlan(t, n_steps)).gates
            self._cache[key] = EvolutionTrajectorySampler(
                self.phi0.amplitudes, self.phi1.amplitudes, self.excitation,
                gates, self.system.n_spins, self.sampler.p_depol)
        return self._cache[key]

    def run(self, t: float, n_steps: int, grid: np.ndarray,
            iteration: int, attempt: int) -> list[SweepPoint]:
        mode = self.sampler.mode
        points = []
        noisy = None
        if mode == "noisy" and self.sampler.p_depol > 0:
            noisy = self._trajectory_sampler(t, n_steps)
        pre = _pre_phase_state(self.phi0, self.system, self.excitation, t,
                               self.config.evolution, n_steps)
        ancilla = self.system.n_spins
        for k, delta in enumerate(grid):
            exact = _finish_p0(pre, delta * t, ancilla)
            if mode == "exact":
                value = exact
            else:
                rng = derived_rng(self.sampler.seed, iteration, attempt, k)
                if noisy is not None:
                    value = noisy.sample_p0(delta * t, self.sampler.shots, rng)
                else:
                    value = sample_p0(exact, self.sampler.shots, rng)
            points.append(SweepPoint(float(delta), value, exact))
        return points


def sweep(phi0: Statevector, phi1: Statevector, system: SpinSystem, t: float,
          prior: PriorSpec, config: EstimatorConfig, sampler: SamplerSpec,
          n_steps: int | None = None, iteration: int = 0) -> list[SweepPoint]:
    """Standalone sweep across the prior's +-1 sigma window."""
    if n_steps is None:
        n_steps = default_steps(system, t, config.steps_per_unit_time)
    excitation = build_excitation_unitary(phi0, phi1)
    evaluator = _SweepEvaluator(phi0, phi1, system, excitation, config, sampler)
    grid = sweep_grid(prior.mu, prior.sigma, config.grid_points)
    return evaluator.run(t, n_steps, grid, iteration, 0)


def check_restart(prior: PriorSpec | GaussianEstimate, fit_mu: float,
                  lambda_restart: float) -> bool:
    """True when the fitted mean leaves the open +-lambda*sigma window."""
    lo = prior.mu - lambda_restart * prior.sigma
    hi = prior.mu + lambda_restart * prior.sigma
    return not lo < fit_mu < hi


def default_steps(system: SpinSystem, t: float, steps_per_unit_time: float) -> int:
    """ceil(steps_per_unit_time * t); a single coupling term commutes with
    itself, so one step is already exact there."""
    if len(system.couplings) <= 1:
        return 1
    return max(1, math.ceil(steps_per_unit_time * t))


def next_time(posterior_sigma: float, config: EstimatorConfig, system: SpinSystem,
              previous_t: float) -> tuple[float, int]:
    """Half-cycle schedule: t ~ pi / (2 sigma), rounded to 0.1, growth
    clamped to `time_growth_factor` per iteration."""
    if not posterior_sigma > 0:
        raise ValueError("posterior sigma must be positive")
    t = round(math.pi / (2.0 * posterior_sigma), 1)
    t = min(t, config.time_growth_factor * previous_t)
    t = max(t, 0.1)
    return t, default_steps(system, t, config.steps_per_unit_time)


def run_estimation(system: SpinSystem, phi0_label: str, phi1_label: str,
                   prior: PriorSpec, config: EstimatorConfig | None = None,
                   sampler: SamplerSpec | None = None) -> EstimationResult:
    """Full sweep -> fit -> restart-check -> multiply -> converge loop."""
    config = config or EstimatorConfig()
    sampler = sampler or SamplerSpec()
    phi0 = named_state(phi0_label, system.n_spins).to_statevector()
    phi1 = named_state(phi1_label, system.n_spins).to_statevector()
    excitation = build_excitation_unitary(phi0, phi1)
    evaluator = _SweepEvaluator(phi0, phi1, system, excitation, config, sampler)
    _, reference_gap = exact_gap(system, phi0_label, phi1_label)

    schedule = config.explicit_schedule
    if schedule:
        t, n_steps = schedule[0]
    else:
        t = config.initial_t
        n_steps = default_steps(system, t, config.steps_per_unit_time)
    schedule_index = 0

    belief = GaussianEstimate(prior.mu, prior.sigma)
    belief_is_uniform = prior.shape == "uniform"
    trace: list[IterationRecord] = []
    converged = False
    consecutive_restarts = 0

    for iteration in range(config.max_iterations):
        grid = sweep_grid(belief.mu, belief.sigma, config.grid_points)
        fit = None
        for attempt in range(config.fit_retry_limit):
            points = evaluator.run(t, n_steps, grid, iteration, attempt)
            fit = fit_gaussian(np.array([p.delta_eps for p in points]),
                               np.array([p.p0 for p in points]),
                               fallback_sigma=belief.sigma / 2)
            if fit.converged:
                break

        if not fit.converged:
            # Fit failed on every retry: stop and report the trace as-is.
            trace.append(IterationRecord(t, n_steps, belief, fit, belief, False,
                                         tuple(points)))
            break

        if check_restart(belief, fit.mu, config.lambda_restart):
            # Carry the fitted mean forward, keep sigma and (t, n_steps).
            consecutive_restarts += 1
            carried = GaussianEstimate(fit.mu, belief.sigma)
            trace.append(IterationRecord(t, n_steps, belief, fit, carried, True,
                                         tuple(points)))
            if consecutive_restarts >= config.restart_limit:
                break
            belief = carried
            continue
        consecutive_restarts = 0

        if belief_is_uniform:
            posterior = fit.estimate()
            belief_is_uniform = False
        else:
            posterior = multiply_gaussians(belief, fit.estimate())
        trace.append(IterationRecord(t, n_steps, belief, fit, posterior, False,
                                     tuple(points)))
        belief = posterior

        if posterior.sigma < config.e_thre:
            converged = True
            break

        if schedule:
            schedule_index += 1
            if schedule_index >= len(schedule):
                break
            t, n_steps = schedule[schedule_index]
        else:
            t, n_steps = next_time(posterior.sigma, config, system, t)

    accuracy = None
    if reference_gap:
        accuracy = 1.0 - abs(belief.mu - reference_gap) / abs(reference_gap)
    return EstimationResult(final=belief, trace=trace, converged=converged,
                            exact_gap=reference_gap, accuracy=accuracy)
