"""Interferometer measurement, the refinement loop, and restart semantics."""
import numpy as np
import pytest

import qpde.engine as engine
from qpde.engine import (EstimatorConfig, PriorSpec, analytic_p0,
                         build_excitation_unitary, check_restart, default_steps,
                         next_time, qpde_p0, run_estimation, sweep, sweep_grid)
from qpde.fitting import FitResult, GaussianEstimate
from qpde.sampling import SamplerSpec
from qpde.spin import (linear_chain, named_state, system_eigensystem, triangle,
                       two_spin_system)
from qpde.statevector import PAULI_Z, Statevector


def _states(system, ground, excited):
    return (named_state(ground, system.n_spins).to_statevector(),
            named_state(excited, system.n_spins).to_statevector())


def test_excitation_unitary_swaps_and_reflects():
    phi0, phi1 = _states(two_spin_system(1.0), "T", "S")
    u = build_excitation_unitary(phi0, phi1)
    assert np.allclose(u @ phi0.amplitudes, phi1.amplitudes, atol=1e-12)
    assert np.allclose(u @ phi1.amplitudes, phi0.amplitudes, atol=1e-12)
    assert np.allclose(u, u.conj().T, atol=1e-12)          # Hermitian
    assert np.allclose(u @ u, np.eye(4), atol=1e-12)        # involution
    # On the T/S pair the action restricted to span{|01>, |10>} is Z on
    # the first spin.
    z1 = np.kron(PAULI_Z, np.eye(2))
    for vec in (phi0.amplitudes, phi1.amplitudes):
        assert np.allclose(u @ vec, z1 @ vec, atol=1e-12)


def test_excitation_unitary_three_spin_pair():
    phi0, phi1 = _states(linear_chain(1.0, 1.0), "Q", "D2")
    u = build_excitation_unitary(phi0, phi1)
    overlap = np.vdot(phi1.amplitudes, u @ phi0.amplitudes)
    assert abs(overlap) == pytest.approx(1.0, abs=1e-12)


def test_excitation_unitary_rejects_non_orthogonal():
    phi0 = Statevector.from_amplitudes([1.0, 0.0])
    tilted = Statevector.from_amplitudes([np.sqrt(0.02), np.sqrt(0.98)])
    with pytest.raises(ValueError, match="orthogonal"):
        build_excitation_unitary(phi0, tilted)


def test_p0_peaks_exactly_at_the_gap():
    system = two_spin_system(1.0)
    phi0, phi1 = _states(system, "T", "S")
    assert qpde_p0(phi0, phi1, system, 0.2, 2.0) == pytest.approx(1.0, abs=1e-12)
    # Half a period away the fringe bottoms out.
    t = 0.5
    delta = 2.0 + np.pi / t
    assert qpde_p0(phi0, phi1, system, t, delta) == pytest.approx(0.0, abs=1e-12)


def test_p0_matches_cosine_formula():
    system = two_spin_system(1.0)
    phi0, phi1 = _states(system, "T", "S")
    value = qpde_p0(phi0, phi1, system, 0.2, 0.0)
    assert value == pytest.approx(0.5 * (1 + np.cos(0.4)), abs=1e-12)


def test_circuit_matches_mixture_formula_for_eigenstate_pairs():
    rng = np.random.default_rng(123)
    for _ in range(60):
        if rng.random() < 0.4:
            system = two_spin_system(rng.uniform(-2, 2))
        else:
            system = triangle(*rng.uniform(-2, 2, size=3))
        values, vectors = system_eigensystem(system)
        dim = values.size
        j, k = rng.choice(dim, size=2, replace=False)
        phi0 = Statevector.from_amplitudes(vectors[:, j])
        phi1 = Statevector.from_amplitudes(vectors[:, k])
        t = rng.uniform(0, 5)
        delta = rng.uniform(-10, 10)
        circuit_value = qpde_p0(phi0, phi1, system, t, delta)
        c = np.zeros(dim)
        c[j] = 1.0
        d = np.zeros(dim)
        d[k] = 1.0
        formula = analytic_p0(c, d, values, t, delta)
        assert circuit_value == pytest.approx(formula, abs=1e-9)


def test_trotter_p0_approaches_exact_p0():
    # The probability's leading product-formula error is quadratic in 1/n:
    # the first-order term is a diagonal expectation of a commutator of
    # real-symmetric operators in a real eigenstate, which vanishes.  So
    # doubling the step count cuts the p0 error by ~4 (and never less
    # than the operator-norm factor of 2).
    system = triangle(1.0, 1.0, 1.0)
    phi0, phi1 = _states(system, "Q", "D2")
    exact = qpde_p0(phi0, phi1, system, 0.8, 2.2)
    errors = []
    for n_steps in (20, 40, 80):
        value = qpde_p0(phi0, phi1, system, 0.8, 2.2,
                        evolution="trotter", n_steps=n_steps)
        errors.append(abs(value - exact))
    assert errors[0] > errors[1] > errors[2]
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.2 <= coarse / fine <= 4.8


def test_analytic_p0_mixture_and_edge_cases():
    energies = np.array([-1.05, 2.1036, -0.0036])
    c = np.array([1.0, 0.0, 0.0])
    d = np.array([0.0, np.sqrt(0.9983), np.sqrt(0.0017)])
    # t = 0 gives certainty regardless of the mixture.
    assert analytic_p0(c, d, energies, 0.0, 3.0) == pytest.approx(1.0)
    # Dominant component peaks at its own gap.
    peak = analytic_p0(c, d, energies, 1.2, 2.1036 + 1.05)
    off = analytic_p0(c, d, energies, 1.2, 1.0)
    assert peak > off
    with pytest.raises(ValueError, match="normalized"):
        analytic_p0(np.array([0.5, 0.5]), np.array([1.0, 0.0]),
                    np.array([0.0, 1.0]), 1.0, 0.0)


def test_asymmetric_chain_signal_is_two_component_mixture():
    system = linear_chain(1.0, 1.1)
    phi0, phi1 = _states(system, "Q", "D1")
    values, vectors = system_eigensystem(system)
    c = vectors.conj().T @ phi0.amplitudes
    d = vectors.conj().T @ phi1.amplitudes
    weights = np.abs(d) ** 2
    assert np.sort(weights)[-1] > 0.99  # dominant upper-doublet component
    for delta in (0.0, 2.5, 3.15, 4.0):
        circuit_value = qpde_p0(phi0, phi1, system, 1.2, delta)
        formula = analytic_p0(c, d, values, 1.2, delta)
        assert circuit_value == pytest.approx(formula, abs=1e-9)


def test_sweep_grid_is_inclusive_uniform():
    grid = sweep_grid(0.0, 10.0, 3)
    assert np.allclose(grid, [-10.0, 0.0, 10.0])


def test_sweep_exact_mode_points():
    system = two_spin_system(1.0)
    phi0, phi1 = _states(system, "T", "S")
    config = EstimatorConfig(evolution="exact")
    points = sweep(phi0, phi1, system, 0.2, PriorSpec("gaussian", 0.0, 10.0),
                   config, SamplerSpec(mode="exact"))
    assert len(points) == config.grid_points
    assert all(p.p0 == p.p0_exact for p in points)
    best = max(points, key=lambda p: p.p0)
    spacing = 20.0 / (config.grid_points - 1)
    assert abs(best.delta_eps - 2.0) <= spacing


def test_check_restart_window_is_open():
    prior = PriorSpec("gaussian", 0.0, 10.0)
    assert check_restart(prior, 7.0, 0.6)
    assert not check_restart(prior, 5.9, 0.6)
    assert check_restart(prior, 6.0, 0.6)  # boundary counts as outside
    assert check_restart(prior, -6.5, 0.6)


def test_next_time_follows_half_cycle_rule():
    config = EstimatorConfig()
    system = linear_chain(1.0, 1.0)
    t, n_steps = next_time(3.92, config, system, previous_t=0.2)
    assert t == pytest.approx(0.4)
    t, n_steps = next_time(4.06, config, system, previous_t=0.2)
    assert t == pytest.approx(0.4)
    assert n_steps == 60
    # Growth is clamped.
    t, _ = next_time(0.01, config, system, previous_t=0.2)
    assert t == pytest.approx(1.0)  # 5 x 0.2
    # Single-coupling systems always use one step.
    t, n_steps = next_time(3.92, config, two_spin_system(1.0), previous_t=0.2)
    assert n_steps == 1


def test_default_steps_rule():
    assert default_steps(linear_chain(1.0, 1.0), 0.2, 150.0) == 30
    assert default_steps(linear_chain(1.0, 1.0), 4.2, 150.0) == 630
    assert default_steps(two_spin_system(1.0), 4.2, 150.0) == 1


def test_explicit_schedule_is_replayed_verbatim():
    schedule = ((0.2, 1), (0.4, 1), (0.8, 1), (2.4, 1))
    config = EstimatorConfig(explicit_schedule=schedule, evolution="exact")
    result = run_estimation(two_spin_system(1.0), "T", "S",
                            PriorSpec("gaussian", 0.0, 10.0), config)
    assert [(row.t, row.n_steps) for row in result.trace] == list(schedule)
    assert result.converged


def test_ideal_run_converges_to_the_gap():
    result = run_estimation(two_spin_system(1.0), "T", "S",
                            PriorSpec("gaussian", 0.0, 10.0))
    assert result.converged
    assert result.final.sigma < 0.4
    assert result.final.mu == pytest.approx(2.0, abs=0.05)
    assert result.exact_gap == pytest.approx(2.0, abs=1e-9)
    assert result.accuracy == pytest.approx(1.0, abs=0.03)
    # Posterior spread shrinks monotonically without restarts.
    sigmas = [row.posterior.sigma for row in result.trace]
    assert all(b < a for a, b in zip(sigmas, sigmas[1:]))
    assert all(row.posterior.sigma < row.prior.sigma for row in result.trace)


def test_uniform_prior_first_update_adopts_the_fit():
    config = EstimatorConfig(evolution="exact")
    result = run_estimation(linear_chain(1.0, 1.1), "Q", "D1",
                            PriorSpec("uniform", 3.15, 1.15), config)
    first = result.trace[0]
    assert first.posterior.mu == pytest.approx(first.fit.mu)
    assert first.posterior.sigma == pytest.approx(first.fit.sigma)
    assert result.converged
    assert result.final.mu == pytest.approx(3.1536, abs=0.05)


def _synthetic_fit_sequence(values):
    """Monkeypatch helper: feed predetermined fit means into the loop."""
    queue = list(values)

    def fake_fit(x, y, fallback_sigma=None):
        mu = queue.pop(0) if queue else float(x[np.argmax(y)])
        return FitResult(mu=mu, sigma=1.0, amplitude=0.5, offset=0.4,
                         converged=True, residual_norm=0.0)

    return fake_fit


def test_restart_keeps_sigma_and_schedule_entry(monkeypatch):
    rng = np.random.default_rng(31)
    for _ in range(25):
        prior_mu = float(rng.uniform(-5, 5))
        prior_sigma = float(rng.uniform(0.5, 8))
        lam = 0.6
        # First fit lands outside the lambda window; the second lands
        # inside the post-restart window centered on the carried mean.
        outside = prior_mu + prior_sigma * lam * rng.choice([-1.3, 1.3])
        inside = outside + prior_sigma * lam * 0.5
        monkeypatch.setattr(engine, "fit_gaussian",
                            _synthetic_fit_sequence([outside, inside]))
        config = EstimatorConfig(evolution="exact", max_iterations=4,
                                 lambda_restart=lam)
        result = run_estimation(two_spin_system(1.0), "T", "S",
                                PriorSpec("gaussian", prior_mu, prior_sigma),
                                config)
        first, second = result.trace[0], result.trace[1]
        assert first.restarted
        assert not second.restarted
        # Restart adopts the fitted mean, keeps sigma, keeps (t, n).
        assert second.prior.mu == pytest.approx(outside)
        assert second.prior.sigma == prior_sigma
        assert (second.t, second.n_steps) == (first.t, first.n_steps)
        # The carried posterior of a restarted row leaves sigma unchanged.
        assert first.posterior.sigma == first.prior.sigma


def test_in_window_fit_does_not_restart(monkeypatch):
    rng = np.random.default_rng(77)
    for _ in range(25):
        prior_mu = float(rng.uniform(-5, 5))
        prior_sigma = float(rng.uniform(0.5, 8))
        inside = prior_mu + prior_sigma * 0.6 * float(rng.uniform(-0.95, 0.95))
        monkeypatch.setattr(engine, "fit_gaussian",
                            _synthetic_fit_sequence([inside, inside]))
        config = EstimatorConfig(evolution="exact", max_iterations=2)
        result = run_estimation(two_spin_system(1.0), "T", "S",
                                PriorSpec("gaussian", prior_mu, prior_sigma),
                                config)
        assert not result.trace[0].restarted
        assert result.trace[0].posterior.sigma < prior_sigma


def test_consecutive_restart_limit_aborts(monkeypatch):
    monkeypatch.setattr(engine, "fit_gaussian",
                        _synthetic_fit_sequence([50.0, 120.0, 260.0, 500.0]))
    config = EstimatorConfig(evolution="exact", max_iterations=10)
    result = run_estimation(two_spin_system(1.0), "T", "S",
                            PriorSpec("gaussian", 0.0, 10.0), config)
    assert not result.converged
    assert len(result.trace) == config.restart_limit
    assert all(row.restarted for row in result.trace)
    # All restart re-runs stayed at the initial (t, n).
    assert {(row.t, row.n_steps) for row in result.trace} == {(0.2, 1)}


def test_failed_fit_aborts_with_diagnostic_trace(monkeypatch):
    def always_fail(x, y, fallback_sigma=None):
        return FitResult(mu=0.0, sigma=fallback_sigma or 1.0, amplitude=0.0,
                         offset=0.0, converged=False, residual_norm=0.0)

    monkeypatch.setattr(engine, "fit_gaussian", always_fail)
    result = run_estimation(two_spin_system(1.0), "T", "S",
                            PriorSpec("gaussian", 0.0, 10.0),
                            EstimatorConfig(evolution="exact"))
    assert not result.converged
    assert len(result.trace) == 1
    assert not result.trace[0].fit.converged


def test_convergence_flag_matches_threshold():
    for e_thre in (0.4, 1.0):
        config = EstimatorConfig(e_thre=e_thre, evolution="exact")
        result = run_estimation(two_spin_system(1.0), "T", "S",
                                PriorSpec("gaussian", 0.0, 10.0), config)
        assert result.converged == (result.final.sigma < e_thre)
        assert result.converged


def test_shot_sampled_run_is_deterministic_per_seed():
    sampler = SamplerSpec(mode="shots", shots=2000, seed=99)
    results = [run_estimation(two_spin_system(1.0), "T", "S",
                              PriorSpec("gaussian", 0.0, 10.0), sampler=sampler)
               for _ in range(2)]
    assert results[0].final == results[1].final
    assert len(results[0].trace) == len(results[1].trace)


def test_noisy_mode_requires_trotter():
    with pytest.raises(ValueError, match="trotter"):
        run_estimation(two_spin_system(1.0), "T", "S",
                       PriorSpec("gaussian", 0.0, 10.0),
                       EstimatorConfig(evolution="exact"),
                       SamplerSpec(mode="noisy"))


def test_estimator_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(lambda_restart=1.5)
    with pytest.raises(ValueError):
        EstimatorConfig(e_thre=0.0)
    with pytest.raises(ValueError):
        EstimatorConfig(grid_points=3)
    with pytest.raises(ValueError):
        EstimatorConfig(explicit_schedule=((0.0, 5),))
