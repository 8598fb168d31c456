import math
import warnings
from dataclasses import replace

import numpy as np
import pytest

from ohmic_oscillator.correlations import dragged_term
from ohmic_oscillator.lattice_oracle import (
    ConfigInvalid,
    LatticeConfig,
    NoPlateau,
    StepUnstable,
    VacuumFactor,
    _rk4,
    build_drift,
    cached_run,
    coupling_profile,
    effective_cutoff,
    evolve_observables,
    extract_report,
    field_block_frequencies,
    mode_frequencies,
    run_lattice,
    vacuum_covariance,
)
from ohmic_oscillator.model import ModelParams
from ohmic_oscillator.spectral_moments import moment_pp, moment_qq

# a short lattice for dense checks: L/2 = 3.525 > t_final + window width
SMALL = LatticeConfig(n_sites=140, dx=0.05, dt=0.0005, t_final=2.0, window=(1.0, 2.0), profile_span=0.5)


def params(eps=1.0, mu=0.0, lam=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ModelParams(omega=1.0, eps=eps, cutoff=1000.0, lambda_th=lam, mu=mu)


def test_config_invariants():
    with pytest.raises(ConfigInvalid, match="dt"):
        LatticeConfig(dt=0.03)
    with pytest.raises(ConfigInvalid, match="L/2"):
        LatticeConfig(n_sites=2000)
    with pytest.raises(ConfigInvalid, match="smear_sigma"):
        LatticeConfig(smear_sigma=0.01)
    with pytest.raises(ConfigInvalid, match="eps"):
        run_lattice(params(eps=0.5), LatticeConfig())


def test_coupling_profiles_normalized_and_centered():
    for cfg in (LatticeConfig(), LatticeConfig(smear_sigma=0.15)):
        f = coupling_profile(cfg)
        assert np.all(f >= 0)
        assert f.sum() * cfg.dx == pytest.approx(1.0, rel=1e-12)
        assert np.argmax(f) == cfg.center
    g = coupling_profile(LatticeConfig(smear_sigma=0.15))
    c = LatticeConfig().center
    assert g[c - 5] == pytest.approx(g[c + 5], rel=1e-12)


def test_decoupled_drift_is_block_diagonal():
    d = build_drift(params(eps=0.0), SMALL)
    a = d.A.toarray()
    assert np.all(a[:2, 2:] == 0) and np.all(a[2:, :2] == 0)
    assert np.all(a[2:4, 4:] == 0) and np.all(a[4:, 2:4] == 0)


def test_hamiltonian_structure():
    d = build_drift(params(), LatticeConfig(n_sites=2000, t_final=40.0, window=(30.0, 40.0)))
    assert d.hamiltonian_residual() < 1e-12
    small = build_drift(params(mu=0.3, lam=0.7), SMALL)
    assert np.linalg.eigvalsh(small.H.toarray()).min() > -1e-12


def test_inverted_thermometer_potential_is_unstable():
    d = build_drift(params(mu=0.3, lam=0.7), SMALL, inverted_thermometer=True)
    assert np.max(np.linalg.eigvals(d.A.toarray()).real) > 0.5


def test_field_dispersion():
    cfg = LatticeConfig(n_sites=60, dx=0.05, dt=0.02, t_final=1.0, window=(0.5, 1.0), profile_span=0.2)
    k = np.arange(1, 61)
    expected = 2 / cfg.dx * np.sin(k * math.pi / (2 * 61))
    assert np.max(np.abs(field_block_frequencies(cfg) - expected)) < 1e-8
    assert np.allclose(mode_frequencies(cfg), expected, rtol=1e-14)


def test_single_mode_vacuum_is_minimum_uncertainty():
    dx = 0.1
    w = np.array([2 / dx * math.sin(math.pi / 4)])
    v = VacuumFactor(1, dx, 1.0, 1.0, w).dense()
    assert v[4, 4] * v[5, 5] == pytest.approx(0.25, rel=1e-12)


def test_vacuum_blocks():
    p = params(mu=0.01, lam=0.7)
    v = vacuum_covariance(SMALL, p).dense()
    n = SMALL.n_sites
    assert v[0, 0] == pytest.approx(0.5) and v[1, 1] == pytest.approx(0.5)
    assert v[2, 2] == pytest.approx(1 / 1.4) and v[3, 3] == pytest.approx(0.35)
    assert np.max(np.abs(v[4 : 4 + n, 4 + n :])) < 1e-14
    assert np.allclose(v, v.T, atol=1e-14)
    # field block equals (1/2) K^{-1/2} for the lattice stiffness K
    k = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / SMALL.dx**2
    evals, vecs = np.linalg.eigh(k)
    phiphi = vecs @ np.diag(0.5 / np.sqrt(evals)) @ vecs.T / SMALL.dx
    assert np.allclose(v[4 : 4 + n, 4 : 4 + n], phiphi, atol=1e-12)


def test_vacuum_propagator_matches_continuum_mode_sum():
    cfg = LatticeConfig()
    fac = vacuum_covariance(cfg, params())
    n, c, L = cfg.n_sites, cfg.center, cfg.length
    e = np.zeros(4 + 2 * n)
    e[4 + c] = 1.0
    row = fac.covariance_times(e)
    m = np.arange(1, 2_000_001)
    for sep in (5, 10, 20, 50):
        x1, x2 = (c + 1) * cfg.dx, (c + 1 + sep) * cfg.dx
        cont = np.sum(2 / L * np.sin(m * math.pi * x1 / L) * np.sin(m * math.pi * x2 / L) / (2 * m * math.pi / L))
        assert row[4 + c + sep] == pytest.approx(cont, rel=0.01)


def test_decoupled_covariances_are_stationary():
    p = params(eps=0.0, mu=0.0, lam=0.7)
    d, fac = build_drift(p, SMALL), vacuum_covariance(SMALL, p)
    u = np.zeros((d.dim, 3))
    u[0, 0], u[1, 1], u[4 + SMALL.center, 2] = 1.0, 1.0, 1.0
    series = evolve_observables(d, fac, u, [0.0, 0.5, 1.0, 2.0], SMALL.dt)
    assert np.max(np.abs(series - series[0])) < 1e-8


def test_energy_expectation_conserved():
    p = params(mu=0.1, lam=0.7)
    d, fac = build_drift(p, SMALL), vacuum_covariance(SMALL, p)
    h = d.H.toarray()
    series = evolve_observables(d, fac, np.eye(d.dim), [0.0, SMALL.t_final], SMALL.dt)
    e0, e1 = (0.5 * np.trace(h @ v) for v in series)
    assert abs(e1 - e0) / e0 < 1e-6


def test_symplectic_form_preserved_with_fourth_order_convergence():
    d = build_drift(params(mu=0.1, lam=0.7), SMALL)
    jm = d.J.toarray()
    at = d.A.T.tocsr()
    rng = np.random.default_rng(7)
    w0 = rng.standard_normal((d.dim, 2))
    defects = []
    for dt in (0.00125, 0.000625):
        w = _rk4(at, w0.copy(), dt, int(round(SMALL.t_final / dt)))
        drift = abs(w[:, 0] @ jm @ w[:, 1] - w0[:, 0] @ jm @ w0[:, 1])
        defects.append(drift / (np.linalg.norm(w0[:, 0]) * np.linalg.norm(w0[:, 1])))
    assert defects[1] < 1e-6
    assert 10 < defects[0] / defects[1] < 40


def test_coarse_step_flagged():
    cfg = LatticeConfig(n_sites=800, dt=0.025, t_final=14.0, window=(12.0, 14.0), profile_times=0, profile_span=4.0)
    with pytest.raises(StepUnstable):
        run_lattice(params(), cfg)


def test_decoupled_oscillator_stays_in_ground_state():
    cfg = LatticeConfig(n_sites=800, t_final=10.0, window=(5.0, 10.0), profile_span=4.0)
    rep = extract_report(run_lattice(params(eps=0.0), cfg))
    c = rep.covariance_q
    assert c.qq == pytest.approx(0.5, abs=1e-6) and c.pp == pytest.approx(0.5, abs=1e-6)
    assert abs(c.qp) < 1e-6
    assert rep.passed


def test_no_plateau_detected():
    cfg = LatticeConfig(n_sites=800, t_final=10.0, window=(5.0, 10.0), profile_span=4.0)
    run = run_lattice(params(eps=0.0), cfg)
    ramp = run.cov_q * np.linspace(1.0, 1.2, len(run.times))[:, None]
    with pytest.raises(NoPlateau, match="window"):
        extract_report(replace(run, cov_q=ramp))


def test_effective_cutoffs():
    assert effective_cutoff(LatticeConfig()) == pytest.approx(80.0)
    assert effective_cutoff(LatticeConfig(smear_sigma=0.2)) == pytest.approx(math.exp(-0.5 * np.euler_gamma) / 0.2)


def test_continuum_limit_at_fixed_smearing():
    p = params()
    qq = []
    for dx, n in ((0.05, 2000), (0.025, 4000)):
        cfg = LatticeConfig(n_sites=n, dx=dx, smear_sigma=0.15, dt=0.25 * dx, t_final=40.0, window=(30.0, 40.0), profile_times=0)
        qq.append(run_lattice(p, cfg).covariance_q().qq)
    assert abs(qq[1] - qq[0]) / qq[0] < 5e-3


@pytest.mark.slow
def test_default_run_matches_continuum_modules():
    p = params(mu=0.01, lam=0.7)
    run = cached_run(p, LatticeConfig())
    rep = extract_report(run)
    failed = [c.as_dict() for c in rep.checks if not c.passed]
    assert not failed
    assert rep.plateau["qq"] < 0.01 and rep.plateau["pp"] < 0.01
    assert run.energy_drift < 1e-2
    assert run.covariance_q().pp == pytest.approx(moment_pp(p, cutoff=run.cutoff), rel=0.02)
    i = int(np.argmin(np.abs(run.xs - 1.0)))
    assert run.qphi_dragged[i] == pytest.approx(dragged_term(p, 1.0), rel=0.03)
    assert abs(run.qphi_full[i]) < 1e-4
    assert run.q_two_time[list(run.lags).index(2.0)] == pytest.approx(
        -0.2573317, rel=0.02
    )
    assert rep.covariance_q.qq == pytest.approx(moment_qq(p), rel=0.02)
