import json
import math

import numpy as np
import pytest
import scipy.linalg

import nhmetro

KET0 = np.array([1, 0], dtype=complex)


def test_mat_exp_matches_scipy():
    rng = np.random.default_rng(3)
    for scale in (0.1, 1.0, 8.0):
        a = scale * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        ref = scipy.linalg.expm(a)
        assert np.linalg.norm(nhmetro.mat_exp(a) - ref) <= 1e-12 * max(1.0, np.linalg.norm(ref))


def test_qfi_golden_and_closed_form():
    m = nhmetro.HamiltonianModel.pt(1.0, math.pi / 4, "s")
    rec = nhmetro.qfi_record(m, 1.0, math.pi / 8, KET0)
    assert abs(math.sqrt(rec.F) - 0.4682) < 1e-3
    assert rec.F == pytest.approx(nhmetro.qfi_closed_form(m, 1.0, math.pi / 8), rel=1e-8)
    assert rec.I == pytest.approx(rec.K * rec.F)


def test_generator_against_scipy_derivative():
    # i (dU) U^-1 with dU from scipy's Frechet derivative of expm
    m = nhmetro.HamiltonianModel.kappa(2.0)
    t = math.pi / 6
    h = nhmetro.hamiltonian(m, 2.0)
    dh = nhmetro.d_hamiltonian(m, 2.0)
    u, du = scipy.linalg.expm_frechet(-1j * t * h, -1j * t * dh)
    ref = 1j * du @ np.linalg.inv(u)
    assert np.abs(nhmetro.generator_quadrature(m, 2.0, t) - ref).max() < 1e-9


def test_custom_python_model_hermitian_limit():
    sz = np.diag([0.5, -0.5]).astype(complex)
    m = nhmetro.HamiltonianModel.custom(lambda w: w * sz, lambda w: sz, 0.7, "omega")
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    for t in (0.5, 2.0):
        assert nhmetro.qfi_record(m, 0.7, t, plus).F == pytest.approx(t * t, rel=1e-9)


def test_run_trials_with_threads_and_python_callbacks():
    sz = np.diag([0.5, -0.5]).astype(complex)
    sx = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    m = nhmetro.HamiltonianModel.custom(lambda w: w * sz + sx, lambda w: sz, 0.7)
    obs = nhmetro.Observable.basis_projector(2, 0)
    br = nhmetro.monotone_bracket(m, 1.5, KET0, obs, 0.7, 0.5, 200)
    a = nhmetro.run_trials(m, 0.7, 1.5, KET0, obs, br, n=200, trials=40, seed=5, threads=1)
    b = nhmetro.run_trials(m, 0.7, 1.5, KET0, obs, br, n=200, trials=40, seed=5, threads=3)
    assert a.estimates == b.estimates


def test_pcg32_reference():
    rng = nhmetro.Pcg32(42, 54)
    assert [rng.next_u32() for _ in range(3)] == [0xA15C02B7, 0x7B47F409, 0xBA1D3330]


def test_dilation_recovers_state():
    h = np.array([[1j * math.sin(0.9), 1], [1, -1j * math.sin(0.9)]])
    sys = nhmetro.build_dilation(h)
    assert np.allclose(sys.H_tot, sys.H_tot.conj().T, atol=1e-12)
    d = nhmetro.evolve_dilated(sys, KET0, 3.0)
    v = scipy.linalg.expm(-3j * h) @ KET0
    v /= np.linalg.norm(v)
    assert abs(abs(np.vdot(d.recovered, v)) - 1) < 1e-10


def test_errors_carry_kind():
    with pytest.raises(nhmetro.NhmetroError) as info:
        nhmetro.HamiltonianModel.kappa(1.0)
    assert info.value.kind == "OutOfRange"
    with pytest.raises(nhmetro.NhmetroError) as info:
        nhmetro.solve_eta(np.array([[2j, 1], [1, -2j]]))
    assert info.value.kind == "NoPositiveSolution"


def test_run_cli():
    cfg = {
        "model": {"family": "pt", "params": {"s": 1, "alpha": "pi/4"}, "estimate": "s"},
        "time_grid": {"start": "pi/8", "steps": 1},
    }
    out = nhmetro.run_cli("qfi", json.dumps(cfg))
    assert out["exit_code"] == 0
    header, row = out["csv"].strip().splitlines()
    assert header.split(",")[2] == "sqrtF"
    assert abs(float(row.split(",")[2]) - 0.4682) < 1e-3
    with pytest.raises(nhmetro.NhmetroError) as info:
        nhmetro.run_cli("qfi", json.dumps({"time_grid": {"start": 0, "steps": 1}}))
    assert info.value.kind == "Config"
