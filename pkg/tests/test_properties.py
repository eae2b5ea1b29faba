"""Physical and numerical properties of the full pipeline beyond unit behaviour."""

import dataclasses
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm as scipy_expm
from scipy.stats import unitary_group

from conftest import random_density_matrix, random_hermitian
from oracles import long_ode_propagate
from nvdnp import (
    FieldVector,
    HyperfineTensor,
    PumpModel,
    SweepSpec,
    SystemParams,
    build_lab_hamiltonian,
    build_liouvillian,
    classify_regime,
    frame_jump_operators,
    frequency_sweep,
    manifold_structure,
    population_spectrum_model,
    propagate,
    pump_jump_operators,
    rotating_frame,
    steady_state,
    transition_table,
)
from nvdnp.experiments import pumped_state
from nvdnp.lindblad import propagator, trace_functional
from nvdnp.linalg import expm
from nvdnp.spin_ops import MS_INDEX, electron_ket, electron_operator, kron, spin_operators


def _partial_trace_electron(rho):
    return np.einsum("aiaj->ij", np.asarray(rho).reshape(3, 2, 3, 2))


def _equal_weight_params(azx, rabi):
    """Aligned 89 mT field with a tensor whose two m_s=0 <-> -1 lines carry equal weight."""
    b = 0.089
    a = HyperfineTensor(np.array([[2.0, 0.0, azx], [0.0, 2.0, 0.0], [azx, 0.0, 10.7084 * b]]))
    return SystemParams(field=FieldVector(b), hyperfine=a, pump_efficiency=1.0, drive_amplitude=rabi)


def _driven_point(params, omega):
    h = build_lab_hamiltonian(params)
    ms = manifold_structure(h)
    jumps = frame_jump_operators(
        pump_jump_operators(PumpModel(params.pump_rate, params.pump_efficiency)), ms, params.target)
    return h, ms, rotating_frame(h, omega, params.drive_amplitude, structure=ms), jumps


def _midpoint(params):
    """Drive frequency halfway between the two m_s=0 -> (-1, down) lines."""
    ms = manifold_structure(build_lab_hamiltonian(params))
    return ms.energy("-1,down") - 0.5 * (ms.energy("0,up") + ms.energy("0,down"))


# -- extended-precision exponential ------------------------------------------

@pytest.mark.parametrize("scale", [1e-3, 0.5, 3.0, 30.0])
def test_extended_expm_matches_scipy(rng, scale):
    a = scale * (rng.normal(size=(36, 36)) + 1j * rng.normal(size=(36, 36)))
    ref = scipy_expm(a)
    got = expm(a, extended=True)
    assert got.dtype == np.complex128
    assert np.max(np.abs(got - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_extended_expm_keeps_trace_over_long_horizons():
    # large transverse coupling at high field: tens of thousands of radians of phase in 30 us
    params = _equal_weight_params(60.0, 0.2)
    _h, _ms, h_rf, jumps = _driven_point(params, _midpoint(params))
    lt = build_liouvillian(h_rf, jumps) * 30.0
    tr = trace_functional()
    rho0 = pumped_state(1.0).ravel(order="F")
    assert abs(tr @ (expm(lt, extended=True) @ rho0) - 1.0) < 1e-12
    # the propagation path uses the extended mode and passes the invariant checks
    rho = propagate(pumped_state(1.0), build_liouvillian(h_rf, jumps), 30.0)
    assert abs(np.trace(rho) - 1.0) < 1e-12


# -- spectra -----------------------------------------------------------------

def test_equal_weight_selective_spectrum_is_antisymmetric():
    params = _equal_weight_params(60.0, 0.2)
    weights = [t.weight for t in transition_table(manifold_structure(build_lab_hamiltonian(params)))]
    assert weights[0] == pytest.approx(weights[1], rel=0.1)
    mid = _midpoint(params)
    r = frequency_sweep(SweepSpec("mw_frequency", mid + np.linspace(-2.0, 2.0, 161), params))
    p = r.polarization_ms0
    assert np.max(np.abs(p + p[::-1])) <= 0.05 * np.max(np.abs(p))
    assert p.max() > 0.5 and p.min() < -0.5


def test_undriven_spectrum_is_flat(tilted_params):
    grid = np.linspace(2720.0, 2745.0, 11)
    r = frequency_sweep(SweepSpec("mw_frequency", grid, tilted_params))
    for col in (r.populations, r.polarization_ms0[:, None], r.polarization_target[:, None]):
        assert np.ptp(col, axis=0).max() < 1e-10


def test_selective_drive_shelves_population_in_other_nuclear_state(tilted_params):
    params = dataclasses.replace(tilted_params, drive_amplitude=1.4)
    ms = manifold_structure(build_lab_hamiltonian(params))
    w_down = ms.energy("-1,down") - ms.energy("0,down")
    w_up = ms.energy("-1,down") - ms.energy("0,up")
    grid = np.linspace(min(w_down, w_up) - 8.0, max(w_down, w_up) + 8.0, 161)
    r = population_spectrum_model(SweepSpec("mw_frequency", grid, params))
    step = grid[1] - grid[0]
    assert abs(grid[np.argmax(r.population("0,up"))] - w_down) <= step
    assert abs(grid[np.argmax(r.population("0,down"))] - w_up) <= step
    assert np.all(r.readout.sum(axis=1) <= 1.0 + 1e-12)
    assert np.all(r.readout >= -1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 500.0), st.floats(0.01, 50.0), st.floats(1.0, 20.0), st.floats(1e-3, 1e3))
def test_regime_label_is_scale_invariant(rabi, delta, ratio, scale):
    Delta = delta * ratio
    assert classify_regime(rabi, delta, Delta) == classify_regime(rabi * scale, delta * scale, Delta * scale)


# -- generator structure -----------------------------------------------------

def test_pumping_leaves_nucleus_untouched(rng):
    h = 2870.0 * electron_operator(spin_operators(1)[2] @ spin_operators(1)[2])
    lv = build_liouvillian(h, pump_jump_operators(PumpModel(0.5, 0.8)))
    rho = random_density_matrix(rng)
    nuclear0 = _partial_trace_electron(rho)
    for t in (0.3, 3.0, 30.0):
        assert np.max(np.abs(_partial_trace_electron(propagate(rho, lv, t)) - nuclear0)) < 1e-10


@pytest.mark.parametrize("inefficiency", ["reverse", "randomize"])
def test_pump_jumps_commute_with_nuclear_rotations(inefficiency):
    u = kron(np.eye(3), unitary_group.rvs(2, random_state=7))
    for j, _g in pump_jump_operators(PumpModel(1.0, 0.7, inefficiency)):
        assert np.max(np.abs(j @ u - u @ j)) < 1e-14


def test_single_jump_decays_exponentially():
    rate = 0.37
    jump = kron(np.outer(electron_ket(0), electron_ket(-1)), np.eye(2))
    lv = build_liouvillian(np.zeros((6, 6)), [(jump, rate)])
    rho0 = kron(np.outer(electron_ket(-1), electron_ket(-1)), np.eye(2) / 2.0)
    i = 2 * MS_INDEX[-1]
    for t in (0.1, 1.0, 5.0, 20.0):
        rho = propagate(rho0, lv, t)
        p = rho[i, i].real + rho[i + 1, i + 1].real
        assert p == pytest.approx(np.exp(-rate * t), rel=1e-12, abs=1e-15)


def test_closed_system_spectrum_is_imaginary(rng):
    lv = build_liouvillian(random_hermitian(rng, 6, 10.0))
    assert np.max(np.abs(np.linalg.eigvals(lv).real)) < 1e-10


def test_driven_generator_has_unique_attracting_steady_state(tilted_params):
    params = dataclasses.replace(tilted_params, drive_amplitude=1.4)
    h = build_lab_hamiltonian(params)
    ms = manifold_structure(h)
    omega = ms.energy("-1,down") - ms.energy("0,down")
    _h, _ms, h_rf, jumps = _driven_point(params, omega)
    lv = build_liouvillian(h_rf, jumps)
    ev = np.sort(np.abs(np.linalg.eigvals(lv)))
    assert ev[0] < 1e-10 and ev[1] > 1e-2
    ss = steady_state(lv)
    assert np.max(np.abs(propagate(pumped_state(0.9), lv, 1000.0) - ss)) < 1e-6


def test_propagator_composes_over_a_polarization_window(tilted_params):
    params = dataclasses.replace(tilted_params, drive_amplitude=11.9)
    _h, _ms, h_rf, jumps = _driven_point(params, _midpoint(params))
    lv = build_liouvillian(h_rf, jumps)
    whole = propagator(lv, 30.0)
    step = propagator(lv, 3.0)
    assert np.max(np.abs(whole - np.linalg.matrix_power(step, 10))) < 1e-9


# -- long-horizon oracle -------------------------------------------------------

def test_polarization_window_matches_compiled_ode(tilted_params):
    params = dataclasses.replace(tilted_params, drive_amplitude=1.4)
    h = build_lab_hamiltonian(params)
    ms = manifold_structure(h)
    omega = ms.energy("-1,down") - ms.energy("0,down")
    _h, _ms, h_rf, jumps = _driven_point(params, omega)
    rho0 = pumped_state(params.pump_efficiency)
    start = time.perf_counter()
    ref = long_ode_propagate(rho0, h_rf, jumps, 30.0)
    elapsed = time.perf_counter() - start
    got = propagate(rho0, build_liouvillian(h_rf, jumps), 30.0)
    assert np.max(np.abs(ms.populations(got) - ms.populations(ref))) < 1e-8, elapsed
