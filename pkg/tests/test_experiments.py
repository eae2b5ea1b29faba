import dataclasses
import warnings

import numpy as np
import pytest

from nvdnp import (
    CombSpec,
    FieldVector,
    HyperfineTensor,
    NumericalFailure,
    SweepSpec,
    SystemParams,
    build_lab_hamiltonian,
    classify_regime,
    field_sweep,
    frequency_sweep,
    manifold_structure,
    nuclear_polarization,
    population_spectrum_model,
    power_sweep,
)
from nvdnp import experiments
from nvdnp.experiments import initial_density_matrix, pumped_state, tracked_resonance
from nvdnp.hamiltonian import AntiCrossingWarning, RWAWarning
from nvdnp.spin_ops import electron_projector, kron


def test_classify_regime_boundaries():
    assert classify_regime(1.0, 9.0, 126.0) == "selective"
    assert classify_regime(9.0, 9.0, 126.0) == "lambda"
    assert classify_regime(125.9, 9.0, 126.0) == "lambda"
    assert classify_regime(126.0, 9.0, 126.0) == "broadband"
    with pytest.raises(ValueError):
        classify_regime(1.0, 10.0, 5.0)
    with pytest.raises(ValueError):
        classify_regime(-1.0, 1.0, 5.0)


def test_nuclear_polarization_of_product_states():
    up = np.diag([1.0, 0.0])
    rho = kron(np.diag([0.0, 1.0, 0.0]), up)
    assert nuclear_polarization(rho, [0, 0, 1]) == pytest.approx(1.0)
    assert nuclear_polarization(rho, [0, 0, -1]) == pytest.approx(-1.0)
    assert nuclear_polarization(rho, [1, 0, 0]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        nuclear_polarization(rho, [1, 1, 0])


def test_pumped_state():
    rho = pumped_state(0.9)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.trace(electron_projector(0) @ rho).real == pytest.approx(0.9 + 0.1 / 3)
    assert nuclear_polarization(rho, [0, 0, 1]) == 0.0


def test_initial_state_kinds(tilted_params):
    assert np.allclose(initial_density_matrix("mixed", tilted_params), np.eye(6) / 6)
    custom = np.eye(6) / 6
    assert initial_density_matrix("custom", tilted_params, custom) is not None
    with pytest.raises(ValueError):
        initial_density_matrix("custom", tilted_params)
    with pytest.raises(ValueError):
        initial_density_matrix("thermal", tilted_params)


def test_comb_offsets():
    assert np.allclose(CombSpec().offsets(), [-2.16, 0.0, 2.16])
    assert np.allclose(CombSpec(1).offsets(), [0.0])
    with pytest.raises(ValueError):
        CombSpec(0)
    with pytest.raises(ValueError):
        CombSpec(3, -1.0)


def test_sweep_spec_validation(tilted_params):
    with pytest.raises(ValueError):
        SweepSpec("temperature", (1.0,), tilted_params)
    with pytest.raises(ValueError):
        SweepSpec("mw_frequency", (), tilted_params)
    with pytest.raises(ValueError):
        SweepSpec("mw_frequency", (1.0, 3.0, 2.0), tilted_params)
    with pytest.raises(ValueError):
        SweepSpec("mw_frequency", (1.0,), tilted_params, polarization_time=0.0)
    with pytest.raises(ValueError):
        SweepSpec("mw_frequency", (1.0,), tilted_params, tracked="-1,down")


def _line_grid(params, half_width=15.0, n=31):
    ms = manifold_structure(build_lab_hamiltonian(params))
    mid = ms.energy("-1,down") - 0.5 * (ms.energy("0,up") + ms.energy("0,down"))
    return np.linspace(mid - half_width, mid + half_width, n)


def test_frequency_sweep_shapes_and_physicality(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=1.4)
    grid = _line_grid(p)
    res = frequency_sweep(SweepSpec("mw_frequency", grid, p))
    assert res.populations.shape == (31, 6)
    assert np.allclose(res.populations.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(res.populations > -1e-9)
    assert np.all(np.abs(res.polarization_ms0) <= 1 + 1e-9)
    assert res.regimes == ["selective"] * 31
    assert np.allclose(res.drive_frequency, grid)


def test_sweeps_independent_of_thread_count(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=5.0)
    spec = SweepSpec("mw_frequency", _line_grid(p, n=17), p)
    a = frequency_sweep(spec, threads=1)
    b = frequency_sweep(spec, threads=4)
    assert np.array_equal(a.populations, b.populations)
    assert np.array_equal(a.polarization_target, b.polarization_target)


def test_single_tone_comb_equals_plain_sweep(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=3.0)
    grid = _line_grid(p, n=5)
    plain = frequency_sweep(SweepSpec("mw_frequency", grid, p))
    comb = frequency_sweep(SweepSpec("mw_frequency", grid, p, comb=CombSpec(1)))
    assert np.array_equal(plain.populations, comb.populations)


def test_comb_is_average_of_shifted_tones(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=3.0)
    w = _line_grid(p, n=3)[1]
    comb = frequency_sweep(SweepSpec("mw_frequency", (w,), p, comb=CombSpec()))
    tones = frequency_sweep(SweepSpec("mw_frequency", (w - 2.16, w, w + 2.16), p))
    assert np.allclose(comb.populations[0], tones.populations.mean(axis=0), atol=1e-13)


def test_population_spectrum_readout(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=1.4)
    res = population_spectrum_model(SweepSpec("mw_frequency", _line_grid(p, n=4), p))
    assert res.readout.shape == (4, 3)
    assert np.array_equal(res.readout[:, 2], res.population("-1,down"))


def test_power_sweep_tracks_resonance(tilted_params):
    with pytest.warns(RWAWarning):
        res = power_sweep(SweepSpec("mw_power", (0.0, 1.0, 20.0, 200.0), tilted_params))
    ms = manifold_structure(build_lab_hamiltonian(tilted_params))
    assert np.allclose(res.drive_frequency, tracked_resonance(ms))
    assert res.regimes == ["selective", "selective", "lambda", "broadband"]
    # without drive the pumped, unpolarized state barely changes in 30 us
    assert abs(res.polarization_ms0[0]) < 1e-3
    with pytest.raises(ValueError):
        power_sweep(SweepSpec("mw_power", (-1.0, 1.0), tilted_params))


def test_field_sweep_flags_eslac(weak):
    p = SystemParams(field=FieldVector(0.01), hyperfine=weak, drive_amplitude=0.5)
    with pytest.warns(AntiCrossingWarning):
        res = field_sweep(SweepSpec("field_magnitude", (0.02, 0.05, 0.07), p))
    assert "eslac" in res.flags[1]
    assert "eslac" not in res.flags[0] and "eslac" not in res.flags[2]
    # drive re-centred on the tracked line at every field
    for b, w in zip(res.values, res.drive_frequency):
        ms = manifold_structure(build_lab_hamiltonian(dataclasses.replace(p, field=FieldVector(b))))
        assert w == pytest.approx(tracked_resonance(ms))


def test_sweep_function_variable_mismatch(tilted_params):
    spec = SweepSpec("mw_power", (1.0,), tilted_params)
    with pytest.raises(ValueError):
        frequency_sweep(spec)
    with pytest.raises(ValueError):
        field_sweep(spec)


def test_zero_coupling_never_polarizes():
    p = SystemParams(field=FieldVector.from_degrees(4.04e-3, 42, 85),
                     hyperfine=HyperfineTensor.zero(), drive_amplitude=5.0)
    ms = manifold_structure(build_lab_hamiltonian(p))
    w0 = tracked_resonance(ms)
    res = frequency_sweep(SweepSpec("mw_frequency", np.linspace(w0 - 20, w0 + 20, 9), p))
    for pol in (res.polarization_ms0, res.polarization_target, res.polarization_z):
        assert np.max(np.abs(pol)) < 1e-6


def test_numerical_failure_reports_grid_point(tilted_params, monkeypatch):
    def broken(*args, **kwargs):
        raise NumericalFailure("boom", trace=2.0)

    monkeypatch.setattr(experiments, "propagate", broken)
    with pytest.raises(NumericalFailure) as info:
        frequency_sweep(SweepSpec("mw_frequency", (2737.0,), tilted_params))
    assert info.value.diagnostics["grid_point"] == 2737.0
    assert info.value.diagnostics["trace"] == 2.0


def test_rwa_flag_near_other_transition(tilted_params):
    p = dataclasses.replace(tilted_params, drive_amplitude=2.0)
    ms = manifold_structure(build_lab_hamiltonian(p))
    other = ms.energy("+1,down") - ms.energy("0,down")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = frequency_sweep(SweepSpec("mw_frequency", (other,), p))
    assert "rwa" in res.flags[0]
