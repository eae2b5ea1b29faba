"""Simulated experiments: MW frequency, power and field sweeps.

Every sweep point builds the lab Hamiltonian, moves to the MW rotating frame,
adds laser-pumping jumps and propagates the optically pumped initial state
for ``polarization_time`` microseconds.
"""

import dataclasses
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import (
    STATE_NAMES,
    AntiCrossingWarning,
    build_lab_hamiltonian,
    manifold_structure,
    rotating_frame,
)
from .lindblad import (
    NumericalFailure,
    PumpModel,
    build_liouvillian,
    dephasing_jump_operators,
    frame_jump_operators,
    propagate,
    pump_jump_operators,
)
from .spin_ops import (
    MS_INDEX,
    electron_operator,
    kron,
    nuclear_operator,
    spin_operators,
)

SELECTIVE = "selective"
LAMBDA = "lambda"
BROADBAND = "broadband"

READOUT_STATES = ("0,up", "0,down", "-1,down")


def classify_regime(rabi, delta, Delta, lambda_at=1.0, broadband_at=1.0):
    """Label the drive regime from the Rabi frequency and the two splittings.

    selective if ``rabi < lambda_at * delta``, broadband if
    ``rabi >= broadband_at * Delta``, lambda in between.
    """
    if min(rabi, delta, Delta) < 0:
        raise ValueError("rabi frequency and splittings must be >= 0")
    if delta > Delta:
        raise ValueError(f"expected delta <= Delta, got {delta} > {Delta}")
    if rabi >= broadband_at * Delta:
        return BROADBAND
    if rabi < lambda_at * delta:
        return SELECTIVE
    return LAMBDA


def nuclear_polarization(rho, axis):
    """``2 Tr(rho (1_e (x) n.I))`` for a unit 3-vector ``n``."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("polarization axis must be a unit 3-vector")
    ops = spin_operators(0.5)
    proj = nuclear_operator(sum(c * o for c, o in zip(n, ops)))
    return float(2.0 * np.trace(np.asarray(rho) @ proj).real)


def pumped_state(efficiency):
    """Electron pumped into m_s=0 with the given efficiency, nucleus unpolarized."""
    e = (1.0 - efficiency) / 3.0 * np.eye(3, dtype=complex)
    e[MS_INDEX[0], MS_INDEX[0]] += efficiency
    return kron(e, np.eye(2) / 2.0)


def initial_density_matrix(kind, params, custom=None):
    if kind == "pumped":
        return pumped_state(params.pump_efficiency)
    if kind == "mixed":
        return np.eye(6, dtype=complex) / 6.0
    if kind == "custom":
        if custom is None:
            raise ValueError("custom initial state requested without a matrix")
        return np.asarray(custom, dtype=complex)
    raise ValueError(f"unknown initial state {kind!r}")


@dataclass(frozen=True)
class CombSpec:
    """Equal-weight ensemble over ``tone_count`` tones spaced by ``tone_spacing`` MHz."""

    tone_count: int = 3
    tone_spacing: float = 2.16

    def __post_init__(self):
        if self.tone_count < 1:
            raise ValueError("comb needs at least one tone")
        if not self.tone_spacing > 0:
            raise ValueError("comb tone spacing must be > 0")

    def offsets(self):
        k = np.arange(self.tone_count) - (self.tone_count - 1) / 2.0
        return k * self.tone_spacing


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple
    params: object
    polarization_time: float = 30.0
    initial_state: str = "pumped"
    custom_state: object = None
    comb: CombSpec | None = None
    tracked: str = "0,down"
    eslac_window: tuple = (0.040, 0.060)

    def __post_init__(self):
        if self.variable not in ("mw_frequency", "mw_power", "field_magnitude"):
            raise ValueError(f"unknown swept variable {self.variable!r}")
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("sweep grid must be a nonempty 1-D sequence")
        d = np.diff(g)
        if g.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("sweep grid must be strictly monotonic")
        object.__setattr__(self, "grid", tuple(float(x) for x in g))
        if not self.polarization_time > 0:
            raise ValueError("polarization_time must be > 0")
        if self.tracked not in ("0,up", "0,down"):
            raise ValueError("tracked transition must start from '0,up' or '0,down'")


@dataclass
class SweepResult:
    """Tabulated sweep: one row per grid value.

    ``populations`` columns follow ``state_names``; polarizations are along
    the m_s=0 nuclear axis, the target-manifold nuclear axis and lab z.
    """

    variable: str
    values: np.ndarray
    populations: np.ndarray
    polarization_ms0: np.ndarray
    polarization_target: np.ndarray
    polarization_z: np.ndarray
    regimes: list
    drive_frequency: np.ndarray
    delta: np.ndarray
    Delta: np.ndarray
    flags: list
    state_names: tuple = STATE_NAMES
    readout: np.ndarray | None = field(default=None)

    def population(self, name):
        return self.populations[:, self.state_names.index(name)]


def tracked_resonance(structure, lower="0,down", target=-1):
    tag = "-1" if target == -1 else "+1"
    return structure.energy(f"{tag},down") - structure.energy(lower)


def _rwa_close(structure, omega, rabi, target, factor=5.0):
    if rabi <= 0:
        return False
    e0 = [structure.eigenvalues[k] for k in structure.members(0)]
    eo = [structure.eigenvalues[k] for k in structure.members(-target)]
    return min(abs(abs(b - a) - omega) for a in e0 for b in eo) < factor * rabi


class _Point:
    """Observables of one (params, drive frequency) point, comb-averaged if requested."""

    def __init__(self, spec):
        self.spec = spec

    def __call__(self, params, omega):
        spec = self.spec
        try:
            h_lab = build_lab_hamiltonian(params)
            ms = manifold_structure(h_lab)
            if omega is None:
                omega = tracked_resonance(ms, spec.tracked, params.target)
            rho0 = initial_density_matrix(spec.initial_state, params, spec.custom_state)
            jumps = pump_jump_operators(PumpModel(params.pump_rate, params.pump_efficiency, params.pump_inefficiency))
            jumps += dephasing_jump_operators(params.electron_dephasing, params.nuclear_dephasing)
            jumps = frame_jump_operators(jumps, ms, params.target)
            offsets = spec.comb.offsets() if spec.comb is not None else np.zeros(1)
            rows = []
            for off in offsets:
                w = omega + off
                h_rf = rotating_frame(h_lab, w, params.drive_amplitude, params.target, structure=ms)
                rho = propagate(rho0, build_liouvillian(h_rf, jumps), spec.polarization_time)
                rows.append(self.observables(rho, ms, params.target))
            obs = np.mean(np.array(rows), axis=0)
        except NumericalFailure as exc:
            raise NumericalFailure(f"{spec.variable} grid point failed: {exc}",
                                   **exc.diagnostics) from exc
        flags = []
        if params.near_anticrossing():
            flags.append("anticrossing")
        if any(_rwa_close(ms, omega + off, params.drive_amplitude, params.target) for off in offsets):
            flags.append("rwa")
        if ms.ambiguous:
            flags.append("labeling")
        return obs, omega, ms, flags

    @staticmethod
    def observables(rho, ms, target):
        pops = ms.populations(rho)
        return np.concatenate([
            pops,
            [
                nuclear_polarization(rho, ms.nuclear_axes[0]),
                nuclear_polarization(rho, ms.nuclear_axes[target]),
                nuclear_polarization(rho, np.array([0.0, 0.0, 1.0])),
            ],
        ])


def _run(spec, jobs, threads):
    point = _Point(spec)

    def one(job):
        value, params, omega = job
        try:
            return point(params, omega)
        except NumericalFailure as exc:
            exc.diagnostics.setdefault("grid_point", value)
            raise

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(one, jobs))
    else:
        outs = [one(j) for j in jobs]
    return outs


def _assemble(spec, values, outs, extra_flags=None):
    obs = np.array([o[0] for o in outs])
    structures = [o[2] for o in outs]
    deltas = np.array([s.delta for s in structures])
    Deltas = np.array([s.Delta for s in structures])
    rabis = [spec.params.drive_amplitude] * len(values)
    if spec.variable == "mw_power":
        rabis = list(values)
    regimes = [classify_regime(r, min(d, D), max(d, D)) for r, d, D in zip(rabis, deltas, Deltas)]
    flags = [tuple(o[3] + (extra_flags[i] if extra_flags else [])) for i, o in enumerate(outs)]
    return SweepResult(
        variable=spec.variable,
        values=np.asarray(values, dtype=float),
        populations=obs[:, :6],
        polarization_ms0=obs[:, 6],
        polarization_target=obs[:, 7],
        polarization_z=obs[:, 8],
        regimes=regimes,
        drive_frequency=np.array([o[1] for o in outs]),
        delta=deltas,
        Delta=Deltas,
        flags=flags,
    )


def frequency_sweep(spec, threads=1):
    """Populations and polarizations versus MW frequency (MHz)."""
    if spec.variable != "mw_frequency":
        raise ValueError("frequency_sweep needs swept_variable 'mw_frequency'")
    jobs = [(w, spec.params, w) for w in spec.grid]
    return _assemble(spec, spec.grid, _run(spec, jobs, threads))


def population_spectrum_model(spec, threads=1):
    """Frequency sweep plus the three populations an optical readout reconstructs."""
    res = frequency_sweep(spec, threads)
    res.readout = np.stack([res.population(n) for n in READOUT_STATES], axis=1)
    return res


def power_sweep(spec, threads=1):
    """Observables versus Rabi frequency (MHz) at fixed or tracked-resonant MW frequency."""
    if spec.variable != "mw_power":
        raise ValueError("power_sweep needs swept_variable 'mw_power'")
    if min(spec.grid) < 0:
        raise ValueError("Rabi frequencies must be >= 0")
    omega = spec.params.drive_frequency
    jobs = [(r, dataclasses.replace(spec.params, drive_amplitude=r), omega) for r in spec.grid]
    return _assemble(spec, spec.grid, _run(spec, jobs, threads))


def field_sweep(spec, threads=1):
    """Observables versus field magnitude (tesla), re-centering the drive on the tracked transition."""
    if spec.variable != "field_magnitude":
        raise ValueError("field_sweep needs swept_variable 'field_magnitude'")
    lo, hi = spec.eslac_window
    jobs, extra = [], []
    for b in spec.grid:
        p = dataclasses.replace(spec.params, field=spec.params.field.with_magnitude(b))
        jobs.append((b, p, None))
        if lo <= b <= hi:
            warnings.warn(
                f"|B| = {b * 1e3:.2f} mT inside the excited-state anti-crossing window "
                f"[{lo * 1e3:g}, {hi * 1e3:g}] mT; outside model validity",
                AntiCrossingWarning,
                stacklevel=2,
            )
            extra.append(["eslac"])
        else:
            extra.append([])
    return _assemble(spec, spec.grid, _run(spec, jobs, threads), extra)
