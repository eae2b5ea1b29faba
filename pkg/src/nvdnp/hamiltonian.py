"""NV ground-state / 13C Hamiltonians, rotating frame and manifold analysis.

Energies are ordinary frequencies in MHz, fields in tesla, gyromagnetic
ratios in MHz/T. The 2*pi factor is applied once, when a Liouvillian is
assembled.
"""

import warnings
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .spin_ops import (
    DIM,
    MS_INDEX,
    FieldVector,
    bloch_vector,
    electron_ket,
    electron_operator,
    field_components,
    is_hermitian,
    kron,
    nuclear_operator,
    partial_trace_electron,
    spin_operators,
)

GAMMA_E = 28024.95  # MHz/T
GAMMA_13C = 10.7084  # MHz/T

MANIFOLDS = (0, -1, +1)
STATE_NAMES = ("0,up", "0,down", "-1,up", "-1,down", "+1,up", "+1,down")


class AntiCrossingWarning(UserWarning):
    """Field is close to the ground-state level anti-crossing."""


class SecularityWarning(UserWarning):
    """Secular approximation used outside its stated validity."""


class RWAWarning(UserWarning):
    """Drive frequency close to a non-addressed transition."""


class LabelingWarning(UserWarning):
    """Eigenstates too hybridized to label by electronic level."""


@dataclass(frozen=True)
class HyperfineTensor:
    """Hyperfine coupling matrix ``A`` in MHz, entering as ``I . A . S``."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.shape != (3, 3):
            raise ValueError("hyperfine tensor must be 3x3")
        if not np.all(np.isfinite(a)):
            raise ValueError("hyperfine tensor has non-finite entries")
        if np.max(np.abs(a - a.T)) > 1e-9:
            raise ValueError("hyperfine tensor is not symmetric (tolerance 1e-9 MHz)")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @classmethod
    def zero(cls):
        return cls(np.zeros((3, 3)))

    @classmethod
    def axial(cls, a_parallel, a_perpendicular, axis):
        """Axially symmetric tensor with unique axis ``axis`` (NV frame)."""
        n = np.asarray(axis, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(a_perpendicular * np.eye(3) + (a_parallel - a_perpendicular) * np.outer(n, n))

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.matrix)))


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of one simulation point.

    Frequencies in MHz, rates in 1/us, field in tesla. ``drive_frequency``
    may be None, meaning "pick the tracked resonance" in the sweep routines.
    """

    field: FieldVector
    hyperfine: HyperfineTensor
    D0: float = 2870.0
    gamma_e: float = GAMMA_E
    gamma_n: float = GAMMA_13C
    drive_amplitude: float = 0.0
    drive_frequency: float | None = None
    pump_rate: float = 1.0 / 3.0
    pump_efficiency: float = 0.9
    pump_inefficiency: str = "reverse"
    electron_dephasing: float = 0.0
    nuclear_dephasing: float = 0.0
    target: int = -1
    anticrossing_threshold: float = 200.0

    def __post_init__(self):
        scalars = ["D0", "gamma_e", "gamma_n", "drive_amplitude", "pump_rate",
                   "pump_efficiency", "electron_dephasing", "nuclear_dephasing",
                   "anticrossing_threshold"]
        for name in scalars:
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.drive_frequency is not None and not np.isfinite(self.drive_frequency):
            raise ValueError("drive_frequency must be finite")
        if self.D0 <= 0:
            raise ValueError("D0 must be > 0")
        if self.pump_rate < 0:
            raise ValueError("pump_rate must be >= 0")
        if not 0.0 <= self.pump_efficiency <= 1.0:
            raise ValueError("pump_efficiency must lie in [0, 1]")
        if self.drive_amplitude < 0:
            raise ValueError("drive_amplitude must be >= 0")
        if self.electron_dephasing < 0 or self.nuclear_dephasing < 0:
            raise ValueError("dephasing rates must be >= 0")
        if self.target not in (-1, +1):
            raise ValueError("target transition must be 0<->-1 (target=-1) or 0<->+1 (target=+1)")

    def near_anticrossing(self):
        return abs(self.D0 - self.gamma_e * self.field.magnitude) < self.anticrossing_threshold


def _spin_vectors():
    s = [electron_operator(op) for op in spin_operators(1)]
    i = [nuclear_operator(op) for op in spin_operators(0.5)]
    return s, i


def build_lab_hamiltonian(p, nuclear_zeeman="gamma_n"):
    """Full 6x6 lab-frame Hamiltonian ``D0 Sz^2 + ge S.B + gn I.B + I.A.S``.

    ``nuclear_zeeman="gamma_e"`` multiplies the nuclear Zeeman term by the
    electronic ratio instead, for comparison with that printed variant.
    """
    if nuclear_zeeman not in ("gamma_n", "gamma_e"):
        raise ValueError("nuclear_zeeman must be 'gamma_n' or 'gamma_e'")
    if p.near_anticrossing():
        warnings.warn(
            f"|D0 - gamma_e |B|| = {abs(p.D0 - p.gamma_e * p.field.magnitude):.1f} MHz is below "
            f"{p.anticrossing_threshold:g} MHz; model not valid near the level anti-crossing",
            AntiCrossingWarning,
            stacklevel=2,
        )
    s, i = _spin_vectors()
    b = field_components(p.field)
    gn = p.gamma_n if nuclear_zeeman == "gamma_n" else p.gamma_e
    a = p.hyperfine.matrix
    h = p.D0 * s[2] @ s[2]
    for k in range(3):
        h = h + p.gamma_e * b[k] * s[k] + gn * b[k] * i[k]
    for u in range(3):
        for v in range(3):
            if a[u, v] != 0.0:
                h = h + a[u, v] * i[u] @ s[v]
    return 0.5 * (h + h.conj().T)


def build_secular_hamiltonian(p, secularity_ratio=10.0):
    """Secular Hamiltonian for a field along the NV axis.

    ``D0 Sz^2 + (ge Sz + gn Iz) B0 + Azz Sz Iz + Azx Sz Ix + Azy Sz Iy``; the
    last term vanishes in the frame where x is chosen so that Azy = 0.
    """
    if abs(p.field.theta) > 1e-12:
        raise ValueError("secular Hamiltonian requires a field aligned with the NV axis (theta = 0)")
    b0 = p.field.magnitude
    amax = p.hyperfine.max_abs
    gap = min(abs(p.D0 - p.gamma_e * b0), abs(p.D0 + p.gamma_e * b0))
    if amax > 0 and gap < secularity_ratio * amax:
        warnings.warn(
            f"secularity ratio {gap / amax:.2f} below {secularity_ratio:g}",
            SecularityWarning,
            stacklevel=2,
        )
    s, i = _spin_vectors()
    a = p.hyperfine.matrix
    h = p.D0 * s[2] @ s[2] + (p.gamma_e * s[2] + p.gamma_n * i[2]) * b0
    h = h + a[2, 2] * s[2] @ i[2] + a[0, 2] * s[2] @ i[0] + a[1, 2] * s[2] @ i[1]
    return 0.5 * (h + h.conj().T)


@dataclass(frozen=True)
class ManifoldStructure:
    """Eigen-decomposition of a 6x6 Hamiltonian organized by electronic level.

    ``states`` maps names such as ``"0,up"`` or ``"-1,down"`` to eigenvector
    column indices; "up" is the higher-energy member of each pair.
    ``nuclear_axes[ms]`` is the Bloch direction of the nuclear part of the
    "up" state in manifold ``ms``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    manifold_labels: tuple
    states: dict
    delta: float
    Delta: float
    nuclear_axes: dict
    overlaps: np.ndarray = dc_field(repr=False)
    ambiguous: bool = False

    def index(self, name):
        return self.states[name]

    def energy(self, name):
        return float(self.eigenvalues[self.states[name]])

    def vector(self, name):
        return self.eigenvectors[:, self.states[name]]

    def members(self, ms):
        return [k for k, lab in enumerate(self.manifold_labels) if lab == ms]

    def projector(self, ms):
        v = self.eigenvectors[:, self.members(ms)]
        return v @ v.conj().T

    def splitting(self, ms):
        return self.energy(f"{_ms_tag(ms)},up") - self.energy(f"{_ms_tag(ms)},down")

    def to_eigenbasis(self, op):
        v = self.eigenvectors
        return v.conj().T @ op @ v

    def populations(self, rho):
        """Eigenstate populations in ``STATE_NAMES`` order."""
        diag = np.einsum("ik,ij,jk->k", self.eigenvectors.conj(), rho, self.eigenvectors).real
        return np.array([diag[self.states[n]] for n in STATE_NAMES])


def _ms_tag(ms):
    return {0: "0", -1: "-1", 1: "+1"}[ms]


def manifold_structure(h, ambiguity_threshold=0.6):
    """Diagonalize ``h`` and label eigenstates by dominant electronic level."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (DIM, DIM) or not is_hermitian(h, 1e-10):
        raise ValueError("manifold_structure needs a Hermitian 6x6 matrix")
    evals, evecs = np.linalg.eigh(h)
    amp = evecs.reshape(3, 2, DIM)
    ms_order = (+1, 0, -1)
    overlaps = np.stack([np.sum(np.abs(amp[MS_INDEX[m]]) ** 2, axis=0) for m in ms_order], axis=1)
    # two slots per electronic level
    slots = [m for m in ms_order for _ in range(2)]
    cost = -np.stack([overlaps[:, ms_order.index(m)] for m in slots], axis=1)
    rows, cols = linear_sum_assignment(cost)
    labels = [None] * DIM
    for r, c in zip(rows, cols):
        labels[r] = slots[c]
    assigned = np.array([overlaps[k, ms_order.index(labels[k])] for k in range(DIM)])
    ambiguous = bool(np.any(assigned < ambiguity_threshold))
    if ambiguous:
        warnings.warn(
            f"eigenstate labeling ambiguous (min dominant overlap {assigned.min():.3f})",
            LabelingWarning,
            stacklevel=2,
        )
    states = {}
    axes = {}
    for m in MANIFOLDS:
        lo, hi = sorted((k for k in range(DIM) if labels[k] == m), key=lambda k: evals[k])
        states[f"{_ms_tag(m)},down"] = lo
        states[f"{_ms_tag(m)},up"] = hi
        v = evecs[:, hi]
        r = bloch_vector(partial_trace_electron(np.outer(v, v.conj())))
        norm = np.linalg.norm(r)
        axes[m] = r / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
    delta = float(evals[states["0,up"]] - evals[states["0,down"]])
    Delta = float(evals[states["-1,up"]] - evals[states["-1,down"]])
    return ManifoldStructure(
        eigenvalues=evals,
        eigenvectors=evecs,
        manifold_labels=tuple(labels),
        states=states,
        delta=delta,
        Delta=Delta,
        nuclear_axes=axes,
        overlaps=overlaps,
        ambiguous=ambiguous,
    )


def drive_operator(target=-1):
    """Bare ``(|0><t| + |t><0|) (x) 1_nuc`` with unit matrix elements."""
    e0, et = electron_ket(0), electron_ket(target)
    x = np.outer(e0, et.conj())
    return kron(x + x.conj().T, np.eye(2))


def rotating_frame(h_lab, omega, rabi, target=-1, structure=None, rwa_factor=5.0):
    """Time-independent Hamiltonian in the frame rotating at ``omega``.

    The frame generator is ``omega`` times the projector onto the dressed
    target manifold, which commutes with ``h_lab``. Only the drive components
    between the dressed m_s=0 and target manifolds survive the rotating-wave
    approximation, with amplitude ``rabi / 2``.
    """
    h_lab = np.asarray(h_lab, dtype=complex)
    if not is_hermitian(h_lab, 1e-10):
        raise ValueError("h_lab must be Hermitian")
    ms = structure if structure is not None else manifold_structure(h_lab)
    p_t = ms.projector(target)
    p_0 = ms.projector(0)
    if rabi > 0:
        other = -target
        e0 = [ms.eigenvalues[k] for k in ms.members(0)]
        eo = [ms.eigenvalues[k] for k in ms.members(other)]
        closest = min(abs(abs(b - a) - omega) for a in e0 for b in eo)
        if closest < rwa_factor * rabi:
            warnings.warn(
                f"drive at {omega:.3f} MHz lies {closest:.1f} MHz from a non-addressed "
                f"transition (< {rwa_factor:g} x Rabi); rotating-wave approximation unreliable",
                RWAWarning,
                stacklevel=2,
            )
    x = drive_operator(target)
    coupling = p_0 @ x @ p_t
    h = h_lab - omega * p_t + 0.5 * rabi * (coupling + coupling.conj().T)
    return 0.5 * (h + h.conj().T)


class Transition(NamedTuple):
    lower: str
    upper: str
    frequency: float
    weight: float


def transition_table(ms, target=-1):
    """All m_s=0 <-> target-manifold transitions with MW weights ``2|<i|Sx|j>|^2``.

    Weights are normalized so a bare electronic transition has weight 1.
    """
    sx = electron_operator(spin_operators(1)[0])
    tag = _ms_tag(target)
    out = []
    for nu in ("up", "down"):
        for n0 in ("up", "down"):
            i, j = ms.vector(f"0,{n0}"), ms.vector(f"{tag},{nu}")
            w = 2.0 * abs(i.conj() @ sx @ j) ** 2
            f = ms.energy(f"{tag},{nu}") - ms.energy(f"0,{n0}")
            out.append(Transition(f"0,{n0}", f"{tag},{nu}", float(f), float(w)))
    return out


def transition_frequency(ms, lower, upper):
    return ms.energy(upper) - ms.energy(lower)
