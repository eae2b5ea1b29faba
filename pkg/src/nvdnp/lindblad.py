"""Lindblad generator, propagation and steady states for the 6-level system.

Density matrices are vectorized by column stacking,
``vec(rho)[i + n*j] == rho[i, j]``, so ``vec(A rho B) = (B^T kron A) vec(rho)``.
Hamiltonians are in MHz and rates in 1/us; the Liouvillian is in rad/us.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import expm
from .spin_ops import DIM, electron_ket, is_hermitian, kron, nuclear_operator, electron_operator, spin_operators

TWO_PI = 2.0 * np.pi


class NumericalFailure(RuntimeError):
    """A computed state or generator violates a required invariant."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateGeneratorError(NumericalFailure):
    """The generator has no zero eigenvalue, so no steady state exists."""


class NonUniqueSteadyStateWarning(UserWarning):
    """The generator's nullspace is more than one-dimensional."""


@dataclass(frozen=True)
class PumpModel:
    """Optical pumping: total rate ``rate`` (1/us), fraction ``efficiency`` into m_s=0."""

    rate: float
    efficiency: float = 1.0
    inefficiency: str = "reverse"

    def __post_init__(self):
        if not (np.isfinite(self.rate) and self.rate >= 0):
            raise ValueError("pump rate must be finite and >= 0")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("pump efficiency must lie in [0, 1]")
        if self.inefficiency not in ("randomize", "reverse"):
            raise ValueError("inefficiency model must be 'randomize' or 'reverse'")


def _electronic_jump(to_ms, from_ms):
    return kron(np.outer(electron_ket(to_ms), electron_ket(from_ms).conj()), np.eye(2))


def pump_jump_operators(pm):
    """Nuclear-conserving jump operators ``[(J, rate), ...]`` for laser pumping.

    The efficient part moves m_s=+-1 to m_s=0 at ``efficiency * rate`` per
    branch. The remaining ``(1 - efficiency) * rate`` is either split over
    the two reverse jumps m_s=0 -> +-1 (``"reverse"``, undriven steady state
    holds ``efficiency`` in m_s=0) or spread uniformly from m_s=+-1 over all
    three levels (``"randomize"``, undriven steady state fully in m_s=0).
    Every operator acts as the identity on the nucleus.
    """
    jumps = []
    if pm.rate == 0:
        return jumps
    good = pm.efficiency * pm.rate
    if good > 0:
        jumps += [(_electronic_jump(0, -1), good), (_electronic_jump(0, +1), good)]
    if pm.efficiency == 1.0:
        return jumps
    if pm.inefficiency == "reverse":
        bad = (1.0 - pm.efficiency) * pm.rate / 2.0
        jumps += [(_electronic_jump(-1, 0), bad), (_electronic_jump(+1, 0), bad)]
    else:
        bad = (1.0 - pm.efficiency) * pm.rate / 3.0
        for src in (-1, +1):
            for dst in (0, -1, +1):
                jumps.append((_electronic_jump(dst, src), bad))
    return jumps


def dephasing_jump_operators(electron_rate=0.0, nuclear_rate=0.0):
    """Optional pure-dephasing channels (``Sz`` and ``2 Iz``); empty for zero rates."""
    jumps = []
    if electron_rate > 0:
        jumps.append((electron_operator(spin_operators(1)[2]), electron_rate))
    if nuclear_rate > 0:
        jumps.append((nuclear_operator(2 * spin_operators(0.5)[2]), nuclear_rate))
    return jumps


def frame_jump_operators(jumps, structure, target=-1):
    """Express lab-frame jump operators in the rotating frame.

    Each operator is split into components between dressed manifolds; parts
    that acquire the same phase in the frame are kept together and parts that
    rotate at different frequencies become separate channels with the same
    rate (their cross terms average out).
    """
    proj = {m: structure.projector(m) for m in (0, -1, +1)}
    rot = {m: 1 if m == target else 0 for m in proj}
    out = []
    for j, rate in jumps:
        groups = {}
        for a in proj:
            for b in proj:
                comp = proj[a] @ j @ proj[b]
                key = rot[a] - rot[b]
                groups[key] = groups.get(key, 0) + comp
        for key in (0, 1, -1):
            comp = groups.get(key)
            if comp is not None and np.linalg.norm(comp) > 1e-14:
                out.append((comp, rate))
    return out


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=DIM):
    return np.asarray(v).reshape(dim, dim, order="F")


def build_liouvillian(h, jumps=()):
    """Superoperator of ``-i 2pi [h, .] + sum_k g_k (J . J^+ - {J^+J, .}/2)``."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, 1e-10):
        raise ValueError("Hamiltonian is not Hermitian")
    n = h.shape[0]
    ident = np.eye(n)
    lv = -1j * TWO_PI * (np.kron(ident, h) - np.kron(h.T, ident))
    for j, rate in jumps:
        if rate < 0:
            raise ValueError("jump rates must be >= 0")
        j = np.asarray(j, dtype=complex)
        jdj = j.conj().T @ j
        lv = lv + rate * (np.kron(j.conj(), j) - 0.5 * np.kron(ident, jdj) - 0.5 * np.kron(jdj.T, ident))
    return lv


def trace_functional(dim=DIM):
    """Row vector ``t`` with ``t @ vec(rho) == trace(rho)``."""
    return vec(np.eye(dim)).conj()


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-9, **context):
    rho = np.asarray(rho)
    herm = np.linalg.norm(rho - rho.conj().T)
    tr = np.trace(rho)
    if herm > herm_tol or abs(tr - 1.0) > trace_tol:
        raise NumericalFailure(
            f"density matrix invariants violated (hermiticity {herm:.2e}, trace {tr:.12g})",
            hermiticity=herm, trace=tr, **context,
        )
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam < -pos_tol:
        raise NumericalFailure(
            f"density matrix not positive (min eigenvalue {lam:.3e})",
            min_eigenvalue=lam, **context,
        )


def propagator(lv, t):
    """``exp(L t)``, accumulated in extended precision (see :func:`nvdnp.linalg.expm`)."""
    return expm(np.asarray(lv) * t, extended=True)


def propagate(rho0, lv, t):
    """``unvec(exp(L t) vec(rho0))``, validated as a density matrix."""
    if t < 0:
        raise ValueError("propagation time must be >= 0")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    rho = unvec(propagator(lv, t) @ vec(rho0), rho0.shape[0])
    check_density_matrix(rho, time=t)
    return 0.5 * (rho + rho.conj().T)


def steady_state(lv, zero_tol=1e-6):
    """Stationary state from the nullspace of ``lv``.

    A degenerate nullspace yields the spectral projection of the maximally
    mixed state onto it, with a :class:`NonUniqueSteadyStateWarning`.
    """
    lv = np.asarray(lv)
    dim = int(round(np.sqrt(lv.shape[0])))
    evals = np.linalg.eigvals(lv)
    nullity = int(np.sum(np.abs(evals) < zero_tol))
    if nullity == 0:
        raise DegenerateGeneratorError(
            "generator has no eigenvalue within tolerance of zero",
            smallest=float(np.min(np.abs(evals))),
        )
    if nullity > 1:
        warnings.warn(f"steady state not unique (nullspace dimension {nullity})",
                      NonUniqueSteadyStateWarning, stacklevel=2)
    u, _, vh = np.linalg.svd(lv)
    right = vh[-nullity:].conj().T
    left = u[:, -nullity:]
    proj = right @ np.linalg.solve(left.conj().T @ right, left.conj().T)
    rho = unvec(proj @ vec(np.eye(dim) / dim), dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    check_density_matrix(rho, nullity=nullity)
    return rho


def choi_matrix(superop, dim=DIM):
    """Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` of a column-stacked superoperator."""
    c = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim))
            e[i, j] = 1.0
            c += np.kron(e, unvec(superop @ vec(e), dim))
    return c
