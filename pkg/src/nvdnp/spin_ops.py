"""Spin matrices, tensor products and field geometry for the NV/13C pair.

Basis ordering used everywhere in the package: electron index first with
m_s = (+1, 0, -1), nuclear index second with (up, down), so the joint state
|m_s, m_I> sits at row ``2 * e + n``.
"""

from dataclasses import dataclass

import numpy as np

ELECTRON_DIM = 3
NUCLEAR_DIM = 2
DIM = ELECTRON_DIM * NUCLEAR_DIM

# electronic basis index of each m_s value
MS_INDEX = {+1: 0, 0: 1, -1: 2}


def spin_operators(s):
    """Return ``(Sx, Sy, Sz)`` for spin ``s`` in {1/2, 1} with hbar = 1.

    Basis runs from m = +s down to m = -s.
    """
    if s == 0.5:
        sx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
        sz = np.array([[1, 0], [0, -1]], dtype=complex) / 2
    elif s == 1:
        r = 1 / np.sqrt(2)
        sx = np.array([[0, r, 0], [r, 0, r], [0, r, 0]], dtype=complex)
        sy = np.array([[0, -1j * r, 0], [1j * r, 0, -1j * r], [0, 1j * r, 0]], dtype=complex)
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    else:
        raise ValueError(f"unsupported spin quantum number {s!r}; expected 1/2 or 1")
    return sx, sy, sz


def kron(a, b):
    """Kronecker product; ``kron(a, b)[i*nb + k, j*nb + l] == a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(m, tol=1e-12):
    m = np.asarray(m)
    scale = max(np.linalg.norm(m), 1.0)
    return bool(np.linalg.norm(m - m.conj().T) <= tol * scale)


def is_unitary(m, tol=1e-12):
    m = np.asarray(m)
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol)


def electron_operator(op):
    """Embed a 3x3 electronic operator as ``op (x) 1_nuc``."""
    return kron(op, np.eye(NUCLEAR_DIM))


def nuclear_operator(op):
    """Embed a 2x2 nuclear operator as ``1_e (x) op``."""
    return kron(np.eye(ELECTRON_DIM), op)


def electron_projector(ms):
    """Projector onto the bare electronic level ``ms`` (times the nuclear identity)."""
    p = np.zeros((ELECTRON_DIM, ELECTRON_DIM), dtype=complex)
    p[MS_INDEX[ms], MS_INDEX[ms]] = 1.0
    return electron_operator(p)


def electron_ket(ms):
    v = np.zeros(ELECTRON_DIM, dtype=complex)
    v[MS_INDEX[ms]] = 1.0
    return v


def partial_trace_electron(rho):
    """Reduced 2x2 nuclear density matrix of a 6x6 joint operator."""
    r = np.asarray(rho).reshape(ELECTRON_DIM, NUCLEAR_DIM, ELECTRON_DIM, NUCLEAR_DIM)
    return np.einsum("anam->nm", r)


def bloch_vector(rho_nuc):
    """Bloch vector ``Tr(rho sigma_k)`` of a 2x2 operator."""
    sx, sy, sz = spin_operators(0.5)
    return np.array([2 * np.trace(rho_nuc @ s).real for s in (sx, sy, sz)])


@dataclass(frozen=True)
class FieldVector:
    """Static field in the NV frame (z along the zero-field tensor axis).

    magnitude is in tesla, angles in radians.
    """

    magnitude: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("magnitude", "theta", "phi"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"field {name} must be finite")
        if self.magnitude < 0:
            raise ValueError("field magnitude must be >= 0")
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("polar angle must lie in [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError("azimuthal angle must lie in [0, 2 pi)")

    @classmethod
    def from_degrees(cls, magnitude, theta_deg, phi_deg):
        return cls(magnitude, np.radians(theta_deg), np.radians(phi_deg % 360.0))

    @classmethod
    def from_cartesian(cls, b):
        b = np.asarray(b, dtype=float)
        mag = float(np.linalg.norm(b))
        if mag == 0.0:
            return cls(0.0)
        theta = float(np.arctan2(np.hypot(b[0], b[1]), b[2]))
        phi = float(np.arctan2(b[1], b[0]) % (2 * np.pi))
        if phi >= 2 * np.pi:
            phi = 0.0
        return cls(mag, theta, phi)

    def with_magnitude(self, magnitude):
        return FieldVector(magnitude, self.theta, self.phi)


def field_components(f):
    """Cartesian ``(Bx, By, Bz)`` in tesla of a :class:`FieldVector`."""
    st = np.sin(f.theta)
    return (
        f.magnitude * st * np.cos(f.phi),
        f.magnitude * st * np.sin(f.phi),
        f.magnitude * np.cos(f.theta),
    )
