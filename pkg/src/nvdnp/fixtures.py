"""Reference hyperfine tensors and NV crystal geometry.

Vectors are expressed in the NV frame of the reference orientation: z along
the cubic [111] direction, x along [1,1,-2], y = z cross x.
"""

import numpy as np

from .hamiltonian import HyperfineTensor
from .spin_ops import FieldVector, field_components

_Z = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
_X = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
# rows are the NV-frame axes written in cubic coordinates
NV_FRAME = np.array([_X, np.cross(_Z, _X), _Z])

# principal values (MHz) of a 13C on a first-shell lattice site next to the vacancy
FIRST_SHELL_A_PARALLEL = 199.7
FIRST_SHELL_A_PERPENDICULAR = 120.3

# C-V bond directions (cubic coordinates) of the three first-shell carbons
FIRST_SHELL_BONDS = (
    np.array([1.0, -1.0, -1.0]),
    np.array([-1.0, 1.0, -1.0]),
    np.array([-1.0, -1.0, 1.0]),
)

# the four NV symmetry axes and the cubic C2 rotations taking [111] onto them
NV_AXES = ("[111]", "[1-1-1]", "[-11-1]", "[-1-11]")
_C2 = (
    np.eye(3),
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)


def first_shell_tensor(site=0):
    """Axial first-shell tensor with its unique axis along C-V bond ``site`` (0, 1 or 2)."""
    if site not in (0, 1, 2):
        raise ValueError("first-shell site index must be 0, 1 or 2")
    axis = NV_FRAME @ (FIRST_SHELL_BONDS[site] / np.sqrt(3.0))
    return HyperfineTensor.axial(FIRST_SHELL_A_PARALLEL, FIRST_SHELL_A_PERPENDICULAR, axis)


def weak_coupling_tensor():
    """A distant-shell style tensor with all couplings below 20 MHz."""
    return HyperfineTensor(np.array([[11.0, 0.0, 3.0], [0.0, 11.0, 0.0], [3.0, 0.0, 12.0]]))


def orientation_field(field, orientation):
    """Express a field given in the reference NV frame in the frame of NV axis ``orientation``.

    The other orientations are reached by the cubic C2 rotation mapping
    [111] onto their axis; the field itself is fixed in the lab.
    """
    if orientation not in range(4):
        raise ValueError("orientation index must be 0..3")
    cubic = NV_FRAME.T @ np.array(field_components(field))
    return FieldVector.from_cartesian(NV_FRAME @ _C2[orientation] @ cubic)
