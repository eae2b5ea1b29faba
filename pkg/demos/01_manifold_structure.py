"""Eigenstates of the NV / first-shell 13C pair in a tilted 4 mT field.

The nuclear spin is quantized along different axes depending on the
electronic level: in m_s = 0 only the weak nuclear Zeeman term and
second-order hyperfine act, while in m_s = -1 the strong hyperfine field
dominates. This script prints the six levels, the two nuclear splittings
and the angle between the quantization axes.

Run: python demos/01_manifold_structure.py
"""

import numpy as np

from nvdnp import FieldVector, SystemParams, build_lab_hamiltonian, manifold_structure, transition_table
from nvdnp.fixtures import first_shell_tensor

field = FieldVector.from_degrees(4.04e-3, 42.0, 85.0)
params = SystemParams(field=field, hyperfine=first_shell_tensor())
ms = manifold_structure(build_lab_hamiltonian(params))

print("level       energy (MHz)")
for name in ("+1,up", "+1,down", "-1,up", "-1,down", "0,up", "0,down"):
    print(f"  {name:9s} {ms.energy(name):12.4f}")

print(f"\nnuclear splitting in m_s=0  (delta): {ms.delta:8.3f} MHz")
print(f"nuclear splitting in m_s=-1 (Delta): {ms.Delta:8.3f} MHz")

cosang = abs(ms.nuclear_axes[0] @ ms.nuclear_axes[-1])
print(f"angle between the m_s=0 and m_s=-1 nuclear axes: {np.degrees(np.arccos(cosang)):.1f} deg")

print("\nm_s=0 -> m_s=-1 microwave lines")
for t in transition_table(ms):
    print(f"  {t.lower:7s} -> {t.upper:8s} {t.frequency:10.3f} MHz   weight {t.weight:.3f}")
print("\nAll four lines carry weight: the nuclear state is not conserved by the"
      "\nelectron flip, which is what allows polarization transfer.")
