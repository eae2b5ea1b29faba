"""Single-tone versus three-tone (comb) driving in the Lambda regime.

After a finite polarization time the single-tone spectrum carries small
coherent ripples. Averaging over a comb of three tones spaced by 2.16 MHz,
as used to cover an inhomogeneous line, washes most of them out.

Run: python demos/04_comb_ripples.py
"""

import numpy as np

from nvdnp import CombSpec, FieldVector, SweepSpec, SystemParams, build_lab_hamiltonian, frequency_sweep, manifold_structure
from nvdnp.fixtures import first_shell_tensor

params = SystemParams(field=FieldVector.from_degrees(4.04e-3, 42.0, 85.0),
                      hyperfine=first_shell_tensor(), drive_amplitude=11.9)
ms = manifold_structure(build_lab_hamiltonian(params))
mid = ms.energy("-1,down") - 0.5 * (ms.energy("0,up") + ms.energy("0,down"))
grid = mid + np.linspace(-20.0, 20.0, 201)

for label, comb in (("single tone", None), ("3-tone comb", CombSpec(3, 2.16))):
    pop = frequency_sweep(SweepSpec("mw_frequency", grid, params, comb=comb)).population("-1,down")
    ripple = np.abs(np.diff(pop, 2)).max() / np.ptp(pop)
    print(f"{label:12s}: peak at {grid[np.argmax(pop)] - mid:+.2f} MHz from midpoint, "
          f"largest second difference {ripple:.4f} of the peak height")
