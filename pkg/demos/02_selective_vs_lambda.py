"""Frequency spectra in the selective and Lambda regimes.

With a weak drive (Rabi 1.4 MHz < delta) each m_s=0 nuclear state is
addressed on its own line, so the |-1,down> population shows two peaks one
delta apart, and the nuclear polarization in m_s=0 flips sign between them.
With a stronger drive (11.9 MHz, between delta and Delta) one bright
superposition is pumped away and a single peak appears half-way between the
lines, while the nucleus polarizes along the m_s=-1 axis.

Run: python demos/02_selective_vs_lambda.py
"""

import dataclasses

import numpy as np
from scipy.signal import find_peaks

from nvdnp import FieldVector, SweepSpec, SystemParams, build_lab_hamiltonian, frequency_sweep, manifold_structure
from nvdnp.fixtures import first_shell_tensor

base = SystemParams(field=FieldVector.from_degrees(4.04e-3, 42.0, 85.0), hyperfine=first_shell_tensor())
ms = manifold_structure(build_lab_hamiltonian(base))
mid = ms.energy("-1,down") - 0.5 * (ms.energy("0,up") + ms.energy("0,down"))
offsets = np.linspace(-20.0, 20.0, 161)

for rabi in (1.4, 11.9):
    res = frequency_sweep(SweepSpec("mw_frequency", mid + offsets,
                                    dataclasses.replace(base, drive_amplitude=rabi)))
    pop = res.population("-1,down")
    peaks, _ = find_peaks(pop, prominence=0.05 * np.ptp(pop))
    print(f"\nRabi {rabi} MHz ({res.regimes[0]} regime), delta = {ms.delta:.2f} MHz")
    print("  peaks of p(-1,down) at offsets (MHz):", np.round(offsets[peaks], 2))
    print("  offset   p(-1,down)   P(m_s=0 axis)   P(m_s=-1 axis)")
    for k in range(0, len(offsets), 10):
        print(f"  {offsets[k]:+6.1f}   {pop[k]:9.4f}   {res.polarization_ms0[k]:+12.4f}"
              f"   {res.polarization_target[k]:+13.4f}")
