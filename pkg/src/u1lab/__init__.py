"""u1lab: a numerical laboratory for integrable U(1) brickwall qubit circuits.

Exact Pauli-string operator algebra, closed-form two-qubit U(1) gates and
brickwall propagators, eigenphase/multiplet analysis with SU(2) generator
reconstruction, screw-SU(2) and U_q(sl_2) symmetry machinery, momentum-resolved
operator (Ruelle-Pollicott) spectra, and MPO/TEBD magnetization transport.
"""

__version__ = "0.1.0"

from .gates import GateParams, build_propagator, build_tilde_propagator, gate_matrix
from .pauli import PauliPoly, PauliString, poly_from_dense

__all__ = [
    "GateParams",
    "PauliPoly",
    "PauliString",
    "build_propagator",
    "build_tilde_propagator",
    "gate_matrix",
    "poly_from_dense",
    "__version__",
]
