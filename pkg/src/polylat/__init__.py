"""polylat: lattice theta/zeta engines and exact algebra for polarized tori."""

__version__ = "0.1.0"

from .lattice import (
    DualLattice,
    HodgeVector,
    PolarizedAbelianData,
    SumLattice,
    character,
    dual_lattice,
    enumerate_shell,
    hodge_split,
    q_form,
)

__all__ = [
    "DualLattice",
    "HodgeVector",
    "PolarizedAbelianData",
    "SumLattice",
    "character",
    "dual_lattice",
    "enumerate_shell",
    "hodge_split",
    "q_form",
    "__version__",
]
