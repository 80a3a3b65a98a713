"""Wigner rotations, Bell-state SO(4) transformations and Lorentz-invariant fermionic entanglement."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.1.0"

from wignerbell.bellstate import (
    BellVector,
    bell_basis_spin,
    c_from_f,
    conventional_map,
    f_from_c,
    so4_explicit,
    so4_from_trace,
    transform_bell,
)
from wignerbell.density import (
    BlockForm,
    DensityMatrix,
    Spectrum,
    block_diagonalize,
    entropy_from_blocks,
    invariance_report,
    one_particle_from_C,
    reduce,
    reduce_state,
    von_neumann_entropy,
)
from wignerbell.fockspace import (
    FockState,
    Mode,
    annihilate,
    create,
    inner_product,
    lorentz_transform_state,
    state_distance,
    two_particle_from_C,
)
from wignerbell.lorentz import (
    ETA,
    BoostParams,
    RotationParams,
    boost_matrix,
    from_infinitesimal,
    is_lorentz,
    on_shell,
    polar_decompose,
    rotation_matrix,
    standard_boost,
)
from wignerbell.wigner import (
    WignerRotation,
    composition_sign,
    halpern_boost_angle,
    multiplication_residual,
    su2_of,
    wigner_finite,
    wigner_infinitesimal,
    wigner_oracle,
)

__all__ = [
    "ETA",
    "BellVector",
    "BlockForm",
    "BoostParams",
    "DensityMatrix",
    "FockState",
    "Mode",
    "RotationParams",
    "Spectrum",
    "WignerRotation",
    "annihilate",
    "bell_basis_spin",
    "block_diagonalize",
    "boost_matrix",
    "c_from_f",
    "conventional_map",
    "create",
    "entropy_from_blocks",
    "f_from_c",
    "from_infinitesimal",
    "halpern_boost_angle",
    "inner_product",
    "invariance_report",
    "is_lorentz",
    "lorentz_transform_state",
    "composition_sign",
    "multiplication_residual",
    "on_shell",
    "one_particle_from_C",
    "polar_decompose",
    "reduce",
    "reduce_state",
    "rotation_matrix",
    "so4_explicit",
    "so4_from_trace",
    "standard_boost",
    "state_distance",
    "su2_of",
    "transform_bell",
    "two_particle_from_C",
    "von_neumann_entropy",
    "wigner_finite",
    "wigner_infinitesimal",
    "wigner_oracle",
]
