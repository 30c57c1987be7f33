"""Relativistic CHSH-Bell tests under quantum-reference-frame transformations."""

__version__ = "0.1.0"

from .bell import (  # noqa: E402
    BellSettings,
    ChshResult,
    CorrelationTensor,
    chsh,
    correlation_tensor_frame_a,
    expectation,
    expectation_with_ancilla,
    horodecki_bound,
    optimal_settings,
)
from .lorentz import (  # noqa: E402
    BoostMatrix,
    FourMomentum,
    WignerRotation,
    pure_boost_matrix,
    wigner_angle_closed_form,
    wigner_from_composition,
)
from .qrf import (  # noqa: E402
    inverse_transform,
    transform_single_particle,
    transform_to_lab,
    transform_to_lab_collinear,
    transform_to_lab_noncollinear,
)
from .spin import SettingVector, rotate_setting, rotation_operator  # noqa: E402
from .state import (  # noqa: E402
    FrameAState,
    FrameCState,
    Masses,
    MomentumGrid,
    Wavepacket,
    assemble_frame_a_state,
    build_grid,
    gaussian_packet,
    norm,
)
