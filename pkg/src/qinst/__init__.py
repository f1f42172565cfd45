"""Realization schemes for finite-dimensional quantum instruments.

Numerical constructions and verifiers for: minimal isometric dilations of CP
maps, minimal ancilla-POVM dilations of instruments, feed-forward
realizations of frame-orbit instruments, generalized teleportation schemes
for (left-)tight operator frames, and finite-group covariant machinery.
"""

from .cpmap import (
    CPMap,
    StinespringDilation,
    check_operator,
    choi_from_kraus,
    compose,
    kraus_from_choi,
    map_adjoint,
    map_conjugate,
    map_transpose,
    stinespring_minimal,
    tensor,
    verify_stinespring,
)
from .covariant import (
    CharacterTable,
    FiniteGroup,
    UnitaryRep,
    build_covariant_instrument,
    check_covariance,
    cyclic_characters,
    cyclic_group,
    group_average,
    isotypic_projectors,
    naimark_group,
    nonminimal_group_dilation,
    regular_representation,
    s3_characters,
    symmetric_group,
)
from .frameorbit import (
    FrameOrbitSpec,
    TeleportationScheme,
    build_instrument,
    covariant_channel_schemes,
    feedforward_realization,
    reduced_instrument,
    symmetric_projector,
    tele_minimal,
    tele_nonminimal,
    verify_feedforward,
    verify_teleportation,
    xi_of,
)
from .frames import (
    OperatorFrame,
    TightnessReport,
    canonical_dual,
    classify_tightness,
    expand,
    frame_operator,
    matrix_unit_frame,
    named_frame,
    pauli_frame,
    weyl_heisenberg_frame,
)
from .instruments import (
    Instrument,
    InstrumentDilation,
    Outcome,
    cjm,
    density_from_cjm,
    minimal_dilation,
    outcome_probabilities,
    povm,
    sample,
    sample_counts,
    verify_dilation,
)
from .reports import VerificationReport

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
