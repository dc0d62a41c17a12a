"""Completely positive maps on M_n(C), their GNS correspondences and index."""

from .channel import (
    ChoiMatrix,
    CPMap,
    IndexReport,
    apply,
    choi,
    from_superoperator,
    identity_channel,
    index,
    kraus_from_choi,
    pinching,
    random_cp,
    superoperator,
    zero_map,
)
from .compose import gram_two_step, verify_factorization
from .exceptions import (
    DimensionMismatch,
    NoConvergence,
    NotCP,
    NotHermitian,
    NotPSD,
    NumericalError,
)
from .gns import gram_corner, gram_F, morita_witness, verify_theorem1
from .numerics import RankPolicy, hermitian_eig, kronecker, numerical_rank, permute_conjugate

__version__ = "0.1.0"
