"""Uniform degree bounds and relation certificates for torus-invariant
multi-homogeneous rings."""

from toricbound.errors import (
    BoundExceeded,
    ConeError,
    ConfigError,
    DecompositionError,
    HilbertCapExhausted,
    NotARelation,
    ResourceCapExceeded,
    ToricError,
)
from toricbound.repspec import TorusRep, squared_alphabet, validate_rep
from toricbound.monomials import (
    Binomial,
    MultiMonomial,
    PnMonomial,
    enumerate_pn_variables,
    flatten,
    is_invariant,
    is_relation,
    row_block_replace,
    weight_matrix,
)
from toricbound.cones import (
    Bounds,
    HilbertBasis,
    KernelCone,
    LowerBounds,
    build_A,
    build_B,
    compute_bounds,
    default_D,
    hilbert_basis,
    lower_bounds,
)
from toricbound.rearrange import (
    DoubledMatrix,
    steinitz_rearrange,
    zero_sum_column_block,
    zero_sum_column_partition,
    zero_sum_row_partition,
)
from toricbound.decompose import (
    Certificate,
    Step,
    Verdict,
    column_reduce,
    decompose,
    row_swap_chain,
    verify_certificate,
)
from toricbound.oracle import (
    Fiber,
    enumerate_fibers,
    fiber_connected_under,
    markov_degree_upper,
)

__version__ = "0.1.0"
