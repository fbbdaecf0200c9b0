"""2-Selmer ranks of tiling-number curves, class-group 2-power ranks,
Cassels pairings and non-congruence certificates."""

__version__ = "0.1.0"

from .arith import factor_squarefree, hilbert_additive, legendre_additive, sqrt_mod
from .cassels import certify, pairing_f19, pairing_pq
from .classgroup import forms_class_group, r4, redei_matrix
from .descent import locally_solvable, selmer_group_oracle
from .monsky import build_monsky, predicted_parity, selmer_basis, selmer_rank

__all__ = [
    "factor_squarefree", "hilbert_additive", "legendre_additive", "sqrt_mod",
    "certify", "pairing_f19", "pairing_pq",
    "forms_class_group", "r4", "redei_matrix",
    "locally_solvable", "selmer_group_oracle",
    "build_monsky", "predicted_parity", "selmer_basis", "selmer_rank",
    "__version__",
]
