"""agmean: arithmetic-geometric mean machinery on positive-definite matrices.

Subpackages:
  pdcore       matrix calculus, ordering gaps, seeded random ensembles
  means        the r-mean, its dual form, rival candidates, axiom checkers
  inequalities scalar/operator gap reports and vector-state certificates
  quasiorder   the vector-state quasi-order, rigidity, block positivity
  proofcheck   quantitative verification of the rigidity bound chain
  harness      seeded campaigns, searches, JSONL/CSV reporting, CLI
"""

from .errors import (
    AgmeanError,
    ConfigError,
    ConvergenceFailure,
    DimMismatch,
    GenerationFailure,
    InvalidR,
    NonPositiveSpectrum,
    PartitionMismatch,
    RankError,
    ScanBracketFailure,
)
from .pdcore import (
    EigenDecomp,
    EnsembleSpec,
    PDMatrix,
    Projection,
    UnitVector,
    congruence,
    derive_seed,
    loewner_gap,
    loewner_geq,
    mat_power,
    random_commuting_pair,
    random_pair,
    random_pd,
    random_projection,
    random_unit_vector,
    spectral_fn,
    sym_eig,
)
from .means import MeanCandidate, eval_candidate, r_mean, r_mean_dual

__all__ = [
    "AgmeanError",
    "ConfigError",
    "ConvergenceFailure",
    "DimMismatch",
    "EigenDecomp",
    "EnsembleSpec",
    "GenerationFailure",
    "InvalidR",
    "MeanCandidate",
    "NonPositiveSpectrum",
    "PDMatrix",
    "PartitionMismatch",
    "Projection",
    "RankError",
    "ScanBracketFailure",
    "UnitVector",
    "congruence",
    "derive_seed",
    "eval_candidate",
    "loewner_gap",
    "loewner_geq",
    "mat_power",
    "r_mean",
    "r_mean_dual",
    "random_commuting_pair",
    "random_pair",
    "random_pd",
    "random_projection",
    "random_unit_vector",
    "spectral_fn",
    "sym_eig",
]

__version__ = "0.1.0"
