"""Error exponents and capacity for randomly clustered channel ensembles.

Core objects live in submodules:

- probability: distributions, channels, joint distributions, divergences
- dual: Gallager-style dual exponent formulas and witnesses
- primal: exhaustive simplex-lattice oracles for the primal forms
- input_opt: optimization over the input distribution
- simulate: Monte Carlo ensemble simulation and the two-cloud competition
- validation: self-check suites
"""

from .dual import (
    DualWitness,
    SolverSettings,
    achievable_error_exponent,
    converse_error_exponent,
    correct_decoding_exponent_dual,
    gallager_e0,
    gallager_random_coding_exponent,
    r_min_jump,
    single_min_form,
    tilted_joint,
)
from .input_opt import (
    e0_kkt_residual,
    ensemble_capacity,
    h_max,
    maximize_e0_over_p,
    minimize_correct_decoding_over_p,
    shannon_capacity,
)
from .primal import (
    JointLattice,
    SimplexGrid,
    primal_achievable,
    primal_converse,
    primal_correct_decoding,
    primal_rmin,
)
from .probability import (
    Channel,
    Distribution,
    JointDistribution,
    divergence_joint,
    entropy_vector,
    functional_A,
    functional_B,
    functional_H,
    mutual_information,
)
from .simulate import (
    ChannelInstance,
    DecodeOutcome,
    SimConfig,
    competition_probability,
    estimate_error_probability,
    generate_instance,
    instance_rng,
    ml_decode,
    paired_decoder_comparison,
    suboptimal_decode,
)
from .validation import run_validation

__all__ = [
    "Channel",
    "ChannelInstance",
    "DecodeOutcome",
    "Distribution",
    "DualWitness",
    "JointDistribution",
    "JointLattice",
    "SimConfig",
    "SimplexGrid",
    "SolverSettings",
    "achievable_error_exponent",
    "competition_probability",
    "converse_error_exponent",
    "correct_decoding_exponent_dual",
    "divergence_joint",
    "e0_kkt_residual",
    "ensemble_capacity",
    "entropy_vector",
    "estimate_error_probability",
    "functional_A",
    "functional_B",
    "functional_H",
    "gallager_e0",
    "gallager_random_coding_exponent",
    "generate_instance",
    "h_max",
    "instance_rng",
    "maximize_e0_over_p",
    "minimize_correct_decoding_over_p",
    "ml_decode",
    "mutual_information",
    "paired_decoder_comparison",
    "primal_achievable",
    "primal_converse",
    "primal_correct_decoding",
    "primal_rmin",
    "r_min_jump",
    "run_validation",
    "shannon_capacity",
    "simulate",
    "single_min_form",
    "suboptimal_decode",
    "tilted_joint",
]

__version__ = "0.1.0"
