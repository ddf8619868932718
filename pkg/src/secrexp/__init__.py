"""Exact finite-blocklength computations for discrete memoryless wiretap channels.

Everything is in nats. The modules, bottom-up:

``channel``   channel laws, marginals, degradedness
``code``      wiretap codes and their induced output laws
``spectrum``  information density, exponent function, converse bounds
``capacity``  single-letter secrecy capacity and weak-converse margin
``harness``   converse sweeps over random-binning codes
``cli``       the ``secrexp`` command
"""

from .capacity import (
    AuxiliaryDistribution,
    SecrecyCapacityResult,
    SolverConfig,
    blahut_arimoto,
    grid_oracle,
    secrecy_capacity,
    single_letter_objective,
    weak_converse_margin,
)
from .channel import (
    DegradednessReport,
    Dmc,
    WiretapChannel,
    bsc,
    bsc_pair,
    degradedness_check,
    load_channel,
    marginal,
    product_law,
)
from .code import (
    InducedJoint,
    RateSpec,
    WiretapCode,
    build_code,
    correct_probability,
    error_probability,
    induced_joint,
    leakage_rate,
    load_code,
    map_decoder,
    random_binning_code,
    receiver_mutual_information,
)
from .harness import ConverseExperimentConfig, SweepRow, converse_sweep, exponent_table
from .spectrum import (
    BoundParams,
    ExponentProfile,
    FiniteRv,
    chernoff_cramer,
    information_density,
    lemma3_bound,
    omega,
    select_theta,
    verdu_han_bound,
    xi_profile,
    zeta,
)

__version__ = "0.1.0"
