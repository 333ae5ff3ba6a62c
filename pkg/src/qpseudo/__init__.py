"""Midy numbers, q-pseudoprimes and exact base counts."""

from .arith import (
    Factorization,
    crt_combine,
    euler_phi,
    factorize,
    is_prime,
    mod_pow,
    moebius,
    multiplicative_order,
    p_adic_valuation,
)
from .cyclotomic import GeneratorOutcome, Verdict, cyclotomic_eval, gcd_n_phi, midy_generator
from .errors import (
    DomainError,
    FactorizationBudgetExceeded,
    HypothesisViolated,
    MidyError,
    ModuliNotCoprime,
    NotADivisor,
    NotCoprime,
    OracleBoundExceeded,
    PostconditionViolated,
)
from .midy import (
    BlockDecomposition,
    MidySet,
    block_decomposition,
    count_midy_bases,
    count_midy_bases_brute,
    has_midy_property,
    has_midy_property_oracle,
    is_midy_number,
    is_midy_number_by_definition,
    is_midy_number_cyclotomic,
    midy_set,
    prime_power_midy_check,
)
from .pseudo import (
    Classification,
    QDecomposition,
    carmichael_collapse_check,
    classify,
    count_bases_brute,
    count_pp_bases,
    count_qpp_bases,
    count_spp_bases,
    eligible_q,
    is_carmichael,
    is_fermat_psp,
    is_q_probable_prime,
    is_q_pseudoprime_def,
    is_strong_psp,
    nu_q_of,
    q_decompose,
    q_divisor_congruence,
    strong_psp_via_valuation,
)

__version__ = "0.1.0"
