"""Exact-arithmetic p-derivations, jet series rings, and expansion checks."""

from .arith import (
    LocalizedRational,
    PadicTrunc,
    Weight,
    cp_polynomial,
    cross_prime_commutator,
    fermat_delta,
    padic_binomial,
    rational_reconstruct,
)
from .deltajet import (
    JetSeries,
    delta,
    delta_n,
    lemma_logder_check,
    lemma_xlaphi_check,
    phi,
    psi_fourier,
    psi_serretate,
    weight_action,
)
from .forms import (
    build_f2e0,
    build_f2e_k,
    covariance_check,
    delta_fourier_expand,
    expansion_of_f1_fnatural,
    fourier_to_deformation,
    fsharp_expansion,
)
from .modular import (
    EllipticCurveQ,
    QExpansion,
    an_multiplicative,
    ap_point_count,
    discriminant_delta,
    eisenstein,
    j_invariant,
    newform_coefficients,
)
from .multiprime import (
    MultiJetSeries,
    basis_independence_check,
    build_fe0,
    build_fe_k,
    continuation_check,
    delta_pk,
    phi_pk,
    substitute_gamma,
)
from .qseries import Series1, delta0, frobenius_sub, log1p, pow_weight

__all__ = [
    "EllipticCurveQ",
    "JetSeries",
    "LocalizedRational",
    "MultiJetSeries",
    "PadicTrunc",
    "QExpansion",
    "Series1",
    "Weight",
    "an_multiplicative",
    "ap_point_count",
    "basis_independence_check",
    "build_f2e0",
    "build_f2e_k",
    "build_fe0",
    "build_fe_k",
    "continuation_check",
    "covariance_check",
    "cp_polynomial",
    "cross_prime_commutator",
    "delta",
    "delta0",
    "delta_fourier_expand",
    "delta_n",
    "delta_pk",
    "discriminant_delta",
    "eisenstein",
    "expansion_of_f1_fnatural",
    "fermat_delta",
    "fourier_to_deformation",
    "frobenius_sub",
    "fsharp_expansion",
    "j_invariant",
    "lemma_logder_check",
    "lemma_xlaphi_check",
    "log1p",
    "newform_coefficients",
    "padic_binomial",
    "phi",
    "phi_pk",
    "pow_weight",
    "psi_fourier",
    "psi_serretate",
    "rational_reconstruct",
    "substitute_gamma",
    "weight_action",
]
