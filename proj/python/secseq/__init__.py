"""Secure sequential source-channel coding toolkit."""

from ._secseq import (
    binary_entropy,
    capacity,
    closed_form_binary,
    concave_envelope,
    discretize_effective,
    distortion_at_rate,
    distortion_bound,
    effective_in,
    effective_out,
    entropy,
    mutual_information,
    precode,
    precode_inverse,
    precode_pushforward,
    push_through,
    rate_at_distortion,
    rate_leakage_boundary,
    rates_from_crdf,
    reshape_rates,
    secrecy_capacity,
    simulate,
    step_from_rates,
)

__all__ = [
    "binary_entropy",
    "capacity",
    "closed_form_binary",
    "concave_envelope",
    "discretize_effective",
    "distortion_at_rate",
    "distortion_bound",
    "effective_in",
    "effective_out",
    "entropy",
    "mutual_information",
    "precode",
    "precode_inverse",
    "precode_pushforward",
    "push_through",
    "rate_at_distortion",
    "rate_leakage_boundary",
    "rates_from_crdf",
    "reshape_rates",
    "secrecy_capacity",
    "simulate",
    "step_from_rates",
]
