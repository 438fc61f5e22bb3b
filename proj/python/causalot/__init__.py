"""Causal and bicausal optimal transport between discrete path measures."""

from ._core import (
    CausalotError,
    PathMeasure,
    bicausal_dpp,
    causal_dpp,
    cdf_dominance_check,
    entropy_chain,
    exp_constants,
    increments_kr,
    is_bicausal,
    is_causal,
    is_itt,
    kernel_order_consistent,
    kr_coupling,
    kr_uniqueness_check,
    lex_interpolate,
    lip_constant,
    monge_check,
    monotone_coupling,
    ot1d_cost,
    relative_entropy,
    solve,
    solve_table,
    speed_profile,
    transport_info_report,
    w1,
)

__all__ = [
    "CausalotError",
    "PathMeasure",
    "bicausal_dpp",
    "causal_dpp",
    "cdf_dominance_check",
    "entropy_chain",
    "exp_constants",
    "increments_kr",
    "is_bicausal",
    "is_causal",
    "is_itt",
    "kernel_order_consistent",
    "kr_coupling",
    "kr_uniqueness_check",
    "lex_interpolate",
    "lip_constant",
    "monge_check",
    "monotone_coupling",
    "ot1d_cost",
    "relative_entropy",
    "solve",
    "solve_table",
    "speed_profile",
    "transport_info_report",
    "w1",
]
