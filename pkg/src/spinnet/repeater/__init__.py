"""Two-way and one-way repeater evaluation."""
from .config import MaxAttemptsExceeded, ParityCode, RepeaterConfig, RepeaterMode, SimResult
from .elementary import (
    attempt_time,
    entanglement_swap,
    generate_link_entanglement,
    link_success_probability,
    purify,
    purify_branches,
    swap_average,
)
from .one_way import hop_loss, hop_success, simulate_one_way
from .parity import (
    correctable_counts,
    is_correctable,
    parity_encode,
    parity_loss_closed_form,
    parity_loss_enumerated,
    parity_loss_success,
)
from .qkd import binary_entropy, qber_from_fidelity, qkd_key_fraction
from .two_way import simulate_two_way

__all__ = [
    "MaxAttemptsExceeded",
    "ParityCode",
    "RepeaterConfig",
    "RepeaterMode",
    "SimResult",
    "attempt_time",
    "binary_entropy",
    "correctable_counts",
    "entanglement_swap",
    "generate_link_entanglement",
    "hop_loss",
    "hop_success",
    "is_correctable",
    "link_success_probability",
    "parity_encode",
    "parity_loss_closed_form",
    "parity_loss_enumerated",
    "parity_loss_success",
    "purify",
    "purify_branches",
    "qber_from_fidelity",
    "qkd_key_fraction",
    "simulate_one_way",
    "simulate_two_way",
    "swap_average",
]
