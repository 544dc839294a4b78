# Copyright 2026 The gentropy Authors
# SPDX-License-Identifier: Apache-2.0
"""Score-based (G-) entropy, Fisher divergence and GIC estimation."""

from gentropy._core import (
    GentropyError,
    Model,
    __version__,
    ar_bias_closed_form,
    fisher_divergence,
    g_cross_entropy,
    g_entropy,
    g_mutual_information,
    gaussian,
    load_model,
    mgice_fit,
    model_from_json,
    select_ar,
    verify,
)

__all__ = [
    "GentropyError",
    "Model",
    "__version__",
    "ar_bias_closed_form",
    "fisher_divergence",
    "g_cross_entropy",
    "g_entropy",
    "g_mutual_information",
    "gaussian",
    "load_model",
    "mgice_fit",
    "model_from_json",
    "select_ar",
    "verify",
]
