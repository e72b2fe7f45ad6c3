# SPDX-License-Identifier: Apache-2.0
"""Beta-divergence NMF/NTF of spectrograms for impulsive fault detection."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    beta_divergence,
    cp_reconstruct,
    diagnose,
    fold,
    khatri_rao,
    measure_snr,
    mode_n_product,
    nmf,
    ntf,
    profile_spectrum,
    read_tensor,
    sbi,
    select_component,
    sigma_grid,
    simulate,
    skewness,
    spectrogram,
    tensorize,
    unfold,
    write_tensor,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "beta_divergence",
    "cp_reconstruct",
    "diagnose",
    "fold",
    "khatri_rao",
    "measure_snr",
    "mode_n_product",
    "nmf",
    "ntf",
    "profile_spectrum",
    "read_tensor",
    "sbi",
    "select_component",
    "sigma_grid",
    "simulate",
    "skewness",
    "spectrogram",
    "tensorize",
    "unfold",
    "write_tensor",
]
