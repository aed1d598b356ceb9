from ._core import (
    ConfigError,
    ConvergenceError,
    ResourceError,
    au_to_ev,
    au_to_fs,
    beta_from_kelvin,
    correlation_expansion,
    ev_to_au,
    fs_to_au,
    kappa,
    reorganization_energy,
    simulate,
    storage_report,
)


def populations(result, observed=True):
    """Diagonal of rho over time, in the observation basis unless observed is False."""
    import numpy as np

    rho = result["rho"]
    if observed:
        u = result["basis"]
        rho = np.einsum("ji,tjk,kl->til", u.conj(), rho, u)
    return np.real(np.einsum("tii->ti", rho))


__all__ = [
    "ConfigError",
    "ConvergenceError",
    "ResourceError",
    "au_to_ev",
    "au_to_fs",
    "beta_from_kelvin",
    "correlation_expansion",
    "ev_to_au",
    "fs_to_au",
    "kappa",
    "populations",
    "reorganization_energy",
    "simulate",
    "storage_report",
]
