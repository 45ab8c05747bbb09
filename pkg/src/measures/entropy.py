"""Von Neumann entropies in bits."""

import numpy as np
from scipy.special import entr

from src.errors import NotPSD, TraceNotOne
from src.linalg.dense import ComplexMatrix, herm_spectrum
from src.states.bipartite import BipartiteState, partial_trace_a, partial_trace_b

ENTROPY_TOL = 1e-9


def spectrum_entropy(values: np.ndarray) -> float:
    """-sum lambda log2 lambda over the positive part of a spectrum."""
    lam = np.clip(np.asarray(values, dtype=float), 0.0, None)
    return float(np.sum(entr(lam)) / np.log(2))


def von_neumann_entropy(m: ComplexMatrix, validate: bool = True) -> float:
    values = herm_spectrum(m)
    if validate:
        if values.size and values[0] < -ENTROPY_TOL:
            raise NotPSD(f"eigenvalue {values[0]:.3e} is negative")
        if abs(values.sum() - 1.0) > ENTROPY_TOL:
            raise TraceNotOne(f"trace {values.sum():.12g} differs from 1")
    return spectrum_entropy(values)


def mutual_information(s: BipartiteState) -> float:
    return (
        von_neumann_entropy(partial_trace_b(s))
        + von_neumann_entropy(partial_trace_a(s))
        - von_neumann_entropy(s.rho)
    )


def conditional_entropy_after(weights: np.ndarray, states) -> float:
    """sum_k p_k S(rho_k), outcomes below 1e-12 contributing nothing."""
    return float(
        sum(p * spectrum_entropy(herm_spectrum(r)) for p, r in zip(weights, states) if p > 1e-12)
    )
