"""Scalar objectives for liquid-liquid extraction solvent design.

Both objectives combine a partition-coefficient term with a smooth
miscibility-gap penalty: the solvent/water activity-coefficient product must
exceed exp(4) for a phase split, and the penalty (tanh(product - exp(4)) - 1)
* 10 fades from -20 to 0 as the product crosses the threshold. The
solvent-independent water-side activity coefficients are omitted throughout.
"""

from __future__ import annotations

import math

from ..errors import NonPositiveGamma

MISCIBILITY_THRESHOLD = math.exp(4.0)


def _check_positive(**gammas):
    for name, value in gammas.items():
        if not value > 0:
            raise NonPositiveGamma(f"{name} must be positive, got {value}")


def miscibility_penalty(gamma_solvent_in_water: float, gamma_water_in_solvent: float) -> float:
    """(tanh(product - exp(4)) - 1) * 10, in (-20, 0]."""
    _check_positive(
        gamma_solvent_in_water=gamma_solvent_in_water,
        gamma_water_in_solvent=gamma_water_in_solvent,
    )
    product = gamma_solvent_in_water * gamma_water_in_solvent
    return (math.tanh(product - MISCIBILITY_THRESHOLD) - 1.0) * 10.0


def solvent_iba_objective(
    gamma_iba_in_solvent: float,
    gamma_solvent_in_water: float,
    gamma_water_in_solvent: float,
) -> float:
    """Isobutanol extraction: 1/gamma_IBA,S plus the miscibility penalty."""
    _check_positive(gamma_iba_in_solvent=gamma_iba_in_solvent)
    return 1.0 / gamma_iba_in_solvent + miscibility_penalty(
        gamma_solvent_in_water, gamma_water_in_solvent
    )


def solvent_tmb_objective(
    gamma_tmb_in_solvent: float,
    gamma_dmba_in_solvent: float,
    gamma_solvent_in_water: float,
    gamma_water_in_solvent: float,
) -> float:
    """TMB/DMBA selectivity: gamma_TMB,S / gamma_DMBA,S plus the penalty."""
    _check_positive(
        gamma_tmb_in_solvent=gamma_tmb_in_solvent,
        gamma_dmba_in_solvent=gamma_dmba_in_solvent,
    )
    return gamma_tmb_in_solvent / gamma_dmba_in_solvent + miscibility_penalty(
        gamma_solvent_in_water, gamma_water_in_solvent
    )
