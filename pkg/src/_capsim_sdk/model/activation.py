import numpy as np

from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.models import ActivationVector
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import SpendState


def activation_from_state(
    state: SpendState, campaigns: CampaignSet
) -> ActivationVector:
    """A campaign is active while its spend is strictly below its budget."""
    if state.spends.shape[0] != campaigns.n_campaigns:
        raise DimensionMismatchError(
            "spend state", campaigns.n_campaigns, state.spends.shape[0]
        )
    return ActivationVector(bits=state.spends < campaigns.budgets)


def deactivate(a: ActivationVector, c: int) -> ActivationVector:
    """Returns `a` with campaign `c` (1-based) switched off."""
    if not 1 <= c <= len(a):
        raise IndexError(f"Campaign index {c} out of range [1..{len(a)}].")
    bits = np.array(a.bits)
    bits[c - 1] = False
    return ActivationVector(bits=bits)
