"""Link-level MIMO-OFDM simulator for CFO/SFO sensitivity studies.

Submodules follow the processing chain: config -> coding -> mapping ->
stbc -> channel -> receiver -> harness.
"""

from .config import SystemConfig, validate, derived_noise_variance

__all__ = ["SystemConfig", "validate", "derived_noise_variance"]
__version__ = "0.1.0"
