"""Bundled example data for the reproduce-example command."""

from .simulation import ScenarioConfig

__all__ = ["EXAMPLE1_PVALUES", "EXAMPLE2_SCENARIO"]

# Fifteen p-values used throughout the documentation and the acceptance
# checks; kept verbatim so thresholds computed from them are stable.
EXAMPLE1_PVALUES = (
    0.0001,
    0.0004,
    0.0019,
    0.0095,
    0.0201,
    0.0278,
    0.0298,
    0.0344,
    0.0459,
    0.3240,
    0.4262,
    0.5719,
    0.6528,
    0.7590,
    1.0,
)

# A larger synthetic screen: a quarter of the tests carry a one-sided
# normal signal at effect 3.
EXAMPLE2_SCENARIO = ScenarioConfig(
    m=1000,
    a=0.25,
    family="one-sided-normal",
    params={"theta": 3.0, "n": 1},
    seed=0,
)
