"""Named parameter presets for the figure-style analyses.

Only the ``fig4`` point (epsilon = 0.1, T = 3.32, lambda = 0.1) is pinned
by the source figures.  The remaining presets are our own choices, picked
from stability-scan output to land cleanly in the regime each figure
illustrates; treat them as reconstructions, not published values.
"""

from __future__ import annotations

from .floquet import SystemParams

#: Regime showcase points keyed by figure-style name.
#:
#: fig2a  monotone growth: unstable with real leading multiplier
#:        (mu_L = 0.107, chosen from scan)
#: fig2b  spiral-out beating: unstable with complex leading multiplier
#:        (mu_L = 0.068, chosen from scan)
#: fig2c  bounded oscillation: stable, near enough to the band edge that
#:        entanglement visibly beats instead of freezing (chosen from scan)
#: fig4   OTOC growth point (pinned)
#: fig5   thermalization showcase; same point as fig4, the real-unstable
#:        member of the regime triptych (fig2b / fig2c cover the others)
PRESETS: dict[str, SystemParams] = {
    "fig2a": SystemParams(epsilon=0.1, period=3.0, coupling=0.1),
    "fig2b": SystemParams(epsilon=0.1, period=3.2, coupling=0.1),
    "fig2c": SystemParams(epsilon=0.1, period=2.8, coupling=0.1),
    "fig4": SystemParams(epsilon=0.1, period=3.32, coupling=0.1),
    "fig5": SystemParams(epsilon=0.1, period=3.32, coupling=0.1),
}


def get_preset(name: str) -> SystemParams:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; available: {known}")
    return PRESETS[name]
