"""Settings reproducing each figure panel; the command each preset belongs to comes first."""
import numpy as np

# Figure runs use a looser dt-halving tolerance than the library default;
# W is then accurate to ~1e-3 B, far below the figures' resolution.
FIGURE_TOL = 1e-5

_LINSPACE_60 = [float(x) for x in np.linspace(0.0, 20.0, 60)]
_GAMMA_60 = [float(x) for x in np.linspace(-1.0, 1.0, 60)]


def _trace(**kw):
    base = {"n_spins": 8, "gamma": 0.5, "drive": "linear", "v": 10.0, "g": 10.0,
            "tau_max": 20.0, "n_samples": 400, "rel_tol": FIGURE_TOL}
    base.update(kw)
    return "trace", base


def _sweep(**kw):
    base = {"n_spins": 7, "gamma": 0.5, "drive": "linear", "v": 10.0, "g": 10.0,
            "tau_max": 20.0, "n_samples": 400, "rel_tol": FIGURE_TOL}
    base.update(kw)
    return "sweep", base


def _wmax(**kw):
    base = {"n_values": [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0], "coupling": ["nn", "lr"],
            "drive": ["linear", "sin"], "v": 10.0, "omega": 4.0, "tau_max": 20.0,
            "n_samples": 2000, "rel_tol": FIGURE_TOL}
    base.update(kw)
    return "wmax", base


PRESETS = {
    "fig1a": _trace(coupling="nn", g=[5.0, 10.0, 15.0, 20.0]),
    "fig1b": _trace(coupling="lr", g=[5.0, 10.0, 15.0, 20.0]),
    "fig2a": _sweep(coupling="nn", axis1="g", axis1_values=_LINSPACE_60),
    "fig2b": _sweep(coupling="lr", axis1="g", axis1_values=_LINSPACE_60),
    "fig3a": _trace(coupling="nn", v=[1.0, 2.0, 4.0, 6.0, 8.0]),
    "fig3b": _trace(coupling="lr", v=[1.0, 2.0, 4.0, 6.0, 8.0]),
    "fig4a": _sweep(coupling="nn", axis1="v", axis1_values=_LINSPACE_60),
    "fig4b": _sweep(coupling="lr", axis1="v", axis1_values=_LINSPACE_60),
    "fig5a": _trace(coupling="nn", gamma=[0.2, 0.4, 0.6, 0.8, 1.0]),
    "fig5b": _trace(coupling="lr", gamma=[0.2, 0.4, 0.6, 0.8, 1.0]),
    "fig6": _sweep(coupling="lr", axis1="n_spins", axis1_values=[2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
                   axis2="gamma", axis2_values=_GAMMA_60),
    "fig7a": _wmax(coupling="nn", g=20.0, gamma=0.5),
    "fig7b": _wmax(coupling="lr", g=20.0, gamma=0.5),
    "fig8a": _wmax(coupling="nn", g=10.0, gamma=1.0),
    "fig8b": _wmax(coupling="lr", g=10.0, gamma=1.0),
    "fig9a": _wmax(coupling="nn", g=10.0, gamma=0.5),
    "fig9b": _wmax(coupling="lr", g=10.0, gamma=0.5),
}

# CSV -> figure panel mapping, printed by ``lzbattery presets``.
PANELS = {
    "fig1a": "W/B and P/B^2 vs B*tau, NN, N=8, curves over g (trace.csv)",
    "fig1b": "W/B and P/B^2 vs B*tau, LR, N=8, curves over g (trace.csv)",
    "fig2a": "contour of W/B over (B*tau, g), NN, N=7 (grid.csv)",
    "fig2b": "contour of W/B over (B*tau, g), LR, N=7 (grid.csv)",
    "fig3a": "W/B and P/B^2 vs B*tau, NN, N=8, curves over v (trace.csv)",
    "fig3b": "W/B and P/B^2 vs B*tau, LR, N=8, curves over v (trace.csv)",
    "fig4a": "contour of W/B over (B*tau, v), NN, N=7 (grid.csv)",
    "fig4b": "contour of W/B over (B*tau, v), LR, N=7 (grid.csv)",
    "fig5a": "W/B and P/B^2 vs B*tau, NN, N=8, curves over gamma (trace.csv)",
    "fig5b": "W/B and P/B^2 vs B*tau, LR, N=8, curves over gamma (trace.csv)",
    "fig6": "contours of W/B over (B*tau, gamma), LR, one panel per N=2..7 (grid.csv, axis1=N)",
    "fig7a": "bars of W_max/B vs N, g=20B, gamma=0.5; NN rows of wmax.csv",
    "fig7b": "bars of W_max/B vs N, g=20B, gamma=0.5; LR rows of wmax.csv",
    "fig8a": "bars of W_max/B vs N, g=10B, gamma=1; NN rows of wmax.csv",
    "fig8b": "bars of W_max/B vs N, g=10B, gamma=1; LR rows of wmax.csv",
    "fig9a": "bars of W_max/B vs N, g=10B, gamma=0.5; NN rows of wmax.csv",
    "fig9b": "bars of W_max/B vs N, g=10B, gamma=0.5; LR rows of wmax.csv",
}
