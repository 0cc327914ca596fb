"""Acceptance criteria, driven through the figure presets of the CLI.

Each test prints one ``CRITERION k: PASS|FAIL ...`` line (also repeated in
the terminal summary). Figure-scale runs are shared through a module-level
cache so every preset runs at most once per session.
"""
import time

import numpy as np
import pytest

from lzbattery.cli import main as cli_main
from lzbattery.cli.presets import PRESETS

from .conftest import CRITERIA

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def runner(tmp_path_factory):
    cache = {}

    def run(preset, *flags):
        key = (preset, flags)
        if key not in cache:
            out = tmp_path_factory.mktemp(preset)
            command = PRESETS[preset][0]
            start = time.perf_counter()
            code = cli_main.main([command, "--preset", preset, *flags, "--out", str(out)])
            cache[key] = (code, out, time.perf_counter() - start)
        return cache[key]

    return run


def report(capsys, number, ok, detail):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}"
    CRITERIA.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def data_lines(path):
    return path.read_text(encoding="utf-8").splitlines()[2:]


def load_wmax(out):
    rows = [line.split(",") for line in data_lines(out / "wmax.csv")]
    return {(int(r[0]), r[1], r[2]): float(r[3]) for r in rows}


def load_trace(out):
    rows = [line.split(",") for line in data_lines(out / "trace.csv")]
    curves = {}
    for tau, w, _, label in rows:
        curves.setdefault(label, []).append((float(tau), float(w)))
    return {k: np.array(v).T for k, v in curves.items()}


def load_grid(out):
    """Return (axis1 values, axis2 values or [''], taus, W[axis1, axis2, tau])."""
    rows = [line.split(",") for line in data_lines(out / "grid.csv")]
    a1 = list(dict.fromkeys(r[0] for r in rows))
    a2 = list(dict.fromkeys(r[1] for r in rows))
    taus = np.array([float(t) for t in dict.fromkeys(r[2] for r in rows)])
    w = np.array([float(r[3]) for r in rows]).reshape(len(a1), len(a2), len(taus))
    converged = [line.split(",")[3] for line in data_lines(out / "meta.csv")]
    assert set(converged) == {"1"}, "unconverged grid cells"
    return np.array(a1, dtype=float), a2, taus, w


def test_criterion_1_strong_coupling_protocols(runner, capsys):
    code, out, secs = runner("fig7a", "--n_values", "8")
    table = load_wmax(out)
    lin, sin = table[(8, "nn", "linear")], table[(8, "nn", "sin")]
    ok = code == 0 and 85 <= lin <= 115 and 17 <= sin <= 23 and lin / sin >= 2.0 and secs < 300
    report(capsys, 1, ok, f"N=8 NN g=20: linear W_max={lin:.2f}, periodic={sin:.2f}, "
                          f"ratio={lin / sin:.2f} ({secs:.0f} s)")


def test_criterion_2_saturation(runner, capsys):
    finals = {}
    total = 0.0
    for preset in ("fig5a", "fig5b"):
        code, out, secs = runner(preset, "--gamma", "1")
        assert code == 0
        total += secs
        taus, w = load_trace(out)["single"]
        assert taus[-1] == 20.0
        finals[preset] = w[-1]
    nn, lr = finals["fig5a"], finals["fig5b"]
    ok = 51 <= nn <= 69 and 102 <= lr <= 138 and total < 300
    report(capsys, 2, ok, f"N=8 g=10 gamma=1: W(20)/B NN={nn:.2f}, LR={lr:.2f} ({total:.0f} s)")


def test_criterion_3_drive_sweep_maxima(runner, capsys):
    maxima = {}
    total = 0.0
    for preset in ("fig4a", "fig4b"):
        code, out, secs = runner(preset)
        assert code == 0
        total += secs
        maxima[preset] = load_grid(out)[3].max()
    nn, lr = maxima["fig4a"], maxima["fig4b"]
    ok = 21 <= nn <= 29 and 38 <= lr <= 52 and total < 1800
    report(capsys, 3, ok, f"N=7 v-sweep grid max NN={nn:.2f}, LR={lr:.2f} ({total:.0f} s)")


def test_criterion_4_periodic_wins_for_nearest_neighbours(runner, capsys):
    code_a, out_a, secs_a = runner("fig9a", "--n_values", "8")
    code_b, out_b, secs_b = runner("fig9b", "--n_values", "8")
    a, b = load_wmax(out_a), load_wmax(out_b)
    nn_lin, nn_sin = a[(8, "nn", "linear")], a[(8, "nn", "sin")]
    lr_lin, lr_sin = b[(8, "lr", "linear")], b[(8, "lr", "sin")]
    ok = (code_a == code_b == 0 and 60 <= nn_sin <= 80 and nn_sin > nn_lin and nn_lin <= 55
          and lr_lin > lr_sin and lr_lin >= 85 and secs_a + secs_b < 600)
    report(capsys, 4, ok, f"N=8 g=10 gamma=0.5: NN periodic={nn_sin:.2f} linear={nn_lin:.2f}; "
                          f"LR linear={lr_lin:.2f} periodic={lr_sin:.2f} ({secs_a + secs_b:.0f} s)")


def test_criterion_5_long_range_ratio(runner, capsys):
    code, out, _ = runner("fig8b", "--n_values", "8")
    t = load_wmax(out)
    ratio = t[(8, "lr", "linear")] / t[(8, "lr", "sin")]
    report(capsys, 5, code == 0 and ratio >= 2.7,
           f"N=8 LR g=10 gamma=1: linear/periodic W_max ratio={ratio:.2f}")


def gradient_peaks(g, w):
    """Positions (midpoints) of the local maxima of the discrete gradient, largest first."""
    d = np.diff(w)
    mids = 0.5 * (g[1:] + g[:-1])
    padded = np.concatenate([[-np.inf], d, [-np.inf]])
    peaks = [k for k in range(len(d)) if padded[k + 1] > padded[k] and padded[k + 1] >= padded[k + 2]]
    peaks.sort(key=lambda k: -d[k])
    return mids[peaks]


def test_criterion_6_coupling_transitions(runner, capsys):
    found = {}
    ok = True
    for preset in ("fig2a", "fig2b"):
        code, out, _ = runner(preset)
        g, _, taus, w = load_grid(out)
        slice15 = w[:, 0, int(np.argmin(np.abs(taus - 15.0)))]
        top = sorted(gradient_peaks(g, slice15)[:2])
        found[preset] = top
        ok &= code == 0 and 3 <= top[0] <= 7 and 13 <= top[1] <= 17
    detail = ", ".join(f"{p}: g={t[0]:.2f}, {t[1]:.2f}" for p, t in found.items())
    report(capsys, 6, ok, f"two largest gradient peaks of W(g) at B*tau=15 ({detail})")


def test_criterion_7_charge_time(runner, capsys):
    code, out, _ = runner("fig1a", "--g", "20")
    taus, w = load_trace(out)["single"]
    t90 = taus[np.argmax(w >= 0.9 * w.max())]
    report(capsys, 7, code == 0 and t90 <= 3.0,
           f"N=8 NN g=20: first B*tau with W >= 0.9 W_max is {t90:.3f} (W_max={w.max():.2f})")


def test_criterion_8_anisotropy_scale(runner, capsys):
    code, out, _ = runner("fig6")
    n, gammas, _, w = load_grid(out)
    g = np.array(gammas, dtype=float)
    near_zero = np.abs(g) == np.abs(g).min()
    n2 = w[list(n).index(2)].max()
    n7 = w[list(n).index(7)]
    n7_iso = n7[near_zero].max()
    ok = code == 0 and n2 <= 0.1 * n7_iso and 81 <= n7.max() <= 109
    report(capsys, 8, ok, f"N=2 grid max={n2:.3f}, N=7 max at gamma~0={n7_iso:.3f}, "
                          f"N=7 grid max={n7.max():.2f}")


def test_criterion_9_property_suite(capsys):
    start = time.perf_counter()
    with capsys.disabled():
        code = cli_main.main(["validate"])
    secs = time.perf_counter() - start
    report(capsys, 9, code == 0 and secs < 120, f"validate exit {code} ({secs:.0f} s)")


def test_criterion_10_determinism(runner, capsys, tmp_path):
    mismatched = []
    # every preset twice on a shortened window, plus one full-size rerun
    for name, (command, _) in PRESETS.items():
        files = []
        for rep in "ab":
            out = tmp_path / f"{name}-{rep}"
            cli_main.main([command, "--preset", name, "--tau_max", "0.5", "--out", str(out)])
            files.append(sorted(out.glob("*.csv")))
        for fa, fb in zip(*files):
            if data_lines(fa) != data_lines(fb):
                mismatched.append(f"{name}/{fa.name}")
    _, first, _ = runner("fig1a", "--g", "20")
    again = tmp_path / "fig1a-full"
    cli_main.main(["trace", "--preset", "fig1a", "--g", "20", "--out", str(again)])
    if data_lines(first / "trace.csv") != data_lines(again / "trace.csv"):
        mismatched.append("fig1a full")
    report(capsys, 10, not mismatched,
           f"{len(PRESETS)} presets rerun, byte-identical data rows"
           + (f"; mismatches: {mismatched}" if mismatched else ""))
