"""Acceptance checks, one test per criterion.

Each test attaches a short ``detail`` string that the terminal summary prints
next to its PASS/FAIL line, so a plain ``pytest`` run doubles as a report.
"""
import itertools
import math
import time

import numpy as np
import pytest

from irsmatch import _backend
from irsmatch.beamforming import PhaseAlphabet, coherent_sum, passive_beamform, strongest_column, zf_precoder
from irsmatch.channels import FadingParams, gen_bs_irs_channel, gen_irs_user_channel, steering_vector
from irsmatch.cli import main as cli_main
from irsmatch.config import PRESETS
from irsmatch.harness import CalibrationError, calibrate_noise, prepare_drop, run_sweep, run_trials
from irsmatch.matching import SWAP_TOL, gale_shapley, list_blocking_pairs, propose
from irsmatch.rates import Matching, user_rates

from conftest import crandn
from test_beamforming import per_step_oracle

D_R_VALUES = (50.0, 100.0, 150.0, 200.0, 250.0)


def note(request, text):
    request.node.user_properties.append(("detail", text))


def paired_z(a, b):
    d = np.asarray(a) - np.asarray(b)
    se = d.std(ddof=1) / math.sqrt(d.size)
    return d.mean(), se


def each_backend():
    previous = _backend.name
    try:
        for name in _backend.available():
            _backend.set_backend(name)
            yield name
    finally:
        _backend.set_backend(previous)


# 1 ------------------------------------------------------------------------------------


def test_criterion_1_ordering(request):
    cfg = PRESETS["desk"].replace(trials=500, algorithms=("proposed", "gs_only", "distance", "random"))
    start = time.perf_counter()
    trials = run_trials(cfg)
    elapsed = time.perf_counter() - start
    rate = {a: [t.outcomes[a].sum_rate for t in trials] for a in cfg.algorithms}
    checks = {
        "proposed-gs_only": paired_z(rate["proposed"], rate["gs_only"]),
        "proposed-distance": paired_z(rate["proposed"], rate["distance"]),
        "distance-random": paired_z(rate["distance"], rate["random"]),
    }
    note(request, "; ".join(f"{k} {m:+.3f} ({m / se:+.1f} se)" for k, (m, se) in checks.items())
         + f"; {elapsed:.0f} s")
    # "A >= B at 3 sigma": the paired mean difference may not fall below -3 standard errors
    for name, (mean, se) in checks.items():
        assert mean >= -3 * se, name
    assert elapsed < 120


# 2 ------------------------------------------------------------------------------------


def test_criterion_2_table1_shape(request):
    cfg = PRESETS["table1"].replace(trials=200, algorithms=("proposed", "distance"))
    start = time.perf_counter()
    try:
        res = calibrate_noise(cfg, 37.0, d_r=50.0)
        noise_db, calibrated = res.noise_power_db, True
    except CalibrationError as exc:
        (lo_db, lo_rate), (hi_db, hi_rate) = exc.bracket
        # report the shape at the shipped default noise so the failure line stays informative
        noise_db, calibrated = cfg.noise_power_db, False
        reason = f"37.0 unreachable: {lo_rate:.2f} at {lo_db} dB, {hi_rate:.2f} at {hi_db} dB"
    sweep = run_sweep(cfg.replace(noise_power_db=noise_db), "d_r", D_R_VALUES)
    prop = [sweep.mean(v, "proposed") for v in D_R_VALUES]
    dist = [sweep.mean(v, "distance") for v in D_R_VALUES]
    elapsed = time.perf_counter() - start
    peak = int(np.argmax(prop))
    unimodal = 0 < peak < len(prop) - 1 and all(np.diff(prop[: peak + 1]) > 0) and all(np.diff(prop[peak:]) < 0)
    dominated = all(p > d for p, d in zip(prop, dist))
    shape = " ".join(f"{p:.2f}" for p in prop)
    note(request, (f"noise {noise_db:.2f} dB" if calibrated else reason)
         + f"; proposed d_R sweep {shape}; unimodal={unimodal}; distance dominated={dominated}; {elapsed:.0f} s")
    assert calibrated, reason
    assert unimodal and dominated
    assert elapsed < 600


# 3 ------------------------------------------------------------------------------------


def brute_force_swaps(drop, matching):
    ch, bank, budget = drop.channels, drop.bank, drop.budget

    def rates(m):
        return user_rates(m, ch, bank.for_matching(m), budget)

    before = rates(matching)
    user_of = matching.user_of_irs
    out = []
    for i, j in itertools.combinations(range(matching.size), 2):
        after = rates(matching.swap_irs(i, j))
        ui, uj = user_of[i], user_of[j]
        if after[uj] - before[ui] > SWAP_TOL and after[ui] - before[uj] > SWAP_TOL:
            out.append((i, j))
    return out


def test_criterion_3_stability_oracle(request):
    cfg = PRESETS["desk"]
    natural = violations = 0
    for seed in range(100):
        prepared = prepare_drop(cfg.replace(seed=seed), 0)
        final = propose(prepared.evaluator, np.random.default_rng(prepared.assoc_seed)).final
        if not final.converged:
            continue
        natural += 1
        violations += len(brute_force_swaps(prepared.evaluator, final))
    note(request, f"{natural}/100 terminated naturally; {violations} exchange-blocking pairs")
    assert natural > 0
    assert violations == 0


# 4 ------------------------------------------------------------------------------------


def test_criterion_4_gale_shapley(request):
    rng = np.random.default_rng(4)
    n = 5
    blocking = not_optimal = 0
    for _ in range(100):
        irs = [list(rng.permutation(n)) for _ in range(n)]
        users = [list(rng.permutation(n)) for _ in range(n)]
        gs = gale_shapley(irs, users)
        blocking += len(list_blocking_pairs(gs, irs, users))
        for perm in itertools.permutations(range(n)):
            other = Matching(perm)
            if list_blocking_pairs(other, irs, users):
                continue
            not_optimal += sum(
                irs[l].index(gs.user_of_irs[l]) > irs[l].index(other.user_of_irs[l]) for l in range(n)
            )
    note(request, f"{blocking} blocking pairs, {not_optimal} IRS-optimality violations over 100 profiles")
    assert blocking == 0 and not_optimal == 0


# 5 ------------------------------------------------------------------------------------


def test_criterion_5_passive_beamforming(request):
    mismatched = 0
    worst = np.inf
    for name in each_backend():
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = int(rng.integers(1, 17))
            alphabet = PhaseAlphabet(int(rng.integers(1, 4)))
            g, f = crandn(rng, n, int(rng.integers(1, 9))), crandn(rng, n)
            cfg = passive_beamform(g, f, alphabet)
            mismatched += not np.array_equal(cfg.indices, per_step_oracle(f, g, alphabet, cfg.indices))
        fine = PhaseAlphabet(10)
        for _ in range(100):
            n = int(rng.integers(1, 33))
            g, f = crandn(rng, n, 4), crandn(rng, n)
            cfg = passive_beamform(g, f, fine)
            bound = np.sum(np.abs(f) * np.abs(g[:, strongest_column(g)]))
            worst = min(worst, abs(coherent_sum(g, f, cfg)) / bound)
    note(request, f"{mismatched} index mismatches; worst |s_N|/sum(gamma) at B=10: {worst:.5f}")
    assert mismatched == 0
    assert worst >= 0.99


# 6 ------------------------------------------------------------------------------------


def test_criterion_6_zf_nulling(request):
    worst = 0.0
    for name in each_backend():
        rng = np.random.default_rng(6)
        done = 0
        while done < 1000:
            k = int(rng.integers(1, 17))
            m = int(rng.integers(k, 17))
            h = crandn(rng, k, m)
            if np.linalg.cond(h) > 1e3:
                continue
            w = zf_precoder(h).columns
            cross = np.abs(h @ w) / np.linalg.norm(h, axis=1)[:, None]
            np.fill_diagonal(cross, 0.0)
            worst = max(worst, float(cross.max()))
            done += 1
    note(request, f"max off-diagonal |h_k w_j|/|h_k| = {worst:.2e}")
    assert worst < 1e-8


# 7 ------------------------------------------------------------------------------------


def test_criterion_7_sandwich(request):
    cfg = PRESETS["desk"].replace(
        k_users=3, l_irs=3, m_antennas=4, n_elements=8, trials=200, algorithms=("random", "proposed", "exhaustive")
    )
    trials = run_trials(cfg)
    mean = {a: np.mean([t.outcomes[a].sum_rate for t in trials]) for a in cfg.algorithms}
    above = sum(t.outcomes["proposed"].sum_rate > t.outcomes["exhaustive"].sum_rate + 1e-12 for t in trials)
    hits = sum(t.outcomes["proposed"].sum_rate >= t.outcomes["exhaustive"].sum_rate - 1e-12 for t in trials)
    gap = 1.0 - mean["proposed"] / mean["exhaustive"]
    note(request, f"random {mean['random']:.3f} <= proposed {mean['proposed']:.3f} <= exhaustive "
                  f"{mean['exhaustive']:.3f}; gap {gap:.2%}; proposed optimal on {hits}/200 drops")
    assert above == 0
    assert mean["random"] <= mean["proposed"] <= mean["exhaustive"]


# 8 ------------------------------------------------------------------------------------


def test_criterion_8_determinism(request, tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("trials = 40\nalgorithms = proposed, gs_only, distance, random, exhaustive\n", encoding="utf-8")
    outs = []
    for run, workers in enumerate((1, 2)):
        out = tmp_path / f"run{run}.csv"
        code = cli_main(["simulate", "--config", str(cfg), "--seed", "77", "--sweep", "n_elements=8,16",
                         "--workers", str(workers), "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    note(request, f"{len(outs[0])} bytes per CSV; identical={outs[0] == outs[1]} (1 vs 2 workers)")
    assert outs[0] == outs[1]


# 9 ------------------------------------------------------------------------------------


def test_criterion_9_channel_statistics(request):
    rng = np.random.default_rng(9)
    samples = 10_000
    lines = []
    ok = True
    for kappa in (0.0, 10.0, 1e12):
        p = FadingParams(kappa_g=kappa, kappa_f=kappa)
        g = np.array([gen_bs_irs_channel(rng, p, 1, 1, rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))[0, 0]
                      for _ in range(samples)])
        f = np.array([gen_irs_user_channel(rng, p, 1, rng.uniform(-np.pi, np.pi))[0] for _ in range(samples)])
        for label, x in (("G", g), ("f", f)):
            power = np.abs(x) ** 2
            se = power.std(ddof=1) / math.sqrt(samples)
            z = (power.mean() - 1.0) / se if se > 0 else 0.0
            ok &= abs(z) <= 3.0
            lines.append(f"{label} k={kappa:g}: {power.mean():.4f} ({z:+.1f} se)")
    worst_mod = max(
        float(np.max(np.abs(np.abs(steering_vector(n, th)) - 1.0)))
        for n in (1, 8, 64, 256) for th in np.linspace(-np.pi, np.pi, 25)
    )
    note(request, "; ".join(lines) + f"; steering modulus err {worst_mod:.1e}")
    assert ok
    assert worst_mod <= 1e-12
