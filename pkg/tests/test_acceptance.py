"""Acceptance gate: ten end-to-end criteria, each with a tolerance and a time budget.

Run ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line per criterion.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from probframes import (
    DiscreteMeasure,
    GaussianMixtureMeasure,
    build_povm,
    canonical_tight,
    convolve,
    embed_normalized,
    frame_bounds,
    frame_potential,
    is_spherical_2design,
    mc_verify_random_frame,
    mean,
    mix_with_delta0,
    mixed_potential_ratio,
    permutation_distance,
    product_measure,
    second_moment,
    symmetrize,
    tyler_iterate,
    validate_povm,
    wasserstein2,
)
from probframes.io import write_measure
from probframes.operators import frame_operator, reconstruction_residual

from .helpers import MERCEDES, harmonic_frame, random_discrete, random_frame, random_tight

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, elapsed, budget, detail):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion {number:2d} {title}: {detail} ({elapsed:.2f}s / {budget:g}s)")
    assert ok, detail
    assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"


def sphere_measure(rng, n, m):
    x = rng.normal(size=(m, n))
    return DiscreteMeasure(x / np.linalg.norm(x, axis=1, keepdims=True), rng.dirichlet(np.ones(m)))


def test_01_tight_bound_identity(capsys):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(n, 41))
        mu = canonical_tight(random_frame(rng, n, m))
        mu = DiscreteMeasure(mu.points * rng.uniform(0.2, 3.0), mu.weights)
        b = frame_bounds(mu)
        a = second_moment(mu) / n
        worst = max(worst, abs(b.lower - a), abs(b.upper - a), 0.0 if b.tight else np.inf)
    elapsed = time.perf_counter() - t0
    report(capsys, 1, "tight bound = M2^2/N", worst <= 1e-9, elapsed, 1.0,
           f"max deviation {worst:.2e} (tol 1e-9)")


def test_02_reconstruction(capsys):
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        mu = random_frame(rng, n, int(rng.integers(n, 3 * n + 3)))
        xs = rng.normal(size=(100, n))
        worst = max(worst, float(reconstruction_residual(mu, xs).max()))
    elapsed = time.perf_counter() - t0
    report(capsys, 2, "canonical dual reconstruction", worst <= 1e-10, elapsed, 1.0,
           f"max residual {worst:.2e} (tol 1e-10)")


def test_03_potential_bound(capsys):
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    violations = mismatches = tight_count = 0
    for k in range(500):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 20))
        mu = random_tight(rng, n, n + m) if k % 2 else random_discrete(rng, n, m)
        r = frame_potential(mu)
        if r.pfp < r.m2_fourth_over_n - 1e-10:
            violations += 1
        equal = abs(r.pfp - r.m2_fourth_over_n) <= 1e-9
        tight = frame_bounds(mu).tight
        tight_count += tight
        mismatches += equal != tight
    funtf = [(2, 3), (2, 5), (4, 7), (6, 10), (8, 13)]
    funtf_err = max(abs(frame_potential(DiscreteMeasure(MERCEDES if (n, m) == (2, 3) else harmonic_frame(n, m))).pfp
                        - 1 / n) for n, m in funtf)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and mismatches == 0 and funtf_err <= 1e-14 and tight_count > 0
    report(capsys, 3, "frame potential bound", ok, elapsed, 1.0,
           f"{violations} violations, {mismatches} equality/tight mismatches over 500 "
           f"({tight_count} tight), FUNTF error {funtf_err:.1e}")


def test_04_transport_oracle(capsys):
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 9))
        a, b = random_discrete(rng, n, m, uniform=True), random_discrete(rng, n, m, uniform=True)
        worst = max(worst, abs(m * wasserstein2(a, b).cost - permutation_distance(a, b)))
    elapsed = time.perf_counter() - t0
    report(capsys, 4, "W2 vs permutation brute force", worst <= 1e-9, elapsed, 5.0,
           f"max |M*W2^2 - perm| {worst:.2e} (tol 1e-9)")


def test_05_construction_bounds(capsys):
    rng = np.random.default_rng(105)
    t0 = time.perf_counter()
    conv = mix = prod = 0.0
    for _ in range(30):
        n = int(rng.integers(1, 6))
        mu = random_tight(rng, n, n + int(rng.integers(0, 6)))
        nu = symmetrize(random_tight(rng, n, n + int(rng.integers(0, 6))))
        b = frame_bounds(convolve(mu, nu))
        target = frame_bounds(mu).lower + frame_bounds(nu).lower
        conv = max(conv, abs(b.lower - target), abs(b.upper - target), 0.0 if b.tight else np.inf)

        eps = float(rng.uniform(0.01, 0.99))
        f = random_frame(rng, n, n + 3)
        b0, b1 = frame_bounds(f), frame_bounds(mix_with_delta0(f, eps))
        mix = max(mix, abs(b1.lower - (1 - eps) * b0.lower), abs(b1.upper - (1 - eps) * b0.upper))

        n2 = int(rng.integers(1, 5))
        g = symmetrize(random_frame(rng, n2, n2 + 2))
        bf, bg, bp = frame_bounds(f), frame_bounds(g), frame_bounds(product_measure(f, g))
        prod = max(prod, abs(bp.lower - min(bf.lower, bg.lower)), abs(bp.upper - max(bf.upper, bg.upper)))
    elapsed = time.perf_counter() - t0
    ok = conv <= 1e-10 and mix <= 1e-12 and prod <= 1e-10
    report(capsys, 5, "convolution / mixing / product bounds", ok, elapsed, 1.0,
           f"conv {conv:.1e}, mix {mix:.1e}, product {prod:.1e}")


def test_06_monte_carlo(capsys):
    t0 = time.perf_counter()
    g = mc_verify_random_frame("gaussian", 16, 4, 2000, 42)
    b = mc_verify_random_frame("bernoulli", 16, 4, 2000, 42)
    elapsed = time.perf_counter() - t0
    ok = (g.theory == pytest.approx(0.078125, abs=1e-15) and b.theory == pytest.approx(0.046875, abs=1e-15)
          and abs(g.z_score) <= 3 and abs(b.z_score) <= 3)
    report(capsys, 6, "random frame Monte Carlo", ok, elapsed, 30.0,
           f"gaussian {g.estimate:.5f} vs {g.theory} (z={g.z_score:+.2f}), "
           f"bernoulli {b.estimate:.5f} vs {b.theory} (z={b.z_score:+.2f})")


def test_07_tyler(capsys):
    rng = np.random.default_rng(107)
    t0 = time.perf_counter()
    worst = 0.0
    most_iter = 0
    for _ in range(20):
        x = rng.normal(size=(20, 4))
        r = tyler_iterate(x / np.linalg.norm(x, axis=1, keepdims=True), tol=1e-10, max_iter=500)
        most_iter = max(most_iter, r.iterations)
        worst = max(worst, float(np.linalg.norm(frame_operator(r.tight_frame).matrix - np.eye(4) / 4)))
    fixed = tyler_iterate(harmonic_frame(4, 9))
    fixed_err = float(np.linalg.norm(fixed.gamma_hat - np.eye(4)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and fixed.iterations == 1 and fixed_err <= 1e-12
    report(capsys, 7, "Tyler iteration", ok, elapsed, 2.0,
           f"max |S_psi - I/N| {worst:.1e}, max iterations {most_iter}, "
           f"fixed point error {fixed_err:.1e} after {fixed.iterations} step")


def test_08_design_equivalence(capsys):
    rng = np.random.default_rng(108)
    t0 = time.perf_counter()
    disagree = designs = 0
    for k in range(200):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(n, 3 * n + 2))
        kind = k % 4
        if kind == 0:
            mu = sphere_measure(rng, n, m)
        else:
            t = canonical_tight(random_frame(rng, n, m, uniform=True))
            mu = embed_normalized(t.points)
            if kind != 1:
                mu = symmetrize(mu)
        d = is_spherical_2design(mu)
        b = frame_bounds(mu)
        norms = np.linalg.norm(mu.support(), axis=1)
        structural = b.tight and np.abs(norms - 1).max() <= 1e-10 and np.linalg.norm(mean(mu)) <= 1e-9
        ratio = abs(mixed_potential_ratio(mu) - 1 / (2 * n)) <= 1e-9
        designs += d
        disagree += not (d == structural == ratio)
    elapsed = time.perf_counter() - t0
    report(capsys, 8, "2-design three-way agreement", disagree == 0 and designs > 0, elapsed, 2.0,
           f"{disagree} disagreements over 200 measures ({designs} designs)")


def test_09_povm(capsys):
    rng = np.random.default_rng(109)
    t0 = time.perf_counter()
    failures = 0
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 7))
        mu = random_tight(rng, n, n + int(rng.integers(0, 12)))
        k = int(rng.integers(1, mu.size + 1))
        labels = rng.integers(0, k, size=mu.size)
        cells = [np.flatnonzero(labels == j).tolist() for j in range(k) if np.any(labels == j)]
        atlas = build_povm(mu, cells)
        failures += not validate_povm(atlas)
        worst = max(worst, float(np.abs(atlas.total() - np.eye(n)).max()))
    elapsed = time.perf_counter() - t0
    report(capsys, 9, "POVM from tight measures", failures == 0 and worst <= 1e-9, elapsed, 1.0,
           f"{failures} invalid atlases, completeness error {worst:.1e}")


def test_10_cli_determinism(capsys, tmp_path):
    rng = np.random.default_rng(110)
    write_measure(DiscreteMeasure(np.eye(2)), tmp_path / "onb.json")
    write_measure(DiscreteMeasure(MERCEDES), tmp_path / "mb.json")
    write_measure(random_frame(rng, 2, 5), tmp_path / "frame.json")
    write_measure(GaussianMixtureMeasure.gaussian(np.zeros(2), 0.15 * np.eye(2)), tmp_path / "g.json")
    x = rng.normal(size=(20, 3))
    np.savetxt(tmp_path / "dirs.csv", x / np.linalg.norm(x, axis=1, keepdims=True), delimiter=",")
    commands = [
        ["analyze", "frame.json"],
        ["dual", "frame.json"],
        ["tighten", "frame.json"],
        ["potential", "frame.json"],
        ["design-check", "mb.json"],
        ["distance", "frame.json", "mb.json", "--plan"],
        ["convolve", "mb.json", "g.json"],
        ["convolve", "onb.json", "g.json", "--heatmap", "grid=21,range=2"],
        ["mix", "frame.json", "--eps", "0.25"],
        ["product", "mb.json", "frame.json"],
        ["tyler", "dirs.csv"],
        ["bingham", "dirs.csv"],
        ["mc-verify", "--spec", "gaussian", "--n", "4", "--m", "16", "--trials", "2000", "--seed", "42"],
        ["povm", "mb.json", "--cells", "0|1,2"],
    ]
    t0 = time.perf_counter()
    differing, failed = [], []
    for cmd in commands:
        runs = [subprocess.run([sys.executable, "-m", "probframes", *cmd], cwd=tmp_path,
                               capture_output=True) for _ in range(2)]
        if any(r.returncode != 0 for r in runs):
            failed.append(cmd[0])
        elif runs[0].stdout != runs[1].stdout or not runs[0].stdout:
            differing.append(cmd[0])
    elapsed = time.perf_counter() - t0
    report(capsys, 10, "CLI determinism", not differing and not failed, elapsed, 10.0,
           f"{len(commands)} commands x2, differing {differing or 'none'}, failed {failed or 'none'}")
