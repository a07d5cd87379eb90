"""Acceptance suite: one test per release criterion, at fixed tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one verdict line
per criterion.  Each test is self-contained and enforces its own runtime
budget where one is specified.
"""

import math
import time

import numpy as np
import pytest

import lipmatch as lm
from lipmatch import (
    DetectConfig,
    ProbeFunction,
    bench,
    detect,
    dist_add,
    dist_mult,
    disk_probe,
    gen_noisy_plane,
    lip_add,
    lip_mul,
    lip_neg,
    lip_sub,
    make_bench_scene,
    make_detection_scene,
    map_add_direct,
    map_add_flat,
    map_add_morpho,
    map_mult_direct,
    map_mult_flat,
    map_mult_morpho,
    rect_probe,
)

M = 256.0


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def _rand_probe(rng, side_lo=5, side_hi=9, vlo=10.0, vhi=245.0):
    side = int(rng.choice(range(side_lo, side_hi + 1, 2)))
    return rect_probe(side, side, 0.0), side  # support only


def _rand_valued_probe(rng, side_lo=5, side_hi=9, vlo=10.0, vhi=245.0):
    side = int(rng.choice(range(side_lo, side_hi + 1, 2)))
    base = rect_probe(side, side, 1.0)
    return ProbeFunction(base.offsets, rng.uniform(vlo, vhi, len(base)))


def test_criterion_1_lip_algebra():
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    n = 10_000
    f = rng.uniform(-1000.0, M, n)
    g = rng.uniform(-1000.0, M, n)
    h = rng.uniform(-1000.0, M, n)
    a = rng.uniform(1e-3, 10.0, n)
    b = rng.uniform(1e-3, 10.0, n)

    def ok(lhs, rhs, tol=1e-9):
        return bool(np.all(np.abs(lhs - rhs) <= tol * (1.0 + np.abs(rhs))))

    checks = [
        ok(lip_add(f, g), lip_add(g, f)),
        ok(lip_add(lip_add(f, g), h), lip_add(f, lip_add(g, h))),
        ok(lip_add(f, lip_neg(f)), np.zeros(n)),
        ok(lip_add(f, 0.0), f),
        ok(lip_mul(a[0], lip_mul(b[0], f)), lip_mul(a[0] * b[0], f)),
        ok(lip_mul(a[1], lip_add(f, g)), lip_add(lip_mul(a[1], f), lip_mul(a[1], g))),
        ok(lip_mul(a[2] + b[2], f), lip_add(lip_mul(a[2], f), lip_mul(b[2], f))),
        ok(lm.linear_to_grey(lm.grey_to_linear(f)), f),
        ok(lm.grey_to_linear(lip_sub(f, g)), lm.grey_to_linear(f) - lm.grey_to_linear(g)),
    ]
    elapsed = time.perf_counter() - start
    _verdict(
        1,
        all(checks) and elapsed < 1.0,
        f"vector-space laws and linear-isomorphism identities at 1e-9 on {n} triples "
        f"({elapsed:.2f} s)",
    )


def test_criterion_2_metric_invariance():
    start = time.perf_counter()
    rng = np.random.default_rng(1002)
    worst = 0.0
    alphas = (0.2, 1.0, 5.0)
    shifts = (float(lip_neg(100.0)), -50.0, 50.0)
    for _ in range(100):
        f = rng.uniform(5.0, 175.0, (64, 64))
        probe = _rand_valued_probe(rng)
        for p in (1.0, 0.8, 0.95):
            base_m = map_mult_morpho(f, probe, p).values
            for alpha in alphas:
                moved = map_mult_morpho(lip_mul(alpha, f), probe, p).values
                worst = max(worst, float(np.max(np.abs(moved - base_m))))
            base_a = map_add_morpho(f, probe, p).values
            for k in shifts:
                moved = map_add_morpho(lip_add(k, f), probe, p).values
                worst = max(worst, float(np.max(np.abs(moved - base_a))))
    elapsed = time.perf_counter() - start
    _verdict(
        2,
        worst < 1e-6 and elapsed < 30.0,
        f"lighting invariance on 100 images x 3 tolerances: max drift {worst:.2e} "
        f"({elapsed:.1f} s)",
    )


def test_criterion_3_direct_morpho_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(1003)
    worst = 0.0
    for trial in range(100):
        h, w = int(rng.integers(24, 40)), int(rng.integers(24, 40))
        f = rng.uniform(1.0, 255.0, (h, w))
        if trial % 2:
            probe = _rand_valued_probe(rng, 3, 7)
        else:  # non-rectangular support with an arbitrary anchor
            k = int(rng.integers(2, 12))
            offs = set()
            while len(offs) < k:
                offs.add((int(rng.integers(-3, 4)), int(rng.integers(-3, 4))))
            probe = ProbeFunction(np.array(sorted(offs)), rng.uniform(10, 245, k))
        for p in (1.0, float(rng.uniform(0.6, 0.95))):
            dm = map_mult_direct(f, probe, p).values
            mm = map_mult_morpho(f, probe, p).values
            worst = max(worst, float(np.max(np.abs(dm - mm))))
            da = map_add_direct(f, probe, p).values
            ma = map_add_morpho(f, probe, p).values
            worst = max(worst, float(np.max(np.abs(da - ma))))
        flat = disk_probe(2, float(rng.uniform(10, 245)))
        for p in (1.0, 0.85):
            worst = max(worst, float(np.max(np.abs(
                map_mult_direct(f, flat, p).values - map_mult_morpho(f, flat, p).values))))
            worst = max(worst, float(np.max(np.abs(
                map_add_direct(f, flat, p).values - map_add_morpho(f, flat, p).values))))
    elapsed = time.perf_counter() - start
    _verdict(
        3,
        worst < 1e-6 and elapsed < 60.0,
        f"direct vs morphological paths on 100 pairs incl. borders: max diff {worst:.2e} "
        f"({elapsed:.1f} s)",
    )


def test_criterion_4_flat_closed_forms():
    rng = np.random.default_rng(1004)
    worst = 0.0
    bitwise = True
    for _ in range(20):
        f = rng.uniform(1.0, 255.0, (28, 31))
        support = disk_probe(2, 50.0)
        other = disk_probe(2, 199.0)
        for p in (1.0, 0.8):
            fm = map_mult_flat(f, support, p).values
            worst = max(worst, float(np.max(np.abs(fm - map_mult_direct(f, support, p).values))))
            bitwise &= bool(np.array_equal(fm, map_mult_flat(f, other, p).values))
            fa = map_add_flat(f, support, p).values
            worst = max(worst, float(np.max(np.abs(fa - map_add_direct(f, support, p).values))))
            bitwise &= bool(np.array_equal(fa, map_add_flat(f, other, p).values))
    _verdict(
        4,
        worst < 1e-6 and bitwise,
        f"flat closed forms: max diff to direct {worst:.2e}, grey-value independence "
        f"{'bitwise' if bitwise else 'BROKEN'}",
    )


def test_criterion_5_noise_tolerance():
    f, g = gen_noisy_plane(64, 64, 100.0, 0.08, math.sqrt(5.0), seed=12345)
    dm = {p: dist_mult(f, g, p) for p in (1.0, 0.97, 0.90)}
    da = {p: dist_add(f, g, p) for p in (1.0, 0.97, 0.90)}
    zero_at_tolerance = dm[0.90] == 0.0 and da[0.90] == 0.0
    positive_without = dm[1.0] > 0.0 and da[1.0] > 0.0
    monotone = dm[0.90] <= dm[0.97] <= dm[1.0] and da[0.90] <= da[0.97] <= da[1.0]
    _verdict(
        5,
        zero_at_tolerance and positive_without and monotone,
        f"8% impulse noise: d(p=1)=({dm[1.0]:.3f}, {da[1.0]:.2f}) > 0, "
        f"d(p=0.90)=({dm[0.90]}, {da[0.90]}) exactly zero, monotone in p",
    )


def test_criterion_6_range_properties():
    rng = np.random.default_rng(1006)
    ok = True
    patches = 0
    # batch fuzz: each map pixel is one random-patch distance
    for _ in range(5):
        f = rng.uniform(1.0, 255.0, (100, 100))
        probe = _rand_valued_probe(rng)
        mv = map_mult_morpho(f, probe, 0.9).values
        av = map_add_morpho(rng.uniform(-300.0, 255.0, (100, 100)), probe, 0.9).values
        ok &= bool(mv.min() >= 0.0)
        ok &= bool(av.min() >= 0.0 and av.max() < M)
        patches += 2 * f.size
    # plus direct patch-level draws
    for _ in range(1000):
        n = int(rng.integers(2, 30))
        fm = rng.uniform(0.5, 255.5, n)
        gm = rng.uniform(0.5, 255.5, n)
        ok &= 0.0 <= dist_mult(fm, gm)
        fa = rng.uniform(-400.0, 255.0, n)
        ga = rng.uniform(-400.0, 255.0, n)
        ok &= 0.0 <= dist_add(fa, ga) < M
        patches += 2
    _verdict(6, ok and patches >= 100_000,
             f"range properties held on {patches} fuzzed patches")


def test_criterion_7_detection_end_to_end():
    scene, probe, positions = make_detection_scene()
    probe_c = ProbeFunction(probe.offsets, lm.complement(probe.values), probe.scale)
    mult_map = map_mult_morpho(lm.complement(scene), probe_c, clamp_eps=2.0 ** -20)
    add_map = map_add_morpho(scene, probe)
    truth = set(positions)
    mult_targets = set(positions[:3])  # plain x2 + LIP-multiplication-darkened
    add_targets = {positions[0], positions[1], positions[3]}  # plain x2 + shifted

    def close(found, wanted):
        return any(abs(found[0] - w[0]) <= 1 and abs(found[1] - w[1]) <= 1 for w in wanted)

    results = {}
    false_pos = 0
    for name, dmap, targets in (
        ("mult", mult_map, mult_targets),
        ("add", add_map, add_targets),
    ):
        found = [d.position for d in detect(dmap, DetectConfig())]
        false_pos += sum(not close(f, truth) for f in found)
        results[name] = all(close(t, found) or any(close(f, [t]) for f in found) for t in targets)
    recovered_all = results["mult"] and results["add"]
    _verdict(
        7,
        recovered_all and false_pos == 0,
        f"4-stamp scene: matching metrics recover their targets within 1 px, "
        f"{false_pos} false positives",
    )


def test_criterion_8_performance():
    start = time.perf_counter()
    scene, probe = make_bench_scene(1224, 918, seed=0)
    assert len(probe) == 285
    gains = {}
    for metric, p in (("mult", 1.0), ("mult", 0.95), ("add", 1.0), ("add", 0.94)):
        r = bench(scene, probe, metric, p, repetitions=3)
        gains[(metric, p)] = r.gain_factor
        print(f"\n  {metric} p={p}: direct {r.direct_s:.2f} s, morpho {r.morpho_s:.2f} s, "
              f"gain {r.gain_factor:.2f}x")
    elapsed = time.perf_counter() - start
    _verdict(
        8,
        all(g >= 2.0 for g in gains.values()) and elapsed < 600.0,
        "morphological path gains on 1224x918 with the 285-offset probe: "
        + ", ".join(f"{m}/p={p}: {g:.1f}x" for (m, p), g in gains.items())
        + f" ({elapsed:.0f} s)",
    )


def _oracle_maps_1d(signals: np.ndarray, probe_vals: np.ndarray, probe_dx: np.ndarray):
    """Vectorized brute-force toy oracle: windowed contrasts per alignment.

    Independent of the library kernels: explicit loops over window
    alignments and probe samples, numpy only for batching over signals.
    """
    n_sig, length = signals.shape
    mult = np.empty((n_sig, length))
    add = np.empty((n_sig, length))
    for x in range(length):
        g_m = []
        g_a = []
        for j, dx in enumerate(probe_dx):
            xx = x + dx
            if not (0 <= xx < length):
                continue
            fv = signals[:, xx]
            bv = probe_vals[j]
            g_m.append(np.log(1.0 - fv / M) / math.log(1.0 - bv / M))
            g_a.append((fv - bv) / (1.0 - bv / M))
        g_m = np.stack(g_m)
        g_a = np.stack(g_a)
        mult[:, x] = np.log(g_m.max(axis=0) / g_m.min(axis=0))
        c1, c2 = g_a.max(axis=0), g_a.min(axis=0)
        add[:, x] = (c1 - c2) / (1.0 - c2 / M)
    return mult, add


def test_criterion_9_toy_oracle_equivalence():
    from itertools import product

    from oracles import o_dist_add, o_dist_mult

    values = (32.0, 96.0, 160.0, 224.0)
    worst = 0.0
    pairs = 0
    for length in range(1, 7):
        signals = np.array(list(product(values, repeat=length)))
        for plen in range(1, 4):
            dxs = np.arange(plen) - (plen - 1) // 2
            for pvals in product(values, repeat=plen):
                pvals = np.array(pvals)
                om, oa = _oracle_maps_1d(signals, pvals, dxs)
                probe = ProbeFunction(
                    np.stack([np.zeros(plen, dtype=int), dxs], axis=1), pvals
                )
                gm = map_mult_direct(signals, probe, clamp_eps=0.0).values
                ga = map_add_direct(signals, probe).values
                worst = max(worst, float(np.max(np.abs(gm - om))))
                worst = max(worst, float(np.max(np.abs(ga - oa))))
                pairs += signals.shape[0]
    # scalar spot checks with the plain-python oracle on equal-length pairs
    rng = np.random.default_rng(1009)
    for _ in range(300):
        length = int(rng.integers(1, 4))
        f = rng.choice(values, length)
        g = rng.choice(values, length)
        worst = max(worst, abs(dist_mult(f, g) - o_dist_mult(f, g)))
        worst = max(worst, abs(dist_add(f, g) - o_dist_add(f, g)))
    _verdict(
        9,
        worst <= 1e-9,
        f"all {pairs} toy signal/probe alignments match the brute-force oracle "
        f"(max diff {worst:.2e})",
    )
