"""Wall-clock comparison of the direct and morphological map paths.

Both paths run on identical inputs and their outputs are checked for
agreement before any timing, so the benchmark can never compare two
computations that disagree.  A second comparison pits the compiled
kernels against the numpy fallback on the morphological path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend as bk
from .asplund_add import AddProbeContext, map_add_direct, map_add_morpho
from .asplund_mult import MultProbeContext, map_mult_direct, map_mult_morpho
from .probes import ProbeFunction

EQUALITY_TOL = 1e-6


@dataclass
class BenchResult:
    metric: str
    p: float
    image_shape: tuple[int, int]
    probe_size: int
    repetitions: int
    direct_s: float
    morpho_s: float
    max_abs_diff: float
    backend: str
    seed: int | None = None
    extras: dict = field(default_factory=dict)

    @property
    def gain_factor(self) -> float:
        return self.direct_s / self.morpho_s

    def summary(self) -> str:
        lines = [
            f"metric={self.metric} p={self.p} image={self.image_shape[1]}x{self.image_shape[0]}"
            f" probe={self.probe_size} reps={self.repetitions} backend={self.backend}"
            + (f" seed={self.seed}" if self.seed is not None else ""),
            f"direct: {self.direct_s:.4f} s   morpho: {self.morpho_s:.4f} s   "
            f"gain factor: {self.gain_factor:.2f}",
            f"max |direct - morpho| = {self.max_abs_diff:.3g}",
        ]
        for key, val in self.extras.items():
            lines.append(f"{key}: {val}")
        return "\n".join(lines)


def _median_time(fn, repetitions: int) -> float:
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench(
    f: np.ndarray,
    probe: ProbeFunction,
    metric: str = "mult",
    p: float = 1.0,
    repetitions: int = 3,
    clamp_eps: float = 0.5,
    seed: int | None = None,
) -> BenchResult:
    """Time the direct and morphological paths of one map variant."""
    if repetitions < 3:
        raise ValueError("need at least 3 repetitions for a stable median")
    if metric == "mult":
        ctx = MultProbeContext(probe, p)
        direct = lambda: map_mult_direct(f, ctx, clamp_eps=clamp_eps)
        morpho = lambda: map_mult_morpho(f, ctx, clamp_eps=clamp_eps)
    elif metric == "add":
        ctx = AddProbeContext(probe, p)
        direct = lambda: map_add_direct(f, ctx)
        morpho = lambda: map_add_morpho(f, ctx)
    else:
        raise ValueError(f"unknown metric {metric!r}")

    diff = float(np.max(np.abs(direct().values - morpho().values)))
    if diff >= EQUALITY_TOL:
        raise AssertionError(
            f"direct and morphological outputs disagree (max diff {diff:.3g}); benchmark aborted"
        )
    return BenchResult(
        metric=metric,
        p=p,
        image_shape=f.shape,
        probe_size=len(probe),
        repetitions=repetitions,
        direct_s=_median_time(direct, repetitions),
        morpho_s=_median_time(morpho, repetitions),
        max_abs_diff=diff,
        backend=bk.get_backend(),
        seed=seed,
    )


def bench_backends(
    f: np.ndarray,
    probe: ProbeFunction,
    metric: str = "mult",
    p: float = 1.0,
    repetitions: int = 3,
    clamp_eps: float = 0.5,
) -> dict:
    """Time the morphological path under each available kernel backend."""
    if metric == "mult":
        ctx = MultProbeContext(probe, p)
        run = lambda: map_mult_morpho(f, ctx, clamp_eps=clamp_eps)
    elif metric == "add":
        ctx = AddProbeContext(probe, p)
        run = lambda: map_add_morpho(f, ctx)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    out = {}
    backends = ["python"] + (["c"] if bk.HAVE_COMPILED else [])
    results = {}
    for name in backends:
        with bk.use_backend(name):
            results[name] = run().values
            out[name] = _median_time(run, repetitions)
    if len(backends) == 2:
        out["max_abs_diff"] = float(np.max(np.abs(results["c"] - results["python"])))
        out["speedup_c_over_python"] = out["python"] / out["c"]
    return out
