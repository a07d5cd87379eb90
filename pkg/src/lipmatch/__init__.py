"""Illumination-invariant pattern matching with LIP Asplund distance maps."""

from ._backend import HAVE_COMPILED, get_backend, set_backend, use_backend
from .asplund_add import (
    AddProbeContext,
    dist_add,
    map_add_direct,
    map_add_flat,
    map_add_morpho,
    shift_lower_map,
    shift_upper_map,
)
from .asplund_mult import (
    MultProbeContext,
    dist_mult,
    map_mult_direct,
    map_mult_flat,
    map_mult_morpho,
    scale_lower_map,
    scale_upper_map,
)
from .bench import BenchResult, bench, bench_backends
from .detection import DetectConfig, Detection, DetectMethod, detect, percentile_threshold
from .distmap import DistanceMap
from .lip import (
    DEFAULT_M,
    GreyImage,
    LipScale,
    RangeMode,
    clamp_grey,
    complement,
    contrast_add,
    contrast_mult,
    grey_to_linear,
    linear_to_grey,
    lip_add,
    lip_mul,
    lip_neg,
    lip_sub,
    log_absorbance,
    log_transmittance,
)
from .morphology import (
    area_opening,
    dilate_add,
    dilate_mult,
    erode_add,
    erode_mult,
    flat_max_filter,
    flat_min_filter,
    hminima,
    rank_window,
    reconstruct_erosion,
    regional_minima,
)
from .probes import (
    ProbeFunction,
    disk_probe,
    parse_probe_spec,
    probe_from_image,
    rect_probe,
    reflect,
    ring_disk_probe,
)
from .synth import (
    gen_noisy_plane,
    make_bench_scene,
    make_detection_scene,
    simulate_add_darken,
    simulate_mul_darken,
    stamp_probe,
)

__version__ = "0.1.0"
