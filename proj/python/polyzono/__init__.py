"""Polynomial-zonotope set arithmetic, neural-network image enclosures,
open-loop verification, and closed-loop reachability."""

from ._polyzono import (
    ApproxPolicy,
    ControlSetup,
    EnclosureTrace,
    Network,
    PolyZonotope,
    ReachResult,
    __version__,
    affine_map,
    cartesian_product_dep,
    compact,
    evaluate,
    image_enclosure,
    image_witness,
    interval_enclosure,
    load_setup,
    minkowski_sum_interval,
    quadratic_map,
    quadratic_map_witness,
    reach,
    reduce_order,
    setup_from_json,
    simulate,
    verify,
    zonotope_enclosure,
)

__all__ = [
    "ApproxPolicy",
    "ControlSetup",
    "EnclosureTrace",
    "Network",
    "PolyZonotope",
    "ReachResult",
    "__version__",
    "affine_map",
    "cartesian_product_dep",
    "compact",
    "evaluate",
    "image_enclosure",
    "image_witness",
    "interval_enclosure",
    "load_setup",
    "minkowski_sum_interval",
    "quadratic_map",
    "quadratic_map_witness",
    "reach",
    "reduce_order",
    "setup_from_json",
    "simulate",
    "verify",
    "zonotope_enclosure",
]
