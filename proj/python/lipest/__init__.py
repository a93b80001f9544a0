"""Sampling-based estimation of local Lipschitz constants of ReLU networks."""

from ._lipest import (
    Box,
    Mlp,
    __version__,
    activation_pattern,
    breakpoint_oracle_1d,
    clarke_jacobian,
    dual_norm_tag,
    enumerate_breakpoints,
    estimate,
    forward,
    gen_spheres,
    grid_oracle,
    induced_norm,
    init_subregions,
    load_model,
    mlp_from_layers,
    random_mlp,
    sample_value,
    save_model,
    subdivide,
    train_mlp,
    vector_norm,
)

__all__ = [
    "Box",
    "Mlp",
    "__version__",
    "activation_pattern",
    "breakpoint_oracle_1d",
    "clarke_jacobian",
    "dual_norm_tag",
    "enumerate_breakpoints",
    "estimate",
    "forward",
    "gen_spheres",
    "grid_oracle",
    "induced_norm",
    "init_subregions",
    "load_model",
    "mlp_from_layers",
    "random_mlp",
    "sample_value",
    "save_model",
    "subdivide",
    "train_mlp",
    "vector_norm",
]
