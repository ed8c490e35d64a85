"""Bond percolation on generalized Sierpinski carpets."""

from ._core import (
    BondConfiguration,
    CarpetError,
    GeneratorSet,
    SpongeGraph,
    box_rects,
    build_region,
    build_sponge,
    cli,
    connected,
    detect_delta,
    estimate,
    estimate_pc,
    eval_f,
    eval_g,
    eval_phi,
    eval_psi,
    geometry_audit,
    gw_extinction,
    has_crossing,
    has_dual_crossing,
    lowest_crossing,
    pivotal_edges,
    russo_check,
    sample_config,
    solve_p_eps,
    solve_x_eps,
)

__all__ = [name for name in dir() if not name.startswith("_")]
