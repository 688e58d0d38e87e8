"""Python access to the looplab engines."""

from ._looplab import (  # noqa: F401
    ConfigError,
    NonterminationError,
    destructive_geometry,
    detection_probability,
    enumerate_consistent,
    fringe_visibility,
    intensity,
    loop_probability,
    predict,
    repeated_cycle_survival,
    run,
    run_variants,
    scenario_table,
)
