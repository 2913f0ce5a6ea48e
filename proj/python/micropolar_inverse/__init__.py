"""Forward and inverse solver for 2D nonhomogeneous micropolar flow.

Field arrays use the staggered layout of the C++ core: cell fields have
shape (ny, nx), velocity x components (ny, nx + 1) and y components
(ny + 1, nx). Row 0 is the south wall.
"""

from ._core import (
    AlignmentError,
    CoercivityError,
    CompatibilityError,
    Config,
    DegeneracyError,
    MicropolarError,
    MonitorViolation,
    ParseError,
    StepError,
    ValidationError,
    __version__,
    curl_of_scalar,
    curl_of_vector,
    differentiate_series,
    divergence,
    gradient,
    reconstruct,
    run_diagnose,
    run_forward,
    run_invert,
    run_twin,
    sha256_hex,
    simulate,
    solve_potential,
)


def config(**overrides):
    """Default config with overrides given as section__key=value."""
    c = Config()
    for key, value in overrides.items():
        c.set(key.replace("__", "."), value)
    return c


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
