"""Bootstrap AMG preconditioned GMRES for Markov chain steady states."""

from ._core import (
    ChainProblem,
    DimensionError,
    IoError,
    NumericalError,
    eigenvalues,
    export_chain,
    fov,
    generate,
    import_chain,
    molloy_state_count,
    project_range,
    setup,
    solve,
    theorem2_bound,
)

__all__ = [
    "ChainProblem",
    "DimensionError",
    "IoError",
    "NumericalError",
    "eigenvalues",
    "export_chain",
    "fov",
    "generate",
    "import_chain",
    "molloy_state_count",
    "project_range",
    "setup",
    "solve",
    "theorem2_bound",
]
