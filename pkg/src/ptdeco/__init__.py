"""Dephasing dynamics of PT-symmetric quantum systems.

Subpackages: ``linalg`` (dense complex kernel), ``pt_core`` (PT checks,
biorthonormal bases, canonical hermitization), ``channel`` (composite
dynamics and Kraus families), ``dephasing`` (the exactly solvable PT qubit
in a bosonic bath), ``oracle`` (brute-force finite-bath validation),
``cli`` (scenario runner).
"""

from . import channel, dephasing, errors, linalg, oracle, pt_core

__version__ = "0.1.0"

__all__ = [
    "channel",
    "dephasing",
    "errors",
    "linalg",
    "oracle",
    "pt_core",
    "__version__",
]
