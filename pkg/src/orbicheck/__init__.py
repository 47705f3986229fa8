"""Verification of hyperbolic orbifold tilings by face-pairing 4-complexes."""
from importlib import resources

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file (``cp2.tri``, ``lanner_343.cox``)."""
    return resources.files(__package__).joinpath("data", name)
