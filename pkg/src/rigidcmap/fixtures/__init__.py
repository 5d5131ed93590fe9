"""Shipped prepotential, lattice and point documents."""

from importlib import resources


def path(name: str) -> str:
    return str(resources.files(__name__) / name)
