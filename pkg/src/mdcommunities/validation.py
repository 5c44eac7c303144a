"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers


def check_min_support(sigma) -> int:
    """Return ``sigma`` as an int, raising ``ValueError`` unless it is an integer >= 1."""
    if isinstance(sigma, bool) or not isinstance(sigma, numbers.Integral):
        raise TypeError(f"min_support must be an integer, got {type(sigma).__name__}")
    if sigma < 1:
        raise ValueError(f"min_support must be >= 1, got {sigma}")
    return int(sigma)


def check_network(net):
    from .network import MultidimNetwork

    if not isinstance(net, MultidimNetwork):
        raise TypeError(f"expected a MultidimNetwork, got {type(net).__name__}")
    return net


def check_transactions(db):
    from .membership import TransactionDB

    if not isinstance(db, TransactionDB):
        raise TypeError(f"expected a TransactionDB, got {type(db).__name__}")
    return db


def check_bounds(name: str, lo, hi) -> None:
    if lo is not None and hi is not None and lo > hi:
        raise ValueError(f"min_{name}={lo} exceeds max_{name}={hi}")


def check_fraction(name: str, value) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value
