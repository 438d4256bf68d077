"""Shared fixtures: the four-participant worked example and a generator of
random valid access structures for property suites."""

from __future__ import annotations

import random
import warnings

import pytest

from msshare import (
    AccessStructure,
    SchemePlan,
    UnusedParticipantWarning,
    apply_replacements,
    build_single_secret,
    parse_dnf,
)
from msshare.access import minimize_clauses

EXAMPLE_FORMULA = "(P1&P2&P4)|(P1&P3&P4)|(P2&P3)"

# Message pinning that matches the worked example's replacement table.
EXAMPLE_MESSAGE_MAP = {"S2^A1": 2, "S2^A3": 3, "S3^A2": 4}


@pytest.fixture(scope="session")
def example_gamma() -> AccessStructure:
    return parse_dnf(EXAMPLE_FORMULA)


@pytest.fixture(scope="session")
def example_single(example_gamma) -> SchemePlan:
    return build_single_secret(example_gamma, 5)


@pytest.fixture(scope="session")
def example_multi(example_gamma) -> SchemePlan:
    """The worked example's multi-secret plan over F_5, message map pinned."""
    return apply_replacements(
        build_single_secret(example_gamma, 5), message_map=EXAMPLE_MESSAGE_MAP
    )


def random_structure(rng: random.Random, max_n: int = 5, max_r: int = 4) -> AccessStructure:
    """A random valid access structure: clauses of size >= 2, minimized to
    an antichain.  Participants outside every clause are allowed (their
    warning is suppressed here)."""
    n = rng.randint(2, max_n)
    clause_count = rng.randint(1, max_r)
    clauses = []
    for _ in range(clause_count):
        size = rng.randint(2, n)
        clauses.append(frozenset(rng.sample(range(1, n + 1), size)))
    basis = minimize_clauses(clauses)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnusedParticipantWarning)
        return AccessStructure(n, tuple(basis))


def random_coefficients(rng: random.Random, q: int) -> tuple[int, int]:
    """A uniformly random valid replacement pair: a outside {0,1}, b nonzero."""
    return rng.randrange(2, q), rng.randrange(1, q)
