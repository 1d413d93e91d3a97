"""Problem domains: Gauss summation, house puzzles and word-problem analogies."""

from .analogy import AnalogyDomain, WordProblem, analogy_fixture
from .base import Attempt, Domain
from .csp import (
    Constraint,
    CspDomain,
    CspInstance,
    CspResult,
    count_solutions,
    csp_eliminate,
    csp_enumerate_blind,
    zebra_puzzle,
)
from .gauss import GaussConfig, GaussDomain, gauss_candidates, pairing_sum

DOMAINS = {"gauss": GaussDomain, "csp": CspDomain, "analogy": AnalogyDomain}


def get_domain(tag: str, gauss: GaussConfig | None = None) -> Domain:
    if tag not in DOMAINS:
        raise ValueError(f"unknown domain {tag!r}; choose from {sorted(DOMAINS)}")
    if tag == "gauss":
        return GaussDomain(gauss)
    return DOMAINS[tag]()


__all__ = [
    "AnalogyDomain",
    "Attempt",
    "Constraint",
    "CspDomain",
    "CspInstance",
    "CspResult",
    "DOMAINS",
    "Domain",
    "GaussConfig",
    "GaussDomain",
    "WordProblem",
    "analogy_fixture",
    "count_solutions",
    "csp_eliminate",
    "csp_enumerate_blind",
    "gauss_candidates",
    "get_domain",
    "pairing_sum",
    "zebra_puzzle",
]
