"""Bundled domains and problems.

``bomb-sa-*`` are reconstructions of the bomb-in-the-toilet benchmark written
for this package's STRIPS-like language; they are not the original files.
"""

from importlib import resources

NAMES = ("evanston", "redundancy-1", "redundancy-2",
         "bomb-sa-1", "bomb-sa-2", "bomb-sa-3", "bomb-sa-4")


def path(name: str, suffix: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return resources.files(__name__) / f"{name}.{suffix}"


def read(name: str, suffix: str) -> str:
    return path(name, suffix).read_text(encoding="utf-8")


def load(name: str):
    """Parse a fixture; returns the problem (its domain is ``problem.domain``)."""
    from ..syntax import parse_domain, parse_problem

    domain = parse_domain(read(name, "dom"))
    return parse_problem(read(name, "prob"), domain)


def load_plan(name: str, problem=None):
    from ..syntax import parse_plan

    problem = problem or load(name)
    return parse_plan(read(name, "plan"), problem.domain)
