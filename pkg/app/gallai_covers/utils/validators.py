# ============================================================================
# app/gallai_covers/utils/validators.py
# ============================================================================
from typing import Iterable, List, Tuple


class ValidationError(Exception):
    """Base error for every rejected input or failed construction"""
    pass


class GraphValidationError(ValidationError):
    """Malformed graph, cover or stacking document"""
    pass


class NotSeriesParallel(ValidationError):
    """Graph is not two-terminal series-parallel for the given terminals"""
    pass


class MultiEdge(ValidationError):
    """A parallel composition of two Q-nodes was requested"""
    pass


class InvalidFace(ValidationError):
    """A stacking operation names a face that is not present"""
    pass


class BudgetExceeded(ValidationError):
    """Oracle search hit its node limit before proving optimality"""
    pass


class OracleCapExceeded(ValidationError):
    """Graph has more edges than the oracle accepts"""
    pass


class CoverConsistencyError(ValidationError):
    """Internal construction bug: broken invariant or mutated brace paths"""
    pass


SP_FAMILIES = ["sp", "triangle-chain"]
TREE_FAMILIES = ["3tree-random", "3tree-full", "3tree-serpentine", "3tree-all-type-ii"]
FAMILIES = SP_FAMILIES + TREE_FAMILIES


def validate_family(family: str) -> Tuple[bool, str]:
    """Validate instance family name"""
    if not family:
        return False, "family is required"

    if family not in FAMILIES:
        return False, f"unknown family '{family}'. Try: {', '.join(FAMILIES)}"

    return True, ""


def validate_positive(value, name: str, minimum: int = 1) -> Tuple[bool, str]:
    """Validate an integer option with a lower bound"""
    try:
        number = int(value)
    except (TypeError, ValueError):
        return False, f"{name} must be an integer"

    if number < minimum:
        return False, f"{name} must be at least {minimum}"

    return True, ""


def validate_sizes(sizes: Iterable[int]) -> Tuple[bool, str]:
    """Validate a benchmark size list"""
    values: List[int] = list(sizes)
    if not values:
        return False, "at least one size is required"

    if any(v < 2 for v in values):
        return False, "sizes must be at least 2"

    if values != sorted(values):
        return False, "sizes must be increasing"

    return True, ""


def validate_tree_size(kind: str, n: int) -> Tuple[bool, str]:
    """Validate the vertex count requested for a planar 3-tree family"""
    if n < 3:
        return False, "a planar 3-tree has at least 3 vertices"

    if kind == "full" and (n < 4 or (n - 1) % 3 != 0):
        return False, "full planar 3-trees need n = 3k+1 with k >= 1"

    if kind == "all_type_II" and n % 3 != 0:
        return False, "all_type_II planar 3-trees need n = 3k"

    if kind not in ["random", "full", "serpentine", "all_type_II"]:
        return False, f"unknown planar 3-tree kind '{kind}'"

    return True, ""
