from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from wallcross.errors import InternalError, InvalidInput, WallcrossError
from wallcross.logging import logger

T = TypeVar('T')
R = TypeVar('R')


def normalize_weights_csv(raw: str) -> str:
    """Normalize a weight list: drop brackets and whitespace, unify separators"""
    if not raw:
        return ""
    normalized = raw.strip().strip('[]()').replace(';', ',')
    normalized = ''.join(normalized.split())
    return normalized.strip(',')


def _parse_int(token: str) -> int | None:
    body = token[1:] if token[:1] in ('-', '+') else token
    if not body.isdigit():
        return None
    return int(token)


def validate_weights(raw: str) -> tuple[bool, str, tuple[int, ...]]:
    """Validate a CSV of integer weights, e.g. '1,1,-2'"""
    normalized = normalize_weights_csv(raw)
    if not normalized:
        return False, "weight list is empty", ()
    weights = []
    for token in normalized.split(','):
        value = _parse_int(token)
        if value is None:
            return False, f"weight {token!r} is not an integer", ()
        weights.append(value)
    return True, "", tuple(weights)


def parse_weights(raw: str) -> tuple[int, ...]:
    is_valid, message, weights = validate_weights(raw)
    if not is_valid:
        raise InvalidInput(message)
    return weights


def validate_window_base(value) -> tuple[bool, str, int]:
    """Validate a window base k0 coming from a flag or a scenario file"""
    if isinstance(value, bool):
        return False, f"window_base {value!r} is not an integer", 0
    if isinstance(value, int):
        return True, "", value
    if isinstance(value, str):
        parsed = _parse_int(value.strip())
        if parsed is not None:
            return True, "", parsed
    return False, f"window_base {value!r} is not an integer", 0


def exponent_label(exponent: int) -> str:
    """Basis label of the monomial t^k"""
    if exponent == 0:
        return '1'
    if exponent == 1:
        return 't'
    return f"t^{exponent}"


def format_weights(weights: Iterable[int]) -> str:
    return '(' + ', '.join(str(w) for w in weights) + ')'


def describe_error(error: Exception) -> str:
    """One-line diagnostic for any exception; unknown ones are reported as internal"""
    if isinstance(error, WallcrossError):
        return str(error)
    logger.error(f"[ERROR] Unexpected {type(error).__name__}: {error}", exc_info=error)
    return f"{InternalError.code}: unexpected {type(error).__name__}: {error}"


def map_in_order(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply func to every item, on a thread pool when workers > 1, keeping input order"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"[POOL] Evaluating {len(items)} items on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
