
# Exit codes
EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3

# Output formats
FORMAT_TEXT = 'text'
FORMAT_JSON = 'json'
OUTPUT_FORMATS = (FORMAT_TEXT, FORMAT_JSON)

# Sides of the wall
SIDE_MINUS = '-'
SIDE_PLUS = '+'
SIDES = (SIDE_MINUS, SIDE_PLUS)

# Self-check sampling ranges
RANDOM_MAX_COORDINATES = 8
RANDOM_MAX_ABS_WEIGHT = 4
RANDOM_WINDOW_BASE_RANGE = (-3, 3)
RANDOM_MAX_DISK_DIM = 3
RANDOM_MAX_MONODROMY_DIM = 5


def local_p1_weights() -> tuple[int, ...]:
    return (1, 1, -2)


def conifold_weights() -> tuple[int, ...]:
    return (1, 1, -1, -1)


def local_podd_weights(n: int) -> tuple[int, ...]:
    """Weights of V + det V^dual with dim V = 2n."""
    return (1,) * (2 * n) + (-2 * n,)


def standard_flop_weights(d: int) -> tuple[int, ...]:
    """Weights of V + V^dual with dim V = d."""
    return (1,) * d + (-1,) * d


# Bundled families: (name, weights, window_base)
BUNDLED_FAMILIES = (
    ('local_p1', local_p1_weights(), -1),
    ('conifold', conifold_weights(), -1),
    *((f'local_podd_n{n}', local_podd_weights(n), 0) for n in (1, 2, 3)),
    *((f'standard_flop_d{d}', standard_flop_weights(d), 0) for d in (1, 2, 3, 4)),
)
