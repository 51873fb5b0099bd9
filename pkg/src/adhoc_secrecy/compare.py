"""Head-to-head comparison of the two schemes at their optimal power splits."""

from . import beamforming, sectoring


def optimized_capacities(params, sigma, epsilon):
    """``(sectoring C*, beamforming C*)``; an infeasible scheme scores 0."""
    _, c_st = sectoring.optimal_capacity(params, sigma, epsilon)
    _, c_bf = beamforming.optimal_capacity(params, sigma, epsilon)
    return c_st, c_bf


def crossover_antennas(params, sigma, epsilon, n_max=4096):
    """Smallest antenna count at which sectoring beats beamforming, or ``None``.

    The capacity difference is assumed to change sign at most once.  A
    doubling scan ``2, 4, ..., n_max`` locates the first win for sectoring
    and checks that it persists at every later grid point; integer
    bisection then narrows the crossing inside the last doubling.
    """

    def sector_wins(n):
        c_st, c_bf = optimized_capacities(params.with_(n=n), sigma, epsilon)
        return c_st > c_bf

    grid = []
    n = 2
    while n <= n_max:
        grid.append(n)
        n *= 2
    wins = [sector_wins(n) for n in grid]
    if True not in wins:
        return None
    first = wins.index(True)
    if not all(wins[first:]):
        raise ValueError("capacity difference changes sign more than once on the doubling grid")
    if first == 0:
        return grid[0]
    lo, hi = grid[first - 1], grid[first]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sector_wins(mid):
            hi = mid
        else:
            lo = mid
    return hi
