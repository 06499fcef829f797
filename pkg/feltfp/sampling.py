"""
Reproducible point samples for the sampled checks on continuous spaces.

Every sample is the union of a deterministic grid (`GRID_POINTS` per axis)
and points drawn uniformly with a seeded generator, so a failing check can be
rerun and yields the same witness.
"""

import itertools

import numpy as np

from feltfp import default_settings
from feltfp.core import ConfigurationError

# above this many grid points the grid triples are replaced by random grid triples
MAX_GRID_TRIPLES = 10000


def griditer(box, points_per_axis=default_settings.GRID_POINTS):
    """
    Iterate through a regular grid covering a box.

    Args:
        box (Box): bounded box
        points_per_axis (int): grid points per axis, including both bounds

    Yields:
        float or tuple: all grid points, the last axis varying fastest

    >>> from feltfp.core import Box
    >>> list(griditer(Box(0, 1), 3))
    [0.0, 0.5, 1.0]
    """
    axes = [np.linspace(lo, hi, points_per_axis).tolist() for lo, hi in zip(box.lower, box.upper)]
    if box.dim == 1:
        yield from axes[0]
    else:
        yield from itertools.product(*axes)


class Sampler:
    """
    Seeded uniform sampler over a bounded box plus a deterministic grid.

    Args:
        box (Box): the domain, must be bounded
        seed (int): seed of the random generator
        grid_points (int): grid points per axis

    Raises:
        ConfigurationError: for unbounded boxes
    """

    def __init__(self, box, seed, grid_points=default_settings.GRID_POINTS):
        if not box.is_bounded():
            raise ConfigurationError("cannot sample the unbounded box {}".format(box))
        self.box = box
        self.rng = np.random.default_rng(seed)
        self.grid_points = grid_points

    def uniform(self, count):
        """`count` points drawn uniformly from the box."""
        shape = (count,) if self.box.dim == 1 else (count, self.box.dim)
        lower = self.box.lower[0] if self.box.dim == 1 else self.box.lower
        upper = self.box.upper[0] if self.box.dim == 1 else self.box.upper
        return self.rng.uniform(lower, upper, size=shape)

    def grid(self):
        return self.box.as_batch(list(griditer(self.box, self.grid_points)))

    def points(self, count):
        """Grid points followed by `count` uniform points."""
        return np.concatenate([self.grid(), self.uniform(count)])

    def pairs(self, count):
        """
        All ordered grid pairs followed by `count` uniform pairs.

        Returns:
            tuple: batches (xs, ys) of equal length
        """
        grid = self.grid()
        k = len(grid)
        i, j = np.divmod(np.arange(k * k), k)
        xs = np.concatenate([grid[i], self.uniform(count)])
        ys = np.concatenate([grid[j], self.uniform(count)])
        return xs, ys

    def triples(self, count):
        """
        Grid triples followed by `count` uniform triples.

        Returns:
            tuple: batches (xs, ys, zs) of equal length
        """
        grid = self.grid()
        k = len(grid)
        if k ** 3 <= MAX_GRID_TRIPLES:
            idx = np.arange(k ** 3)
            a, rest = np.divmod(idx, k * k)
            b, c = np.divmod(rest, k)
        else:
            a, b, c = self.rng.integers(0, k, size=(3, MAX_GRID_TRIPLES))
        xs = np.concatenate([grid[a], self.uniform(count)])
        ys = np.concatenate([grid[b], self.uniform(count)])
        zs = np.concatenate([grid[c], self.uniform(count)])
        return xs, ys, zs
