"""
Spaces, self-maps and tolerances consumed by every other module.

Two flavours of felt metric spaces exist:
    * FiniteSpace:
        points are the indices 0..n-1 (with optional labels), the distance is
        a tabulated n x n matrix read verbatim.
    * ContinuousSpace:
        points live in an axis-aligned Box and the distance is a vectorized
        callable. One-dimensional points are plain floats, points of a
        d-dimensional box are numpy arrays of shape (d,).

Distances are only assumed to be finite and nonnegative. Self-distance may be
positive; nothing here enforces the felt metric axioms, that is the job of
`feltfp.axioms`.
"""

import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, fields

import numpy as np

from feltfp import default_settings

FINITE = "finite"
CONTINUOUS = "continuous"


class FeltError(Exception):
    """Base class of all errors raised by feltfp."""
    pass


class DomainError(FeltError):
    """A point lies outside its space, or a map leaves its domain."""
    pass


class SpaceFormatError(FeltError):
    """A space description (matrix, file, evaluator) is malformed."""
    pass


class ConfigurationError(FeltError):
    """Invalid tolerances, builtin names or run parameters."""
    pass


class AxiomError(FeltError):
    """An operation requires an axiom the space does not satisfy."""
    pass


class Box:
    """
    An axis-aligned box [lower, upper] in R^d.

    Args:
        lower: lower corner (scalar for an interval)
        upper: upper corner (scalar for an interval)

    >>> str(Box(0, 1))
    '[0.0,1.0]'
    >>> Box(0, 1).contains(0.5)
    True
    """

    def __init__(self, lower, upper):
        self.lower = np.atleast_1d(np.asarray(lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if self.lower.ndim != 1 or self.lower.shape != self.upper.shape:
            raise ConfigurationError("box corners must be vectors of equal length")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ConfigurationError("box corners must not be NaN")
        if np.any(self.lower > self.upper):
            raise ConfigurationError("empty box: lower corner exceeds upper corner")

    @property
    def dim(self):
        return self.lower.shape[0]

    def is_bounded(self):
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def point(self, value):
        """
        Coerce a value to the point representation of this box.

        Returns:
            float for intervals, numpy array of shape (dim,) otherwise.

        Raises:
            DomainError: if the value has the wrong shape or is not numeric.
        """
        try:
            arr = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            raise DomainError("not a point of {}: {!r}".format(self, value))
        if self.dim == 1:
            if arr.size != 1:
                raise DomainError("expected a scalar point in {}, got {!r}".format(self, value))
            return float(arr.reshape(()))
        if arr.shape != (self.dim,):
            raise DomainError("expected a point with {} coordinates, got {!r}".format(self.dim, value))
        return arr

    def as_batch(self, values):
        """Coerce a sequence of points to a batch array of shape (N,) or (N, dim)."""
        arr = np.asarray(values, dtype=float)
        if self.dim == 1:
            return arr.reshape(-1)
        return arr.reshape(-1, self.dim)

    def contains(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(np.isfinite(arr)) and np.all(self.lower <= arr) and np.all(arr <= self.upper))

    def contains_batch(self, batch):
        arr = np.asarray(batch, dtype=float)
        if self.dim == 1:
            return np.isfinite(arr) & (self.lower[0] <= arr) & (arr <= self.upper[0])
        inside = np.isfinite(arr) & (self.lower <= arr) & (arr <= self.upper)
        return np.all(inside, axis=-1)

    def clip(self, x):
        clipped = np.clip(x, self.lower if self.dim > 1 else self.lower[0],
                          self.upper if self.dim > 1 else self.upper[0])
        return clipped

    def center(self):
        return self.point((self.lower + self.upper) / 2)

    def width(self):
        return self.upper - self.lower

    def __str__(self):
        return "x".join("[{},{}]".format(lo, hi) for lo, hi in zip(self.lower, self.upper))

    def __repr__(self):
        return "<Box {}>".format(self)


class FeltSpace(metaclass=ABCMeta):
    """
    Abstract base class of a point domain with a distance p.

    Args:
        name (str): label used in reports
    """
    kind = None

    def __init__(self, name):
        self.name = name

    @property
    def is_finite(self):
        return self.kind == FINITE

    @abstractmethod
    def validate_point(self, x):
        """Return the canonical form of `x` or raise DomainError."""

    @abstractmethod
    def distance(self, x, y):
        """p(x, y) for two points of the space."""

    @abstractmethod
    def distance_batch(self, xs, ys):
        """Elementwise p(xs[i], ys[i]) for two batches of valid points."""

    def format_point(self, x):
        return str(x)

    def point_to_json(self, x):
        if isinstance(x, np.ndarray):
            return [float(v) for v in x]
        if isinstance(x, np.floating):
            return float(x)
        return x

    def __repr__(self):
        return "<{}: {}>".format(type(self).__name__, self.name)


class FiniteSpace(FeltSpace):
    """
    A finite space with a tabulated distance matrix.

    Args:
        matrix: square nested sequence of nonnegative, finite distances;
            ``matrix[i][j]`` is p(i, j)
        labels (list of str): optional point labels, defaults to "0".."n-1"
        name (str): label used in reports

    Raises:
        SpaceFormatError: if the matrix is not square, empty, not finite or negative,
            or the labels do not match.

    >>> space = FiniteSpace([[0, 1], [1, 0]])
    >>> space.distance(0, 1)
    1.0
    """
    kind = FINITE

    def __init__(self, matrix, labels=None, name="finite"):
        super().__init__(name)
        try:
            mat = np.array(matrix, dtype=float)
        except (TypeError, ValueError):
            raise SpaceFormatError("distance matrix must contain numbers only")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise SpaceFormatError("distance matrix must be square, got shape {}".format(mat.shape))
        if mat.shape[0] == 0:
            raise SpaceFormatError("a space needs at least one point")
        bad = np.argwhere(~np.isfinite(mat))
        if len(bad):
            i, j = bad[0]
            raise SpaceFormatError("distance[{}][{}] is not finite".format(i, j))
        bad = np.argwhere(mat < 0)
        if len(bad):
            i, j = bad[0]
            raise SpaceFormatError("distance[{}][{}] = {} is negative".format(i, j, mat[i, j]))
        mat.setflags(write=False)
        self.matrix = mat

        n = mat.shape[0]
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(str(label) for label in labels)
        if len(labels) != n:
            raise SpaceFormatError("{} labels given for {} points".format(len(labels), n))
        if len(set(labels)) != n:
            raise SpaceFormatError("point labels must be unique")
        self.labels = labels

    @property
    def size(self):
        return self.matrix.shape[0]

    def points(self):
        return range(self.size)

    def validate_point(self, x):
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise DomainError("finite space points are indices, got {!r}".format(x))
        if not 0 <= x < self.size:
            raise DomainError("index {} out of range 0..{}".format(x, self.size - 1))
        return int(x)

    def index_of(self, token):
        """
        Resolve a point label (or a decimal index) to its index.

        >>> FiniteSpace([[0, 1], [1, 0]], labels=["a", "b"]).index_of("b")
        1
        """
        token = str(token)
        if token in self.labels:
            return self.labels.index(token)
        try:
            return self.validate_point(int(token))
        except ValueError:
            raise DomainError("no point labelled {!r} in {}".format(token, self.name))

    def distance(self, x, y):
        return float(self.matrix[self.validate_point(x), self.validate_point(y)])

    def distance_batch(self, xs, ys):
        return self.matrix[np.asarray(xs, dtype=int), np.asarray(ys, dtype=int)]

    def distance_values(self):
        """Sorted distinct entries of the distance matrix."""
        return np.unique(self.matrix)

    def format_point(self, x):
        return self.labels[x]

    def point_to_json(self, x):
        return int(x)

    def __repr__(self):
        return "<FiniteSpace: {}, n: {}>".format(self.name, self.size)


class ContinuousSpace(FeltSpace):
    """
    A box domain with a distance evaluator.

    Args:
        box (Box): the domain
        metric (callable): vectorized p(xs, ys); for a d-dimensional box it
            reduces over the last axis.
        name (str): label used in reports
    """
    kind = CONTINUOUS

    def __init__(self, box, metric, name="continuous"):
        super().__init__(name)
        self.box = box
        self._metric = metric

    def validate_point(self, x):
        point = self.box.point(x)
        if not self.box.contains(point):
            raise DomainError("point {} outside domain {}".format(x, self.box))
        return point

    def distance(self, x, y):
        value = float(self._metric(self.validate_point(x), self.validate_point(y)))
        if not math.isfinite(value) or value < 0:
            raise SpaceFormatError("distance evaluator of {} returned {} for ({}, {})".format(
                self.name, value, x, y))
        return value

    def distance_batch(self, xs, ys):
        return np.asarray(self._metric(self.box.as_batch(xs), self.box.as_batch(ys)), dtype=float)

    def format_point(self, x):
        if isinstance(x, np.ndarray):
            return "(" + ", ".join(repr(float(v)) for v in x) + ")"
        return repr(x)

    def __repr__(self):
        return "<ContinuousSpace: {} on {}>".format(self.name, self.box)


class SelfMap(metaclass=ABCMeta):
    """
    Abstract base class of a total map f of a space into itself.

    Args:
        name (str): label used in reports
    """
    kind = None

    def __init__(self, name):
        self.name = name
        # known Lipschitz constant c of the map, if any
        self.contraction_factor = None

    @abstractmethod
    def apply(self, x):
        """f(x), raising DomainError if x or f(x) is not a point of the domain."""

    @abstractmethod
    def apply_batch(self, xs):
        """Elementwise f on a batch of points."""

    def check_compatible(self, space):
        """
        Raises:
            ConfigurationError: if the map cannot act on `space`.
        """
        if space.kind != self.kind:
            raise ConfigurationError("{} map {} cannot act on {} space {}".format(
                self.kind, self.name, space.kind, space.name))

    def __repr__(self):
        return "<{}: {}>".format(type(self).__name__, self.name)


class FiniteMap(SelfMap):
    """
    A self-map of {0..n-1} given by its index table.

    Args:
        table (sequence of int): ``table[i]`` is the index of f(i)
        name (str): label used in reports

    >>> FiniteMap([1, 0]).apply(0)
    1
    """
    kind = FINITE

    def __init__(self, table, name=None):
        super().__init__(name if name is not None else "table" + str(list(table)))
        table = tuple(table)
        n = len(table)
        if n == 0:
            raise SpaceFormatError("a map table needs at least one entry")
        for i, image in enumerate(table):
            if isinstance(image, (bool, np.bool_)) or not isinstance(image, (int, np.integer)):
                raise SpaceFormatError("map[{}]: expected an index, got {!r}".format(i, image))
            if not 0 <= image < n:
                raise SpaceFormatError("map[{}]: index {} out of range 0..{}".format(i, image, n - 1))
        self.table = tuple(int(image) for image in table)
        self.indices = np.array(self.table, dtype=int)

    @property
    def size(self):
        return len(self.table)

    def apply(self, x):
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)) \
                or not 0 <= x < self.size:
            raise DomainError("index {!r} out of range 0..{}".format(x, self.size - 1))
        return self.table[x]

    def apply_batch(self, xs):
        return self.indices[np.asarray(xs, dtype=int)]

    def check_compatible(self, space):
        super().check_compatible(space)
        if space.size != self.size:
            raise ConfigurationError("map {} has {} entries but {} has {} points".format(
                self.name, self.size, space.name, space.size))


class ContinuousMap(SelfMap):
    """
    A self-map of a box given by a vectorized callable.

    Args:
        func (callable): f, applied elementwise to a point or a batch of points
        box (Box): the domain; images must remain inside it
        name (str): label used in reports
        contraction_factor (float): known Lipschitz constant, if any
    """
    kind = CONTINUOUS

    def __init__(self, func, box, name="f", contraction_factor=None):
        super().__init__(name)
        self.func = func
        self.box = box
        self.contraction_factor = contraction_factor

    def apply(self, x):
        point = self.box.point(x)
        if not self.box.contains(point):
            raise DomainError("point {} outside domain {}".format(x, self.box))
        image = self.box.point(self.func(point))
        if not self.box.contains(image):
            raise DomainError("{}({}) = {} escapes the domain {}: not a self-map".format(
                self.name, x, image, self.box))
        return image

    def apply_batch(self, xs):
        batch = self.box.as_batch(xs)
        images = self.box.as_batch(self.func(batch))
        inside = self.box.contains_batch(images)
        if not np.all(inside):
            k = int(np.argmin(inside))
            raise DomainError("{}({}) = {} escapes the domain {}: not a self-map".format(
                self.name, batch[k], images[k], self.box))
        return images

    def check_compatible(self, space):
        super().check_compatible(space)
        if space.box.dim != self.box.dim:
            raise ConfigurationError("map {} acts on dimension {} but {} has dimension {}".format(
                self.name, self.box.dim, space.name, space.box.dim))


def distance(space, x, y):
    """
    Evaluate the felt metric.

    Args:
        space (FeltSpace):
        x: point of the space
        y: point of the space

    Returns:
        float: p(x, y), read exactly from the table on finite spaces.

    Raises:
        DomainError: if x or y is not a point of the space.
    """
    return space.distance(x, y)


def apply(selfmap, x):
    """
    Apply a self-map once.

    Raises:
        DomainError: if x is outside the domain or the image escapes it.
    """
    return selfmap.apply(x)


def iterate_map(selfmap, x, n):
    """
    Apply `selfmap` n times, i.e. return f^n(x).

    >>> iterate_map(FiniteMap([1, 2, 0]), 0, 4)
    1
    """
    if n < 0:
        raise ConfigurationError("cannot iterate a negative number of times")
    for _ in range(n):
        x = selfmap.apply(x)
    return x


def compose(f, g):
    """
    The composition f o g (apply g first, then f).

    >>> compose(FiniteMap([1, 2, 0]), FiniteMap([0, 0, 1])).table
    (1, 1, 2)
    """
    if f.kind != g.kind:
        raise ConfigurationError("cannot compose a {} map with a {} map".format(f.kind, g.kind))
    name = "{}.{}".format(f.name, g.name)
    if f.kind == FINITE:
        if f.size != g.size:
            raise ConfigurationError("cannot compose maps of sizes {} and {}".format(f.size, g.size))
        return FiniteMap([f.table[image] for image in g.table], name=name)
    factor = None
    if f.contraction_factor is not None and g.contraction_factor is not None:
        factor = f.contraction_factor * g.contraction_factor
    return ContinuousMap(lambda x: f.func(g.func(x)), g.box, name=name, contraction_factor=factor)


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical thresholds of the checkers and the solver.

    On finite spaces the checkers compare tabulated values exactly and
    ignore `tol_zero`.
    """
    tol_zero: float = default_settings.TOL_ZERO
    tol_fixed: float = default_settings.TOL_FIXED
    max_iter: int = default_settings.MAX_ITER
    window: int = default_settings.WINDOW
    seed: int = default_settings.SEED
    sample_count: int = default_settings.SAMPLE_COUNT
    settle: bool = default_settings.SETTLE

    def __post_init__(self):
        if not self.tol_zero > 0:
            raise ConfigurationError("tol_zero must be positive, got {}".format(self.tol_zero))
        if not self.tol_fixed > 0:
            raise ConfigurationError("tol_fixed must be positive, got {}".format(self.tol_fixed))
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1, got {}".format(self.max_iter))
        if self.window < 1:
            raise ConfigurationError("window must be at least 1, got {}".format(self.window))
        if self.sample_count < 1:
            raise ConfigurationError("sample_count must be at least 1, got {}".format(self.sample_count))

    @classmethod
    def from_config(cls, cfg, **overrides):
        """
        Build tolerances from a settings dict; overrides that are None are ignored.

        >>> from feltfp import load_config
        >>> Tolerances.from_config(load_config(None), window=5, seed=None).window
        5
        """
        values = {f.name: cfg[f.name.upper()] for f in fields(cls) if f.name.upper() in cfg}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
