"""
Builtin spaces and self-maps, addressed by name.

Spaces:
    * ``euclid:a,b``   p(x, y) = |x - y| on [a, b]
    * ``maxpm:a,b``    p(x, y) = max(x, y) on [a, b] with a >= 0; a partial
      metric, so p(x, x) = x is positive away from the origin
    * ``discrete:n``   n points, p = 0 on the diagonal and 1 off it

Boxes of higher dimension are written with ``;`` between the axes,
e.g. ``euclid:0,1;0,2``. Brackets around an axis are optional.

Maps:
    * ``cos``, ``half`` (x -> x/2), ``ident``, ``const:v``,
      ``affine:c,b`` (x -> c*x + b)

On finite spaces only ``ident`` and ``const:v`` (v a label or index) apply.
"""

import numpy as np

from feltfp.core import (Box, ContinuousMap, ContinuousSpace, ConfigurationError,
                         DomainError, FiniteMap, FiniteSpace, FINITE)

BUILTIN_PREFIX = "builtin:"
SPACE_NAMES = ("euclid", "maxpm", "discrete")
MAP_NAMES = ("cos", "half", "ident", "const", "affine")


def _split(spec):
    spec = spec.strip()
    if spec.startswith(BUILTIN_PREFIX):
        spec = spec[len(BUILTIN_PREFIX):]
    name, _, args = spec.partition(":")
    return name.strip(), args.strip()


def _floats(text, what):
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise ConfigurationError("cannot parse {} from {!r}".format(what, text))


def parse_box(text):
    """
    Parse a box like ``0,1`` or ``[0,1];[0,2]``.

    >>> parse_box("[0,2]").upper
    array([2.])
    """
    lower, upper = [], []
    for axis in text.split(";"):
        bounds = _floats(axis.strip().strip("[]"), "interval bounds")
        if len(bounds) != 2:
            raise ConfigurationError("an interval needs two bounds, got {!r}".format(axis))
        lower.append(bounds[0])
        upper.append(bounds[1])
    return Box(lower, upper)


def euclid_space(box):
    """The Euclidean metric on a box."""
    if box.dim == 1:
        def metric(x, y):
            return np.abs(x - y)
    else:
        def metric(x, y):
            return np.linalg.norm(np.subtract(x, y), axis=-1)
    return ContinuousSpace(box, metric, name="euclid:{}".format(box))


def maxpm_space(box):
    """
    The max partial metric p(x, y) = max(x, y) on a box of the nonnegative orthant.

    For boxes of higher dimension the largest coordinate of both points is used.
    """
    if np.any(box.lower < 0):
        raise ConfigurationError("maxpm needs a nonnegative domain, got {}".format(box))
    if box.dim == 1:
        def metric(x, y):
            return np.maximum(x, y)
    else:
        def metric(x, y):
            return np.max(np.maximum(x, y), axis=-1)
    return ContinuousSpace(box, metric, name="maxpm:{}".format(box))


def discrete_space(n):
    """
    The discrete metric on n points.

    >>> discrete_space(2).matrix.tolist()
    [[0.0, 1.0], [1.0, 0.0]]
    """
    if n < 1:
        raise ConfigurationError("discrete space needs at least one point")
    return FiniteSpace(1.0 - np.eye(n), name="discrete:{}".format(n))


def make_space(spec):
    """
    Create a builtin space from its name.

    Args:
        spec (str): e.g. ``euclid:0,1`` (the ``builtin:`` prefix is optional)

    Raises:
        ConfigurationError: for unknown names or invalid arguments
    """
    name, args = _split(spec)
    if name == "euclid":
        return euclid_space(parse_box(args))
    if name == "maxpm":
        return maxpm_space(parse_box(args))
    if name == "discrete":
        try:
            return discrete_space(int(args))
        except ValueError:
            raise ConfigurationError("discrete needs a point count, got {!r}".format(args))
    raise ConfigurationError("unknown builtin space {!r}, choose from {}".format(
        name, ", ".join(SPACE_NAMES)))


def make_map(spec, space):
    """
    Create a builtin self-map acting on `space`.

    Args:
        spec (str): e.g. ``half`` or ``affine:0.5,0.3``
        space (FeltSpace): the domain

    Raises:
        ConfigurationError: for unknown names, invalid arguments or maps
            that do not apply to the kind of space
    """
    name, args = _split(spec)
    if name not in MAP_NAMES:
        raise ConfigurationError("unknown builtin map {!r}, choose from {}".format(
            name, ", ".join(MAP_NAMES)))

    if space.kind == FINITE:
        if name == "ident":
            return FiniteMap(range(space.size), name="ident")
        if name == "const":
            try:
                target = space.index_of(args)
            except DomainError as e:
                raise ConfigurationError("const: {}".format(e))
            return FiniteMap([target] * space.size, name="const:{}".format(space.labels[target]))
        raise ConfigurationError("map {!r} needs a continuous space".format(name))

    box = space.box
    if name == "cos":
        return ContinuousMap(np.cos, box, name="cos")
    if name == "half":
        return ContinuousMap(lambda x: x / 2, box, name="half", contraction_factor=0.5)
    if name == "ident":
        return ContinuousMap(lambda x: x, box, name="ident", contraction_factor=1.0)
    if name == "const":
        try:
            value = box.point(_floats(args, "a constant"))
        except DomainError as e:
            raise ConfigurationError("const: {}".format(e))
        if not box.contains(value):
            raise ConfigurationError("const:{} lies outside {}".format(args, box))
        return ContinuousMap(lambda x: np.zeros_like(x) + value, box,
                             name="const:{}".format(args), contraction_factor=0.0)
    # affine
    coefficients = _floats(args, "affine coefficients")
    if len(coefficients) != 2:
        raise ConfigurationError("affine needs two coefficients c,b, got {!r}".format(args))
    c, b = coefficients
    return ContinuousMap(lambda x: c * x + b, box, name="affine:{},{}".format(c, b),
                         contraction_factor=abs(c))
