"""
Reading and writing finite spaces in the JSON space file format::

    {"points": ["a", "b", "c"],
     "distance": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
     "map": [1, 2, 2]}

``distance[i][j]`` is p(points[i], points[j]) and ``map[i]`` is the index of
f(points[i]). ``points`` and ``map`` are optional.
"""

import json
import logging
import math
import numbers

from feltfp.core import FiniteMap, FiniteSpace, SpaceFormatError

logger = logging.getLogger(__name__)

KNOWN_KEYS = ("points", "distance", "map", "name")


def load_space_file(path):
    """
    Load a finite space and its (optional) self-map from a JSON file.

    Args:
        path (str): path to the UTF-8 JSON file

    Returns:
        tuple: (FiniteSpace, FiniteMap or None)

    Raises:
        SpaceFormatError: if the file cannot be read or parsed. JSON syntax
            errors are reported as ``path:line:column: message``.
    """
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise SpaceFormatError("{}: cannot read space file: {}".format(path, e))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpaceFormatError("{}:{}:{}: {}".format(path, e.lineno, e.colno, e.msg))
    return parse_space_document(doc, source=path)


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise SpaceFormatError("{}: expected a number, got {!r}".format(field, value))
    value = float(value)
    if not math.isfinite(value):
        raise SpaceFormatError("{}: distance must be finite".format(field))
    if value < 0:
        raise SpaceFormatError("{}: negative distance {}".format(field, value))
    return value


def parse_space_document(doc, source="<document>"):
    """
    Validate a decoded space document.

    Args:
        doc (dict): decoded JSON
        source (str): file name used in error messages

    Returns:
        tuple: (FiniteSpace, FiniteMap or None)

    Raises:
        SpaceFormatError: on non-square matrices, negative entries, bad labels
            or out-of-range map indices, naming the offending field.

    >>> space, f = parse_space_document({"distance": [[0, 1], [1, 0]], "map": [1, 0]})
    >>> space.size, f.table
    (2, (1, 0))
    """
    def fail(message):
        raise SpaceFormatError("{}: {}".format(source, message))

    if not isinstance(doc, dict):
        fail("top level must be an object")
    for key in doc:
        if key not in KNOWN_KEYS:
            logger.warning("%s: ignoring unknown key %r", source, key)
    if "distance" not in doc:
        fail("missing field 'distance'")

    rows = doc["distance"]
    if not isinstance(rows, list) or not rows:
        fail("distance: expected a nonempty list of rows")
    n = len(rows)
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            fail("distance[{}]: expected a list".format(i))
        if len(row) != n:
            fail("distance[{}]: expected {} entries (matrix must be square), got {}".format(
                i, n, len(row)))
        try:
            matrix.append([_number(v, "distance[{}][{}]".format(i, j)) for j, v in enumerate(row)])
        except SpaceFormatError as e:
            fail(str(e))

    labels = doc.get("points")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n:
            fail("points: expected a list of {} labels".format(n))
        for i, label in enumerate(labels):
            if not isinstance(label, (str, int)) or isinstance(label, bool):
                fail("points[{}]: labels must be strings".format(i))
        if len(set(str(label) for label in labels)) != n:
            fail("points: labels must be unique")

    name = doc.get("name", source)
    try:
        space = FiniteSpace(matrix, labels=labels, name=str(name))
    except SpaceFormatError as e:
        fail(str(e))

    selfmap = None
    table = doc.get("map")
    if table is not None:
        if not isinstance(table, list) or len(table) != n:
            fail("map: expected a list of {} indices".format(n))
        for i, image in enumerate(table):
            if isinstance(image, bool) or not isinstance(image, int):
                fail("map[{}]: expected an integer index, got {!r}".format(i, image))
            if not 0 <= image < n:
                fail("map[{}]: index {} out of range 0..{}".format(i, image, n - 1))
        selfmap = FiniteMap(table, name="{}:map".format(name))
    return space, selfmap


def space_document(space, selfmap=None):
    """
    Serialize a finite space (and map) to a space document.

    The output can be written with `json.dump` and read back with
    `load_space_file`, which makes oracle counterexamples reproducible.
    """
    doc = {
        "points": list(space.labels),
        "distance": space.matrix.tolist(),
    }
    if selfmap is not None:
        doc["map"] = list(selfmap.table)
    return doc
