"""
Fixed points of self-maps on felt metric spaces.

A felt metric is a symmetric, nonnegative distance for which p(x, y) = 0
forces x = y, while the self-distance p(x, x) may be positive. The package
checks the felt metric axioms and the band contraction conditions on finite
(tabulated) spaces exactly and on continuous (box) spaces by sampling, and
locates fixed points by Picard iteration.
"""

import os

from flask import Config

__version__ = "0.1.0"

ENV_PREFIX = "FELTFP"


def load_config(env_prefix=ENV_PREFIX):
    """
    Create a fresh settings dict.

    Args:
        env_prefix (str): environment variables starting with ``<env_prefix>_``
            override the defaults. Pass None to ignore the environment.

    Returns:
        flask.Config: defaults from `feltfp.default_settings`, possibly overridden.

    >>> load_config(env_prefix=None)["WINDOW"]
    3
    """
    cfg = Config(os.path.dirname(os.path.abspath(__file__)))
    cfg.from_object("feltfp.default_settings")
    if env_prefix is not None:
        cfg.from_prefixed_env(env_prefix)
    return cfg


config = load_config(env_prefix=None)
