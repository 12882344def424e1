"""Constructive bi-Holder embeddings of finite metric spaces.

The native core exposes space builders, cover and schedule construction, the
stagewise embedding, certificate checkers, and the command-line pipeline.
Report-producing operations return plain dictionaries decoded from the core's
JSON artifacts, so results keep the same shape on disk and in memory.
"""

import json as _json

try:  # installed layout: native module lives inside the package
    from ._biholder import *  # noqa: F401,F403
    from . import _biholder as _native
except ImportError:  # build-tree layout: native module sits next to the package
    from _biholder import *  # noqa: F401,F403
    import _biholder as _native

__version__ = _native.__version__


def box_dimension(space, scales, measure_exponent=None):
    """Greedy box-counting fit over the given scales, as a report dict."""
    return _json.loads(_native.box_dimension_json(space, scales, measure_exponent))


def schedule_identities(schedule):
    """Algebraic consistency report for a scale schedule."""
    return _json.loads(_native.schedule_identities_json(schedule))


def verify_cover(space, cover):
    """Certificate re-check for a colored cover against its space."""
    return _json.loads(_native.verify_cover_json(space, cover))


def biholder_check(space, run, schedule):
    """Two-sided distortion check for a finished construction run."""
    return _json.loads(_native.biholder_check_json(space, run, schedule))


def fastgap_certificate(levels, alpha, beta, lambda_):
    """Gap-sum and image-measure certificate for the fast-shrinking-gap space."""
    return _json.loads(_native.fastgap_json(levels, alpha, beta, lambda_))


def hypercurve_certificate(lambda_, alpha, n, nu):
    """Dimension lower-bound certificate for the space-filling construction."""
    return _json.loads(_native.hypercurve_json(lambda_, alpha, n, nu))


def capacity_refuter(space, sigma):
    """Cover-existence refutation certificate for a harmonic-type space."""
    return _json.loads(_native.capacity_refuter_json(space, sigma))


__all__ = [name for name in dir() if not name.startswith("_")]
