"""Rank-invariant metric on persistence diagrams, exact Wasserstein transport,
persistence of weighted complexes, landscapes, graded diagrams and
stability verification."""
from __future__ import annotations

from ._validation import InvariantError, ParseError, RankstabError, UnsupportedError
from .diagram import *  # noqa: F401,F403
from .filtration import *  # noqa: F401,F403
from .geometry import *  # noqa: F401,F403
from .graded import *  # noqa: F401,F403
from .landscape import *  # noqa: F401,F403
from .report import Report
from .transport import *  # noqa: F401,F403

__version__ = "0.1.0"
