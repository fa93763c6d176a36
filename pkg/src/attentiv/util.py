"""Small shared helpers."""

import os
import time


def clock() -> float:
    """Wall time, overridable for reproducible artifacts.

    Setting ATTENTIV_CLOCK to an epoch value freezes every timestamp this
    package writes, which makes output files byte-comparable across runs.
    """
    fixed = os.environ.get("ATTENTIV_CLOCK")
    if fixed is not None:
        return float(fixed)
    return time.time()
