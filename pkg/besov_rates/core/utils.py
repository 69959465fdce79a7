import hashlib
from itertools import accumulate

import numpy as np


def dyadic_exponent(ratio: int) -> int | None:
    """Return m with ratio == 2**m, or None when ratio is not a power of two."""
    if ratio < 1 or ratio & (ratio - 1):
        return None
    return ratio.bit_length() - 1


def dyadic_chain(coarse: int, fine: int) -> list[int]:
    """List the sizes visited when halving ``fine`` down to ``coarse``, both ends included."""
    return list(accumulate(range(dyadic_exponent(fine // coarse) or 0), lambda size, _: size // 2, initial=fine))


def geometric_steps(last: int, count: int = 12) -> list[int]:
    """Pick up to ``count`` roughly log-spaced step counts in [1, last]."""
    if last < 1:
        return []
    steps = np.unique(np.round(np.geomspace(1, last, num=count)).astype(np.int64))
    return [int(step) for step in steps]


def digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:16]
