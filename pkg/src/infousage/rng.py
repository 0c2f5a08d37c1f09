"""Counter-based random number generation for reproducible replication studies.

Every Monte Carlo quantity in this package is a pure function of a master
seed.  Two mechanisms are provided, both built on the Philox counter-based
bit generator:

``uniform_rows`` / ``normal_rows``
    Row r of the virtual (R x width) matrix occupies a fixed, precomputed
    range of Philox output words under the key ``(seed, tag)``.  Any chunk
    of rows can therefore be generated independently (and in parallel)
    while remaining bit-for-bit identical to a single serial pass.

``substream``
    An independent generator keyed by ``(seed, tag, index)``, used where
    per-replication ad-hoc randomness is needed (randomized selection
    rules, session noise).

Normals are produced from uniforms by the inverse CDF so that each value
consumes exactly one 64-bit word; this keeps the word layout of a row
independent of the values drawn.
"""

import numpy as np
from scipy.special import ndtri

# Stream tags.  Keep these distinct per purpose so that no two draws ever
# share Philox output words.
TAG_PHI = 1       # statistic vectors
TAG_RAW = 2       # raw per-feature sample matrices
TAG_SELECT = 3    # randomized selection rules
TAG_NOISE = 4     # query-response noise
TAG_LABELS = 5    # classification label resampling

_TINY = 2.0 ** -54  # guards ndtri(0) = -inf


def _words_per_row(width):
    # Philox emits 4 words per counter increment; pad so rows stay aligned.
    return 4 * ((int(width) + 3) // 4)


def uniform_rows(seed, tag, start_row, n_rows, width):
    """Rows [start_row, start_row + n_rows) of the uniform matrix for (seed, tag)."""
    wpr = _words_per_row(width)
    counter = np.zeros(4, dtype=np.uint64)
    counter[0] = np.uint64(start_row) * np.uint64(wpr // 4)
    key = np.array([seed, tag], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key, counter=counter))
    u = gen.random(n_rows * wpr).reshape(n_rows, wpr)[:, :width]
    return np.maximum(u, _TINY)


def normal_rows(seed, tag, start_row, n_rows, width):
    """Standard-normal rows with the same layout guarantees as uniform_rows."""
    return ndtri(uniform_rows(seed, tag, start_row, n_rows, width))


def substream(seed, tag, index=0):
    """Independent generator keyed by (seed, tag, index)."""
    key = np.array(
        [np.uint64(seed), (np.uint64(tag) << np.uint64(56)) + np.uint64(index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
