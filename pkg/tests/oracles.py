"""Brute-force reference implementations, independent of the library's graph code."""

import itertools

import numpy as np


def _bool_power(A, k):
    out = np.eye(A.shape[0], dtype=np.int64)
    for _ in range(k):
        out = np.minimum(out @ A, 1)
    return out


def restrict(entries, idx):
    return np.asarray(entries, dtype=np.int64)[np.ix_(idx, idx)]


def irreducible(entries, idx) -> bool:
    """Every ordered pair joined by a word inside the set.

    A word of length n corresponds to the power n - 1, so the identity
    (length-one words) is included and a lone symbol counts as irreducible.
    """
    if not idx:
        return False
    A = restrict(entries, idx)
    n = len(idx)
    reach = sum(_bool_power(A, k) for k in range(0, n + 1))
    return bool((reach > 0).all())


def mixing(entries, idx) -> bool:
    """Wielandt: a primitive matrix of size n has a positive power n^2 - 2n + 2."""
    if not idx:
        return False
    A = restrict(entries, idx)
    n = len(idx)
    return bool(_bool_power(A, n * n - 2 * n + 2).all())


def words(entries, alphabet, n, restrict_to=None):
    """Length-n admissible words whose symbols all start walks of every length.

    Inside a set of k symbols a walk of length k must revisit a symbol, so
    positivity of a row of ``A^k`` is the same as infinite extendability.
    """
    keep = [i for i, a in enumerate(alphabet) if restrict_to is None or a in restrict_to]
    A = restrict(entries, keep)
    live = _bool_power(A, len(keep)).sum(axis=1) > 0
    out = []
    for w in itertools.product(range(len(keep)), repeat=n):
        if all(A[a, b] for a, b in zip(w, w[1:])) and all(live[a] for a in w):
            out.append(tuple(alphabet[keep[i]] for i in w))
    return out
