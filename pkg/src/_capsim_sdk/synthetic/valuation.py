import numpy as np

from _capsim_sdk.exceptions import DimensionMismatchError


def valuation(r_c, e_i) -> float:
    """Scaled inner-product similarity `min(exp(<r_c, e_i> / (2 sqrt(d))) / 10, 1)`."""
    r_c = np.asarray(r_c, dtype=np.float64).reshape(-1)
    e_i = np.asarray(e_i, dtype=np.float64).reshape(-1)
    if r_c.shape != e_i.shape:
        raise DimensionMismatchError("event embedding", r_c.shape[0], e_i.shape[0])
    d = r_c.shape[0]
    return float(min(np.exp(np.dot(r_c, e_i) / (2.0 * np.sqrt(d))) / 10.0, 1.0))


def valuation_matrix(embeddings: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """
    Valuations of every event (rows of `embeddings`, shape (n, d)) for every campaign (rows of `vectors`, shape
    (K, d)). Returns an (n, K) array.

    Each entry is computed independently of the batch it is evaluated in, so chunking the events never changes a
    value.
    """
    embeddings = np.atleast_2d(embeddings)
    if embeddings.shape[1] != vectors.shape[1]:
        raise DimensionMismatchError(
            "event embedding", vectors.shape[1], embeddings.shape[1]
        )
    d = vectors.shape[1]
    scores = np.einsum("nd,kd->nk", embeddings, vectors, optimize=False)
    return np.minimum(np.exp(scores / (2.0 * np.sqrt(d))) / 10.0, 1.0)
