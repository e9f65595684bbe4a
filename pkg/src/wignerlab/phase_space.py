"""Phase-space primitives: symplectic form, mode vectors, plane projectors.

Conventions fixed here and used everywhere else in the package:

* Quadratures are ordered ``(x_1, ..., x_m, p_1, ..., p_m)`` ("xxpp").
* Shot noise is one: the vacuum covariance matrix is the identity.
* The symplectic form acts as ``J (x, p) = (-p, x)``, so ``J @ J = -1`` and
  ``(J f1, J f2) = (f1, f2)`` for all vectors.

A single optical mode is a normalised vector ``g`` together with its
symplectic partner ``J g``; the two span a phase plane.  Every quantity in
this package depends only on that plane (through the rank-two projector
``P = g g^T + (Jg)(Jg)^T``), never on the sign or phase of ``g`` itself, so
the sign convention of ``J`` is unobservable downstream.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ModeValidationError

#: Inputs farther than this from unit norm are rejected; closer ones are
#: silently renormalised (absorbs file-format rounding without masking bugs).
MODE_NORM_TOL = 1e-9


def _even_dim(size: int) -> int:
    if size == 0 or size % 2:
        raise DimensionError(
            f"phase-space vectors have even positive length, got {size}"
        )
    return size // 2


def symplectic_form(m: int) -> np.ndarray:
    """Return the 2m x 2m symplectic form J in xxpp ordering."""
    if m < 1:
        raise DimensionError("mode count must be at least 1")
    j = np.zeros((2 * m, 2 * m))
    j[:m, m:] = -np.eye(m)
    j[m:, :m] = np.eye(m)
    return j


def apply_j(f: np.ndarray) -> np.ndarray:
    """Apply the symplectic form, ``(x, p) -> (-p, x)``.

    Accepts a single vector or an array of vectors stacked on leading axes.
    Applying twice returns the negated input.
    """
    f = np.asarray(f, dtype=float)
    m = _even_dim(f.shape[-1])
    return np.concatenate((-f[..., m:], f[..., :m]), axis=-1)


def as_mode(f: np.ndarray) -> np.ndarray:
    """Validate a mode vector and return a normalised read-only copy.

    Raises:
        DimensionError: for odd or zero length.
        ModeValidationError: if the norm deviates from 1 by more than
            ``MODE_NORM_TOL``.
    """
    f = np.array(f, dtype=float)
    if f.ndim != 1:
        raise DimensionError("mode vectors are one-dimensional")
    _even_dim(f.size)
    norm = float(np.linalg.norm(f))
    if abs(norm - 1.0) > MODE_NORM_TOL:
        raise ModeValidationError(
            f"mode vector norm {norm!r} deviates from 1 beyond {MODE_NORM_TOL}"
        )
    f /= norm
    f.flags.writeable = False
    return f


def mode_projector(g: np.ndarray) -> np.ndarray:
    """Projector onto the phase plane of mode ``g``.

    Returns ``g g^T + (Jg)(Jg)^T``: symmetric, idempotent, trace 2, and
    identical for every mode spanning the same plane (``g``, ``Jg``, or any
    rotation of the pair).
    """
    g = as_mode(g)
    jg = apply_j(g)
    return np.outer(g, g) + np.outer(jg, jg)


def random_mode(m: int, seed) -> np.ndarray:
    """Draw a uniformly random mode: i.i.d. standard normals, normalised.

    ``seed`` may be anything ``numpy.random.default_rng`` accepts, or an
    existing ``Generator`` (consumed in place).  Deterministic per seed.
    """
    if m < 1:
        raise DimensionError("mode count must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(2 * m)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            break
    return as_mode(v / norm)


def complete_symplectic_basis(g: np.ndarray) -> list[np.ndarray]:
    """Extend mode ``g`` to a full orthonormal basis of J-paired planes.

    Returns ``[g, Jg, h2, Jh2, ..., hm, Jhm]`` where each consecutive pair
    spans a J-invariant plane and the whole set is orthonormal.  Deterministic:
    the completion is seeded from canonical basis vectors, picking at each step
    the candidate with the largest residual for numerical head-room.
    """
    g = as_mode(g)
    dim = g.size
    basis = [np.asarray(g), apply_j(g)]
    while len(basis) < dim:
        rows = np.array(basis)
        resid = np.eye(dim) - rows.T @ rows  # residual of each canonical vector
        norms = np.linalg.norm(resid, axis=0)
        pick = int(np.argmax(norms))
        h = resid[:, pick] / norms[pick]
        # one re-orthogonalisation pass to keep the Gram matrix at 1e-14
        h = h - rows.T @ (rows @ h)
        h /= np.linalg.norm(h)
        jh = apply_j(h)
        jh = jh - rows.T @ (rows @ jh)
        jh /= np.linalg.norm(jh)
        basis.extend([h, jh])
    return basis


def basis_change_matrix(basis: list[np.ndarray]) -> np.ndarray:
    """Orthogonal symplectic matrix built from a J-paired basis.

    The input is ordered in pairs ``[h1, Jh1, h2, Jh2, ...]`` (as produced by
    :func:`complete_symplectic_basis`); the returned matrix has columns
    reordered to xxpp, ``[h1 ... hm | Jh1 ... Jhm]``, so that it is orthogonal
    and preserves ``J``.
    """
    return np.column_stack(basis[0::2] + basis[1::2])
