"""Decision-grade diagnostics on photon-added and -subtracted states.

* Wigner negativity is decided by the scalar witness
  ``(g, V^-1 g) + (Jg, V^-1 Jg)``: the Wigner function of the subtracted
  state has a negative region iff the witness exceeds 2, and the added state
  always does (the threshold ``-2`` holds trivially).  The bracket of the
  closed-form Wigner function has positive-semidefinite quadratic part, so it
  is minimised at the origin; certifying the sign of ``W(0)`` is therefore
  equivalent to certifying negativity anywhere.

* Entanglement of the operation mode with the rest of the system is measured
  by the purity of the reduced one-mode state, ``4 pi Int |W|^2``, computed
  in closed form from Gaussian moment identities and compared against the
  purity of the same mode before the operation.

* Passive separability: for a pure covariance, adding or subtracting in mode
  ``g`` leaves the state separable under passive optics iff the (g, Jg)
  plane is an invariant subspace of ``V``; otherwise the entanglement cannot
  be undone by any interferometer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovarianceError, DimensionError, SubtractionUndefinedError
from .gaussian import (
    _check_symmetric,
    gaussian_purity,
    reduce_to_mode,
    symplectic_eigenvalues,
)
from .phase_space import (
    apply_j,
    as_mode,
    basis_change_matrix,
    complete_symplectic_basis,
    mode_projector,
    random_mode,
)
from .photon_ops import (
    PhotonOpSpec,
    PolyGaussianWigner,
    covariance_correction,
    evaluate_wigner,
    mean_photon_number,
    nongaussian_wigner,
)

#: Subtraction draws below this mean photon number are resampled in scans.
SCAN_PHOTON_TOL = 1e-10


@dataclass(frozen=True)
class WitnessReport:
    """Negativity witness value against its threshold (2 subtract, -2 add)."""

    value: float
    threshold: float
    negative: bool


@dataclass(frozen=True)
class PurityReport:
    """Reduced purity after the photon operation (`mu`) and before (`mu0`)."""

    mu: float
    mu0: float


def negativity_witness(v: np.ndarray, op: PhotonOpSpec) -> WitnessReport:
    """Decide Wigner negativity from ``(g, V^-1 g) + (Jg, V^-1 Jg)``."""
    v = _check_symmetric(v)
    if op.kind == "subtract" and mean_photon_number(v, op.mode) <= 0.0:
        raise SubtractionUndefinedError("subtraction undefined on vacuum mode")
    g = op.mode
    jg = apply_j(g)
    v_inv = np.linalg.inv(v)
    value = float(g @ v_inv @ g + jg @ v_inv @ jg)
    threshold = 2.0 if op.kind == "subtract" else -2.0
    return WitnessReport(value=value, threshold=threshold, negative=value > threshold)


def wigner_at_origin(v: np.ndarray, op: PhotonOpSpec) -> float:
    """Wigner value at the phase-space origin, where the bracket is minimal.

    ``W(0) = (2 - tr(V^-1 A)) / 2 * (2 pi)^-m (det V)^-1/2``; its sign agrees
    with :func:`negativity_witness` on every valid input.
    """
    v = _check_symmetric(v)
    m = v.shape[0] // 2
    a = covariance_correction(v, op)
    v_inv = np.linalg.inv(v)
    sign, logdet = np.linalg.slogdet(v)
    if sign <= 0:
        raise CovarianceError("covariance matrix not positive definite")
    w0 = np.exp(-0.5 * logdet - m * np.log(2.0 * np.pi))
    return float(0.5 * (2.0 - np.trace(v_inv @ a)) * w0)


def wigner_minimum(
    w: PolyGaussianWigner, n_starts: int = 32, seed=0
) -> tuple[float, np.ndarray]:
    """Diagnostic numerical probe of the minimum of a Wigner function.

    Negativity certification never needs this (the witness settles it at the
    origin); it exists to inspect where and how deep the negative region is.
    Multi-start quasi-Newton minimisation, deterministic per seed.
    """
    from scipy.optimize import minimize

    rng = np.random.default_rng(seed)
    scale = np.sqrt(np.max(np.linalg.eigvalsh(w.cov)))
    best_val, best_pt = np.inf, None
    starts = [np.zeros(w.dim)] + [
        rng.standard_normal(w.dim) * scale for _ in range(n_starts - 1)
    ]
    for start in starts:
        res = minimize(lambda b: float(evaluate_wigner(w, b)), start, method="BFGS")
        if res.fun < best_val:
            best_val, best_pt = float(res.fun), res.x
    return best_val, best_pt


def marginal_wigner(w: PolyGaussianWigner, g: np.ndarray) -> PolyGaussianWigner:
    """Integrate all modes but ``g`` out of a polynomial Gaussian Wigner.

    Rotates to a basis whose first plane is (g, Jg), then applies the
    Gaussian conditional-moment identities: with ``z | u`` Gaussian of mean
    ``C u + d`` and covariance ``S``, the conditional expectation of the
    quadratic polynomial is again quadratic in ``u`` with an extra
    ``tr(M_zz S)``.  The result lives on the two plane coordinates and keeps
    total integral one.
    """
    g = as_mode(g)
    if g.size != w.dim:
        raise DimensionError("mode vector dimension does not match the state")
    if w.dim == 2:
        return w
    t = basis_change_matrix(complete_symplectic_basis(g))
    # plane coordinates occupy slots (0, m) after the xxpp reordering
    m = w.dim // 2
    keep = [0, m]
    drop = [i for i in range(w.dim) if i not in keep]

    cov = t.T @ w.cov @ t
    quad = t.T @ w.quad @ t
    lin = t.T @ w.lin
    mean = t.T @ w.mean

    v_uu = cov[np.ix_(keep, keep)]
    v_zu = cov[np.ix_(drop, keep)]
    v_zz = cov[np.ix_(drop, drop)]
    c = v_zu @ np.linalg.inv(v_uu)
    cond_cov = v_zz - c @ v_zu.T

    m_uu = quad[np.ix_(keep, keep)]
    m_uz = quad[np.ix_(keep, drop)]
    m_zz = quad[np.ix_(drop, drop)]
    b_u = lin[keep]
    b_z = lin[drop]
    mu_u = mean[keep]
    mu_z = mean[drop]
    d = mu_z - c @ mu_u

    quad_out = m_uu + m_uz @ c + c.T @ m_uz.T + c.T @ m_zz @ c
    lin_out = b_u + c.T @ b_z + 2.0 * m_uz @ d + 2.0 * c.T @ m_zz @ d
    const_out = (
        w.const
        + float(b_z @ d)
        + float(d @ m_zz @ d)
        + float(np.trace(m_zz @ cond_cov))
    )
    return PolyGaussianWigner(
        quad=0.5 * (quad_out + quad_out.T),
        lin=lin_out,
        const=const_out,
        cov=0.5 * (v_uu + v_uu.T),
        mean=mu_u,
    )


def wigner_purity(w: PolyGaussianWigner) -> float:
    """Purity ``4 pi Int |W|^2`` of a one-mode polynomial Gaussian Wigner.

    The square of the Gaussian factor is a Gaussian of half the covariance, so
    the integral reduces to fourth-order moments handled by the Isserlis
    identities:

        mu = [ (tr MS)^2 + 2 tr(MS MS) + 2 c~ tr(MS) + b~.S b~ + c~^2 ]
             / sqrt(det V),  S = V / 2,

    with ``b~, c~`` the polynomial coefficients recentred on the mean.
    """
    if w.dim != 2:
        raise DimensionError("reduced purity expects a one-mode Wigner function")
    half = w.cov / 2.0
    b_c = w.lin + 2.0 * w.quad @ w.mean
    c_c = float(w.mean @ w.quad @ w.mean) + float(w.lin @ w.mean) + w.const
    tr_ms = float(np.trace(w.quad @ half))
    ms = w.quad @ half
    val = (
        tr_ms**2
        + 2.0 * float(np.trace(ms @ ms))
        + 2.0 * c_c * tr_ms
        + float(b_c @ half @ b_c)
        + c_c**2
    )
    det = float(np.linalg.det(w.cov))
    if det <= 0:
        raise CovarianceError("reduced covariance not positive definite")
    return float(val / np.sqrt(det))


def reduced_purities(v: np.ndarray, op: PhotonOpSpec) -> PurityReport:
    """Purity of mode ``g`` after the photon operation and before it."""
    mu0 = gaussian_purity(reduce_to_mode(v, op.mode))
    mu = wigner_purity(marginal_wigner(nongaussian_wigner(v, op), op.mode))
    return PurityReport(mu=mu, mu0=mu0)


@dataclass(frozen=True)
class PurityScan:
    """Random-mode purity scan; ``points[i] = (mu0, mu)`` for ``modes[i]``."""

    points: np.ndarray
    modes: np.ndarray
    n_resampled: int

    @property
    def fraction_lowered(self) -> float:
        mu0, mu = self.points[:, 0], self.points[:, 1]
        return float(np.mean(mu < mu0))


def sample_scan_mode(
    v: np.ndarray, kind: str, master_seed, index: int, max_resamples: int = 1000
) -> tuple[np.ndarray, int]:
    """Mode for scan sample ``index``: deterministic counter substream.

    Subtraction draws landing on a zero-photon mode are redrawn from the same
    substream; returns the mode and the number of resamples.

    Raises:
        SubtractionUndefinedError: after ``max_resamples`` rejected draws
            (the state has essentially no photons in any mode).
    """
    m = v.shape[0] // 2
    rng = np.random.default_rng([master_seed, index])
    resampled = 0
    while True:
        g = random_mode(m, rng)
        if kind != "subtract" or mean_photon_number(v, g) >= SCAN_PHOTON_TOL:
            return g, resampled
        resampled += 1
        if resampled > max_resamples:
            raise SubtractionUndefinedError(
                "every sampled mode has zero mean photon number; nothing to subtract"
            )


def purity_scan(v: np.ndarray, kind: str, n_samples: int, seed) -> PurityScan:
    """Purities (mu0, mu) for ``n_samples`` random choices of the mode.

    The state must be pure: the comparison of reduced purities is an
    entanglement statement only when the global state carries no classical
    noise.  Deterministic per seed; each sample uses the substream
    ``[seed, index]`` so the scan parallelises without changing its output.
    """
    v = _check_symmetric(v)
    nu = symplectic_eigenvalues(v)
    if np.max(np.abs(nu - 1.0)) > 1e-6:
        raise CovarianceError(
            f"purity scan requires a pure state (symplectic eigenvalues {nu})"
        )
    points = np.empty((n_samples, 2))
    modes = np.empty((n_samples, v.shape[0]))
    total_resampled = 0
    for i in range(n_samples):
        g, resampled = sample_scan_mode(v, kind, seed, i)
        total_resampled += resampled
        rep = reduced_purities(v, PhotonOpSpec(kind, g))
        points[i] = (rep.mu0, rep.mu)
        modes[i] = g
    return PurityScan(points=points, modes=modes, n_resampled=total_resampled)


def passive_separability_witness(
    v: np.ndarray, g: np.ndarray, tol: float = 1e-8
) -> bool:
    """Whether a photon op in mode ``g`` keeps a pure state passively separable.

    True iff the (g, Jg) plane is an invariant subspace of ``V``, i.e.
    ``||(1 - P) V P|| < tol``: the initial Wigner function then factorises
    along that plane, and so does the photon-added/subtracted one.  For pure
    states, False means the induced entanglement survives every passive
    transformation.  Mixed states are rejected: their classification needs
    convex decompositions beyond this criterion.
    """
    v = _check_symmetric(v)
    nu = symplectic_eigenvalues(v)
    if np.max(np.abs(nu - 1.0)) > 1e-6:
        raise CovarianceError(
            "passive separability witness supports pure states only"
        )
    p = mode_projector(g)
    resid = (np.eye(v.shape[0]) - p) @ v @ p
    return float(np.linalg.norm(resid)) < tol
