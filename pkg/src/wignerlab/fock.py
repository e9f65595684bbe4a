"""Brute-force oracle in truncated Fock space, for one to three modes.

Everything here is deliberately independent of the closed forms in
``photon_ops``: states are complex amplitude tensors, operators act by
explicit ladder algebra, and Wigner values come from displaced parity.  The
tests compare the two routes.

Quadrature scaling.  With shot noise one, ``x = a + a^dag`` and
``p = i (a^dag - a)``, so ``a(g) = sum_j c_j a_j`` with
``c_j = g_x[j] - i g_p[j]`` for a normalised mode ``g``.

Wigner scaling, fixed against the vacuum closed form.  The displaced-parity
construction reads ``W(beta) = s_m <psi| D(gamma) Pi D(gamma)^dag |psi>``
with per-mode displacement amplitudes ``gamma_j = (beta_xj + i beta_pj)/2``
and ``Pi`` the photon-number parity.  For the vacuum the expectation is
``|<-gamma|gamma>| = exp(-2 |gamma|^2) = exp(-|beta|^2 / 2)``, and the target
vacuum Wigner function is ``(2 pi)^-m exp(-|beta|^2 / 2)``; hence
``s_m = (2 pi)^-m`` exactly.

Mixed Gaussian states are never represented here: density matrices would
dwarf the oracle, and the package handles mixedness by classical mixtures of
displaced pure states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache as _lru_cache
from itertools import product

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm

from .errors import CapacityError, CutoffError, DimensionError
from .gaussian import bloch_messiah, symplectic_to_unitary, williamson
from .phase_space import as_mode, complete_symplectic_basis
from .photon_ops import PhotonOpSpec

MAX_MODES = 3
MAX_SQUEEZING = 1.2  # nats; leakage is hopeless beyond this at sane cutoffs
LEAK_TOL = 1e-8
DEFAULT_CUTOFF = 20
MAX_SUGGESTED_CUTOFF = 512


@dataclass(frozen=True)
class FockState:
    """Pure state as a complex tensor with one axis per mode.

    ``norm_deficit`` is the squared norm lost to the cutoff when the state
    was constructed (zero for states built from exact finite expansions).
    """

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    @property
    def modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def vacuum_state(modes: int, cutoff: int) -> FockState:
    amp = np.zeros((cutoff,) * modes, dtype=complex)
    amp[(0,) * modes] = 1.0
    return FockState(amp)


def _mode_coefficients(g: np.ndarray) -> np.ndarray:
    """Annihilation coefficients of mode ``g``: ``a(g) = sum c_j a_j``."""
    g = as_mode(g)
    m = g.size // 2
    return g[:m] - 1j * g[m:]


def lower(psi: np.ndarray, axis: int) -> np.ndarray:
    """Apply the annihilation operator along one tensor axis."""
    n = psi.shape[axis]
    coef = np.sqrt(np.arange(1, n))
    out = np.zeros_like(psi)
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(1, n)
    dst[axis] = slice(0, n - 1)
    shape = [1] * psi.ndim
    shape[axis] = n - 1
    out[tuple(dst)] = coef.reshape(shape) * psi[tuple(src)]
    return out


def raise_(psi: np.ndarray, axis: int) -> np.ndarray:
    """Apply the creation operator along one tensor axis (top level drops)."""
    n = psi.shape[axis]
    coef = np.sqrt(np.arange(1, n))
    out = np.zeros_like(psi)
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(0, n - 1)
    dst[axis] = slice(1, n)
    shape = [1] * psi.ndim
    shape[axis] = n - 1
    out[tuple(dst)] = coef.reshape(shape) * psi[tuple(src)]
    return out


def apply_annihilation(psi: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``a(g) psi`` for a mode superposition ``g``."""
    c = _mode_coefficients(g)
    out = np.zeros_like(psi)
    for j, cj in enumerate(c):
        if cj != 0:
            out += cj * lower(psi, j)
    return out


def apply_creation(psi: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``a^dag(g) psi``."""
    c = np.conj(_mode_coefficients(g))
    out = np.zeros_like(psi)
    for j, cj in enumerate(c):
        if cj != 0:
            out += cj * raise_(psi, j)
    return out


def apply_quadrature(psi: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``Q(f) psi = (a(f) + a^dag(f)) psi``; ``f`` need not be normalised."""
    f = np.asarray(f, dtype=float)
    m = f.size // 2
    c = f[:m] - 1j * f[m:]
    out = np.zeros_like(psi)
    for j, cj in enumerate(c):
        if cj != 0:
            out += cj * lower(psi, j) + np.conj(cj) * raise_(psi, j)
    return out


def apply_photon_op(state: FockState, op: PhotonOpSpec) -> tuple[FockState, float]:
    """Add or subtract one photon in mode ``g``; renormalises.

    Returns the new state and the pre-normalisation squared norm, which
    equals the mode's mean photon number for subtraction and that plus one
    for addition.

    Raises:
        ValueError: annihilating a vacuum-like mode (zero resulting norm).
    """
    if op.mode.size != 2 * state.modes:
        raise DimensionError("operation mode does not match the state")
    if op.kind == "subtract":
        amp = apply_annihilation(state.amplitudes, op.mode)
    else:
        amp = apply_creation(state.amplitudes, op.mode)
    norm_sq = float(np.vdot(amp, amp).real)
    if norm_sq <= 1e-12:
        raise ValueError("photon subtraction annihilated the state (vacuum mode)")
    return FockState(amp / np.sqrt(norm_sq), state.norm_deficit), norm_sq


def squeezed_amplitudes(r: float, cutoff: int) -> tuple[np.ndarray, float]:
    """Single-mode squeezed vacuum with ``<x^2> = e^{2r}``, ``<p^2> = e^{-2r}``.

    Even amplitudes ``c_2n = sqrt((2n)!) / (2^n n!) tanh(r)^n / sqrt(cosh r)``
    via a stable two-step recursion.  Returns the truncated vector (not
    renormalised) and the leaked squared norm, accumulated term by term from
    the tail so that leakages far below machine epsilon stay meaningful.
    """
    c = np.zeros(cutoff)
    c[0] = 1.0 / np.sqrt(np.cosh(r))
    t = np.tanh(r)
    for n in range(0, cutoff - 2, 2):
        c[n + 2] = t * np.sqrt(n + 1.0) / np.sqrt(n + 2.0) * c[n]
    # continue the recursion past the cutoff to sum the exact tail mass
    leak = 0.0
    top = cutoff - 2 if cutoff % 2 == 0 else cutoff - 1
    cur = c[top]
    n = top
    while True:
        cur = t * np.sqrt(n + 1.0) / np.sqrt(n + 2.0) * cur
        n += 2
        term = cur * cur
        leak += term
        if term < 1e-40 * max(leak, 1e-30) or n > cutoff + 8192:
            break
    return c, float(leak)


def _phases(psi: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Apply ``exp(i sum_j delta_j n_j)``."""
    for axis, d in enumerate(deltas):
        if d != 0.0:
            shape = [1] * psi.ndim
            shape[axis] = psi.shape[axis]
            psi = psi * np.exp(1j * d * np.arange(psi.shape[axis])).reshape(shape)
    return psi


def _beamsplitter(psi: np.ndarray, ax1: int, ax2: int, theta, phi) -> np.ndarray:
    """Apply ``exp(theta (e^{i phi} a1^dag a2 - e^{-i phi} a2^dag a1))``.

    Photon number is conserved, so the rotation acts block-by-block on the
    anti-diagonals of the two axes; each block exponential is exact, keeping
    the whole map unitary on the truncated space.
    """
    n = psi.shape[ax1]
    moved = np.moveaxis(psi, (ax1, ax2), (0, 1))
    work = moved.reshape(n, n, -1).copy()
    for total in range(1, 2 * n - 1):
        lo = max(0, total - n + 1)
        hi = min(total, n - 1)
        ks = np.arange(lo, hi + 1)
        size = len(ks)
        if size < 2:
            continue
        gen = np.zeros((size, size), dtype=complex)
        for idx in range(size - 1):
            k = ks[idx]
            # <k+1, t-k-1| a1^dag a2 |k, t-k>
            amp = np.sqrt((k + 1.0) * (total - k))
            gen[idx + 1, idx] = theta * np.exp(1j * phi) * amp
            gen[idx, idx + 1] = -theta * np.exp(-1j * phi) * amp
        block = expm(gen)
        work[ks, total - ks, :] = block @ work[ks, total - ks, :]
    return np.moveaxis(work.reshape(moved.shape), (0, 1), (ax1, ax2))


def _givens_factors(u: np.ndarray):
    """Decompose a unitary into mode-pair rotations and final phases.

    Returns ``(rotations, deltas)`` with ``rotations`` a list of
    ``(p, q, theta, phi)`` in application order such that the unitary equals
    ``G_1^dag ... G_T^dag diag(e^{i delta})`` with
    ``G(theta, phi) = [[cos, e^{i phi} sin], [-e^{-i phi} sin, cos]]``
    embedded at rows/columns (p, q).
    """
    u = np.array(u, dtype=complex)
    n = u.shape[0]
    if np.max(np.abs(u @ u.conj().T - np.eye(n))) > 1e-9:
        raise ValueError("interferometer matrix is not unitary")
    factors = []
    for col in range(n):
        for row in range(n - 1, col, -1):
            a, b = u[row - 1, col], u[row, col]
            if abs(b) < 1e-14:
                continue
            if abs(a) < 1e-14:
                theta, phi = np.pi / 2.0, 0.0
            else:
                theta = np.arctan2(abs(b), abs(a))
                phi = np.angle(a) - np.angle(b)
            c, s = np.cos(theta), np.sin(theta)
            giv = np.eye(n, dtype=complex)
            giv[row - 1, row - 1] = c
            giv[row - 1, row] = np.exp(1j * phi) * s
            giv[row, row - 1] = -np.exp(-1j * phi) * s
            giv[row, row] = c
            u = giv @ u
            factors.append((row - 1, row, theta, phi))
    deltas = np.angle(np.diagonal(u))
    return factors, deltas


def apply_interferometer(state: FockState, u: np.ndarray) -> FockState:
    """Apply the passive unitary with mode matrix ``u``.

    Convention: the returned state has annihilation operators transforming as
    ``a_j -> sum_k u[j, k] a_k`` in the Heisenberg picture, i.e. a Gaussian
    state's covariance maps as ``V -> O V O^T`` with ``O`` the symplectic
    image of ``u``.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (state.modes, state.modes):
        raise DimensionError("interferometer size does not match the state")
    factors, deltas = _givens_factors(u)
    psi = _phases(state.amplitudes.astype(complex), deltas)
    for p, q, theta, phi in reversed(factors):
        psi = _beamsplitter(psi, p, q, -theta, phi)  # G^dag = G(-theta, phi)
    return FockState(psi, state.norm_deficit)


def suggested_cutoff(squeezings, leak_tol: float = LEAK_TOL) -> int:
    """Smallest even cutoff keeping total squeezed-vacuum leakage under tol."""
    rs = np.atleast_1d(np.asarray(squeezings, dtype=float))
    for cutoff in range(8, MAX_SUGGESTED_CUTOFF + 1, 2):
        total = 0.0
        for r in rs:
            total += squeezed_amplitudes(abs(r), cutoff)[1]
        if total < leak_tol:
            return cutoff
    raise CutoffError(
        f"no cutoff up to {MAX_SUGGESTED_CUTOFF} reaches leakage {leak_tol}"
    )


def gaussian_fock_state(v: np.ndarray, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """Pure Gaussian state with covariance ``v`` as a Fock tensor.

    Builds per-mode squeezed vacua from the Bloch-Messiah squeezing values,
    then applies the output interferometer.  The combined truncation leakage
    of the squeezed factors is the recorded norm deficit and must stay below
    ``LEAK_TOL``.

    Raises:
        CutoffError: leakage above tolerance; the error carries a suggested
            cutoff that would pass.
        DimensionError: more than ``MAX_MODES`` modes.
        ValueError: mixed covariance or squeezing beyond ``MAX_SQUEEZING``.
    """
    v = np.asarray(v, dtype=float)
    m = v.shape[0] // 2
    if m > MAX_MODES:
        raise DimensionError(f"oracle supports at most {MAX_MODES} modes")
    wl = williamson(v)
    if np.max(np.abs(wl.nu - 1.0)) > 1e-6:
        raise ValueError("oracle states must be pure (unit symplectic spectrum)")
    bm = bloch_messiah(wl.s)
    rs = np.log(bm.squeezing)
    if np.max(rs) > MAX_SQUEEZING + 1e-12:
        raise ValueError(
            f"squeezing {np.max(rs):.3f} nats exceeds the oracle bound "
            f"{MAX_SQUEEZING}"
        )
    kets = []
    total_leak = 0.0
    for r in rs:
        ket, leak = squeezed_amplitudes(r, cutoff)
        kets.append(ket)
        total_leak += leak
    if total_leak > LEAK_TOL:
        raise CutoffError(
            f"cutoff {cutoff} leaks {total_leak:.3e} > {LEAK_TOL:.0e}",
            suggested_cutoff=suggested_cutoff(rs),
        )
    psi = kets[0].astype(complex)
    for ket in kets[1:]:
        psi = np.multiply.outer(psi, ket)
    psi = psi / np.linalg.norm(psi)
    state = FockState(psi, norm_deficit=total_leak)
    return apply_interferometer(state, symplectic_to_unitary(bm.passive_out))


@_lru_cache(maxsize=8)
def _ladder_spectrum(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the tridiagonal matrix with off-diagonal
    ``sqrt(k + 1)`` and zero diagonal, shared by every displacement."""
    lam, q = eigh_tridiagonal(np.zeros(n), np.sqrt(np.arange(1.0, n)))
    return lam, q


def _apply_displacement(psi: np.ndarray, axis: int, z: complex) -> np.ndarray:
    """Apply ``D(z) = exp(z a^dag - conj(z) a)`` along one tensor axis.

    The generator is a phase gauge away from ``|z|`` times a fixed real
    tridiagonal matrix: with ``phi_k = k arg(-i z)`` and ``T1 = Q L Q^T``,
    ``D(z) = Phi Q exp(i |z| L) Q^T Phi^dag``.  Exactly unitary on the
    truncated space, stable at any cutoff, and one eigendecomposition per
    cutoff serves every displacement amplitude.
    """
    if z == 0:
        return psi.astype(complex)
    n = psi.shape[axis]
    lam, q = _ladder_spectrum(n)
    phases = np.exp(1j * np.angle(-1j * z) * np.arange(n))
    shape = [1] * psi.ndim
    shape[axis] = n
    work = psi * np.conj(phases).reshape(shape)
    work = np.moveaxis(np.tensordot(q.T, work, axes=([1], [axis])), 0, axis)
    work = work * np.exp(1j * abs(z) * lam).reshape(shape)
    work = np.moveaxis(np.tensordot(q, work, axes=([1], [axis])), 0, axis)
    return work * phases.reshape(shape)


def displace_state(state: FockState, xi: np.ndarray) -> FockState:
    """Displace by the phase-space vector ``xi`` (mean shifts by ``+xi``)."""
    xi = np.asarray(xi, dtype=float)
    m = state.modes
    if xi.size != 2 * m:
        raise DimensionError("displacement dimension does not match the state")
    psi = state.amplitudes.astype(complex)
    for j in range(m):
        z = 0.5 * (xi[j] + 1j * xi[m + j])
        psi = _apply_displacement(psi, j, z)
    return FockState(psi, state.norm_deficit)


def fock_wigner(state: FockState, beta) -> np.ndarray:
    """Wigner function from displaced parity (scaling in module docstring).

    Valid while the displaced state fits under the cutoff: keep the grid so
    that per-mode ``|gamma|^2 = |beta_mode|^2 / 4`` stays well below it, or
    the unitary truncated displacement wraps amplitude around instead of
    letting the value decay.
    """
    beta = np.asarray(beta, dtype=float)
    squeeze = beta.ndim == 1
    pts = np.atleast_2d(beta.reshape(-1, beta.shape[-1]))
    m = state.modes
    if pts.shape[-1] != 2 * m:
        raise DimensionError("point dimension does not match the state")
    n = state.cutoff
    parity = 1.0 - 2.0 * (np.arange(n) % 2)
    scale = (2.0 * np.pi) ** (-m)
    out = np.empty(len(pts))
    for i, b in enumerate(pts):
        psi = state.amplitudes
        for j in range(m):
            gamma = 0.5 * (b[j] + 1j * b[m + j])
            psi = _apply_displacement(psi, j, -gamma)  # D(gamma)^dag
        prob = np.abs(psi) ** 2
        for j in range(m):
            prob = np.tensordot(parity, prob, axes=([0], [0]))
        out[i] = scale * float(prob)
    return float(out[0]) if squeeze else out.reshape(beta.shape[:-1])


def fock_characteristic(state: FockState, alpha) -> complex:
    """``<exp(i Q(alpha))>`` via per-mode displacements ``D(i lambda_j)``."""
    alpha = np.asarray(alpha, dtype=float)
    m = state.modes
    psi = state.amplitudes
    for j in range(m):
        lam = alpha[j] + 1j * alpha[m + j]
        psi = _apply_displacement(psi, j, 1j * lam)
    return complex(np.vdot(state.amplitudes, psi))


def fock_covariance(state: FockState) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrised covariance matrix and mean recomputed from the state."""
    dim = 2 * state.modes
    psi = state.amplitudes
    applied = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        applied.append(apply_quadrature(psi, e))
    mean = np.array([float(np.vdot(psi, q).real) for q in applied])
    cov = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            # Re<Q_i psi | Q_j psi> is the symmetrised second moment
            cov[i, j] = cov[j, i] = float(np.vdot(applied[i], applied[j]).real)
    return cov - np.outer(mean, mean), mean


def fock_mean_photon(state: FockState, g: np.ndarray) -> float:
    """``<n(g)>``: squared norm of ``a(g) psi``."""
    low = apply_annihilation(state.amplitudes, g)
    return float(np.vdot(low, low).real)


def _symmetrized_moment(psi: np.ndarray, fs: list[np.ndarray]) -> float:
    """Weyl-symmetrised moment ``<Sym(Q(f_1) ... Q(f_k))>``.

    Polarisation identity: the symmetrised product is
    ``sum over sign patterns s of prod(s) Q(sum s_i f_i)^k / (2^k k!)``,
    which needs only powers of single quadratures.
    """
    k = len(fs)
    total = 0.0
    for signs in product((1.0, -1.0), repeat=k):
        h = sum(s * f for s, f in zip(signs, fs))
        phi = psi
        for _ in range(k):
            phi = apply_quadrature(phi, h)
        total += float(np.prod(signs)) * float(np.vdot(psi, phi).real)
    return total / (2.0**k * math.factorial(k))


def _partitions(items: tuple):
    """All set partitions of ``items`` (small n only)."""
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]
        yield [(first,)] + part


def fock_truncated_correlation(state: FockState, modes) -> float:
    """Truncated correlation of ``Q(f_1) ... Q(f_n)`` from the state.

    Moments are fully symmetrised (they are then the moments of the Wigner
    distribution, matching the closed-form route); the truncation removes all
    lower-order factorisations recursively, i.e. this is the joint cumulant.
    Capacity bound ``n <= 6``.
    """
    fs = [np.asarray(as_mode(f)) for f in modes]
    n = len(fs)
    if n > 6:
        raise CapacityError("oracle cumulants support order <= 6")
    psi = state.amplitudes
    moment_cache: dict[tuple, float] = {}

    def moment(idx: tuple) -> float:
        if idx not in moment_cache:
            moment_cache[idx] = _symmetrized_moment(psi, [fs[i] for i in idx])
        return moment_cache[idx]

    cumulant_cache: dict[tuple, float] = {}

    def cumulant(idx: tuple) -> float:
        if idx not in cumulant_cache:
            val = moment(idx)
            for part in _partitions(idx):
                if len(part) == 1:
                    continue
                term = 1.0
                for block in part:
                    term *= cumulant(tuple(sorted(block)))
                val -= term
            cumulant_cache[idx] = val
        return cumulant_cache[idx]

    return cumulant(tuple(range(n)))


def mode_reduced_purity(state: FockState, g: np.ndarray) -> float:
    """Partial-trace purity of mode ``g``: rotate ``g`` onto the first mode
    axis with the basis-completion interferometer, trace the rest."""
    basis = complete_symplectic_basis(g)
    planes = basis[0::2]
    c = np.array([_mode_coefficients(h) for h in planes])
    rotated = apply_interferometer(state, c)
    amp = rotated.amplitudes.reshape(state.cutoff, -1)
    rho = amp @ amp.conj().T
    return float(np.sum(np.abs(rho) ** 2).real)
