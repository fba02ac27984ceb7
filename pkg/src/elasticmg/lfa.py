"""Local Fourier analysis of Braess-Sarazin smoothers and two-grid cycles.

Fourier modes are taken at absolute DOF positions, ``exp(i theta . x / h)``,
so half-integer offsets of the staggered families appear as ``sin(theta/2)``
factors in the saddle symbol.  Frequencies live in ``(-pi/2, 3pi/2]^2`` with
the low set ``(-pi/2, pi/2]^2`` and the high set its complement.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from .discretization import PhysicalParams
from .smoother import DEFAULT_OMEGA, Scheme

__all__ = [
    "SingularFrequencyError",
    "HARMONIC_SHIFTS",
    "harmonics",
    "chi",
    "eta",
    "sigma_star",
    "symbol_L",
    "symbol_M",
    "smoother_symbol",
    "smoother_eigs",
    "high_frequency_grid",
    "low_frequency_grid",
    "smoothing_factor",
    "optimal_omega",
    "transfer_symbols",
    "twogrid_symbol",
    "twogrid_factor",
]

HARMONIC_SHIFTS = ((0, 0), (1, 0), (0, 1), (1, 1))


class SingularFrequencyError(ArithmeticError):
    """A symbol needed for the analysis is singular at this frequency."""


def harmonics(theta) -> list[np.ndarray]:
    t = np.asarray(theta, dtype=float)
    return [t + np.pi * np.array(b, dtype=float) for b in HARMONIC_SHIFTS]


def chi(theta) -> float:
    t1, t2 = theta
    return 4.0 - 2.0 * np.cos(t1) - 2.0 * np.cos(t2)


def eta(theta, scheme: Scheme | str) -> float:
    """``h^2`` times the symbol of ``D`` (inverse of the ``D^{-1}`` stencil symbol)."""
    scheme = Scheme(scheme)
    c1, c2 = np.cos(theta[0]), np.cos(theta[1])
    if scheme is Scheme.JACOBI:
        return np.full(np.broadcast(c1, c2).shape, 4.0)[()]
    if scheme is Scheme.MASS:
        return 9.0 / (4.0 + 2.0 * c1 + 2.0 * c2 + c1 * c2)
    return 24.0 / (7.0 + 2.0 * (c1 + c2) + c1 * c2)


def sigma_star(eta_over_chi: float, eps_over_lam: float) -> float:
    r = eps_over_lam
    return (1.0 + 2.0 * r) / (1.0 + (1.0 + eta_over_chi) * r)


def _saddle_symbol(diag, theta, params: PhysicalParams, h: float) -> np.ndarray:
    # broadcasts over leading frequency dimensions -> (..., 3, 3)
    tau = params.tau
    diag = np.asarray(diag, dtype=float)
    a = 2.0 * tau * h * np.sin(np.asarray(theta[0], dtype=float) / 2.0)
    b = 2.0 * tau * h * np.sin(np.asarray(theta[1], dtype=float) / 2.0)
    shape = np.broadcast(diag, a, b).shape
    out = np.zeros(shape + (3, 3), dtype=complex)
    out[..., 0, 0] = out[..., 1, 1] = params.epsilon * diag
    out[..., 0, 2] = -1j * a
    out[..., 1, 2] = -1j * b
    out[..., 2, 0] = 1j * a
    out[..., 2, 1] = 1j * b
    out[..., 2, 2] = -params.c_coef * h ** 2
    return out / h ** 2


def symbol_L(theta, params: PhysicalParams, h: float) -> np.ndarray:
    """3x3 symbol of the saddle operator (rows/cols u, v, p)."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    return _saddle_symbol(chi(theta), theta, params, h)


def symbol_M(theta, scheme, params: PhysicalParams, h: float) -> np.ndarray:
    """3x3 symbol of the Braess-Sarazin preconditioner."""
    return _saddle_symbol(eta(theta, scheme), theta, params, h)


def smoother_symbol(theta, scheme, omega: float, params: PhysicalParams, h: float = 1.0) -> np.ndarray:
    L = symbol_L(theta, params, h)
    M = symbol_M(theta, scheme, params, h)
    return np.eye(3) - omega * np.linalg.solve(M, L)


def smoother_eigs(theta, scheme, params: PhysicalParams) -> tuple[float, float, float]:
    """Eigenvalues ``(1, chi/eta, sigma*)`` of ``M^{-1} L`` at ``theta``."""
    x = chi(theta)
    if abs(x) < 1e-14:
        raise SingularFrequencyError(f"chi vanishes at theta={tuple(theta)}")
    e = eta(theta, scheme)
    return 1.0, x / e, sigma_star(e / x, params.epsilon / params.lam)


def _frequencies(samples: int) -> np.ndarray:
    # right endpoints of a uniform partition of (-pi/2, 3pi/2]
    return -np.pi / 2 + 2.0 * np.pi * np.arange(1, samples + 1) / samples


def high_frequency_grid(samples: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Sampled high frequencies as flat ``(theta1, theta2)`` arrays.

    The partition includes ``pi`` and ``3pi/2`` whenever ``samples`` is a
    multiple of 4, so the extremes of ``chi/eta`` are hit exactly.
    """
    t = _frequencies(samples)
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    t1, t2 = t1.ravel(), t2.ravel()
    low = (np.abs(t1) <= np.pi / 2) & (np.abs(t2) <= np.pi / 2)
    return t1[~low], t2[~low]


def low_frequency_grid(samples: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Cell midpoints of a ``samples x samples`` partition of the low set (never 0)."""
    t = -np.pi / 2 + (np.arange(samples) + 0.5) * np.pi / samples
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    return t1.ravel(), t2.ravel()


def _ratios(scheme, t1, t2) -> np.ndarray:
    return chi((t1, t2)) / eta((t1, t2), scheme)


def smoothing_factor(scheme, omega: float, params: PhysicalParams, samples: int = 128) -> float:
    """``max`` over sampled high frequencies of ``max(|1-w|, |1-w chi/eta|, |1-w sigma*|)``."""
    if samples < 32:
        raise ValueError(f"need at least 32 samples per dimension, got {samples}")
    t1, t2 = high_frequency_grid(samples)
    ratio = _ratios(scheme, t1, t2)
    sig = sigma_star(1.0 / ratio, params.epsilon / params.lam)
    worst = max(np.abs(1.0 - omega * ratio).max(), np.abs(1.0 - omega * sig).max())
    return float(max(abs(1.0 - omega), worst))


def optimal_omega(scheme, params: PhysicalParams, samples: int = 128, xtol: float = 1e-6) -> tuple[float, float]:
    """Minimize the smoothing factor over ``omega`` in ``(0, 2)``; returns ``(omega*, mu_opt)``."""
    t1, t2 = high_frequency_grid(samples)
    ratio = _ratios(scheme, t1, t2)
    sig = sigma_star(1.0 / ratio, params.epsilon / params.lam)
    lo = min(ratio.min(), sig.min())
    hi = max(ratio.max(), sig.max())

    def mu(w):
        return max(abs(1.0 - w), abs(1.0 - w * lo), abs(1.0 - w * hi))

    # mu is convex in omega; bracket with a coarse scan, then refine
    ws = np.linspace(1e-3, 2.0 - 1e-3, 400)
    k = int(np.argmin([mu(w) for w in ws]))
    a, b = ws[max(k - 1, 0)], ws[min(k + 1, len(ws) - 1)]
    res = minimize_scalar(mu, bounds=(a, b), method="bounded", options={"xatol": xtol})
    w = float(res.x)
    return w, smoothing_factor(scheme, w, params, samples)


def transfer_symbols(theta) -> tuple[np.ndarray, np.ndarray]:
    """``(R, P)`` over the four harmonics of a low frequency: ``R`` is 3x12, ``P`` 12x3.

    Each family's restriction symbol is ``sum_k w_k exp(i theta . k)`` over its
    fine-point offsets ``k`` (in units of ``h``).  A coarse DOF at odd fine
    coordinate ``c`` maps the harmonic shifted by ``pi`` in that direction
    onto ``(-1)`` times the coarse mode, which the sign factors carry.
    Prolongation is ``4 R^T``, whose symbol is the conjugate transpose.
    Leading dimensions of ``theta`` broadcast.
    """
    t1 = np.asarray(theta[0], dtype=float)
    t2 = np.asarray(theta[1], dtype=float)
    R = np.zeros(np.broadcast(t1, t2).shape + (3, 12), dtype=complex)
    for k, (b1, b2) in enumerate(HARMONIC_SHIFTS):
        s1, s2 = t1 + b1 * np.pi, t2 + b2 * np.pi
        c1, c2 = np.cos(s1), np.cos(s2)
        h1, h2 = np.cos(s1 / 2.0), np.cos(s2 / 2.0)
        # coarse positions / h: u (even, odd), v (odd, even), p (odd, odd)
        R[..., 0, 3 * k] = 0.5 * (1.0 + c1) * h2 * (-1) ** b2
        R[..., 1, 3 * k + 1] = h1 * 0.5 * (1.0 + c2) * (-1) ** b1
        R[..., 2, 3 * k + 2] = h1 * h2 * (-1) ** (b1 + b2)
    return R, np.conj(np.swapaxes(R, -1, -2))


def _harmonic_block_diag(fn, t1, t2) -> np.ndarray:
    out = np.zeros(np.broadcast(t1, t2).shape + (12, 12), dtype=complex)
    for k, (b1, b2) in enumerate(HARMONIC_SHIFTS):
        out[..., 3 * k:3 * k + 3, 3 * k:3 * k + 3] = fn((t1 + b1 * np.pi, t2 + b2 * np.pi))
    return out


def _twogrid_batch(t1, t2, scheme, omega, gamma1, gamma2, params, h, singular_tol=1e-12):
    """Two-grid symbols for arrays of low frequencies plus a mask of usable ones."""
    L = _harmonic_block_diag(lambda t: symbol_L(t, params, h), t1, t2)
    M = _harmonic_block_diag(lambda t: symbol_M(t, scheme, params, h), t1, t2)
    S = np.eye(12) - omega * np.linalg.solve(M, L)
    R, P = transfer_symbols((t1, t2))
    LH = symbol_L((2.0 * t1, 2.0 * t2), params, 2.0 * h)
    # relative to the symbol scale so a tiny h does not trip the check
    scale = np.abs(LH).max(axis=(-2, -1)) ** 3
    ok = np.abs(np.linalg.det(LH)) >= singular_tol * scale
    LH[~ok] = np.eye(3)
    cgc = np.eye(12) - P @ np.linalg.solve(LH, R @ L)
    E = np.linalg.matrix_power(S, gamma2) @ cgc @ np.linalg.matrix_power(S, gamma1)
    return E, ok


def twogrid_symbol(
    theta,
    scheme,
    omega: float,
    gamma1: int,
    gamma2: int,
    params: PhysicalParams,
    h: float = 1.0 / 128,
    singular_tol: float = 1e-12,
) -> np.ndarray:
    """12x12 symbol of ``S^g2 (I - P L_H^{-1} R L) S^g1`` at a low frequency."""
    t1, t2 = (np.asarray(theta[0], dtype=float), np.asarray(theta[1], dtype=float))
    E, ok = _twogrid_batch(t1, t2, Scheme(scheme), omega, gamma1, gamma2, params, h, singular_tol)
    if not ok:
        raise SingularFrequencyError(f"coarse symbol singular at theta=({float(t1)}, {float(t2)})")
    return E


def twogrid_factor(
    scheme,
    omega: float | None,
    gamma1: int,
    gamma2: int,
    params: PhysicalParams,
    h: float = 1.0 / 128,
    samples: int = 64,
) -> float:
    """Largest spectral radius of the two-grid symbol over sampled low frequencies."""
    if samples < 32:
        raise ValueError(f"need at least 32 samples per dimension, got {samples}")
    scheme = Scheme(scheme)
    if omega is None:
        omega = DEFAULT_OMEGA[scheme]
    t1, t2 = low_frequency_grid(samples)
    E, ok = _twogrid_batch(t1, t2, scheme, omega, gamma1, gamma2, params, h)
    radii = np.abs(np.linalg.eigvals(E[ok])).max(axis=-1)
    return float(radii.max())
