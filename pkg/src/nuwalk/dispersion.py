"""Closed-form dispersion relations, critical gain, and momentum-cell algebra.

For homogeneous coins the two-step walk block-diagonalizes into 2x2 Bloch
cells U(k) with unit determinant, so both bands follow from the half-trace:

    cos eps(k) = tr U(k) / 2,   lambda_pm = exp(-i eps_pm),  eps_- = -eps_+.

Gain/loss-alternating walk (U1):
    cos eps = cos t1 cos t2 cos 2k - sin t1 sin t2 cosh 2g        (real)
Uniform-gain walk (U2):
    cos eps = cos t1 cos t2 cosh 2g cos 2k - sin t1 sin t2
              + i cos t1 cos t2 sinh 2g sin 2k                    (complex)

Both are symmetric under t1 <-> t2. The complex arccos branch puts
Re eps_plus in [0, pi]; the minus band is the negation.
"""

from dataclasses import dataclass

import numpy as np

from .operators import (
    SIGMA0,
    SIGMA1,
    CoinField,
    LatticeSpec,
    WalkKind,
    bloch_matrix,
    coin_cell,
    compose_walk,
    gain_cell,
    shift_cell,
)
from .spectral import eigendecompose, pair_spectra

# --- closed forms ---

def dispersion_cos(kind, theta1, theta2, gamma, k):
    """cos eps(k) from the closed form; vectorized over k."""
    k = np.asarray(k, dtype=float)
    c12 = np.cos(theta1) * np.cos(theta2)
    s12 = np.sin(theta1) * np.sin(theta2)
    if kind == WalkKind.U1_PT:
        return c12 * np.cos(2 * k) - s12 * np.cosh(2 * gamma) + 0j
    if kind == WalkKind.U2_TRS:
        return (
            c12 * np.cosh(2 * gamma) * np.cos(2 * k)
            - s12
            + 1j * c12 * np.sinh(2 * gamma) * np.sin(2 * k)
        )
    raise ValueError(f"unknown walk kind {kind!r}")


def band_quasi_energies(kind, theta1, theta2, gamma, k):
    """(eps_plus, eps_minus) with Re eps_plus in [0, pi] and eps_minus = -eps_plus."""
    eps_plus = np.arccos(dispersion_cos(kind, theta1, theta2, gamma, k))
    return eps_plus, -eps_plus


@dataclass(frozen=True)
class BandPoint:
    """Both quasi-energy branches at one momentum."""

    k: float
    eps_plus: complex
    eps_minus: complex

    @property
    def lambda_plus(self):
        return complex(np.exp(-1j * self.eps_plus))

    @property
    def lambda_minus(self):
        return complex(np.exp(-1j * self.eps_minus))


def dispersion_u1(theta1, theta2, gamma, k):
    """Band point of the gain/loss-alternating walk at momentum k."""
    ep, em = band_quasi_energies(WalkKind.U1_PT, theta1, theta2, gamma, k)
    return BandPoint(float(k), complex(ep), complex(em))


def dispersion_u2(theta1, theta2, gamma, k):
    """Band point of the uniform-gain walk at momentum k."""
    ep, em = band_quasi_energies(WalkKind.U2_TRS, theta1, theta2, gamma, k)
    return BandPoint(float(k), complex(ep), complex(em))


# --- momentum grids ---

def momentum_grid(num_k):
    """num_k momenta uniform over (-pi, pi], endpoint included, ascending."""
    if num_k < 1:
        raise ValueError("num_k must be >= 1")
    j = np.arange(num_k)
    return -np.pi + 2 * np.pi * (j + 1) / num_k


def quantized_momenta(lattice):
    """Ring momenta k_m = 2 pi m / N folded into (-pi, pi], ascending."""
    n = lattice.num_sites
    k = 2 * np.pi * np.arange(n) / n
    k = np.where(k > np.pi + 1e-15, k - 2 * np.pi, k)
    return np.sort(k)


@dataclass(frozen=True)
class BandScan:
    """Dispersion sampled on a uniform momentum grid, both bands."""

    kind: WalkKind
    theta1: float
    theta2: float
    gamma: float
    momenta: np.ndarray
    eps_plus: np.ndarray
    eps_minus: np.ndarray

    @property
    def lambda_plus(self):
        return np.exp(-1j * self.eps_plus)

    @property
    def lambda_minus(self):
        return np.exp(-1j * self.eps_minus)

    @property
    def max_imag(self):
        return float(np.abs(self.eps_plus.imag).max())

    @property
    def points(self):
        return tuple(
            BandPoint(float(self.momenta[i]),
                      complex(self.eps_plus[i]), complex(self.eps_minus[i]))
            for i in range(len(self.momenta))
        )


def band_scan(kind, theta1, theta2, gamma, num_k):
    """Evaluate the matching dispersion on a uniform num_k grid over (-pi, pi]."""
    if num_k < 2:
        raise ValueError("num_k must be >= 2")
    momenta = momentum_grid(num_k)
    eps_plus, eps_minus = band_quasi_energies(kind, theta1, theta2, gamma, momenta)
    return BandScan(kind, float(theta1), float(theta2), float(gamma),
                    momenta, eps_plus, eps_minus)


# --- critical gain of the gain/loss-alternating walk ---

def _band_excess(theta1, theta2, gamma):
    # max over k of |cos eps| - 1; the extremes sit at cos 2k = +-1
    a = abs(np.cos(theta1) * np.cos(theta2))
    b = abs(np.sin(theta1) * np.sin(theta2))
    return a + b * np.cosh(2 * gamma) - 1.0


def critical_gain_u1(theta1, theta2, tol=1e-12, max_gamma=64.0):
    """Smallest gamma >= 0 where the U1 dispersion first leaves the real band.

    The quasi-energy turns complex where max_k |cos eps| crosses 1, i.e. at
    |cos t1 cos t2| + |sin t1 sin t2| cosh 2g = 1. Bisection to absolute
    tolerance tol. Returns None when sin(t1) sin(t2) = 0: there gamma drops
    out of the band edge and no transition exists at any finite gain.
    """
    if np.sin(theta1) * np.sin(theta2) == 0.0:
        return None
    lo, hi = 0.0, 1.0
    if _band_excess(theta1, theta2, lo) >= 0.0:
        return 0.0
    while _band_excess(theta1, theta2, hi) < 0.0:
        hi *= 2.0
        if hi > max_gamma:
            return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _band_excess(theta1, theta2, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- oracles ---

def verify_bloch_vs_lattice(kind, theta1, theta2, gamma, num_sites, tol=1e-9):
    """Max matched distance between lattice eigenvalues and Bloch predictions.

    The 2N-dim homogeneous walk spectrum must equal {exp(-i eps_pm(k_m))}
    over the N quantized ring momenta; tol is passed to the eigensolver's
    residual gate. Matching is optimal one-to-one, so the returned mismatch
    is a true multiset distance.
    """
    lattice = LatticeSpec(num_sites)
    field = CoinField.homogeneous(theta1, theta2, lattice)
    spectrum = eigendecompose(compose_walk(kind, field, gamma, lattice), tol=tol)
    eps_plus, eps_minus = band_quasi_energies(
        kind, theta1, theta2, gamma, quantized_momenta(lattice)
    )
    predicted = np.concatenate([np.exp(-1j * eps_plus), np.exp(-1j * eps_minus)])
    _, mismatch = pair_spectra(spectrum.eigenvalues, predicted)
    return mismatch


def dispersion_trace_defect(kind, theta1, theta2, gamma, momenta):
    """Max |closed form - tr U(k)/2| over the momenta; the trace identity check."""
    worst = 0.0
    for k in np.atleast_1d(momenta):
        half_trace = np.trace(bloch_matrix(kind, theta1, theta2, gamma, k).matrix) / 2.0
        closed = complex(dispersion_cos(kind, theta1, theta2, gamma, float(k)))
        worst = max(worst, abs(closed - half_trace))
    return float(worst)


# --- elemental momentum-cell symmetry relations ---

def _antiunitary_conjugate(w, m):
    # X = w K acting by similarity: X m X^-1 = w conj(m) w^-1 (w unitary)
    return w @ np.conj(m) @ w.conj().T


_RELATIONS = (
    # (name, w, conjugate?, build(v), expected(v)) with v the scanned variable
    ("T:coin", SIGMA1, True, coin_cell, lambda t: coin_cell(-t)),
    ("T:shift", SIGMA1, True, shift_cell, shift_cell),
    ("T:gain", SIGMA1, True, gain_cell, lambda g: gain_cell(-g)),
    ("P:coin", SIGMA1, False, coin_cell, coin_cell),
    ("P:shift", SIGMA1, False, shift_cell, lambda k: shift_cell(-k)),
    ("P:gain", SIGMA1, False, gain_cell, lambda g: gain_cell(-g)),
    ("PT:coin", SIGMA0, True, coin_cell, lambda t: coin_cell(-t)),
    ("PT:shift", SIGMA0, True, shift_cell, lambda k: shift_cell(-k)),
    ("PT:gain", SIGMA0, True, gain_cell, gain_cell),
)


@dataclass(frozen=True)
class ElementalReport:
    """Max Frobenius residual per elemental relation over the scan grid."""

    residuals: dict
    grid_points: int
    tol: float

    @property
    def max_residual(self):
        return max(self.residuals.values())

    @property
    def passed(self):
        return self.max_residual < self.tol


def verify_elemental_relations(tol=1e-14, num_points=11):
    """Scan the nine P/T/PT transformation rules of coin, shift, and gain cells.

    T acts as sigma1 K, P as sigma1, PT as plain K in coin space. Coin and
    shift arguments run over [-pi, pi], the gain exponent over [-1, 1],
    num_points each. Residuals are Frobenius norms of 2x2 defects; all nine
    identities are exact, so anything above a few machine epsilons signals
    a broken convention.
    """
    angles = np.linspace(-np.pi, np.pi, num_points)
    gammas = np.linspace(-1.0, 1.0, num_points)
    residuals = {}
    for name, w, conj, build, expected in _RELATIONS:
        values = gammas if name.endswith(":gain") else angles
        worst = 0.0
        for v in values:
            m = build(v)
            got = _antiunitary_conjugate(w, m) if conj else w @ m @ w.conj().T
            worst = max(worst, float(np.linalg.norm(got - expected(v))))
        residuals[name] = worst
    return ElementalReport(residuals=residuals, grid_points=num_points, tol=tol)
