"""Elemental operators, walk operators, Bloch matrices, and symmetry actions.

Basis convention (module-wide contract): the state index is 2*n + s with
site n in {0, ..., N-1} and internal state s = 0 for the left mover (L),
s = 1 for the right mover (R). The lattice is a periodic ring; the shift
moves L movers from n to n-1 and R movers from n to n+1, both mod N.

The two walk kinds are

    U1 (PT):  S G(+gamma) C(theta2) S G(-gamma) C(theta1)
    U2 (TRS): S G(+gamma) C(theta2) S G(+gamma) C(theta1)

composed rightmost factor first. By default ``compose_walk`` returns the
operator in the symmetry time frame, i.e. conjugated by C(theta1/2), which
is the frame where the canonical relations PT U1 PT^-1 = U1^-1 and
T U2 T^-1 = U2^-1 hold at machine precision. The plain factor order is
available with frame="plain"; the two are similar, so spectra agree.
"""

from dataclasses import dataclass, field as dataclass_field
from enum import Enum

import numpy as np

from .errors import DimensionError

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


class WalkKind(Enum):
    """The two-step walk variants: PT-symmetric and time-reversal symmetric."""

    U1_PT = "u1"
    U2_TRS = "u2"


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic 1D lattice with num_sites sites and a 2-dim coin per site.

    N = 1 is allowed as a degenerate convenience (the shift wraps onto the
    identity); physical runs use N >= 8.
    """

    num_sites: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.num_sites < 1:
            raise ValueError(f"num_sites must be >= 1, got {self.num_sites}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    @property
    def dim(self):
        return 2 * self.num_sites


@dataclass(frozen=True)
class CoinField:
    """Per-site coin angles theta1(n), theta2(n), in radians."""

    theta1: np.ndarray
    theta2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta1", np.asarray(self.theta1, dtype=float))
        object.__setattr__(self, "theta2", np.asarray(self.theta2, dtype=float))
        if self.theta1.ndim != 1 or self.theta2.ndim != 1:
            raise DimensionError("coin angle arrays must be one-dimensional")
        if len(self.theta1) != len(self.theta2):
            raise DimensionError(
                f"theta1 has {len(self.theta1)} sites, theta2 has {len(self.theta2)}"
            )

    @classmethod
    def homogeneous(cls, theta1, theta2, lattice):
        n = lattice.num_sites
        return cls(np.full(n, float(theta1)), np.full(n, float(theta2)))

    def is_homogeneous(self, atol=0.0):
        return (
            np.ptp(self.theta1) <= atol
            and np.ptp(self.theta2) <= atol
        )

    def __len__(self):
        return len(self.theta1)


@dataclass(frozen=True)
class GainLossPair:
    """Gain/loss exponents (gamma1, gamma2) for the two substeps."""

    gamma1: float
    gamma2: float

    @classmethod
    def for_kind(cls, kind, gamma):
        if kind == WalkKind.U1_PT:
            return cls(-gamma, gamma)
        return cls(gamma, gamma)


@dataclass(frozen=True)
class WalkOperator:
    """Dense complex operator on the 2N-dim state space, with provenance."""

    matrix: np.ndarray
    lattice: LatticeSpec
    kind: WalkKind | None = None
    coins: CoinField | None = None
    gains: GainLossPair | None = None
    frame: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.lattice.dim, self.lattice.dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match lattice dim {self.lattice.dim}"
            )


# --- coin-space (2x2) cells, shared with the dispersion module ---

def coin_cell(theta):
    """2x2 coin e^{i theta sigma1} = [[cos, i sin], [i sin, cos]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]])


def shift_cell(k):
    """Momentum-space shift diag(e^{ik}, e^{-ik})."""
    return np.array([[np.exp(1j * k), 0.0], [0.0, np.exp(-1j * k)]])


def gain_cell(gamma):
    """Gain/loss diag(e^{gamma}, e^{-gamma})."""
    return np.array([[np.exp(gamma), 0.0], [0.0, np.exp(-gamma)]], dtype=complex)


# --- position-space builders ---

def build_coin(field, which, lattice):
    """Block-diagonal coin operator from coin `which` (1 or 2) of the field."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    theta = field.theta1 if which == 1 else field.theta2
    if len(theta) != lattice.num_sites:
        raise DimensionError(
            f"field has {len(theta)} sites, lattice has {lattice.num_sites}"
        )
    return WalkOperator(_coin_matrix(theta), lattice)


def _coin_matrix(theta):
    n = len(theta)
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    idx = 2 * np.arange(n)
    c, s = np.cos(theta), 1j * np.sin(theta)
    m[idx, idx] = c
    m[idx + 1, idx + 1] = c
    m[idx, idx + 1] = s
    m[idx + 1, idx] = s
    return m


def build_shift(lattice):
    """Permutation: (n, L) -> (n-1 mod N, L); (n, R) -> (n+1 mod N, R)."""
    n = lattice.num_sites
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    sites = np.arange(n)
    m[2 * ((sites - 1) % n), 2 * sites] = 1.0
    m[2 * ((sites + 1) % n) + 1, 2 * sites + 1] = 1.0
    return WalkOperator(m, lattice)


def build_gainloss(gamma, lattice):
    """Block-diagonal diag(e^gamma, e^-gamma) at every site."""
    if not np.isfinite(gamma):
        raise ValueError("gamma must be finite")
    d = np.empty(lattice.dim)
    d[0::2] = np.exp(gamma)
    d[1::2] = np.exp(-gamma)
    return WalkOperator(np.diag(d).astype(complex), lattice)


def compose_walk(kind, field, gamma, lattice, frame="symmetry"):
    """Two-step walk operator of the given kind.

    frame="symmetry" (default) returns C(theta1/2) U C(theta1/2)^-1, the
    frame in which the anti-unitary relations close; frame="plain" returns
    the literal factor order. Spectra are identical (similarity).
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0; the sign structure is fixed by kind")
    if frame not in ("symmetry", "plain"):
        raise ValueError(f"unknown frame {frame!r}")
    if len(field) != lattice.num_sites:
        raise DimensionError(
            f"field has {len(field)} sites, lattice has {lattice.num_sites}"
        )
    gains = GainLossPair.for_kind(kind, gamma)
    s = build_shift(lattice).matrix
    g1 = build_gainloss(gains.gamma1, lattice).matrix
    g2 = build_gainloss(gains.gamma2, lattice).matrix
    c1 = _coin_matrix(field.theta1)
    c2 = _coin_matrix(field.theta2)
    u = s @ g2 @ c2 @ s @ g1 @ c1
    if frame == "symmetry":
        half = _coin_matrix(field.theta1 / 2.0)
        half_inv = _coin_matrix(-field.theta1 / 2.0)
        u = half @ u @ half_inv
    return WalkOperator(u, lattice, kind=kind, coins=field, gains=gains, frame=frame)


# --- Bloch (momentum) representation ---

@dataclass(frozen=True)
class BlochMatrix:
    """2x2 momentum-space walk matrix at momentum k."""

    matrix: np.ndarray
    momentum: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DimensionError(f"Bloch matrix must be 2x2, got {m.shape}")
        object.__setattr__(self, "matrix", m)


def bloch_matrix(kind, theta1, theta2, gamma, k):
    """Plain-frame Bloch product S(k) G(g2) C(theta2) S(k) G(g1) C(theta1)."""
    gains = GainLossPair.for_kind(kind, gamma)
    m = (
        shift_cell(k)
        @ gain_cell(gains.gamma2)
        @ coin_cell(theta2)
        @ shift_cell(k)
        @ gain_cell(gains.gamma1)
        @ coin_cell(theta1)
    )
    return BlochMatrix(m, float(k))


def timeframe_transform(b, theta1):
    """Similarity transform into the symmetry time frame: C(t/2) M C(-t/2)."""
    m = coin_cell(theta1 / 2.0) @ b.matrix @ coin_cell(-theta1 / 2.0)
    return BlochMatrix(m, b.momentum)


# --- symmetry actions ---

@dataclass(frozen=True)
class SymmetryAction:
    """An (anti)unitary action: site permutation x coin unitary (x conjugation).

    Vector action order: permute sites, apply coin_part per site, then
    conjugate if conjugate=True. Matrix action: W conj?(M) W^-1 with
    W = permutation (x) coin_part. The two orderings agree whenever
    coin_part is real, which covers P, T, and PT here.
    """

    name: str
    coin_part: np.ndarray
    position_map: str  # "identity" | "reflect"
    conjugate: bool

    def __post_init__(self):
        object.__setattr__(self, "coin_part", np.asarray(self.coin_part, dtype=complex))
        if self.coin_part.shape != (2, 2):
            raise DimensionError("coin_part must be 2x2")
        if self.position_map not in ("identity", "reflect"):
            raise ValueError(f"unknown position_map {self.position_map!r}")


def build_symmetry(name, lattice=None):
    """P = (reflect, sigma1), T = (identity, sigma1, K), PT = (reflect, 1, K).

    Reflection on the ring is n -> (-n) mod N, fixed point at site 0.
    The lattice argument is accepted for interface symmetry; actions are
    lattice-size agnostic.
    """
    name = name.upper()
    if name == "P":
        return SymmetryAction("P", SIGMA1, "reflect", False)
    if name == "T":
        return SymmetryAction("T", SIGMA1, "identity", True)
    if name == "PT":
        return SymmetryAction("PT", SIGMA0, "reflect", True)
    raise ValueError(f"unknown symmetry {name!r}; expected P, T, or PT")


def _site_permutation(action, num_sites):
    sites = np.arange(num_sites)
    if action.position_map == "reflect":
        return (-sites) % num_sites
    return sites


def symmetry_unitary(action, num_sites):
    """The unitary part W = permutation (x) coin_part as a dense matrix."""
    w = np.zeros((2 * num_sites, 2 * num_sites), dtype=complex)
    dest = _site_permutation(action, num_sites)
    for n in range(num_sites):
        w[2 * dest[n]:2 * dest[n] + 2, 2 * n:2 * n + 2] = action.coin_part
    return w


def apply_symmetry(action, x):
    """Apply the action to a 2N-vector (A x) or a 2N x 2N matrix (A M A^-1)."""
    x = np.asarray(x, dtype=complex)
    if x.shape[0] % 2 != 0:
        raise DimensionError("state dimension must be even (2 per site)")
    num_sites = x.shape[0] // 2
    if x.ndim == 1:
        v = x.reshape(num_sites, 2)
        v = v[_inverse_permutation(action, num_sites)]  # amplitude at n moves to map(n)
        v = v @ action.coin_part.T
        v = v.reshape(2 * num_sites)
        return np.conj(v) if action.conjugate else v
    if x.ndim == 2 and x.shape[0] == x.shape[1]:
        w = symmetry_unitary(action, num_sites)
        m = np.conj(x) if action.conjugate else x
        return w @ m @ w.conj().T
    raise DimensionError(f"expected a 2N vector or 2N x 2N matrix, got shape {x.shape}")


def _inverse_permutation(action, num_sites):
    # reflection is an involution, identity trivially so; inverse = itself
    return _site_permutation(action, num_sites)
