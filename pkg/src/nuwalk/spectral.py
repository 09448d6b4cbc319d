"""Dense spectral engine: eigensystems, quasi-energies, reality tests, pairing.

Quasi-energies are defined through lambda = exp(-i eps), i.e. eps = i log lambda
with Re eps in (-pi, pi] and Im eps = ln|lambda|. A unimodular eigenvalue is
therefore the same thing as a real quasi-energy, up to the reality tolerance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, SingularSpectrumError, SolverError
from .operators import WalkOperator, apply_symmetry

MAX_DENSE_DIM = 4096  # practical ceiling; anything through 512 is routine


def _as_matrix(u):
    m = u.matrix if isinstance(u, WalkOperator) else np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def _as_eigenvalues(s):
    if isinstance(s, Spectrum):
        return s.eigenvalues
    return np.asarray(s, dtype=complex)


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition sorted by quasi-energy (Re, then Im).

    eigenvectors holds unit-norm right eigenvectors in columns; the phase of
    each is fixed by making its largest-modulus component real positive.
    residuals[j] = ||U v_j - lambda_j v_j||_2.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    operator_norm: float

    @property
    def dim(self):
        return len(self.eigenvalues)


def eigendecompose(u, tol=1e-9):
    """Full dense eigensystem of a walk operator with a residual gate.

    Raises SolverError if the solver fails to converge or any residual
    exceeds tol * ||U||_F. Dimensions through 512 are routine; a hard
    ceiling guards against accidentally dense-solving huge operators.
    """
    m = _as_matrix(u)
    if m.shape[0] > MAX_DENSE_DIM:
        raise DimensionError(
            f"dimension {m.shape[0]} exceeds dense ceiling {MAX_DENSE_DIM}"
        )
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    try:
        lam, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as err:
        raise SolverError(f"eigensolver did not converge: {err}") from err

    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    anchor = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[anchor, np.arange(vecs.shape[1])]
    vecs = vecs / (pivots / np.abs(pivots))

    norm = float(np.linalg.norm(m))
    residuals = np.linalg.norm(m @ vecs - vecs * lam, axis=0)
    worst = float(residuals.max()) if len(residuals) else 0.0
    if worst > tol * norm:
        raise SolverError(
            f"eigenpair residual {worst:.3e} exceeds {tol:.1e} * ||U||_F = {tol * norm:.3e}"
        )

    eps = quasi_energies(lam)
    order = np.lexsort((eps.imag, eps.real))
    return Spectrum(lam[order], vecs[:, order], residuals[order], norm)


def quasi_energies(s):
    """eps = i log lambda: Re eps = -arg lambda in (-pi, pi], Im eps = ln|lambda|.

    With this branch, exp(-i eps) reproduces lambda (lambda = 2 maps to
    eps = i ln 2). Accepts a Spectrum or a bare eigenvalue array.
    """
    lam = _as_eigenvalues(s)
    mod = np.abs(lam)
    if np.any(mod == 0.0) or not np.all(np.isfinite(lam)):
        raise SingularSpectrumError("zero or non-finite eigenvalue has no quasi-energy")
    re = -np.angle(lam)
    re = np.where(re <= -np.pi, re + 2 * np.pi, re)  # fold -pi onto +pi
    return re + 1j * np.log(mod)


def spectrum_determinant_defect(s):
    """|prod lambda - 1|; the walk has unit determinant, so this gauges drift."""
    return float(np.abs(np.prod(_as_eigenvalues(s)) - 1.0))


@dataclass(frozen=True)
class RealityReport:
    """Unimodularity census at absolute tolerance tolerance_used on ||lambda| - 1|."""

    on_circle_flags: np.ndarray
    max_modulus_deviation: float
    num_complex: int
    complex_fraction: float
    tolerance_used: float

    @property
    def fully_real(self):
        return self.num_complex == 0

    @property
    def num_unimodular(self):
        return len(self.on_circle_flags) - self.num_complex


def classify_reality(s, tol=1e-8):
    """Flag eigenvalues off the unit circle; off-circle <=> complex quasi-energy."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    lam = _as_eigenvalues(s)
    dev = np.abs(np.abs(lam) - 1.0)
    flags = dev <= tol
    num_complex = int(np.count_nonzero(~flags))
    return RealityReport(
        on_circle_flags=flags,
        max_modulus_deviation=float(dev.max()),
        num_complex=num_complex,
        complex_fraction=num_complex / len(lam),
        tolerance_used=tol,
    )


def pair_spectra(left, right):
    """Optimal one-to-one matching of two eigenvalue multisets.

    Returns (permutation, max_distance) minimizing the total |l_i - r_perm(i)|
    over all pairings, so the reported defect is not an artifact of match
    order inside near-degenerate clusters.
    """
    a = _as_eigenvalues(left)
    b = _as_eigenvalues(right)
    if a.shape != b.shape:
        raise DimensionError("spectra must have equal length to pair")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max())


def inversion_pairing_defect(s):
    """Max matched distance between {lambda} and {1 / conj(lambda)}.

    Spectra of walks with an intact anti-unitary symmetry close under
    lambda -> 1/lambda*; this measures how far a spectrum is from closure.
    """
    lam = _as_eigenvalues(s)
    if np.any(lam == 0.0):
        raise SingularSpectrumError("zero eigenvalue cannot be inverted")
    _, defect = pair_spectra(lam, 1.0 / np.conj(lam))
    return defect


def check_antiunitary_relation(u, a):
    """Relative Frobenius defect of the symmetry relation for action a on u.

    Anti-unitary actions (T, PT) are held to A U A^-1 = U^-1; the unitary
    parity action is held to A U A^-1 = U. Returns
    ||A U A^-1 - U^(-+1)||_F / ||U||_F.
    """
    m = _as_matrix(u)
    if a.conjugate:
        try:
            target = np.linalg.inv(m)
        except np.linalg.LinAlgError as err:
            raise SingularSpectrumError(
                "operator is singular; inverse-target relation undefined"
            ) from err
    else:
        target = m
    transformed = apply_symmetry(a, m)
    return float(np.linalg.norm(transformed - target) / np.linalg.norm(m))


@dataclass(frozen=True)
class EigenvectorSymmetryReport:
    """Per-eigenvector symmetry phases and residuals under an anti-unitary action.

    For isolated eigenvalues: deltas[j] = arg <v_j, A v_j> and
    residuals[j] = ||A v_j - exp(i delta_j) v_j||_2 (the phase choice that
    minimizes the residual). Eigenvalues closer than the degeneracy tolerance
    are grouped; per-vector phases are ill-posed there, so each group member
    instead carries the group's subspace-invariance residual (sine of the
    largest principal angle between span(V) and A span(V)) and delta = NaN.
    Zero-overlap vectors keep a NaN phase and are listed in zero_overlap.
    """

    deltas: np.ndarray
    residuals: np.ndarray
    degenerate_groups: tuple
    zero_overlap: tuple

    @property
    def max_residual(self):
        return float(np.nanmax(self.residuals))


def check_eigenvector_symmetry(s, a, degeneracy_tol=1e-6, zero_tol=1e-12):
    """Test A v_j = exp(i delta_j) v_j for every eigenvector of the spectrum."""
    n = s.dim
    deltas = np.full(n, np.nan)
    residuals = np.full(n, np.nan)
    zero_overlap = []
    groups = []
    for cluster in cluster_degeneracies(s, tol=degeneracy_tol):
        members = cluster.indices
        if cluster.multiplicity == 1:
            j = members[0]
            v = s.eigenvectors[:, j]
            av = apply_symmetry(a, v)
            overlap = np.vdot(v, av)
            if np.abs(overlap) < zero_tol:
                zero_overlap.append(j)
                residuals[j] = float(np.linalg.norm(av - v))
                continue
            deltas[j] = _principal_angle(np.angle(overlap))
            residuals[j] = float(np.linalg.norm(av - np.exp(1j * deltas[j]) * v))
        else:
            groups.append(members)
            block = s.eigenvectors[:, list(members)]
            ablock = np.column_stack(
                [apply_symmetry(a, block[:, i]) for i in range(block.shape[1])]
            )
            angles = subspace_angles(block, ablock)
            group_residual = float(np.sin(angles).max()) if len(angles) else 0.0
            for j in members:
                residuals[j] = group_residual
    return EigenvectorSymmetryReport(
        deltas=deltas,
        residuals=residuals,
        degenerate_groups=tuple(tuple(g) for g in groups),
        zero_overlap=tuple(zero_overlap),
    )


def _principal_angle(phi):
    # fold onto (-pi, pi], mapping the -pi edge case up
    if phi <= -np.pi:
        return phi + 2 * np.pi
    return phi


@dataclass(frozen=True)
class DegeneracyCluster:
    """A group of eigenvalues within clustering tolerance of each other."""

    indices: tuple
    mean_eigenvalue: complex
    multiplicity: int
    smallest_singular_value: float

    @property
    def defective(self):
        # eigenvectors fail to span a subspace of full multiplicity
        return self.smallest_singular_value < 1e-8


def cluster_degeneracies(s, tol=1e-6):
    """Union-find clustering of eigenvalues; flags defective clusters.

    Two eigenvalues land in one cluster when |l_i - l_j| <= tol (transitively
    closed). For each cluster the stacked eigenvectors are rank-checked via
    their smallest singular value, since near-defective pairs keep distinct
    eigenvalues while their eigenvectors collapse onto each other.
    """
    lam = s.eigenvalues
    n = len(lam)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.lexsort((lam.imag, lam.real))
    for a in range(n):
        for b in range(a + 1, n):
            i, j = order[a], order[b]
            if lam[j].real - lam[i].real > tol:
                break
            if abs(lam[i] - lam[j]) <= tol:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    clusters = []
    for members in groups.values():
        members = tuple(sorted(members))
        block = s.eigenvectors[:, list(members)]
        svals = np.linalg.svd(block, compute_uv=False)
        clusters.append(
            DegeneracyCluster(
                indices=members,
                mean_eigenvalue=complex(lam[list(members)].mean()),
                multiplicity=len(members),
                smallest_singular_value=float(svals.min()),
            )
        )
    clusters.sort(key=lambda c: (c.mean_eigenvalue.real, c.mean_eigenvalue.imag))
    return clusters
