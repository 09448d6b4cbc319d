"""Disordered ensembles: sampling, reality censuses, and phase maps.

Case table (fixed contract; the mapping never depends on parameters):

    case  walk kind        theta1      theta2
    A     gain/loss (U1)   random      constant
    B     gain/loss (U1)   random      random
    C     uniform (U2)     random      constant
    D     uniform (U2)     random      random

Random coins draw i.i.d. per site from the box
[mean - half_width, mean + half_width], default half_width pi/4.

Seeding is hierarchical and replayable: realization r of an ensemble with
master seed M draws coin i from default_rng(SeedSequence((M, r, i))), so any
single realization regenerates without replaying the ensemble and the two
coins never share a stream. Phase-map cell (i, j) derives its own ensemble
master from SeedSequence((M, i, j)). Serial and parallel sweeps therefore
produce identical reports.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, UnsupportedCaseError
from .operators import (
    CoinField,
    LatticeSpec,
    WalkKind,
    build_symmetry,
    compose_walk,
)
from .spectral import (
    EigenvectorSymmetryReport,
    RealityReport,
    check_eigenvector_symmetry,
    classify_reality,
    eigendecompose,
)

CASES = ("A", "B", "C", "D")

_CASE_KIND = {
    "A": WalkKind.U1_PT,
    "B": WalkKind.U1_PT,
    "C": WalkKind.U2_TRS,
    "D": WalkKind.U2_TRS,
}

_CASE_RANDOM = {
    # (theta1 random, theta2 random)
    "A": (True, False),
    "B": (True, True),
    "C": (True, False),
    "D": (True, True),
}


@dataclass(frozen=True)
class DisorderSpec:
    """Full recipe for one disordered ensemble.

    mean_theta2 is the box center when case makes theta2 random, otherwise
    the constant value of that coin. gamma is the gain exponent (e^gamma is
    the amplification per substep).
    """

    case: str
    mean_theta1: float
    mean_theta2: float
    gamma: float
    lattice: LatticeSpec
    master_seed: int
    half_width: float = np.pi / 4

    def __post_init__(self):
        object.__setattr__(self, "case", str(self.case).upper())
        if self.case not in CASES:
            raise UnsupportedCaseError(
                f"unknown case {self.case!r}; expected one of {CASES}"
            )
        if self.half_width < 0:
            raise ValueError("half_width must be >= 0")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a nonnegative integer")

    @property
    def walk_kind(self):
        return _CASE_KIND[self.case]

    @property
    def randomized(self):
        return _CASE_RANDOM[self.case]


def coin_stream(spec, realization_index, coin_index):
    """The PRNG for one coin of one realization; independent across both indices."""
    seq = np.random.SeedSequence(
        entropy=(int(spec.master_seed), int(realization_index), int(coin_index))
    )
    return np.random.default_rng(seq)


def sample_coin_field(spec, realization_index):
    """Draw the coin field for one realization of the ensemble."""
    n = spec.lattice.num_sites
    rand1, rand2 = spec.randomized
    if rand1:
        rng = coin_stream(spec, realization_index, 1)
        theta1 = rng.uniform(
            spec.mean_theta1 - spec.half_width, spec.mean_theta1 + spec.half_width, n
        )
    else:
        theta1 = np.full(n, spec.mean_theta1)
    if rand2:
        rng = coin_stream(spec, realization_index, 2)
        theta2 = rng.uniform(
            spec.mean_theta2 - spec.half_width, spec.mean_theta2 + spec.half_width, n
        )
    else:
        theta2 = np.full(n, spec.mean_theta2)
    return CoinField(theta1, theta2)


def realization_walk(spec, realization_index, frame="symmetry"):
    """The case's walk operator for one sampled realization."""
    field = sample_coin_field(spec, realization_index)
    return compose_walk(spec.walk_kind, field, spec.gamma, spec.lattice, frame=frame)


def symmetrize_reflect(values):
    """Mirror a per-site array through site 0: out[(N - n) mod N] = out[n].

    Sites 0 and N/2 (even N) are reflection fixed points and keep their
    values; every other mirror pair takes the lower-index value. A disordered
    field symmetrized this way restores the reflection half of PT by hand.
    """
    out = np.array(values, dtype=float, copy=True)
    n = len(out)
    for i in range(1, n // 2 + 1):
        out[(n - i) % n] = out[i]
    return out


@dataclass(frozen=True)
class RealizationResult:
    """Census of a single disordered realization."""

    realization_index: int
    seed_used: int
    reality: RealityReport
    eigenvector_symmetry: EigenvectorSymmetryReport | None = None


def run_realization(spec, index, check_T_vectors=False, reality_tol=1e-8,
                    frame="symmetry"):
    """Sample, compose, decompose, and census one realization.

    When check_T_vectors is set and the case runs the uniform-gain walk
    (C or D), every eigenvector is additionally tested against the
    time-reversal action. Solver failures carry the (master_seed, index)
    pair needed to reproduce the realization.
    """
    walk = realization_walk(spec, index, frame=frame)
    try:
        spectrum = eigendecompose(walk)
    except SolverError as err:
        raise SolverError(
            str(err),
            seed_info={"master_seed": spec.master_seed, "realization_index": index},
        ) from err
    reality = classify_reality(spectrum, tol=reality_tol)
    vec_report = None
    if check_T_vectors and spec.walk_kind == WalkKind.U2_TRS:
        vec_report = check_eigenvector_symmetry(spectrum, build_symmetry("T"))
    return RealizationResult(
        realization_index=index,
        seed_used=spec.master_seed,
        reality=reality,
        eigenvector_symmetry=vec_report,
    )


@dataclass(frozen=True)
class EnsembleReport:
    """Reality census over an ensemble of disordered realizations."""

    spec: DisorderSpec
    num_realizations: int
    per_realization: tuple
    failures: tuple
    reality_tol: float

    @property
    def complex_fractions(self):
        return np.array([r.reality.complex_fraction for r in self.per_realization])

    @property
    def any_complex(self):
        return any(r.reality.num_complex > 0 for r in self.per_realization)

    @property
    def mean_complex_fraction(self):
        return float(self.complex_fractions.mean())

    @property
    def fully_real_count(self):
        return sum(1 for r in self.per_realization if r.reality.fully_real)

    @property
    def max_modulus_deviations(self):
        return np.array(
            [r.reality.max_modulus_deviation for r in self.per_realization]
        )


def run_ensemble(spec, num_realizations, check_T_vectors=False, reality_tol=1e-8,
                 frame="symmetry"):
    """Census num_realizations independent realizations (indices 0..R-1).

    Solver failures on individual realizations land in report.failures as
    (index, message) instead of aborting the sweep; aggregates are taken
    over the realizations that completed.
    """
    if num_realizations < 1:
        raise ValueError("num_realizations must be >= 1")
    results = []
    failures = []
    for r in range(num_realizations):
        try:
            results.append(
                run_realization(spec, r, check_T_vectors=check_T_vectors,
                                reality_tol=reality_tol, frame=frame)
            )
        except SolverError as err:
            failures.append((r, str(err)))
    if not results:
        raise SolverError(
            "every realization failed to decompose",
            seed_info={"master_seed": spec.master_seed},
        )
    return EnsembleReport(
        spec=spec,
        num_realizations=num_realizations,
        per_realization=tuple(results),
        failures=tuple(failures),
        reality_tol=reality_tol,
    )


@dataclass(frozen=True)
class PhaseMapGrid:
    """Presence (any complex pair) and ratio (mean complex fraction) per cell."""

    case: str
    gamma: float
    axis1: np.ndarray
    axis2: np.ndarray
    presence: np.ndarray
    ratio: np.ndarray
    num_realizations: int
    lattice: LatticeSpec
    master_seed: int
    reality_tol: float
    failures: tuple


def cell_master_seed(master_seed, i, j):
    """Derived ensemble master for grid cell (i, j); stable and collision-free."""
    seq = np.random.SeedSequence(entropy=(int(master_seed), int(i), int(j)))
    return int(seq.generate_state(1)[0])


def phase_map(case, axis1_grid, axis2_grid, num_realizations, gamma, lattice,
              master_seed, reality_tol=1e-8):
    """Sweep ensemble censuses over a grid of coin-angle parameters.

    axis1 holds mean theta1 values; axis2 holds theta2 values (the box mean
    when case D randomizes that coin, the constant otherwise). Cell (i, j)
    runs its own ensemble under a derived master seed, so maps reproduce
    cell by cell and parallel evaluation changes nothing.

    Case B is refused: with both coins of the gain/loss-alternating walk
    random, no realization keeps a real spectrum anywhere on the grid, so a
    presence/ratio map carries no structure to draw.
    """
    case = str(case).upper()
    if case not in ("A", "C", "D"):
        raise UnsupportedCaseError(f"phase maps cover cases A, C, D; got {case!r}")
    axis1 = np.atleast_1d(np.asarray(axis1_grid, dtype=float))
    axis2 = np.atleast_1d(np.asarray(axis2_grid, dtype=float))
    if len(axis1) == 0 or len(axis2) == 0:
        raise ValueError("phase-map grids must be non-empty")
    presence = np.zeros((len(axis1), len(axis2)), dtype=bool)
    ratio = np.zeros((len(axis1), len(axis2)))
    failures = []
    for i, t1 in enumerate(axis1):
        for j, t2 in enumerate(axis2):
            spec = DisorderSpec(
                case=case,
                mean_theta1=float(t1),
                mean_theta2=float(t2),
                gamma=gamma,
                lattice=lattice,
                master_seed=cell_master_seed(master_seed, i, j),
            )
            report = run_ensemble(spec, num_realizations, reality_tol=reality_tol)
            presence[i, j] = report.any_complex
            ratio[i, j] = report.mean_complex_fraction
            for r, msg in report.failures:
                failures.append((i, j, r, msg))
    return PhaseMapGrid(
        case=case,
        gamma=gamma,
        axis1=axis1,
        axis2=axis2,
        presence=presence,
        ratio=ratio,
        num_realizations=num_realizations,
        lattice=lattice,
        master_seed=master_seed,
        reality_tol=reality_tol,
        failures=tuple(failures),
    )
