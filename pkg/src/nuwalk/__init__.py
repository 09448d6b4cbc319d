"""Spectral laboratory for 1D two-step quantum walks with gain and loss.

The package builds the two non-unitary walk variants (alternating gain/loss
and uniform gain), their momentum-space dispersions, dense spectra with
symmetry diagnostics, disordered-coin ensembles, and phase maps, and ships
a batch CLI that writes delimited/structured reports plus SVG figures.
"""

from ._version import __version__
from .errors import (
    DimensionError,
    SingularSpectrumError,
    SolverError,
    UnsupportedCaseError,
    VerificationError,
    WalkError,
)
from .operators import (
    BlochMatrix,
    CoinField,
    GainLossPair,
    LatticeSpec,
    SymmetryAction,
    WalkKind,
    WalkOperator,
    apply_symmetry,
    bloch_matrix,
    build_coin,
    build_gainloss,
    build_shift,
    build_symmetry,
    coin_cell,
    compose_walk,
    gain_cell,
    shift_cell,
    symmetry_unitary,
    timeframe_transform,
)
from .spectral import (
    DegeneracyCluster,
    EigenvectorSymmetryReport,
    RealityReport,
    Spectrum,
    check_antiunitary_relation,
    check_eigenvector_symmetry,
    classify_reality,
    cluster_degeneracies,
    eigendecompose,
    inversion_pairing_defect,
    pair_spectra,
    quasi_energies,
    spectrum_determinant_defect,
)
from .dispersion import (
    BandPoint,
    BandScan,
    ElementalReport,
    band_quasi_energies,
    band_scan,
    critical_gain_u1,
    dispersion_cos,
    dispersion_trace_defect,
    dispersion_u1,
    dispersion_u2,
    momentum_grid,
    quantized_momenta,
    verify_bloch_vs_lattice,
    verify_elemental_relations,
)
from .disorder import (
    CASES,
    DisorderSpec,
    EnsembleReport,
    PhaseMapGrid,
    RealizationResult,
    cell_master_seed,
    coin_stream,
    phase_map,
    realization_walk,
    run_ensemble,
    run_realization,
    sample_coin_field,
    symmetrize_reflect,
)
from .reporting import (
    FORMAT_ALIASES,
    REPORT_KINDS,
    ReportEnvelope,
    band_scan_envelope,
    ensemble_envelope,
    envelope_to_dict,
    make_envelope,
    parse_report,
    phase_map_envelope,
    read_csv_config,
    report_timestamp,
    serialize,
    spectrum_envelope,
    symmetry_envelope,
    verification_envelope,
    write_csv,
    write_json,
    write_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
