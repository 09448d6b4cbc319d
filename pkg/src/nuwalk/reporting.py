"""Report envelopes and the delimited/structured serialization they share.

Every CLI run produces one envelope: a kind tag, tool version, timestamp,
the fully resolved configuration, scalar summary facts, and a rectangular
table. The structured format is JSON and keeps full float precision
(shortest round-trip repr); the delimited format is CSV with %.17g floats,
a comment block carrying the same provenance, one header row, LF line
endings, UTF-8. Both round-trip losslessly through parse_report.

Timestamps honor SOURCE_DATE_EPOCH so archived reports can be reproduced
byte for byte; otherwise the current UTC time is stamped.
"""

import csv
import io
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ._version import __version__

REPORT_KINDS = (
    "band_scan",
    "spectrum_summary",
    "ensemble_report",
    "phase_map",
    "symmetry_report",
    "verification_report",
)

FORMAT_ALIASES = {
    "csv": "csv",
    "delimited-text": "csv",
    "json": "json",
    "structured-record": "json",
}


@dataclass(frozen=True)
class ReportEnvelope:
    kind: str
    tool_version: str
    created_at: str
    config: dict
    summary: dict
    columns: tuple
    rows: tuple

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row width {len(row)} does not match {len(self.columns)} columns"
                )


def report_timestamp():
    """ISO-8601 UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible runs."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.isoformat(timespec="seconds")


def _plain(value):
    """Coerce numpy scalars/arrays into builtin types so json stays lossless."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (np.complexfloating, complex)):
        raise TypeError("split complex values into _re/_im columns before reporting")
    return value


def make_envelope(kind, config, summary, columns, rows):
    return ReportEnvelope(
        kind=kind,
        tool_version=__version__,
        created_at=report_timestamp(),
        config=_plain(dict(config)),
        summary=_plain(dict(summary)),
        columns=tuple(columns),
        rows=tuple(tuple(_plain(v) for v in row) for row in rows),
    )


def envelope_to_dict(env):
    return {
        "kind": env.kind,
        "tool_version": env.tool_version,
        "created_at": env.created_at,
        "config": env.config,
        "summary": env.summary,
        "columns": list(env.columns),
        "rows": [list(r) for r in env.rows],
    }


def _csv_cell(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return value


def serialize(env, format="json"):
    """Serialize an envelope to bytes; format is 'json'/'structured-record'
    or 'csv'/'delimited-text'. Byte-stable for identical envelopes."""
    try:
        fmt = FORMAT_ALIASES[format]
    except KeyError:
        raise ValueError(f"unsupported format {format!r}") from None
    if fmt == "json":
        text = json.dumps(envelope_to_dict(env), indent=2, sort_keys=True) + "\n"
        return text.encode("utf-8")
    buf = io.StringIO()
    buf.write(f"# nuwalk {env.kind}\n")
    buf.write(f"# tool_version: {env.tool_version}\n")
    buf.write(f"# created_at: {env.created_at}\n")
    buf.write("# config: " + json.dumps(env.config, sort_keys=True) + "\n")
    buf.write("# summary: " + json.dumps(env.summary, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(env.columns)
    for row in env.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _typed_cell(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_report(data, format="json"):
    """Inverse of serialize: reconstruct the envelope from bytes."""
    try:
        fmt = FORMAT_ALIASES[format]
    except KeyError:
        raise ValueError(f"unsupported format {format!r}") from None
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    if fmt == "json":
        doc = json.loads(text)
        return ReportEnvelope(
            kind=doc["kind"],
            tool_version=doc["tool_version"],
            created_at=doc["created_at"],
            config=doc["config"],
            summary=doc["summary"],
            columns=tuple(doc["columns"]),
            rows=tuple(tuple(r) for r in doc["rows"]),
        )
    meta = {"kind": None, "tool_version": None, "created_at": None,
            "config": None, "summary": None}
    body = []
    for line in text.splitlines():
        if line.startswith("# nuwalk "):
            meta["kind"] = line[len("# nuwalk "):].strip()
        elif line.startswith("# tool_version: "):
            meta["tool_version"] = line[len("# tool_version: "):]
        elif line.startswith("# created_at: "):
            meta["created_at"] = line[len("# created_at: "):]
        elif line.startswith("# config: "):
            meta["config"] = json.loads(line[len("# config: "):])
        elif line.startswith("# summary: "):
            meta["summary"] = json.loads(line[len("# summary: "):])
        elif not line.startswith("#"):
            body.append(line)
    if any(v is None for v in meta.values()):
        missing = [k for k, v in meta.items() if v is None]
        raise ValueError(f"delimited report is missing provenance fields: {missing}")
    reader = csv.reader(body)
    table = [row for row in reader if row]
    if not table:
        raise ValueError("delimited report has no header row")
    columns = tuple(table[0])
    rows = tuple(tuple(_typed_cell(c) for c in row) for row in table[1:])
    return ReportEnvelope(columns=columns, rows=rows, **meta)


def write_report(env, path, format):
    with open(path, "wb") as fh:
        fh.write(serialize(env, format))


def write_json(env, path):
    write_report(env, path, "json")


def write_csv(env, path):
    write_report(env, path, "csv")


def read_csv_config(path):
    """Recover the embedded config from a delimited report (replayability)."""
    with open(path, "rb") as fh:
        return parse_report(fh.read(), "csv").config


# --- envelope builders for each payload kind ---

def band_scan_envelope(scan, config):
    lam_p, lam_m = scan.lambda_plus, scan.lambda_minus
    rows = [
        (
            float(scan.momenta[i]),
            float(scan.eps_plus[i].real), float(scan.eps_plus[i].imag),
            float(scan.eps_minus[i].real), float(scan.eps_minus[i].imag),
            float(lam_p[i].real), float(lam_p[i].imag),
            float(lam_m[i].real), float(lam_m[i].imag),
        )
        for i in range(len(scan.momenta))
    ]
    summary = {
        "num_momenta": len(scan.momenta),
        "max_abs_imag_eps": scan.max_imag,
    }
    columns = (
        "k",
        "eps_plus_re", "eps_plus_im",
        "eps_minus_re", "eps_minus_im",
        "lambda_plus_re", "lambda_plus_im",
        "lambda_minus_re", "lambda_minus_im",
    )
    return make_envelope("band_scan", config, summary, columns, rows)


def spectrum_envelope(spectrum, census, quasi, config):
    rows = [
        (
            j,
            float(spectrum.eigenvalues[j].real), float(spectrum.eigenvalues[j].imag),
            float(quasi[j].real), float(quasi[j].imag),
            float(spectrum.residuals[j]),
        )
        for j in range(spectrum.dim)
    ]
    summary = {
        "dim": spectrum.dim,
        "complex_fraction": census.complex_fraction,
        "num_complex": census.num_complex,
        "max_modulus_deviation": census.max_modulus_deviation,
        "reality_tol": census.tolerance_used,
        "max_residual": float(spectrum.residuals.max()),
    }
    columns = ("index", "lambda_re", "lambda_im", "eps_re", "eps_im", "residual")
    return make_envelope("spectrum_summary", config, summary, columns, rows)


def ensemble_envelope(report, config):
    with_vectors = any(
        r.eigenvector_symmetry is not None for r in report.per_realization
    )
    columns = ["realization", "complex_fraction", "max_modulus_deviation"]
    if with_vectors:
        columns.append("max_T_vector_residual")
    rows = []
    for r in report.per_realization:
        row = [
            r.realization_index,
            float(r.reality.complex_fraction),
            float(r.reality.max_modulus_deviation),
        ]
        if with_vectors:
            sym = r.eigenvector_symmetry
            row.append(float(sym.max_residual) if sym is not None else float("nan"))
        rows.append(tuple(row))
    summary = {
        "case": report.spec.case,
        "num_realizations": report.num_realizations,
        "fully_real_count": report.fully_real_count,
        "any_complex": report.any_complex,
        "mean_complex_fraction": report.mean_complex_fraction,
        "num_failures": len(report.failures),
        "reality_tol": report.reality_tol,
    }
    return make_envelope("ensemble_report", config, summary, tuple(columns), rows)


def phase_map_envelope(pmap, config):
    rows = []
    for i, t1 in enumerate(pmap.axis1):
        for j, t2 in enumerate(pmap.axis2):
            rows.append(
                (
                    i, j, float(t1), float(t2),
                    int(pmap.presence[i, j]),
                    float(pmap.ratio[i, j]),
                )
            )
    summary = {
        "case": pmap.case,
        "grid_shape": [len(pmap.axis1), len(pmap.axis2)],
        "num_realizations": pmap.num_realizations,
        "num_sites": pmap.lattice.num_sites,
        "master_seed": pmap.master_seed,
        "num_failures": len(pmap.failures),
        "num_presence_cells": int(pmap.presence.sum()),
        "max_ratio": float(pmap.ratio.max()),
        "reality_tol": pmap.reality_tol,
    }
    columns = ("i", "j", "theta1", "theta2", "presence", "ratio")
    return make_envelope("phase_map", config, summary, columns, rows)


def symmetry_envelope(residuals, config, extra_summary=None):
    rows = [(name, float(value)) for name, value in residuals.items()]
    summary = {"max_residual": max(float(v) for v in residuals.values())}
    if extra_summary:
        summary.update(extra_summary)
    return make_envelope("symmetry_report", config, summary,
                         ("relation", "residual"), rows)


def verification_envelope(checks, config):
    """checks: iterable of (name, measured, threshold, passed)."""
    rows = [
        (name, float(measured), float(threshold), "pass" if ok else "fail")
        for name, measured, threshold, ok in checks
    ]
    summary = {
        "num_checks": len(rows),
        "num_failed": int(sum(1 for r in rows if r[3] == "fail")),
    }
    columns = ("check", "measured", "threshold", "status")
    return make_envelope("verification_report", config, summary, columns, rows)
