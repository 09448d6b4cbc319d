"""Static SVG figures rendered alongside reports.

Figures are built on matplotlib Figure objects directly (no pyplot state)
and written as SVG with a fixed hash salt and stripped date metadata, so a
rerun with identical inputs produces byte-identical documents. Every
spectrum plot draws the unit circle dashed for reference.
"""

import matplotlib
import numpy as np
from matplotlib.figure import Figure

_SVG_SALT = "nuwalk"


def save_figure(fig, path):
    """Write a figure as deterministic SVG."""
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT, "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def _unit_circle(ax):
    phi = np.linspace(0.0, 2 * np.pi, 361)
    ax.plot(np.cos(phi), np.sin(phi), ls="--", lw=0.8, color="0.45",
            gid="unit-circle", zorder=1)


def band_figure(scan):
    """Re and Im quasi-energy bands against momentum, both branches."""
    fig = Figure(figsize=(6.0, 5.2))
    ax_re, ax_im = fig.subplots(2, 1, sharex=True)
    k = scan.momenta
    ax_re.plot(k, scan.eps_plus.real, ".", ms=2.5, color="tab:blue")
    ax_re.plot(k, scan.eps_minus.real, ".", ms=2.5, color="tab:orange")
    ax_re.set_ylabel(r"Re $\varepsilon$")
    ax_im.plot(k, scan.eps_plus.imag, ".", ms=2.5, color="tab:blue")
    ax_im.plot(k, scan.eps_minus.imag, ".", ms=2.5, color="tab:orange")
    ax_im.set_ylabel(r"Im $\varepsilon$")
    ax_im.set_xlabel(r"$k$")
    ax_im.set_xlim(-np.pi, np.pi)
    fig.suptitle(
        f"{scan.kind.value}  t1={scan.theta1:.6g}  t2={scan.theta2:.6g}  "
        f"e^g={np.exp(scan.gamma):.6g}"
    )
    fig.subplots_adjust(hspace=0.12, top=0.92)
    return fig


def spectrum_figure(eigenvalues, title=""):
    """Eigenvalues on the complex plane with the dashed unit circle."""
    lam = np.asarray(eigenvalues, dtype=complex)
    fig = Figure(figsize=(5.2, 5.2))
    ax = fig.subplots()
    _unit_circle(ax)
    ax.plot(lam.real, lam.imag, "o", ms=3.0, mfc="tab:blue", mec="none",
            alpha=0.8, zorder=2)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_aspect("equal")
    pad = 1.1 * max(1.0, float(np.abs(lam).max()))
    ax.set_xlim(-pad, pad)
    ax.set_ylim(-pad, pad)
    if title:
        ax.set_title(title)
    return fig


def ensemble_figure(report):
    """Overlay of all realization spectra plus per-realization complex fraction."""
    fig = Figure(figsize=(9.0, 4.4))
    ax_frac = fig.subplots()
    fractions = report.complex_fractions
    ax_frac.bar(np.arange(len(fractions)), fractions, color="tab:blue", width=0.8)
    ax_frac.set_xlabel("realization")
    ax_frac.set_ylabel("complex fraction")
    ax_frac.set_ylim(0.0, 1.05)
    ax_frac.set_title(
        f"case {report.spec.case}: {report.fully_real_count}/{report.num_realizations} "
        "fully real"
    )
    return fig


def phase_map_figure(pmap):
    """Presence (left) and ratio (right) maps over the coin-angle grid."""
    fig = Figure(figsize=(9.6, 4.2))
    ax_p, ax_r = fig.subplots(1, 2)
    extent = (
        pmap.axis2[0] / np.pi, pmap.axis2[-1] / np.pi,
        pmap.axis1[0] / np.pi, pmap.axis1[-1] / np.pi,
    )
    ax_p.imshow(pmap.presence.astype(float), origin="lower", extent=extent,
                cmap="gray", vmin=0.0, vmax=1.0, aspect="auto")
    ax_p.set_title("presence of complex pairs")
    im = ax_r.imshow(pmap.ratio, origin="lower", extent=extent,
                     cmap="viridis", vmin=0.0, aspect="auto")
    ax_r.set_title("mean complex fraction")
    for ax in (ax_p, ax_r):
        ax.set_xlabel(r"$\theta_2 / \pi$")
        ax.set_ylabel(r"$\bar\theta_1 / \pi$")
    fig.colorbar(im, ax=ax_r, shrink=0.85)
    fig.suptitle(f"case {pmap.case}, R={pmap.num_realizations}, "
                 f"N={pmap.lattice.num_sites}")
    fig.subplots_adjust(wspace=0.3, top=0.86)
    return fig
