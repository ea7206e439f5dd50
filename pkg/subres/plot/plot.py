import matplotlib
import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection
import numpy as np

import subres.io
import subres.nonlinear
import subres.trig

"""
Functions to plot solution branches.
"""

PHASE_COLORMAP   = 'twilight'
UNDEFINED_COLOR  = '0.6'
SVG_RC           = {'svg.hashsalt': 'subres',
                    'svg.fonttype': 'path'}


def phase_colors(phases):
    """
    RGBA colors for phase angles in (-pi, pi] on a cyclic scale,
    neutral gray where the phase is undefined (nan).
    """
    phases = np.asarray(phases, dtype=float)
    cmap = matplotlib.colormaps[PHASE_COLORMAP]
    colors = cmap((phases + np.pi) / (2.0 * np.pi))
    colors[~np.isfinite(phases)] = matplotlib.colors.to_rgba(UNDEFINED_COLOR)
    return colors


def point_omega(point):
    if point.omega is not None:
        return complex(point.omega)
    return subres.trig.principal_sqrt(point.omega_sq)


def _save(fig, output_file_name):
    path, _, _ = subres.io.split_file(output_file_name)
    if path:
        subres.io.create_dir(path)
    fig.savefig(output_file_name, format='svg', metadata={'Date': None})
    plt.close(fig)
    return output_file_name


def plot_modes(branches,
               output_file_name,
               linear_directions=None,
               amplitude_cap=3.0,
               title=None):
    """
    |q2| against |q1| for every branch, colored by the phase of q1/q2.
    For N != 2 the entry moduli are drawn against the amplitude instead.
    linear_directions are the beta = 0 eigenvectors, drawn as dashed lines.
    """
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(1, figsize=(6, 6))

        n = len(branches[0].points[0].q) if branches else 2
        for branch in branches:
            moduli = np.array([np.abs(pt.q) for pt in branch.points])
            if n == 2:
                xy = moduli
                phases = [np.angle(subres.nonlinear.branch_phase_ratio(pt)) for pt in branch.points]
            else:
                amplitudes = np.array([pt.amplitude for pt in branch.points])
                xy = np.column_stack([amplitudes, moduli.max(axis=1)])
                phases = np.full(len(amplitudes), np.nan)
            segments = np.stack([xy[:-1], xy[1:]], axis=1)
            if len(segments) == 0:
                ax.plot(xy[:, 0], xy[:, 1], 'o', color=UNDEFINED_COLOR, markersize=2)
                continue
            # color each segment by the phase at its start
            lines = LineCollection(segments, colors=phase_colors(phases[:-1]), linewidths=1.5)
            ax.add_collection(lines)

        if linear_directions is not None and n == 2:
            for v in np.asarray(linear_directions).T:
                direction = np.abs(v) / np.linalg.norm(v)
                ax.plot([0, amplitude_cap * direction[0]],
                        [0, amplitude_cap * direction[1]],
                        linestyle='--', color='black', linewidth=0.8)

        ax.set_xlim(0, amplitude_cap)
        ax.set_ylim(0, amplitude_cap)
        if n == 2:
            ax.set_xlabel('|q1|')
            ax.set_ylabel('|q2|')
        else:
            ax.set_xlabel('||q||')
            ax.set_ylabel('max |qj|')
        if title:
            ax.set_title(title)

        mappable = matplotlib.cm.ScalarMappable(cmap=PHASE_COLORMAP,
                                                norm=matplotlib.colors.Normalize(-np.pi, np.pi))
        fig.colorbar(mappable, ax=ax, label='arg(q1/q2)')
        return _save(fig, output_file_name)


def plot_frequencies(branches,
                     output_file_name,
                     linear_omegas=None,
                     title=None):
    """
    omega0 along each branch in the complex plane, one color per branch id.
    """
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(1, figsize=(6, 6))
        cmap = matplotlib.colormaps['tab10']

        for branch in branches:
            omegas = np.array([point_omega(pt) for pt in branch.points])
            ax.plot(omegas.real, omegas.imag,
                    color=cmap(branch.branch_id % 10),
                    linewidth=1.5,
                    label='branch ' + str(branch.branch_id))

        if linear_omegas is not None:
            linear_omegas = np.asarray(linear_omegas, dtype=complex)
            ax.plot(linear_omegas.real, linear_omegas.imag, 'x', color='black', label='beta = 0')

        ax.set_xlabel('Re omega0')
        ax.set_ylabel('Im omega0')
        if branches or linear_omegas is not None:
            ax.legend(loc='best', fontsize='small')
        if title:
            ax.set_title(title)
        return _save(fig, output_file_name)
