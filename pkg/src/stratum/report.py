"""Corpus report: a delimited table of outcomes and a runtime figure."""

import csv
from pathlib import Path

COLUMNS = ('id', 'file', 'module', 'command', 'mode', 'provenance', 'status',
           'expected', 'got', 'solutions', 'seconds')
COLORS = {'pass': '#4c9a2a', 'known-deviation': '#d9a400', 'FAIL': '#c0392b'}


def _cell(v):
    if isinstance(v, list):
        return ' | '.join(v)
    return v


def write_csv(outcomes, path, delimiter=','):
    with open(path, 'w', newline='') as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow(COLUMNS)
        for o in outcomes:
            w.writerow([o.id, o.file, o.module, o.command, o.mode, o.provenance, o.status,
                        _cell(o.expected), _cell(o.got), len(o.got), '%.4f' % o.seconds])


def write_figure(outcomes, path):
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    labels = [o.id for o in outcomes]
    secs = [max(o.seconds, 1e-4) for o in outcomes]
    colors = [COLORS[o.status] for o in outcomes]
    fig, ax = plt.subplots(figsize=(8, 0.28 * len(outcomes) + 1.2))
    ax.barh(range(len(outcomes)), secs, color=colors)
    ax.set_yticks(range(len(outcomes)))
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xscale('log')
    ax.set_xlabel('seconds (log scale)')
    ax.set_title('corpus commands by runtime')
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in COLORS.values()]
    ax.legend(handles, list(COLORS), fontsize=7, loc='lower right')
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(outcomes, out_dir, stem='report', delimiter=','):
    """Write <stem>.csv and <stem>.png into out_dir; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = out / ('%s.csv' % stem)
    figure = out / ('%s.png' % stem)
    write_csv(outcomes, table, delimiter)
    write_figure(outcomes, figure)
    return table, figure
