"""Bundled example modules and their expected results."""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent

# fixture file -> files it builds on, in load order
DEPENDS = {
    'fairness.maude': ('puzzle.maude',),
}


def path(name):
    return HERE / name


def source(name):
    return path(name).read_text()


def names():
    return sorted(p.name for p in HERE.glob('*.maude'))


def registry(name, prelude=True):
    """A registry holding the fixture file `name` and whatever it builds on."""
    from ..module import Registry
    reg = Registry(prelude=prelude)
    for dep in DEPENDS.get(name, ()):
        reg.load_text(source(dep))
    reg.load_text(source(name))
    return reg


def fixtures():
    """Expected command results, as a list of dicts."""
    return json.loads(path('fixtures.json').read_text())
