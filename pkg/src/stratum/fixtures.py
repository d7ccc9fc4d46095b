"""Run the bundled corpus expectations and compare results."""

import time
from dataclasses import asdict, dataclass

from . import corpus
from .session import Session
from .terms import term_str

SOLUTION_KINDS = {'srewrite', 'dsrewrite', 'continue', 'search', 'reduce', 'rewrite'}


@dataclass
class Outcome:
    id: str
    file: str
    module: str
    command: str
    mode: str
    provenance: str
    expected: object
    got: list
    passed: bool
    known_deviation: bool
    seconds: float
    error: str = None

    @property
    def status(self):
        if self.passed:
            return 'pass'
        return 'known-deviation' if self.known_deviation else 'FAIL'

    def as_dict(self):
        d = asdict(self)
        d['status'] = self.status
        return d


def _normalize(module, text):
    eng = module.engine
    return term_str(eng.reduce(module.parse_term(text)))


def run_entry(session, entry):
    t0 = time.perf_counter()
    recs = session.run('select %s . %s' % (entry['module'], entry['command']))
    seconds = time.perf_counter() - t0
    got = [s.term for r in recs if r.kind in SOLUTION_KINDS for s in r.solutions]
    errors = [r.error for r in recs if r.error]
    mode = entry['mode']
    expected = entry['expected']
    if mode == 'count':
        passed = len(got) == expected and len(set(got)) == len(got)
    else:
        m = session.module(entry['module'])
        expected = [_normalize(m, e) for e in expected]
        passed = sorted(got) == sorted(expected) if mode == 'set' else got == expected
    passed = passed and not errors
    return Outcome(entry['id'], entry['file'], entry['module'], entry['command'], mode,
                   entry['provenance'], expected, got, passed,
                   bool(entry.get('known_deviation')), seconds, '; '.join(errors) or None)


def run_fixtures(entries=None, ids=None, **session_kw):
    """Outcomes of the corpus expectations, one session per fixture file."""
    entries = corpus.fixtures() if entries is None else entries
    sessions = {}
    out = []
    for e in entries:
        if ids is not None and e['id'] not in ids:
            continue
        s = sessions.get(e['file'])
        if s is None:
            s = sessions[e['file']] = Session(**session_kw)
            for dep in corpus.DEPENDS.get(e['file'], ()):
                s.load_text(corpus.source(dep), dep)
            s.load_text(corpus.source(e['file']), e['file'])
        out.append(run_entry(s, e))
    return out
