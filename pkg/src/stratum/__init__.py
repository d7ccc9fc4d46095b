"""Term rewriting with a strategy language: matching modulo axioms, a fair
strategy interpreter and a set-valued reference evaluator."""

from .equational import LimitExceeded
from .lexer import ParseError
from .module import Module, Registry
from .oracle import ResultSet, converge, evaluate
from .session import Session, render
from .terms import term_str
from .vm import VM, dsrewrite, srewrite

__version__ = '0.1.0'

__all__ = ['Registry', 'Module', 'Session', 'render', 'VM', 'srewrite', 'dsrewrite',
           'evaluate', 'converge', 'ResultSet', 'LimitExceeded', 'ParseError', 'term_str']
