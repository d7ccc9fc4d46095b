"""Command-line entry point: interactive loop, batch runs and the corpus report."""

import argparse
import json
import sys

from .equational import DEFAULT_EQ_LIMIT, DEFAULT_STATE_LIMIT
from .lexer import ParseError
from .parser import split_top
from .session import Session, render

PROMPT = 'stratum> '
MORE = '       > '


def _emit(records, fmt, out):
    errors = 0
    for r in records:
        errors += bool(r.error)
        if fmt == 'json':
            out.write(json.dumps(r.as_json()) + '\n')
        else:
            text = render(r)
            if text:
                out.write(text + '\n\n')
    out.flush()
    return errors


def _complete(buffer):
    """Whether buffer holds whole modules and commands only."""
    try:
        split_top(buffer)
    except ParseError as e:
        msg = e.message
        return not ('not terminated' in msg or msg.startswith('missing end'))
    return True


def repl(session, fmt, inp=sys.stdin, out=sys.stdout):
    interactive = inp.isatty()
    buffer = ''
    errors = 0
    while True:
        if interactive:
            out.write(MORE if buffer.strip() else PROMPT)
            out.flush()
        line = inp.readline()
        if not line:
            break
        if not buffer.strip() and line.strip() in ('quit', 'q', 'quit .', 'q .'):
            break
        buffer += line
        if buffer.strip() and _complete(buffer):
            errors += _emit(session.run(buffer), fmt, out)
            buffer = ''
    if buffer.strip():
        errors += _emit(session.run(buffer), fmt, out)
    return errors


def main_parser():
    p = argparse.ArgumentParser(prog='stratum', description='Rewriting with strategies.')
    p.add_argument('files', nargs='*', help='module files to load first')
    p.add_argument('--batch', metavar='FILE', help='run the commands of FILE and exit')
    p.add_argument('--format', choices=('transcript', 'json'), default='transcript')
    p.add_argument('--limit-eq', type=int, default=DEFAULT_EQ_LIMIT, metavar='N',
                   help='equational step limit per command')
    p.add_argument('--limit-states', type=int, default=DEFAULT_STATE_LIMIT, metavar='N',
                   help='state limit per command')
    p.add_argument('--no-dedup', action='store_true', help='report repeated solutions')
    return p


def report_parser():
    p = argparse.ArgumentParser(prog='stratum report',
                                description='Run the corpus expectations; write a table and a figure.')
    p.add_argument('--out', default='report', help='output directory (default: report)')
    p.add_argument('--stem', default='report', help='base name of the output files')
    p.add_argument('--delimiter', default=',', help='field delimiter of the table')
    p.add_argument('--only', nargs='*', metavar='ID', help='restrict to these fixture ids')
    return p


def report_main(argv):
    from .fixtures import run_fixtures
    from .report import write_report
    args = report_parser().parse_args(argv)
    outcomes = run_fixtures(ids=set(args.only) if args.only else None)
    delim = args.delimiter
    w = sys.stdout.write
    w(delim.join(('id', 'status', 'seconds', 'solutions')) + '\n')
    for o in outcomes:
        w(delim.join((o.id, o.status, '%.3f' % o.seconds, str(len(o.got)))) + '\n')
    table, figure = write_report(outcomes, args.out, args.stem, delim)
    w('table: %s\nfigure: %s\n' % (table, figure))
    return 1 if any(o.status == 'FAIL' for o in outcomes) else 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        if argv and argv[0] == 'report':
            return report_main(argv[1:])
        args = main_parser().parse_args(argv)
        session = Session(eq_limit=args.limit_eq, state_limit=args.limit_states,
                          dedup=not args.no_dedup)
        errors = 0
        for f in args.files:
            errors += _emit(session.load_file(f), args.format, sys.stdout)
        if args.batch:
            try:
                text = open(args.batch).read()
            except OSError as e:
                sys.stderr.write('stratum: %s\n' % e)
                return 2
            errors += _emit(session.load_text(text, args.batch), args.format, sys.stdout)
        else:
            errors += repl(session, args.format)
        return 1 if errors else 0
    except KeyboardInterrupt:
        return 2
    except RecursionError as e:
        sys.stderr.write('stratum: fatal: %s\n' % e)
        return 2


if __name__ == '__main__':
    sys.exit(main())
