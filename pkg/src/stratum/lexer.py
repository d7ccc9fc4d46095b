"""Tokenizer for the module language.

Tokens are separated by whitespace; the characters ( ) [ ] { } and the
comma always form tokens of their own.  A backquote escapes one of them.
"""

SPECIAL = '()[]{},'


class Token:
    __slots__ = ('text', 'line', 'col')

    def __init__(self, text, line, col):
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return '%s@%d:%d' % (self.text, self.line, self.col)


class ParseError(Exception):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = '' if line is None else 'line %d, column %d: ' % (line, col)
        super().__init__(where + message)


def tokenize(text, line=1, col=1):
    toks = []
    i = 0
    n = len(text)
    cur = []
    start = None

    def flush():
        nonlocal cur, start
        if cur:
            toks.append(Token(''.join(cur), start[0], start[1]))
            cur = []
            start = None

    while i < n:
        ch = text[i]
        # comments: *** or --- to end of line, ***( ... ) spanning lines
        if not cur and ch in '*-' and text.startswith(ch * 3, i):
            if text.startswith('(', i + 3):
                depth = 0
                j = i + 3
                while j < n:
                    if text[j] == '(':
                        depth += 1
                    elif text[j] == ')':
                        depth -= 1
                        if depth == 0:
                            break
                    elif text[j] == '\n':
                        line += 1
                        col = 0
                    j += 1
                    col += 1
                i = j + 1
                col += 1
                continue
            while i < n and text[i] != '\n':
                i += 1
            continue
        if ch == '\n':
            flush()
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            flush()
            i += 1
            col += 1
            continue
        if ch == '`' and i + 1 < n and text[i + 1] in SPECIAL:
            if start is None:
                start = (line, col)
            cur.append(text[i + 1])
            i += 2
            col += 2
            continue
        if ch in SPECIAL:
            flush()
            toks.append(Token(ch, line, col))
            i += 1
            col += 1
            continue
        if start is None:
            start = (line, col)
        cur.append(ch)
        i += 1
        col += 1
    flush()
    return toks


def is_number(text):
    if text.startswith('-'):
        return len(text) > 1 and text[1:].isdigit()
    return text.isdigit()


def is_qid(text):
    return len(text) > 1 and text[0] == "'"
