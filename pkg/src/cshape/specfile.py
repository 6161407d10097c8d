"""Plain-text substitution files.

One ``key = value`` per line, ``#`` starts a comment::

    dim = 2
    alphabet = 0 1
    L = 2,0 0,2                 # matrix rows
    support = 0,0 1,0 0,1 1,1
    rule.0 = 1 0 0 1            # letters aligned with the support order
    rule.1 = 0 1 1 0
    declared_aperiodic = true
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import InvalidInput
from .substitution import Substitution

_TOKEN = re.compile(r"\S+")
_KEYS = {"dim", "alphabet", "L", "support", "declared_aperiodic"}


class SpecError(InvalidInput):
    def __init__(self, line: int, col: int, message: str, source: str = "<spec>"):
        super().__init__(f"{source}:{line}:{col}: {message}")
        self.line, self.col, self.source = line, col, source


def _tokens(value: str, offset: int) -> list:
    return [(m.group(), offset + m.start() + 1) for m in _TOKEN.finditer(value)]


def _int_vector(tok: str, col: int, line: int, dim: int | None, src: str) -> tuple:
    try:
        v = tuple(int(x) for x in tok.split(","))
    except ValueError:
        raise SpecError(line, col, f"expected comma-separated integers, got {tok!r}", src) from None
    if dim is not None and len(v) != dim:
        raise SpecError(line, col, f"vector {tok!r} has {len(v)} entries, expected {dim}", src)
    return v


def parse(text: str, source: str = "<spec>") -> Substitution:
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise SpecError(lineno, col, "expected 'key = value'", source)
        key_part, value = body.split("=", 1)
        key = key_part.strip()
        kcol = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _KEYS and not key.startswith("rule."):
            raise SpecError(lineno, kcol, f"unknown key {key!r}", source)
        if key in entries:
            raise SpecError(lineno, kcol, f"duplicate key {key!r} (first on line {entries[key][0]})", source)
        entries[key] = (lineno, _tokens(value, len(key_part) + 1))

    def need(k):
        if k not in entries:
            raise SpecError(0, 0, f"missing key {k!r}", source)
        return entries[k]

    line, toks = need("dim")
    if len(toks) != 1 or not toks[0][0].isdigit() or int(toks[0][0]) < 1:
        raise SpecError(line, toks[0][1] if toks else 1, "dim must be a positive integer", source)
    dim = int(toks[0][0])

    line, toks = need("alphabet")
    alphabet = []
    for tok, col in toks:
        if tok in alphabet:
            raise SpecError(line, col, f"duplicate letter {tok!r}", source)
        alphabet.append(tok)
    if not alphabet:
        raise SpecError(line, 1, "empty alphabet", source)

    line, toks = need("L")
    if len(toks) != dim:
        raise SpecError(line, 1, f"L needs {dim} rows, got {len(toks)}", source)
    L = [_int_vector(t, c, line, dim, source) for t, c in toks]
    l_line = line

    line, toks = need("support")
    support = []
    for tok, col in toks:
        v = _int_vector(tok, col, line, dim, source)
        if v in support:
            raise SpecError(line, col, f"duplicate support vector {tok!r}", source)
        support.append(v)
    s_line = line

    rules = {}
    for a in alphabet:
        line, toks = need(f"rule.{a}")
        if len(toks) != len(support):
            raise SpecError(line, 1, f"rule.{a} has {len(toks)} letters, expected {len(support)}", source)
        for tok, col in toks:
            if tok not in alphabet:
                raise SpecError(line, col, f"unknown letter {tok!r}", source)
        rules[a] = [t for t, _ in toks]
    for k, (line, _) in entries.items():
        if k.startswith("rule.") and k[5:] not in alphabet:
            raise SpecError(line, 1, f"rule for a letter outside the alphabet: {k!r}", source)

    aperiodic = False
    if "declared_aperiodic" in entries:
        line, toks = entries["declared_aperiodic"]
        if len(toks) != 1 or toks[0][0].lower() not in ("true", "false"):
            raise SpecError(line, toks[0][1] if toks else 1, "declared_aperiodic must be true or false", source)
        aperiodic = toks[0][0].lower() == "true"

    try:
        return Substitution(alphabet, L, support, rules, aperiodic)
    except InvalidInput as exc:
        msg = str(exc)
        line = l_line if "expansion" in msg or "singular" in msg else s_line
        raise SpecError(line, 1, msg, source) from None


def load(path) -> Substitution:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SpecError(0, 0, f"not UTF-8: {exc}", str(path)) from None
    return parse(text, str(path))


def serialize(zeta: Substitution) -> str:
    vec = lambda v: ",".join(str(int(x)) for x in v)  # noqa: E731
    lines = [
        f"dim = {zeta.d}",
        "alphabet = " + " ".join(zeta.alphabet),
        "L = " + " ".join(vec(r) for r in zeta.L),
        "support = " + " ".join(vec(f) for f in zeta.support),
    ]
    for a, img in zeta.rules.items():
        lines.append(f"rule.{a} = " + " ".join(img))
    lines.append(f"declared_aperiodic = {'true' if zeta.declared_aperiodic else 'false'}")
    return "\n".join(lines) + "\n"
