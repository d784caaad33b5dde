"""Read/write optimization problems in an LP-style text format.

The writer emits a CPLEX-LP-like document good enough for differential
testing against external solvers; the reader accepts everything the writer
produces (plus hand-written files of the same dialect).
"""

from __future__ import annotations

import re

import numpy as np

from coplan.solver.model import LinearProgram, MixedIntegerProgram, Relation


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _terms(coefs: np.ndarray, names: list[str], constant: float = 0.0) -> str:
    parts: list[str] = []
    for c, name in zip(coefs, names):
        if c == 0.0:
            continue
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {_num(abs(c))} {name}")
    if constant != 0.0:
        sign = "-" if constant < 0 else "+"
        parts.append(f"{sign} {_num(abs(constant))}")
    if not parts:
        return "0"
    first = parts[0]
    first = first[2:] if first.startswith("+ ") else "-" + first[2:]
    return " ".join([first] + parts[1:])


def write_lp_text(problem: MixedIntegerProgram | LinearProgram) -> str:
    """Render the problem as LP-format text."""
    if isinstance(problem, LinearProgram):
        problem = MixedIntegerProgram(lp=problem, binaries=[])
    lp = problem.lp
    names = lp.names
    out = ["Maximize", f" obj: {_terms(lp.c, names, lp.offset)}", "Subject To"]
    rel_txt = {Relation.LE: "<=", Relation.EQ: "=", Relation.GE: ">="}
    for i in range(lp.n_rows):
        out.append(
            f" c{i}: {_terms(lp.A[i], names)} {rel_txt[lp.relations[i]]} {_num(lp.b[i])}"
        )
    out.append("Bounds")
    for j, name in enumerate(names):
        lo, up = lp.lo[j], lp.up[j]
        if lo == up:
            out.append(f" {name} = {_num(lo)}")
        elif np.isinf(up):
            out.append(f" {name} >= {_num(lo)}")
        else:
            out.append(f" {_num(lo)} <= {name} <= {_num(up)}")
    if problem.binaries:
        out.append("Binaries")
        out.append(" " + " ".join(names[j] for j in problem.binaries))
    out.append("End")
    return "\n".join(out) + "\n"


class LpParseError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_.\[\],]*)"
    r"|(?P<op><=|>=|=|\+|-))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise LpParseError(f"cannot tokenize: {rest[:30]!r}")
        pos = m.end()
        for kind in ("num", "name", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    return tokens


def _parse_expr(tokens, var_index, coefs_out):
    """Accumulate `sign coef name` terms; returns the numeric constant part."""
    constant = 0.0
    sign = 1.0
    pending: float | None = None
    for kind, tok in tokens:
        if kind == "op" and tok in "+-":
            if pending is not None:
                constant += sign * pending
                pending = None
            sign = -1.0 if tok == "-" else 1.0
        elif kind == "num":
            if pending is not None:
                constant += sign * pending
            pending = float(tok)
        elif kind == "name":
            coef = sign * (1.0 if pending is None else pending)
            j = var_index.setdefault(tok, len(var_index))
            coefs_out[j] = coefs_out.get(j, 0.0) + coef
            pending = None
            sign = 1.0
        else:
            raise LpParseError(f"unexpected token {tok!r} in expression")
    if pending is not None:
        constant += sign * pending
    return constant


_SECTIONS = {
    "maximize": "objective",
    "maximise": "objective",
    "max": "objective",
    "subject": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "end": "end",
    "general": "general",
}


def read_lp_text(text: str) -> MixedIntegerProgram:
    """Parse LP-format text back into a MixedIntegerProgram."""
    var_index: dict[str, int] = {}
    obj: dict[int, float] = {}
    offset = 0.0
    rows: list[tuple[dict[int, float], Relation, float]] = []
    bound_lines: list[list[tuple[str, str]]] = []
    binary_names: list[str] = []
    section = None
    for raw in text.splitlines():
        line = raw.split("\\")[0].strip()
        if not line:
            continue
        head = line.split()[0].rstrip(":").lower()
        if head in _SECTIONS:
            section = _SECTIONS[head]
            if section == "end":
                break
            if section == "general":
                raise LpParseError("general integer variables are not supported")
            continue
        if ":" in line:
            line = line.split(":", 1)[1]
        if section == "objective":
            offset += _parse_expr(_tokenize(line), var_index, obj)
        elif section == "rows":
            tokens = _tokenize(line)
            split_at = None
            for k, (kind, tok) in enumerate(tokens):
                if kind == "op" and tok in ("<=", ">=", "="):
                    split_at = k
                    break
            if split_at is None:
                raise LpParseError(f"constraint without relation: {line!r}")
            lhs: dict[int, float] = {}
            const = _parse_expr(tokens[:split_at], var_index, lhs)
            rel = {"<=": Relation.LE, ">=": Relation.GE, "=": Relation.EQ}[tokens[split_at][1]]
            rhs_terms: dict[int, float] = {}
            rhs_const = _parse_expr(tokens[split_at + 1 :], var_index, rhs_terms)
            if rhs_terms:
                raise LpParseError("variables on the right-hand side are not supported")
            rows.append((lhs, rel, rhs_const - const))
        elif section == "bounds":
            bound_lines.append(_tokenize(line))
        elif section == "binaries":
            for kind, tok in _tokenize(line):
                if kind != "name":
                    raise LpParseError(f"unexpected token in Binaries: {tok!r}")
                binary_names.append(tok)
                var_index.setdefault(tok, len(var_index))
        else:
            raise LpParseError(f"content before a section header: {line!r}")

    for tokens in bound_lines:  # bounds may mention otherwise-unused variables
        for kind, tok in tokens:
            if kind == "name":
                var_index.setdefault(tok, len(var_index))
    n = len(var_index)
    names = [None] * n
    for name, j in var_index.items():
        names[j] = name
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    A = np.zeros((len(rows), n))
    b = np.zeros(len(rows))
    relations = []
    for i, (lhs, rel, rhs) in enumerate(rows):
        for j, v in lhs.items():
            A[i, j] = v
        relations.append(rel)
        b[i] = rhs
    lo = np.zeros(n)
    up = np.full(n, np.inf)
    for tokens in bound_lines:
        # forms: "name = v" | "name >= v" | "lo <= name <= up"
        kinds = [k for k, _ in tokens]
        if kinds == ["name", "op", "num"] or kinds == ["name", "op", "op", "num"]:
            name = tokens[0][1]
            op = tokens[1][1]
            neg = kinds[2] == "op"
            val = float(tokens[-1][1]) * (-1.0 if neg else 1.0)
            j = var_index.setdefault(name, len(var_index))
            if op == "=":
                lo[j] = up[j] = val
            elif op == ">=":
                lo[j] = val
            elif op == "<=":
                up[j] = val
        elif kinds in (
            ["num", "op", "name", "op", "num"],
            ["op", "num", "op", "name", "op", "num"],
        ):
            has_neg = kinds[0] == "op"
            lo_val = float(tokens[1][1]) * -1.0 if has_neg else float(tokens[0][1])
            name = tokens[3][1] if has_neg else tokens[2][1]
            up_val = float(tokens[-1][1])
            j = var_index.setdefault(name, len(var_index))
            lo[j], up[j] = lo_val, up_val
        else:
            raise LpParseError(f"unsupported bound line: {tokens!r}")

    binaries = [var_index[name] for name in binary_names]
    for j in binaries:
        lo[j] = max(lo[j], 0.0)
        up[j] = min(up[j], 1.0) if np.isfinite(up[j]) else 1.0
    lp = LinearProgram(c=c, A=A, relations=relations, b=b, lo=lo, up=up, offset=offset, names=names)
    return MixedIntegerProgram(lp=lp, binaries=binaries)
