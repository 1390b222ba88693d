"""CPLEX LP text export of the JRA model, for cross-checking with a MIP solver."""

from __future__ import annotations

from pathlib import Path

from .exact import SolveOptions

LINE_WIDTH = 78


def _var(i: int, p: int) -> str:
    return f"x_{i}_{p}"


def _num(v: float) -> str:
    s = repr(float(v))
    return "0" if s in ("0.0", "-0.0") else s


def _wrap(head: str, terms, tail: str = "") -> list:
    lines = []
    cur = head
    for t in terms:
        if len(cur) + len(t) + 1 > LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += " " + t
    if tail:
        cur += " " + tail
    lines.append(cur)
    return lines


def write_lp(inst, opts: SolveOptions | None = None) -> str:
    """Model text: objective, degree rows, fixed bounds and the optional retain row.

    Subtour elimination rows are left out; they are meant to be added lazily.
    """
    opts = opts or SolveOptions()
    n = inst.n
    C = inst.cost_matrix()
    items = range(1, n + 1)
    places = range(n + 1, 2 * n + 1)
    forced = set(opts.forced_edges)
    if inst.fixed_pair:
        forced.add((n, 2 * n))
    forbidden = set(opts.forbidden_edges)
    out = [
        "\\ JRA model: alternating Hamiltonian cycle over items and placeholders",
        f"\\ n = {n} pairs, {n * n} binary edge variables",
        "\\ subtour elimination constraints are omitted: add them lazily",
        "\\ (x(E(S)) <= |S| - 1 for every disconnected component S)",
        "Minimize",
    ]
    terms = []
    for i in items:
        for p in places:
            terms.append(f"+ {_num(C[i - 1, p - n - 1])} {_var(i, p)}")
    terms[0] = terms[0][2:]
    out += _wrap(" obj:", terms)
    out.append("Subject To")
    for i in items:
        t = [f"+ {_var(i, p)}" for p in places]
        t[0] = t[0][2:]
        out += _wrap(f" deg_{i}:", t, "= 2")
    for p in places:
        t = [f"+ {_var(i, p)}" for i in items]
        t[0] = t[0][2:]
        out += _wrap(f" deg_{p}:", t, "= 2")
    if opts.retain_set is not None and opts.retain_min is not None:
        t = [f"+ {_var(i, p)}" for i, p in sorted(opts.retain_set)]
        t[0] = t[0][2:]
        sense = "=" if opts.retain_mode == "eq" else ">="
        out += _wrap(" retain:", t, f"{sense} {int(opts.retain_min)}")
    out.append("Bounds")
    for i, p in sorted(forced):
        out.append(f" {_var(i, p)} = 1")
    for i, p in sorted(forbidden):
        out.append(f" {_var(i, p)} = 0")
    out.append("Binaries")
    names = [_var(i, p) for i in items for p in places]
    out += _wrap("", names)
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(inst, opts: SolveOptions | None, path) -> None:
    Path(path).write_text(write_lp(inst, opts))
