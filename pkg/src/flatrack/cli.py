r"""
Command-line interface.

Inputs are JSON files (``--in``, ``-`` for stdin) or inline flags; scalars
are exact expressions such as ``(sqrt(5)-1)/2``.  Errors go to stderr as
``error[<code>]: <message>``; malformed input exits with status 2 and
mathematical failures (ties, invalid data, exhausted budgets) with status 1.
"""

from __future__ import annotations

import json
import math
import random
import sys

import click

from . import castle as C
from . import dc_hyp as D
from . import iet as I
from . import pa_enum as PA
from . import perm as P
from . import surface as S
from .numkernel import (
    FieldMismatch,
    ScalarSyntaxError,
    Vec,
    field_of,
    format_scalar,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
    squarefree_part,
)


class InputError(click.UsageError):
    """Malformed input that click did not catch itself."""


PARSE_ERRORS = (ScalarSyntaxError, C.ForestSyntaxError, json.JSONDecodeError, InputError)
DOMAIN_ERRORS = (ValueError, ArithmeticError, RuntimeError, KeyError)


def main(argv=None) -> int:
    """Entry point; returns the exit status instead of raising ``SystemExit``."""
    try:
        cli.main(args=argv, prog_name="flatrack", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("error[aborted]", err=True)
        return 1
    except click.ClickException as e:
        click.echo(f"error[usage]: {e.format_message()}", err=True)
        return 2
    except PARSE_ERRORS as e:
        click.echo(f"error[parse]: {e}", err=True)
        return 2
    except DOMAIN_ERRORS as e:
        click.echo(f"error[{type(e).__name__}]: {e}", err=True)
        return 1
    return 0


def run():
    sys.exit(main())


# helpers


def _declared_field() -> int | None:
    ctx = click.get_current_context(silent=True)
    return ctx.find_root().meta.get("flatrack.field") if ctx is not None else None


def _check_field(values) -> None:
    declared = _declared_field()
    if declared is None:
        return
    d = field_of(values)
    if d not in (1, declared):
        raise FieldMismatch(f"input lives in Q(sqrt({d})) but --field {declared} was given")


def _json_scalars(obj):
    if isinstance(obj, dict):
        if {"a", "b", "d"} <= obj.keys():
            yield scalar_from_json(obj)
        else:
            for v in obj.values():
                yield from _json_scalars(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _json_scalars(v)


def _scalar(text: str):
    x = parse_scalar(text)
    _check_field([x])
    return x


def _load(path: str):
    if path is None:
        raise InputError("--in is required")
    try:
        stream = sys.stdin if path == "-" else open(path, encoding="utf-8")
    except OSError as e:
        raise InputError(str(e)) from e
    with stream:
        obj = json.load(stream)
    _check_field(_json_scalars(obj))
    return obj


def _emit(obj, out: str | None = None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, ensure_ascii=False, sort_keys=False)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        click.echo(text)


def _vec_text(v: Vec) -> str:
    return str(v)


in_opt = click.option("--in", "in_path", type=str, default=None, help="JSON input file, - for stdin.")
out_opt = click.option("--out", "out_path", type=str, default=None, help="Write output here instead of stdout.")


def fmt_opt(*choices, default):
    return click.option("--format", "fmt", type=click.Choice(list(choices)), default=default, show_default=True)


@click.group()
@click.version_option(package_name="artifact")
@click.option(
    "--field",
    type=click.IntRange(2),
    default=None,
    help="Declare the quadratic field Q(sqrt d); inputs outside it are rejected.",
)
@click.pass_context
def cli(ctx, field):
    """Discretizations of the Teichmueller flow on translation surfaces."""
    if field is not None:
        core, _ = squarefree_part(field)
        if core == 1:
            raise click.BadParameter(f"{field} is a perfect square", param_hint="--field")
        ctx.meta["flatrack.field"] = core


# continued fractions


@cli.command()
@click.option("--value", required=True, help="Exact value in (0, 1), e.g. 'sqrt(6)-2'.")
@click.option("--digits", default=10, show_default=True, type=click.IntRange(1))
@click.option("--method", type=click.Choice(["torus", "gauss"]), default="torus", show_default=True)
def cf(value, digits, method):
    """Continued fraction digits from the accelerated torus map."""
    x = _scalar(value)
    res = I.cf_digits(x, digits) if method == "torus" else I.gauss_digits(x, digits)
    click.echo("[" + ",".join(map(str, res.digits)) + "]")


# Rauzy-Veech


def _iet(in_path, perm, lengths) -> I.IETDatum:
    if in_path:
        return I.iet_from_json(_load(in_path))
    if not perm or not lengths:
        raise InputError("give --in or both --perm and --lengths")
    vals = [_scalar(t) for t in lengths.split(",")]
    p = I.PermPair.parse(perm)
    if len(vals) != p.d:
        raise InputError("one length per letter is required")
    return I.IETDatum.from_list(p, vals)


iet_opts = [
    in_opt,
    click.option("--perm", default=None, help="Two-row datum such as ABCD/DCBA."),
    click.option("--lengths", default=None, help="Comma-separated lengths in top-row order."),
]


def _with(opts):
    def deco(f):
        for o in reversed(opts):
            f = o(f)
        return f

    return deco


@cli.group()
def rv():
    """Rauzy-Veech induction."""


@rv.command("step")
@_with(iet_opts)
@out_opt
def rv_step_cmd(in_path, perm, lengths, out_path):
    """One Rauzy-Veech step."""
    s = I.rv_step(_iet(in_path, perm, lengths))
    _emit({"move": s.move, "winner": s.winner, "loser": s.loser, "iet": I.iet_to_json(s.iet)}, out_path)


@rv.command("fast")
@_with(iet_opts)
@out_opt
def rv_fast_cmd(in_path, perm, lengths, out_path):
    """One accelerated step (a maximal run of moves of one type)."""
    T, n = I.rv_fast(_iet(in_path, perm, lengths))
    _emit({"steps": n, "iet": I.iet_to_json(T)}, out_path)


@rv.command("orbit")
@_with(iet_opts)
@click.option("--steps", default=10, show_default=True, type=click.IntRange(0))
def rv_orbit_cmd(in_path, perm, lengths, steps):
    """Print the move sequence of an orbit, one step per line."""
    T = _iet(in_path, perm, lengths)
    for _ in range(steps):
        s = I.rv_step(T)
        T = s.iet
        click.echo(f"{s.move} {s.winner}>{s.loser} {T.perm}")


@cli.group()
def rauzy():
    """Rauzy classes."""


@rauzy.command("class")
@click.option("--perm", required=True)
@click.option("--reduced", is_flag=True)
@click.option("--count", is_flag=True, help="Print only the number of vertices.")
def rauzy_class_cmd(perm, reduced, count):
    """List the Rauzy class of a datum."""
    rc = I.rauzy_class(I.PermPair.parse(perm), reduced=reduced)
    if count:
        click.echo(str(len(rc)))
    else:
        for v in rc.vertices:
            click.echo(str(v))


@rauzy.command("graph")
@click.option("--perm", required=True)
@click.option("--reduced", is_flag=True)
def rauzy_graph_cmd(perm, reduced):
    """Rauzy diagram in DOT format."""
    click.echo(I.rauzy_class(I.PermPair.parse(perm), reduced=reduced).to_dot())


# quadrangulations


def _pi(pi_l: str, pi_r: str, k: int):
    return P.parse_cycles(pi_l, k), P.parse_cycles(pi_r, k)


@cli.group()
def hyp():
    """Quadrangulations and staircase moves."""


@hyp.command("validate")
@in_opt
def hyp_validate(in_path):
    """Check train-track relations and wedge slopes."""
    D.validate_quadrangulation(D.quad_from_json(_load(in_path)))
    click.echo("valid")


@hyp.command("move")
@in_opt
@out_opt
@click.option("--cycle", "cycles", multiple=True, help="Staircase such as 'r(1 3)' or a word 'r·r'; repeatable.")
@click.option("--steps", default=None, type=click.IntRange(1), help="Run the greedy algorithm instead.")
def hyp_move(in_path, out_path, cycles, steps):
    """Move along staircases and print the resulting quadrangulation."""
    Q = D.quad_from_json(_load(in_path))
    if steps:
        Q = D.run_algorithm(Q, "greedy", steps)[-1].quadrangulation
    for text in cycles:
        Q = D.staircase_move(Q, D.cycle_from_text(text, Q.pi))
    _emit(D.quad_to_json(Q), out_path)


@hyp.command("rotate")
@in_opt
@out_opt
@click.option("--inverse", is_flag=True)
def hyp_rotate(in_path, out_path, inverse):
    """Rotate by a quarter turn."""
    Q = D.quad_from_json(_load(in_path))
    _emit(D.quad_to_json(D.rotation_inverse(Q) if inverse else D.rotation(Q)), out_path)


@hyp.command("graph")
@in_opt
@click.option("--pi-l", default=None, help="Cycle notation, e.g. '(1 3)'.")
@click.option("--pi-r", default=None)
@click.option("--k", type=int, default=None)
@click.option("--unlabeled", is_flag=True, help="Report the relabeling quotient.")
@fmt_opt("text", "dot", "json", default="text")
def hyp_graph(in_path, pi_l, pi_r, k, unlabeled, fmt):
    """The DC graph of a combinatorial datum."""
    if in_path:
        pi = D.quad_from_json(_load(in_path)).pi
    elif pi_l is not None and pi_r is not None and k:
        pi = _pi(pi_l, pi_r, k)
    else:
        raise InputError("give --in or --pi-l, --pi-r and --k")
    g = D.dc_graph(pi)
    if fmt == "dot":
        click.echo(g.to_dot())
        return
    info = {"vertices": len(g), "edges": len(g.edges)}
    if unlabeled:
        u = PA.unlabeled_graph(pi)
        info.update(unlabeled_vertices=len(u.vertices), covering_degree=u.degree)
    if fmt == "json":
        _emit(info)
    else:
        for key, v in info.items():
            click.echo(f"{key}: {v}")


@hyp.command("canonical")
@in_opt
@out_opt
@click.option("--budget", default=10_000, show_default=True)
def hyp_canonical(in_path, out_path, budget):
    """Backward moves until no backward staircase is allowed."""
    _emit(D.quad_to_json(D.canonical_quadrangulation(D.quad_from_json(_load(in_path)), budget)), out_path)


@hyp.command("label")
@in_opt
@out_opt
@click.option("--start", default=1, show_default=True, type=click.IntRange(1))
def hyp_label(in_path, out_path, start):
    """Relabel cyclically around the singularity."""
    _emit(D.quad_to_json(D.cyclical_labeling(D.quad_from_json(_load(in_path)), start - 1)), out_path)


# pseudo-Anosov enumeration


def _record_text(r: PA.PARecord) -> str:
    d = format_scalar(r.dilatation) if r.dilatation is not None else f"{r.dilatation_float:.12g}"
    flag = " (power)" if r.power else ""
    return f"{d}\t{r.loop.word()}\tsigma={P.format_cycles(r.loop.sigma)}{flag}"


@cli.group()
def pa():
    """Pseudo-Anosov classes from positive loops."""


@pa.command("enumerate")
@click.option("--k", "k", type=int, required=True)
@click.option("--max-len", type=click.IntRange(1), required=True)
@click.option("--cap", type=float, default=None, help="Drop dilatations above this value.")
@click.option("--budget", default=2_000_000, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def pa_enumerate(k, max_len, cap, budget, as_json):
    """Positive loop classes up to a loop length, sorted by dilatation."""
    e = PA.enumerate_pa(k, max_len, cap, budget=budget)
    if as_json:
        _emit([r.to_json() for r in e.records])
        return
    click.echo(f"# complete up to loop length {e.max_len}: {e.classes} classes, {e.positive} positive")
    if e.frontier is not None:
        click.echo(f"# least dilatation above the cap: {e.frontier:.12g}")
    for r in e.records:
        click.echo(_record_text(r))


@pa.command("check-loop")
@click.option("--pi-l", required=True)
@click.option("--pi-r", required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--loop", "loop_text", required=True, help="Space-separated cycle words, e.g. 'r l'.")
@click.option("--json", "as_json", is_flag=True)
def pa_check_loop(pi_l, pi_r, k, loop_text, as_json):
    """Certify one loop: positivity, dilatation and closure."""
    loop = PA.parse_loop(loop_text, _pi(pi_l, pi_r, k))
    if not PA.is_positive(loop):
        raise ValueError("loop is not positive")
    r = PA.pf_construct(loop)
    _emit(r.to_json() if as_json else _record_text(r) + f"\tcertificate={r.certificate}")


# castles


def _castle(in_path) -> C.CastleSet:
    return C.castle_from_json(_load(in_path))


def _trace_line(choice: str, P_: C.CastleSet) -> str:
    wedges = " ".join(f"[{_vec_text(P_.wl[i])}, {_vec_text(P_.wr[i])}]" for i in range(P_.k))
    return f"{choice}\t{P_.word}\t{wedges}"


@cli.group()
def castle():
    """Castle sets in any stratum."""


@castle.command("validate")
@in_opt
def castle_validate(in_path):
    """Check the castle conditions and print the triangle counts."""
    P_ = _castle(in_path)
    C.validate_castle(P_)
    click.echo(f"valid: k={P_.k}, triangles={C.triangle_counts(P_)}")


@castle.command("move")
@in_opt
@out_opt
@click.option("--choice", "choices", multiple=True, required=True, help="'(1,r)', '1r' or a word 'r··'; repeatable.")
@click.option("--backward", is_flag=True)
@fmt_opt("json", "text", default="json")
def castle_move(in_path, out_path, choices, backward, fmt):
    """Forward (or backward) moves; text format prints the trace."""
    P_ = _castle(in_path)
    lines = [_trace_line("start", P_)]
    for text in choices:
        try:
            c = C.parse_choice(text, P_.k, forward=not backward)
        except ValueError as e:
            raise InputError(str(e)) from e
        P_ = C.backward_move(P_, c) if backward else C.forward_move(P_, c)
        lines.append(_trace_line(c.word(P_.k), P_))
    _emit("\n".join(lines) if fmt == "text" else C.castle_to_json(P_), out_path)


@castle.command("balance")
@in_opt
@out_opt
@click.option("--order", type=click.Choice(["ascending", "descending", "random"]), default="ascending", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", default=10_000, show_default=True)
def castle_balance(in_path, out_path, order, seed, budget):
    """Balance the castle set."""
    P_ = C.balance(_castle(in_path), order, rng=random.Random(seed), budget=budget)
    _emit(C.castle_to_json(P_), out_path)


@castle.command("flow")
@in_opt
@out_opt
@click.option("--factor", default=None, help="Exact e^t.")
@click.option("--t", "t", default=None, type=float, help="Flow time; only exact when e^t is.")
def castle_flow(in_path, out_path, factor, t):
    """Apply the Teichmueller flow to the wedges."""
    P_ = _castle(in_path)
    if (factor is None) == (t is None):
        raise InputError("give exactly one of --factor and --t")
    Q = C.teich_flow_castle(P_, factor=_scalar(factor)) if factor is not None else C.teich_flow_castle(P_, t)
    _emit(C.castle_to_json(Q), out_path)


@castle.command("return")
@in_opt
@out_opt
@fmt_opt("text", "json", default="text")
def castle_return(in_path, out_path, fmt):
    """First return to the section of balanced sets with a width-one polygon."""
    r = C.first_return(_castle(in_path))
    if fmt == "json":
        _emit({"t": r.t, "factor": scalar_to_json(r.factor), "moved": [i + 1 for i in r.moved],
               "castle": C.castle_to_json(r.castle)}, out_path)
        return
    shown = math.floor(r.t * 1e5) / 1e5
    _emit(f"t = {shown:.5f}… (= {C.describe_log(r.factor)})\n{r.castle}", out_path)


@castle.command("from-surface")
@in_opt
@out_opt
@click.option("--budget", default=10_000, show_default=True)
def castle_from_surface(in_path, out_path, budget):
    """Build a castle set from a surface given as glued polygons."""
    X = S.TranslationSurface.from_json(_load(in_path))
    _emit(C.castle_to_json(C.from_surface(X, budget)), out_path)


@castle.command("orbit")
@in_opt
@click.option("--max-returns", default=20, show_default=True)
@fmt_opt("text", "json", default="text")
def castle_orbit(in_path, max_returns, fmt):
    """Iterate first returns until the castle set recurs."""
    orb = C.detect_closed_orbit(_castle(in_path), max_returns)
    if orb is None:
        raise RuntimeError(f"no recurrence within {max_returns} returns")
    if fmt == "json":
        _emit({"returns": orb.returns, "period": orb.period, "factor": scalar_to_json(orb.factor),
               "sigma": [i + 1 for i in orb.sigma], "times": list(orb.times)})
        return
    click.echo(f"returns = {orb.returns}")
    click.echo(f"period = {orb.period:.10f} (= log({format_scalar(orb.factor)}))")
    click.echo(f"sigma = {P.format_cycles(orb.sigma)}")


# surfaces


@cli.group()
def surface():
    """Translation surfaces given by glued polygons."""


def _surface(in_path) -> S.TranslationSurface:
    obj = _load(in_path)
    if "pi_l" in obj:
        return D.to_surface(D.quad_from_json(obj))
    if "forest" in obj:
        return C.to_surface(C.castle_from_json(obj))
    return S.TranslationSurface.from_json(obj)


@surface.command("info")
@in_opt
def surface_info(in_path):
    """Genus, cone angles and area."""
    X = _surface(in_path)
    click.echo(f"genus: {X.genus}")
    click.echo(f"cone orders: {X.cones.orders}")
    click.echo(f"area: {format_scalar(X.area())}")


@surface.command("saddles")
@in_opt
@click.option("--length", "L", required=True, help="Exact length bound.")
def surface_saddles(in_path, L):
    """Saddle connections up to a length bound."""
    for s in S.saddle_connections(_surface(in_path), _scalar(L)):
        click.echo(str(s))


@surface.command("systole")
@in_opt
@click.option("--length", "L", required=True, help="Search bound; must exceed the systole.")
def surface_systole(in_path, L):
    """Length of the shortest saddle connection."""
    s2 = S.systole_squared(_surface(in_path), _scalar(L))
    root = S.exact_sqrt(s2)
    if root is not None:
        click.echo(format_scalar(root))
    else:
        # the length leaves the quadratic field of the surface
        click.echo(f"sqrt({format_scalar(s2)}) ~ {math.sqrt(float(s2)):.12g}")


# rendering


def _svg_polygons(obj) -> tuple[list[list[Vec]], list[str], list[tuple[Vec, Vec]]]:
    r"""Polygons, their labels and one dashed segment each."""
    if "pi_l" in obj:
        Q = D.quad_from_json(obj)
        polys = [[Vec(0, 0), Q.wr[i], Q.diagonal(i), Q.wl[i]] for i in range(Q.k)]
        return polys, [f"q{i + 1}" for i in range(Q.k)], [(Vec(0, 0), Q.diagonal(i)) for i in range(Q.k)]
    if "forest" in obj:
        X = C.to_surface(C.castle_from_json(obj))
        polys = [list(p) for p in X.polygons]
        return polys, [f"p{i + 1}" for i in range(len(polys))], [_vertical(p) for p in polys]
    X = S.TranslationSurface.from_json(obj)
    polys = [list(p) for p in X.polygons]
    return polys, [f"{i + 1}" for i in range(len(polys))], [_vertical(p) for p in polys]


def _vertical(poly: list[Vec]) -> tuple[Vec, Vec]:
    """The vertical from the lowest vertex to where it first leaves the polygon."""
    lo = min(poly, key=lambda v: (float(v.y), float(v.x)))
    x0, y0 = float(lo.x), float(lo.y)
    best = None
    n = len(poly)
    for j in range(n):
        a, b = poly[j].to_floats(), poly[(j + 1) % n].to_floats()
        if (a[0] - x0) * (b[0] - x0) > 0 or a[0] == b[0]:
            continue
        y = a[1] + (b[1] - a[1]) * (x0 - a[0]) / (b[0] - a[0])
        if y > y0 + 1e-12 and (best is None or y < best):
            best = y
    return lo, Vec(lo.x, lo.y) if best is None else Vec(lo.x, lo.y + (best - y0))


def render_svg(obj, scale: float = 100.0) -> str:
    """Polygons side by side, to scale, with the dashed segment of each."""
    polys, labels, dashed = _svg_polygons(obj)
    pad = 20.0
    shapes = []
    x_off = pad
    height = 0.0
    for poly, label, (d0, d1) in zip(polys, labels, dashed):
        pts = [p.to_floats() for p in poly]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        ox = x_off - min(xs) * scale
        shapes.append((pts, label, (d0, d1), ox, max(ys), min(ys)))
        x_off += (max(xs) - min(xs)) * scale + pad
        height = max(height, (max(ys) - min(ys)) * scale)
    top = max(s[4] for s in shapes)
    H = height + 2 * pad
    W = x_off
    f = lambda v: f"{v:.3f}"
    tx = lambda ox, p: f(ox + p[0] * scale)
    ty = lambda p: f(pad + (top - p[1]) * scale)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{f(W)}" height="{f(H)}" viewBox="0 0 {f(W)} {f(H)}">']
    for pts, label, (d0, d1), ox, _, _ in shapes:
        path = " ".join(f"{tx(ox, p)},{ty(p)}" for p in pts)
        out.append(f'  <polygon points="{path}" fill="#eef" stroke="#000" stroke-width="1"/>')
        a, b = d0.to_floats(), d1.to_floats()
        out.append(f'  <line x1="{tx(ox, a)}" y1="{ty(a)}" x2="{tx(ox, b)}" y2="{ty(b)}" stroke="#555" stroke-dasharray="4,3"/>')
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        out.append(f'  <text x="{tx(ox, (cx, cy))}" y="{ty((cx, cy))}" font-size="12" text-anchor="middle">{label}</text>')
    out.append("</svg>")
    return "\n".join(out)


@cli.command()
@in_opt
@out_opt
def render(in_path, out_path):
    """SVG of a quadrangulation, castle set or polygon surface."""
    _emit(render_svg(_load(in_path)), out_path)
