"""Command-line front end: ``symdisc member|mink|lempert|np2|spectral-np2|char|slice``.

Every subcommand prints one JSON document ``{"status", "result", "diagnostics"}``
(plus ``"error"`` on failure), except ``slice``, which writes CSV.  A full
request can be given on stdin with ``--json -``.

Exit codes: 0 ok (an Infeasible verdict is ok), 1 point outside the domain,
2 usage or invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, RootModel, ValidationError, model_validator

from . import __version__
from .errors import (
    InvalidInput,
    NotInDomain,
    ReconciliationFailure,
    RootFindingError,
    SymdiscError,
    Unbounded,
)
from .interpolation import (
    ENDPOINT_TOL,
    DEFAULT_GRID,
    Interpolant,
    SolveVerdict,
    Status,
    np2_solve_gn,
    np2_spectral,
    search_interpolants,
    verify_interpolant,
)
from .lempert import lempert_gn_bounds, lempert_spectral
from .membership import (
    in_gn_costara,
    in_gn_roots,
    in_gn_roots_batch,
    in_gn_schur_cohn,
    in_spectral_ball,
)
from .minkowski import REL_TOL, RECONCILE_TOL, mink_gn, mink_gn_routes, mink_spectral_routes
from .polynomial import MatrixPoint, SymPoint, char_coeffs, poly_roots_batch

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# -- request / response schema ------------------------------------------------

Pair = Annotated[list[float], Field(min_length=2, max_length=2, description="complex number as [re, im]")]
Vector = Annotated[list[Pair], Field(min_length=1)]
Matrix = Annotated[list[Vector], Field(min_length=1, description="rows of [re, im] pairs")]
Domain = Literal["gn", "spectral"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class Tolerances(_Strict):
    bisect: float = Field(REL_TOL, gt=0, lt=1, description="relative bracket width of bisections")
    endpoint: float = Field(ENDPOINT_TOL, gt=0, description="interpolant endpoint tolerance")
    grid: int = Field(DEFAULT_GRID, ge=64, le=1024, description="certificate grid (grid**2 samples)")


class PointPayload(_Strict):
    domain: Domain = "gn"
    point: Optional[Vector] = None
    matrix: Optional[Matrix] = None

    @model_validator(mode="after")
    def _one_operand(self):
        if self.domain == "gn" and (self.point is None or self.matrix is not None):
            raise ValueError("domain gn takes 'point' only")
        if self.domain == "spectral" and (self.matrix is None or self.point is not None):
            raise ValueError("domain spectral takes 'matrix' only")
        return self


class Np2Payload(PointPayload):
    z1: Pair
    z2: Pair
    falsify: int = Field(0, ge=0, le=100_000, description="random discs to try on an Infeasible verdict")


class CharPayload(_Strict):
    matrix: Matrix


class SlicePayload(_Strict):
    n: Optional[int] = Field(None, ge=2, le=64)
    point: Optional[Vector] = None
    u: str = Field("1", pattern=r"^[1-9][0-9]*(\.(re|im))?$")
    v: str = Field("2", pattern=r"^[1-9][0-9]*(\.(re|im))?$")
    u_range: Annotated[list[float], Field(min_length=2, max_length=2)] = [-2.0, 2.0]
    v_range: Annotated[list[float], Field(min_length=2, max_length=2)] = [-2.0, 2.0]
    resolution: int = Field(64, ge=16, le=4096)
    check: bool = False


class _Request(_Strict):
    tolerances: Tolerances = Tolerances()


class MemberRequest(_Request):
    command: Literal["member"]
    payload: PointPayload


class MinkRequest(_Request):
    command: Literal["mink"]
    payload: PointPayload


class LempertRequest(_Request):
    command: Literal["lempert"]
    payload: PointPayload


class Np2Request(_Request):
    command: Literal["np2"]
    payload: Np2Payload


class SpectralNp2Request(_Request):
    command: Literal["spectral-np2"]
    payload: Np2Payload


class CharRequest(_Request):
    command: Literal["char"]
    payload: CharPayload


class SliceRequest(_Request):
    command: Literal["slice"]
    payload: SlicePayload


class Request(RootModel):
    root: Annotated[
        Union[MemberRequest, MinkRequest, LempertRequest, Np2Request, SpectralNp2Request, CharRequest, SliceRequest],
        Field(discriminator="command"),
    ]


class ErrorInfo(_Strict):
    code: str
    message: str


class Response(BaseModel):
    model_config = ConfigDict(extra="forbid")

    status: Literal["ok", "error"]
    result: Optional[dict[str, Any]] = None
    diagnostics: list[str] = []
    error: Optional[ErrorInfo] = None

    @model_validator(mode="after")
    def _error_present(self):
        if (self.status == "error") != (self.error is not None):
            raise ValueError("an error response carries exactly one error object")
        return self


# -- JSON encoding helpers --------------------------------------------------------


def _num(x):
    """Finite floats pass through; infinities become null (JSON has no inf)."""
    x = float(x) + 0.0  # no negative zero in output
    return x if math.isfinite(x) else None


def _pair(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _vector(v):
    return [_pair(z) for z in np.ravel(v)]


def _matrix(W):
    return [[_pair(z) for z in row] for row in np.asarray(W)]


def _complex_vector(rows):
    return np.array([complex(re, im) for re, im in rows])


def _complex_matrix(rows):
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() != len(rows):
        raise InvalidInput("matrix must be square")
    return np.array([[complex(re, im) for re, im in row] for row in rows])


# -- command handlers -----------------------------------------------------------


class RoutesDisagree(SymdiscError):
    code = "routes_disagree"


def _verdict(v):
    return {"inside": v.inside, "margin": _num(v.margin)}


def _member(p: PointPayload, tol: Tolerances, notes):
    if p.domain == "spectral":
        W = MatrixPoint(_complex_matrix(p.matrix))
        spec = in_spectral_ball(W)
        routes = {"spectral": _verdict(spec)}
        if W.n >= 2:
            routes["roots_of_char"] = _verdict(in_gn_roots(char_coeffs(W)))
        agree = len({r["inside"] for r in routes.values()}) == 1
        return {"inside": spec.inside, "margin": _num(spec.margin), "routes": routes, "routes_agree": agree}, agree
    s = SymPoint(_complex_vector(p.point))
    verdicts = {"roots": in_gn_roots(s), "costara": in_gn_costara(s), "schur_cohn": in_gn_schur_cohn(s)}
    if not math.isfinite(verdicts["costara"].margin):
        notes.append("costara: F_s has a pole in the closed unit disc")
    agree = len({v.inside for v in verdicts.values()}) == 1
    head = verdicts["costara"]
    result = {
        "inside": head.inside,
        "margin": _num(head.margin),
        "routes": {k: _verdict(v) for k, v in verdicts.items()},
        "routes_agree": agree,
    }
    return result, agree


def _reconciled(what, primary, secondary, notes):
    diff = abs(primary - secondary)
    if not diff <= RECONCILE_TOL:
        raise ReconciliationFailure(what, primary, secondary, RECONCILE_TOL)
    notes.append(f"{what}: routes agree, |diff| = {diff:.1e} <= {RECONCILE_TOL:.0e}")
    return primary


def _mink(p: PointPayload, tol: Tolerances, notes):
    if p.domain == "spectral":
        W = MatrixPoint(_complex_matrix(p.matrix))
        r, by_costara = mink_spectral_routes(W, tol.bisect)
        h = _reconciled("mink_spectral", r, by_costara, notes)
        return {"h": h, "routes": {"spectral_radius": r, "costara": by_costara}}
    s = SymPoint(_complex_vector(p.point))
    by_roots, by_costara = mink_gn_routes(s, tol.bisect)
    h = _reconciled("mink_gn", by_roots, by_costara, notes)
    return {"h": h, "routes": {"roots": by_roots, "costara": by_costara}}


def _interval(iv):
    return {"lo": iv.lo, "hi": iv.hi, "exact": iv.exact}


def _lempert(p: PointPayload, tol: Tolerances, notes):
    if p.domain == "spectral":
        iv = lempert_spectral(MatrixPoint(_complex_matrix(p.matrix)))
    else:
        iv = lempert_gn_bounds(SymPoint(_complex_vector(p.point)))
    return _interval(iv)


def _interpolant(f: Optional[Interpolant]):
    if f is None:
        return None
    target = _matrix(f.target.entries) if f.spectral else _vector(f.target.s)
    return {
        "kind": f.kind.value,
        "h": f.h,
        "zeta1": _pair(f.zeta1),
        "zeta2": _pair(f.zeta2),
        "alpha": _pair(f.alpha),
        "gain": _pair(f.gain),
        "t": f.t,
        "target": target,
    }


def _certificate(c):
    return {
        "pass": c.passed,
        "endpoint_errors": [_num(e) for e in c.endpoint_errors],
        "worst_margin": _num(c.worst_margin),
        "grid": c.grid,
    }


def _np2_result(v: SolveVerdict, tol: Tolerances, notes):
    result = {
        "status": v.status.value,
        "necessary_margin": _num(v.necessary_margin),
        "sufficient_margin": _num(v.sufficient_margin),
        "window": _num(v.window),
        "reason": v.reason or None,
        "interpolant": _interpolant(v.interpolant),
        "certificate": None,
    }
    notes.extend(v.diagnostics)
    if v.interpolant is not None:
        result["certificate"] = _certificate(verify_interpolant(v.interpolant, tol.grid, tol.endpoint))
    return result


def _np2(p: Np2Payload, tol: Tolerances, notes, spectral=False):
    z1, z2 = complex(*p.z1), complex(*p.z2)
    if spectral or p.domain == "spectral":
        if p.matrix is None:
            raise InvalidInput("spectral-np2 needs a matrix")
        if p.falsify:
            raise InvalidInput("falsification search is only defined for G_n")
        return _np2_result(np2_spectral(z1, z2, MatrixPoint(_complex_matrix(p.matrix))), tol, notes)
    s = SymPoint(_complex_vector(p.point))
    v = np2_solve_gn(z1, z2, s)
    result = _np2_result(v, tol, notes)
    result["falsification"] = None
    if p.falsify and v.status is Status.INFEASIBLE and v.reason != "degenerate_nodes":
        rep = search_interpolants(z1, z2, s, candidates=p.falsify, grid=tol.grid)
        result["falsification"] = {
            "candidates": rep.candidates,
            "screened_out": rep.screened_out,
            "survivors": rep.survivors,
            "found": len(rep.found),
        }
        if rep.refuted:
            notes.append("falsification search found a disc passing every sampled check")
    return result


def _char(p: CharPayload, tol: Tolerances, notes):
    W = MatrixPoint(_complex_matrix(p.matrix))
    if W.n < 2:
        raise InvalidInput("char needs n >= 2")
    s = char_coeffs(W)
    return {"n": s.n, "s": _vector(s.s)}


def _axis(spec, n):
    index, _, part = spec.partition(".")
    k = int(index) - 1
    if not 0 <= k < n:
        raise InvalidInput(f"axis {spec!r} is outside 1..{n}")
    return k, (1j if part == "im" else 1.0)


def _slice_rows(p: SlicePayload, tol: Tolerances):
    if p.point is not None:
        base = _complex_vector(p.point)
        if p.n is not None and p.n != base.size:
            raise InvalidInput("n disagrees with the base point")
    else:
        base = np.zeros(p.n or 2, dtype=complex)
    n = base.size
    if n < 2:
        raise InvalidInput("slice needs n >= 2")
    (ku, du), (kv, dv) = _axis(p.u, n), _axis(p.v, n)
    if (ku, du) == (kv, dv):
        raise InvalidInput("u and v must be different axes")
    for lo, hi in (p.u_range, p.v_range):
        if not lo < hi:
            raise InvalidInput("ranges must have lo < hi")
    k = np.arange(p.resolution)
    us = p.u_range[0] + k * (p.u_range[1] - p.u_range[0]) / p.resolution
    vs = p.v_range[0] + k * (p.v_range[1] - p.v_range[0]) / p.resolution
    U, V = np.meshgrid(us, vs, indexing="ij")
    pts = np.broadcast_to(base, (U.size, n)).copy()
    pts[:, ku] += du * U.ravel()
    pts[:, kv] += dv * V.ravel()
    if p.check:
        h = np.array([mink_gn(row, tol.bisect) for row in pts])
    else:
        h = np.max(np.abs(poly_roots_batch(pts)), axis=1)
    inside, _ = in_gn_roots_batch(pts)
    out = io.StringIO()
    out.write("u,v,h,inside\n")
    for u, v, hv, ins in zip(U.ravel(), V.ravel(), h, inside):
        out.write(f"{float(u)!r},{float(v)!r},{float(hv)!r},{'true' if ins else 'false'}\n")
    return out.getvalue()


_HANDLERS = {
    "member": _member,
    "mink": _mink,
    "lempert": _lempert,
    "np2": _np2,
    "spectral-np2": lambda p, tol, notes: _np2(p, tol, notes, spectral=True),
    "char": _char,
}

# -- dispatch -----------------------------------------------------------------------


def _exit_code(exc) -> int:
    if isinstance(exc, NotInDomain):
        return EXIT_DOMAIN
    if isinstance(exc, InvalidInput):
        return EXIT_USAGE
    if isinstance(exc, (ReconciliationFailure, RootFindingError, Unbounded, RoutesDisagree)):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


def _error(code, message, result=None, notes=()):
    return Response(status="error", result=result, diagnostics=list(notes), error=ErrorInfo(code=code, message=message))


def execute(request: Request) -> tuple[int, Response | str]:
    """Run a validated request; returns the exit code and a Response (or CSV text for slice)."""
    req = request.root
    notes: list[str] = []
    try:
        if req.command == "slice":
            return EXIT_OK, _slice_rows(req.payload, req.tolerances)
        if req.command == "member":
            result, agree = _member(req.payload, req.tolerances, notes)
            if not agree:
                return EXIT_NUMERIC, _error("routes_disagree", "membership routes disagree", result, notes)
        else:
            result = _HANDLERS[req.command](req.payload, req.tolerances, notes)
    except SymdiscError as exc:
        return _exit_code(exc), _error(exc.code, str(exc), notes=notes)
    return EXIT_OK, Response(status="ok", result=result, diagnostics=notes)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc.msg}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symdisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"symdisc {__version__}")
    parser.add_argument("--json", metavar="-", help="read a full request from stdin")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, operand=True):
        p.add_argument("--json", metavar="-", help="read a full request from stdin")
        p.add_argument("--tol-bisect", type=float, default=REL_TOL)
        p.add_argument("--tol-endpoint", type=float, default=ENDPOINT_TOL)
        p.add_argument("--grid", type=int, default=DEFAULT_GRID)
        if operand:
            dom = p.add_mutually_exclusive_group()
            dom.add_argument("--gn", dest="domain", action="store_const", const="gn")
            dom.add_argument("--spectral", dest="domain", action="store_const", const="spectral")
            p.add_argument("--point", help="JSON list of [re, im] pairs (s_1, ..., s_n)")
            p.add_argument("--matrix", help="JSON list of rows of [re, im] pairs")

    for name, text in (
        ("member", "membership by every available route"),
        ("mink", "Minkowski functional, reconciled across routes"),
        ("lempert", "Lempert function bounds at (0, point)"),
    ):
        common(sub.add_parser(name, help=text))
    for name in ("np2", "spectral-np2"):
        p = sub.add_parser(name, help="two-point interpolation with f(z1) = 0, f(z2) = target")
        common(p)
        p.add_argument("--z1", help="[re, im]")
        p.add_argument("--z2", help="[re, im]")
        if name == "np2":
            p.add_argument("--falsify", type=int, default=0, metavar="N", help="random discs to try when Infeasible")
    p = sub.add_parser("char", help="characteristic coefficients s(W)")
    common(p, operand=False)
    p.add_argument("--matrix")
    p = sub.add_parser("slice", help="CSV of h and membership over a real 2-parameter slice of G_n")
    common(p, operand=False)
    p.add_argument("--n", type=int)
    p.add_argument("--point", help="base point, default 0")
    p.add_argument("--u", default="1", help="axis k or k.re / k.im (1-based)")
    p.add_argument("--v", default="2")
    p.add_argument("--u-range", type=float, nargs=2, default=[-2.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--v-range", type=float, nargs=2, default=[-2.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--check", action="store_true", help="reconcile every h against the Costara route")
    return parser


def _request_from_args(args) -> dict:
    command = args.command
    payload: dict[str, Any] = {}
    if command in ("member", "mink", "lempert", "np2", "spectral-np2"):
        domain = args.domain or ("spectral" if command == "spectral-np2" else "gn")
        if command == "spectral-np2" and domain != "spectral":
            raise UsageError("spectral-np2 works on matrices only")
        payload["domain"] = domain
        if args.point is not None:
            payload["point"] = _json_arg(args.point, "--point")
        if args.matrix is not None:
            payload["matrix"] = _json_arg(args.matrix, "--matrix")
        if command in ("np2", "spectral-np2"):
            for flag in ("z1", "z2"):
                value = getattr(args, flag)
                if value is None:
                    raise UsageError(f"--{flag} is required")
                payload[flag] = _json_arg(value, f"--{flag}")
            if command == "np2" and args.falsify:
                payload["falsify"] = args.falsify
    elif command == "char":
        if args.matrix is None:
            raise UsageError("--matrix is required")
        payload["matrix"] = _json_arg(args.matrix, "--matrix")
    elif command == "slice":
        if args.point is not None:
            payload["point"] = _json_arg(args.point, "--point")
        if args.n is not None:
            payload["n"] = args.n
        payload.update(
            u=args.u, v=args.v, u_range=args.u_range, v_range=args.v_range,
            resolution=args.resolution, check=args.check,
        )
    tolerances = {"bisect": args.tol_bisect, "endpoint": args.tol_endpoint, "grid": args.grid}
    return {"command": command, "payload": payload, "tolerances": tolerances}


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"])
        parts.append(f"{loc}: {err['msg']}" if loc else err["msg"])
    return "; ".join(parts)


def run(argv, stdin=None, stdout=None) -> int:
    """Parse ``argv``, execute, print one document to ``stdout``; returns the exit code."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout

    def emit(code, doc):
        if isinstance(doc, str):
            stdout.write(doc)
        else:
            stdout.write(json.dumps(doc.model_dump(mode="json", exclude_none=False)) + "\n")
        return code

    try:
        args = build_parser().parse_args(argv)
        if args.json is not None:
            if args.json != "-":
                raise UsageError("--json only reads from stdin ('-')")
            raw = _json_arg(stdin.read(), "request")
            if args.command and isinstance(raw, dict) and raw.get("command") != args.command:
                raise UsageError(f"request command {raw.get('command')!r} does not match {args.command!r}")
        elif args.command is None:
            raise UsageError("a subcommand or --json - is required")
        else:
            raw = _request_from_args(args)
        request = Request.model_validate(raw)
    except UsageError as exc:
        return emit(EXIT_USAGE, _error("usage", str(exc)))
    except ValidationError as exc:
        return emit(EXIT_USAGE, _error("invalid_input", _validation_message(exc)))
    except SymdiscError as exc:
        return emit(_exit_code(exc), _error(exc.code, str(exc)))
    # overflow on extreme inputs is reported through the residual certificate,
    # not as numpy warnings on stderr
    with np.errstate(all="ignore"):
        code, doc = execute(request)
    return emit(code, doc)


def request_schema() -> dict:
    return Request.model_json_schema()


def response_schema() -> dict:
    return Response.model_json_schema()


def write_schemas(directory) -> list:
    """Write the request and response JSON schemas into ``directory``."""
    from pathlib import Path

    out = []
    for name, schema in (("request", request_schema()), ("response", response_schema())):
        path = Path(directory) / f"{name}.schema.json"
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        out.append(path)
    return out


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
