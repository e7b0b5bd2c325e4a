"""Command-line front end.

Every command prints a JSON report on stdout.  Exit codes: 0 success,
1 verification failure or bad input data, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, adelic, local, operators, wavelets
from .local import DEFAULT_TOL
from .padic import enumerate_shifts, is_prime, scalar_to_json

FAMILIES = ("kozyrev", "haar", "haar2", "modified", "adelic", "mra")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _parse_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected lo:hi")
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _parse_places(text: str) -> list[int]:
    try:
        places = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise UsageError(f"bad place list {text!r}")
    for p in places:
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")
    return places


def _load(path: str) -> tuple[dict, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e.msg}")


def _digest(*blobs: bytes) -> str:
    h = hashlib.sha256()
    for b in blobs:
        h.update(b)
    return h.hexdigest()


def _write_json(path: str, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# basis


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for --family {args.family}")


def _local_dilates(psi: local.LocalFunction, js, depth) -> list[local.LocalFunction]:
    shifts = enumerate_shifts(psi.p, depth)
    return [wavelets.place_wavelet(psi, j, a) for j in js for a in shifts]


def _basis(args) -> dict:
    fam = args.family
    rng = np.random.default_rng(args.seed)
    depth = args.depth
    if depth < 0:
        raise UsageError("--depth must be non-negative")
    if fam in ("kozyrev", "haar", "modified", "haar2"):
        if fam != "haar2":
            _require(args, "p")
            if not is_prime(args.p):
                raise UsageError(f"--p {args.p} is not prime")
        js = _parse_range(args.jbox)
        if fam == "kozyrev":
            fns = [wavelets.kozyrev(args.p, k, j, a) for k in range(1, args.p) for j in js for a in enumerate_shifts(args.p, depth)]
        elif fam == "modified":
            if min(js) < 0:
                raise UsageError("modified bases use j >= 0")
            fns = wavelets.modified_basis(args.p, max(js), depth)
        elif fam == "haar":
            params = _haar_params(args, rng)
            fns = [g for mu in range(1, params.p) for g in _local_dilates(wavelets.haar_wavelet(params, mu), js, depth)]
        else:
            N = 2**args.s
            gammas = np.exp(2j * np.pi * rng.random(N))
            fns = _local_dilates(wavelets.haar2_wavelet(args.s, gammas), js, depth)
        return {"kind": "local", "family": fam, "functions": [local.to_json(f) for f in fns]}
    if fam == "adelic":
        _require(args, "places")
        idx = adelic.tensor_box(_parse_places(args.places), _parse_range(args.jbox), depth)
        fns = [adelic.adelic_wavelet(i) for i in idx]
        return {
            "kind": "adelic",
            "family": fam,
            "indices": [i.to_json() for i in idx],
            "functions": [adelic.function_to_json(f) for f in fns],
        }
    _require(args, "top")
    if not is_prime(args.top):
        raise UsageError(f"--top {args.top} is not prime")
    levels = _parse_range(args.jbox)
    fns = adelic.mra_family(args.top, levels, depth, real=args.real)
    return {"kind": "adelic", "family": fam, "functions": [adelic.function_to_json(f) for f in fns]}


def _haar_params(args, rng) -> wavelets.HaarFamilyParams:
    if args.params:
        obj, _ = _load(args.params)
        U = np.array([[complex(*z) for z in row] for row in obj["U"]])
        sigma = np.array([[complex(*z) for z in row] for row in obj["sigma"]])
        try:
            return wavelets.HaarFamilyParams(int(obj["p"]), int(obj["s"]), U, sigma)
        except ValueError as e:
            raise InputError(str(e))
    return wavelets.random_params(args.p, args.s, rng)


def cmd_basis(args) -> tuple[int, dict]:
    doc = _basis(args)
    if args.out:
        _write_json(args.out, doc)
    return 0, {"family": args.family, "count": len(doc["functions"]), "out": args.out}


# gram


def _functions_from_doc(doc: dict):
    kind = doc.get("kind", "local")
    try:
        if kind == "local":
            return kind, [local.from_json(f) for f in doc["functions"]]
        if kind == "adelic":
            return kind, [adelic.function_from_json(f) for f in doc["functions"]]
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed function: {e}")
    raise InputError(f"unknown basis kind {kind!r}")


def _write_matrix(path: str, G: np.ndarray) -> None:
    if path.endswith(".json"):
        _write_json(path, [[_complex(z) for z in row] for row in G])
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in G:
        w.writerow([f"{z.real:.17g}{z.imag:+.17g}j" for z in row])
    Path(path).write_text(buf.getvalue())


def cmd_gram(args) -> tuple[int, dict]:
    doc, raw = _load(args.inp)
    kind, fns = _functions_from_doc(doc)
    if kind == "local":
        if len({f.p for f in fns}) > 1:
            raise InputError("basis mixes functions from different places")
        G = wavelets.gram_matrix(fns)
    else:
        if len({f.real is None for f in fns}) > 1:
            raise InputError("basis mixes functions on A and on the finite adeles")
        G = adelic.adelic_gram(fns)
    n = len(G)
    dev = np.abs(G - np.eye(n)) if n else np.zeros((0, 0))
    worst = None
    if n:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        worst = {"i": int(i), "j": int(j), "value": _complex(G[i, j])}
    md = float(dev.max()) if n else 0.0
    if args.out:
        _write_matrix(args.out, G)
    ok = md < args.tol
    return (0 if ok else 1), {
        "input_digest": _digest(raw),
        "n": n,
        "max_deviation": md,
        "identity": ok,
        "worst_pair": worst,
    }


# operators and decomposition


def _load_function(path: str):
    doc, raw = _load(path)
    try:
        return adelic.function_from_json(doc), raw
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed function: {e}")


def _load_symbol(path: str):
    doc, raw = _load(path)
    try:
        return operators.symbol_from_json(doc), raw
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed symbol: {e}")


def cmd_apply(args) -> tuple[int, dict]:
    f, raw_f = _load_function(args.inp)
    A, raw_s = _load_symbol(args.symbol)
    g = operators.apply_symbol(f, A)
    if args.out:
        _write_json(args.out, adelic.function_to_json(g))
    rep = adelic.lizorkin_check(g)
    return 0, {
        "input_digest": _digest(raw_s, raw_f),
        "terms": len(adelic.terms_of(g)),
        "norm": adelic.adelic_norm(g),
        "lizorkin": rep.finite_ok,
        "out": args.out,
    }


def cmd_eigencheck(args) -> tuple[int, dict]:
    A, raw_s = _load_symbol(args.symbol)
    doc, raw_i = _load(args.index)
    try:
        alpha = adelic.AdelicIndex.from_json(doc)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed index: {e}")
    res = operators.eigen_check(A, alpha)
    residual = operators.verify_eigenrelation(A, alpha)
    return 0, {
        "input_digest": _digest(raw_s, raw_i),
        "is_eigen": res.is_eigen,
        "eigenvalue": _complex(res.eigenvalue),
        "place_values": {str(q): _complex(v) for q, v in res.place_values.items()},
        "residual": residual,
    }


def _index_key(i: adelic.AdelicIndex) -> dict:
    return {
        "k": {str(p): k for p, k in i.k_map().items()},
        "j": {str(p): j for p, j in i.j_map().items()},
        "a": {str(p): scalar_to_json(a) for p, a in i.a_map().items()},
    }


def cmd_decompose(args) -> tuple[int, dict]:
    f, raw = _load_function(args.inp)
    d = adelic.decompose(f, tol=args.tol, certify=args.certify)
    ok = d.residual < args.tol and d.certified is not False
    return (0 if ok else 1), {
        "input_digest": _digest(raw),
        "coefficients": [{"index": _index_key(i), "value": _complex(c)} for i, c in d.coefficients.items()],
        "residual": d.residual,
        "box_size": d.box_size,
        "certified": d.certified,
        "max_outside": d.max_outside,
    }


def cmd_lizorkin(args) -> tuple[int, dict]:
    f, raw = _load_function(args.inp)
    if args.moments < 0:
        raise UsageError("--moments must be non-negative")
    rep = adelic.lizorkin_check(f, args.moments, args.tol)
    return (0 if rep.ok else 1), {
        "input_digest": _digest(raw),
        "ok": rep.ok,
        "places": {str(p): {"ok": ok, "integral": _complex(v)} for p, (ok, v) in rep.places.items()},
        "real_moments": [_complex(v) for v in rep.real_moments],
        "failing_place": None if rep.ok else str(rep.failing_place()),
    }


# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adelion", description="Exact harmonic analysis on p-adic fields and adeles.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="verification tolerance (env ADELION_TOL)")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", parents=[common], help="generate a wavelet family")
    b.add_argument("--family", choices=FAMILIES, required=True)
    b.add_argument("--p", type=int)
    b.add_argument("--s", type=int, default=0, help="support exponent for haar/haar2")
    b.add_argument("--params", help="JSON with p, s, U, sigma for --family haar")
    b.add_argument("--places", help="comma-separated primes for --family adelic")
    b.add_argument("--top", type=int, help="top prime for --family mra")
    b.add_argument("--real", action="store_true", help="include the real place (mra)")
    b.add_argument("--jbox", default="0:0", help="dilation range lo:hi")
    b.add_argument("--depth", type=int, default=0, help="shift depth")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_basis, parser=b)

    g = sub.add_parser("gram", parents=[common], help="audit orthonormality of a basis file")
    g.add_argument("--in", dest="inp", required=True)
    g.add_argument("--out", help="matrix output, .csv or .json")
    g.set_defaults(func=cmd_gram, parser=g)

    a = sub.add_parser("apply", parents=[common], help="apply a symbol to a function")
    a.add_argument("--symbol", required=True)
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_apply, parser=a)

    e = sub.add_parser("eigencheck", parents=[common], help="test the eigenfunction criterion")
    e.add_argument("--symbol", required=True)
    e.add_argument("--index", required=True)
    e.set_defaults(func=cmd_eigencheck, parser=e)

    d = sub.add_parser("decompose", parents=[common], help="finite wavelet decomposition on the finite adeles")
    d.add_argument("--in", dest="inp", required=True)
    d.add_argument("--certify", action="store_true", help="scan one level wider for missed coefficients")
    d.set_defaults(func=cmd_decompose, parser=d)

    z = sub.add_parser("lizorkin", parents=[common], help="Lizorkin membership report")
    z.add_argument("--in", dest="inp", required=True)
    z.add_argument("--moments", type=int, default=0)
    z.set_defaults(func=cmd_lizorkin, parser=z)
    return ap


def _glue_ranges(argv: list[str]) -> list[str]:
    # let "--jbox -2:2" through; argparse would take "-2:2" for an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--jbox":
            out.append("--jbox=" + next(it, ""))
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_ranges(list(sys.argv[1:] if argv is None else argv)))
    t0 = time.perf_counter()
    try:
        code, result = args.func(args)
    except UsageError as e:
        args.parser.print_usage(sys.stderr)
        print(f"{args.parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except (InputError, adelic.NotLizorkin, operators.SymbolDomain, ValueError) as e:
        diag = {"command": args.command, "error": type(e).__name__, "message": str(e)}
        if isinstance(e, adelic.NotLizorkin):
            diag["place"] = str(e.place)
        print(json.dumps(diag, indent=2, sort_keys=True))
        return 1
    report = {"command": args.command, "version": __version__, "tol": args.tol, "result": result}
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    print(json.dumps(report, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
