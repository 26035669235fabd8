"""JSON exchange formats for hypersurfaces, jets, differentials and reports.

Hypersurface file (terms of the graph h in Im w = h, Levi part included):
    {"n": 2, "max_weight": 6,
     "terms": [{"z": [1, 0], "zbar": [1, 0], "u": 0, "re": "1", "im": "0"}, ...]}
Jet file (one entry per component, "component" is 1..n or "w"):
    {"n": 1, "max_weight": 4,
     "terms": [{"component": "w", "z": [0], "w": 2, "re": "0", "im": "1"}, ...]}
Differential file:
    {"matrix": [["1", "3"], ["0", "4"]]}     entries are scalar strings like "1/2+3i"
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
from gmpy2 import mpq

from .scalars import FLOAT, RATIONAL, GaussQ, format_rational, parse_scalar
from .verdict import Verdict
from .wpoly import HoloPoly, Monomial, WPoly


class FormatError(ValueError):
    pass


def _parse_part(x, backend):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        if backend == FLOAT or isinstance(x, float):
            return float(x)
        return mpq(x)
    if isinstance(x, str):
        try:
            return mpq(x) if backend != FLOAT else float(mpq(x))
        except ValueError as exc:
            raise FormatError(f"bad rational {x!r}") from exc
    raise FormatError(f"bad coefficient {x!r}")


def _coeff(term: dict, backend: str):
    re = _parse_part(term.get("re", "0"), backend)
    im = _parse_part(term.get("im", "0"), backend)
    if backend == FLOAT or isinstance(re, float) or isinstance(im, float):
        return complex(float(re), float(im))
    return GaussQ(re, im)


def _fmt_part(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return format_rational(x)


def _split(c):
    if isinstance(c, complex):
        return repr(c.real), repr(c.imag)
    c = GaussQ.coerce(c)
    return _fmt_part(c.re), _fmt_part(c.im)


def _int_list(v, n, name):
    if not isinstance(v, list) or len(v) != n or not all(isinstance(x, int) and x >= 0 for x in v):
        raise FormatError(f"{name} must be a list of {n} nonnegative integers")
    return tuple(v)


def _header(data: dict):
    if not isinstance(data, dict):
        raise FormatError("top level must be a JSON object")
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise FormatError("'n' must be a positive integer")
    K = data.get("max_weight")
    if not isinstance(K, int) or K < 2:
        raise FormatError("'max_weight' must be an integer >= 2")
    terms = data.get("terms")
    if not isinstance(terms, list):
        raise FormatError("'terms' must be a list")
    return n, K, terms


def hypersurface_from_json(data: dict, backend: str = RATIONAL):
    """Returns (n, max_weight, graph WPoly)."""
    n, K, terms = _header(data)
    t = {}
    for term in terms:
        kz = _int_list(term.get("z"), n, "z")
        kzb = _int_list(term.get("zbar", [0] * n), n, "zbar")
        ku = term.get("u", 0)
        if not isinstance(ku, int) or ku < 0:
            raise FormatError("u must be a nonnegative integer")
        m = Monomial(kz, kzb, ku)
        c = _coeff(term, backend)
        t[m] = t[m] + c if m in t else c
    return n, K, WPoly(n, t)


def hypersurface_to_json(graph: WPoly, K: int) -> dict:
    terms = []
    for m, c in sorted(graph.items(), key=lambda mc: (mc[0].weight, mc[0].ku, mc[0].kz, mc[0].kzb)):
        re, im = _split(c)
        terms.append({"z": list(m.kz), "zbar": list(m.kzb), "u": m.ku, "re": re, "im": im})
    return {"n": graph.n, "max_weight": K, "terms": terms}


def jet_from_json(data: dict, backend: str = RATIONAL):
    from .jets import JetMap
    n, K, terms = _header(data)
    comps = [dict() for _ in range(n + 1)]
    for term in terms:
        comp = term.get("component")
        if comp == "w":
            idx = n
        elif isinstance(comp, int) and 1 <= comp <= n:
            idx = comp - 1
        else:
            raise FormatError(f"component must be 1..{n} or 'w', got {comp!r}")
        kz = _int_list(term.get("z"), n, "z")
        kw = term.get("w", 0)
        if not isinstance(kw, int) or kw < 0:
            raise FormatError("w must be a nonnegative integer")
        key = (kz, kw)
        c = _coeff(term, backend)
        comps[idx][key] = comps[idx][key] + c if key in comps[idx] else c
    polys = [HoloPoly(n, c) for c in comps]
    try:
        return JetMap(n, K, polys[:n], polys[n])
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def jet_to_json(F) -> dict:
    terms = []
    for idx, p in enumerate(list(F.fz) + [F.fw]):
        comp = "w" if idx == F.n else idx + 1
        for m, c in sorted(p.items(), key=lambda mc: (mc[0].weight, mc[0].kw, mc[0].kz)):
            re, im = _split(c)
            terms.append({"component": comp, "z": list(m.kz), "w": m.kw, "re": re, "im": im})
    return {"n": F.n, "max_weight": F.K, "terms": terms}


def matrix_from_json(data: dict, backend: str = RATIONAL):
    M = data.get("matrix") if isinstance(data, dict) else None
    if not isinstance(M, list) or not M or not all(isinstance(r, list) for r in M):
        raise FormatError("'matrix' must be a list of rows")
    out = []
    for row in M:
        r = []
        for x in row:
            if isinstance(x, dict):
                c = _coeff(x, backend)
            elif isinstance(x, (int, float, str)) and not isinstance(x, bool):
                try:
                    c = parse_scalar(str(x))
                except ValueError as exc:
                    raise FormatError(f"bad matrix entry {x!r}") from exc
                if backend == FLOAT:
                    c = complex(c)
            else:
                raise FormatError(f"bad matrix entry {x!r}")
            r.append(c)
        out.append(r)
    return out


def change_to_json(change) -> dict:
    return {
        "n": change.n,
        "max_weight": change.K,
        "linear": [[_split(x) for x in row] for row in change.linear],
        "wscale": str(change.wscale),
        "f": [[{"z": list(m.kz), "w": m.kw, "re": _split(c)[0], "im": _split(c)[1]} for m, c in p.items()]
              for p in change.f],
        "g": [{"z": list(m.kz), "w": m.kw, "re": _split(c)[0], "im": _split(c)[1]} for m, c in change.g.items()],
    }


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def to_jsonable(obj):
    """Best-effort conversion of certificates to JSON-compatible values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Verdict):
        return verdict_to_json(obj)
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return str(obj)


def verdict_to_json(v: Verdict) -> dict:
    return {"status": v.status.value, "strict": v.strict, "reason": v.reason,
            "certificate": to_jsonable(v.certificate), "witness": to_jsonable(v.witness)}


def dump(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
