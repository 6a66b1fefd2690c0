"""JSON instance and solution files.

Matrix instance::

    {"kind": "matrix", "A": [[1, 0.5], [0.2, 1]], "m": [0, 0], "w": [0.5, 0.5]}

Geometry instance (``map`` optional, ``p`` a number or ``"inf"``)::

    {"kind": "geometry",
     "body": {"type": "lp", "p": "inf", "dim": 2},
     "map": [[2, 0], [0, 1]],
     "hyperplanes": [{"normal": [1, 0], "offset": 0}]}

Floats are written with Python's shortest round-trip repr, so reading a
solution back reproduces every coefficient bit for bit.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .geometry import Hyperplane, LinearImage, LpBall, parse_p
from .solver import Certificate, PlankSystem


@dataclass
class MatrixInstance:
    A: np.ndarray
    m: np.ndarray
    w: np.ndarray

    def system(self):
        return PlankSystem(self.A, self.m, self.w)


@dataclass
class GeometryInstance:
    body: object
    hyperplanes: list


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", line=exc.lineno) from exc


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object", field=where)
    if key not in obj:
        raise ParseError(f"missing field '{key}'", field=f"{where}.{key}".lstrip("."))
    return obj[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field '{where}': expected a number, got {value!r}", field=where)
    if not math.isfinite(value):
        raise ParseError(f"field '{where}': must be finite", field=where)
    return float(value)


def _vector(value, where, size=None):
    if not isinstance(value, list):
        raise ParseError(f"field '{where}': expected an array", field=where)
    if size is not None and len(value) != size:
        raise ParseError(f"field '{where}': expected {size} entries, got {len(value)}",
                         field=where)
    return np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(value)])


def _matrix(value, where):
    if not isinstance(value, list) or not value:
        raise ParseError(f"field '{where}': expected a non-empty array of rows", field=where)
    n = len(value)
    return np.array([_vector(row, f"{where}[{i}]", n) for i, row in enumerate(value)])


def parse_instance(data):
    kind = _require(data, "kind", "")
    if kind == "matrix":
        A = _matrix(_require(data, "A", ""), "A")
        n = A.shape[0]
        return MatrixInstance(A, _vector(_require(data, "m", ""), "m", n),
                              _vector(_require(data, "w", ""), "w", n))
    if kind == "geometry":
        desc = _require(data, "body", "")
        btype = _require(desc, "type", "body")
        if btype != "lp":
            raise ParseError(f"field 'body.type': unsupported body type {btype!r}",
                             field="body.type")
        raw_p = _require(desc, "p", "body")
        try:
            p = parse_p(raw_p if isinstance(raw_p, str) else _number(raw_p, "body.p"))
        except ValueError as exc:
            raise ParseError(f"field 'body.p': {exc}", field="body.p") from exc
        dim = _require(desc, "dim", "body")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ParseError("field 'body.dim': expected a positive integer", field="body.dim")
        body = LpBall(p, dim)
        if data.get("map") is not None:
            M = _matrix(data["map"], "map")
            if M.shape != (dim, dim):
                raise ParseError(f"field 'map': expected {dim}x{dim}", field="map")
            body = LinearImage(body, M)
        planes = _require(data, "hyperplanes", "")
        if not isinstance(planes, list) or not planes:
            raise ParseError("field 'hyperplanes': expected a non-empty array",
                             field="hyperplanes")
        hyperplanes = []
        for i, h in enumerate(planes):
            where = f"hyperplanes[{i}]"
            normal = _vector(_require(h, "normal", where), f"{where}.normal", dim)
            offset = _number(_require(h, "offset", where), f"{where}.offset")
            hyperplanes.append(Hyperplane(normal, offset))
        return GeometryInstance(body, hyperplanes)
    raise ParseError(f"field 'kind': expected 'matrix' or 'geometry', got {kind!r}",
                     field="kind")


def load_instance(path):
    return parse_instance(_load_json(path))


def instance_to_dict(inst):
    if isinstance(inst, MatrixInstance):
        return {"kind": "matrix", "A": _floats(inst.A), "m": _floats(inst.m),
                "w": _floats(inst.w)}
    body = inst.body
    out = {"kind": "geometry"}
    if isinstance(body, LinearImage):
        out["body"] = _body_dict(body.base)
        out["map"] = _floats(body.map)
    else:
        out["body"] = _body_dict(body)
    out["hyperplanes"] = [{"normal": _floats(h.normal), "offset": float(h.offset)}
                          for h in inst.hyperplanes]
    return out


def _body_dict(ball):
    p = "inf" if math.isinf(ball.p) else ball.p
    if isinstance(p, float) and p.is_integer():
        p = int(p)
    return {"type": "lp", "p": p, "dim": ball.dim}


def _floats(a):
    return np.asarray(a, dtype=float).tolist()


def solution_to_dict(sol, homothet=None):
    """Serialise a :class:`~planks.solver.Solution` (and a homothet result for
    geometry instances)."""
    cert = {"type": sol.certificate.value}
    if sol.resolution is not None:
        cert["N"] = int(sol.resolution)
    solver = {k: (int(v) if isinstance(v, (int, np.integer)) else float(v))
              for k, v in sorted(sol.meta.items())}
    if homothet is None:
        return {
            "kind": "matrix",
            "lambda": _floats(sol.lam),
            "margins": _floats(sol.margins),
            "norms": {"l1": sol.l1_norm, "l2sq": sol.l2sq_norm,
                      "weighted": sol.weighted_norm},
            "certificate": cert,
            "solver": solver,
        }
    return {
        "kind": "geometry",
        "center": _floats(homothet.center),
        "ratio": homothet.ratio,
        "lambda": _floats(homothet.lam),
        "margins": _floats(homothet.margins),
        "body_norm_of_center": homothet.body_norm_of_center,
        "certificate": cert,
        "solver": solver,
    }


@dataclass
class SolutionRecord:
    """What the verifier needs back from a solution file."""

    kind: str
    lam: np.ndarray
    certificate: Certificate
    center: np.ndarray = None


def parse_solution(data):
    kind = _require(data, "kind", "")
    if kind not in ("matrix", "geometry"):
        raise ParseError(f"field 'kind': unknown solution kind {kind!r}", field="kind")
    lam = _vector(_require(data, "lambda", ""), "lambda")
    cert_type = _require(_require(data, "certificate", ""), "type", "certificate")
    try:
        cert = Certificate(cert_type)
    except ValueError as exc:
        raise ParseError(f"field 'certificate.type': unknown certificate {cert_type!r}",
                         field="certificate.type") from exc
    center = None
    if kind == "geometry":
        center = _vector(_require(data, "center", ""), "center")
    return SolutionRecord(kind, lam, cert, center)


def load_solution(path):
    return parse_solution(_load_json(path))


def dumps(obj):
    return json.dumps(obj, indent=2) + "\n"
