"""Graph text files, JSON instance files and atomic report writes."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .metric import GraphError, MetricGraph

PROBLEMS = ("cvr", "cvr-pen", "cvr-multi", "kcenter", "kmedian")

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["graph"],
    "additionalProperties": False,
    "properties": {
        "graph": {
            "type": "object",
            "required": ["n", "edges"],
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [{"type": "integer", "minimum": 0},
                                        {"type": "integer", "minimum": 0},
                                        {"type": "number", "exclusiveMinimum": 0}],
                        "minItems": 3,
                        "maxItems": 3,
                    },
                },
                "labels": {"type": "array", "items": {"type": "string"}},
            },
        },
        "problem": {"enum": list(PROBLEMS)},
        "depots": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "clients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "demand"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "demand": {"type": "integer", "minimum": 1},
                    "penalty": {"type": "number", "minimum": 0},
                },
            },
        },
        "capacity": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "weights": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "epsilon_hat": {"type": "number", "exclusiveMinimum": 0},
        "c": {"type": "number", "exclusiveMinimum": 4},
        "eta_hint": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
}


class InstanceError(ValueError):
    """Schema or range violation; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.detail = message


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


@dataclass
class Instance:
    graph: MetricGraph
    problem: str | None = None
    depots: list[int] = field(default_factory=list)
    clients: list[dict] = field(default_factory=list)
    capacity: int | None = None
    k: int | None = None
    weights: dict[int, float] | None = None
    epsilon_hat: float | None = None
    c: float | None = None
    eta_hint: int | None = None
    seed: int | None = None

    @property
    def demands(self) -> dict[int, int]:
        return {cl["id"]: cl["demand"] for cl in self.clients}

    @property
    def penalties(self) -> dict[int, float] | None:
        if not any("penalty" in cl for cl in self.clients):
            return None
        return {cl["id"]: cl.get("penalty", float("inf")) for cl in self.clients}

    def to_dict(self) -> dict:
        g = self.graph
        out: dict = {"graph": {"n": g.n, "edges": [[u, v, w] for u, v, w in g.edges]}}
        if g.labels is not None:
            out["graph"]["labels"] = list(g.labels)
        for key in ("problem", "capacity", "k", "epsilon_hat", "c", "eta_hint", "seed"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.depots:
            out["depots"] = list(self.depots)
        if self.clients:
            out["clients"] = [dict(cl) for cl in self.clients]
        if self.weights is not None:
            out["weights"] = {str(v): w for v, w in sorted(self.weights.items())}
        return out


def parse_instance(doc: dict) -> Instance:
    """Validate ``doc`` against the schema and the vertex ranges."""
    validator = jsonschema.Draft202012Validator(INSTANCE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InstanceError(_pointer(e.absolute_path), e.message)
    gd = doc["graph"]
    n = gd["n"]

    def check(v, path):
        if not 0 <= v < n:
            raise InstanceError(_pointer(path), f"vertex {v} outside 0..{n - 1}")

    for i, (u, v, _) in enumerate(gd["edges"]):
        check(u, ["graph", "edges", i, 0])
        check(v, ["graph", "edges", i, 1])
    for i, s in enumerate(doc.get("depots", [])):
        check(s, ["depots", i])
    for i, cl in enumerate(doc.get("clients", [])):
        check(cl["id"], ["clients", i, "id"])
    weights = None
    if "weights" in doc:
        weights = {}
        for key, w in doc["weights"].items():
            if not key.isdigit():
                raise InstanceError(_pointer(["weights", key]), "weight keys must be vertex ids")
            check(int(key), ["weights", key])
            weights[int(key)] = float(w)
    try:
        g = MetricGraph(n, gd["edges"], labels=gd.get("labels"))
    except GraphError as exc:
        raise InstanceError("/graph", str(exc)) from None
    return Instance(g, doc.get("problem"), list(doc.get("depots", [])),
                    [dict(cl) for cl in doc.get("clients", [])], doc.get("capacity"),
                    doc.get("k"), weights, doc.get("epsilon_hat"), doc.get("c"),
                    doc.get("eta_hint"), doc.get("seed"))


def dumps_instance(inst: Instance) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(inst.to_dict(), sort_keys=True, indent=2) + "\n"


def read_graph_text(text: str) -> MetricGraph:
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or len(rows[0]) != 2:
        raise GraphError("graph file must start with a header line 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header promises {m} edges but the file lists {len(body)}")
    edges = []
    for k, r in enumerate(body, start=2):
        if len(r) != 3:
            raise GraphError(f"line {k}: expected 'u v w'")
        edges.append((int(r[0]), int(r[1]), float(r[2])))
    return MetricGraph(n, edges)


def write_graph_text(g: MetricGraph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v} {w!r}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def load(path: str | os.PathLike) -> Instance:
    """Read either a JSON instance or a plain graph file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError("/", f"malformed JSON: {exc.msg} at line {exc.lineno}") from None
        return parse_instance(doc)
    return Instance(read_graph_text(text))


def atomic_write(path: str | os.PathLike, text: str):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
