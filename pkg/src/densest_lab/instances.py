"""Gap-problem instances and their JSON manifests."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import InvalidInputError, ParameterError
from .gadget import GadgetShape
from .graph import Graph, UniformHypergraph
from .rational import Number, fmt_rat, parse_rat

Carrier = Union[Graph, UniformHypergraph, GadgetShape]


class GapKind(str, Enum):
    GAP_DKS = "GapDkS"                  # (lambda)
    GAP_DKS_SIZE = "GapDkS-size"        # (lambda, gamma)
    POLY_GAP_DKS = "PolyGapDkS"         # (delta, t)
    POLY_GAP_DKS_SIZE = "PolyGapDkS-size"  # (delta, t, gamma)
    STRONG_GAP_DKSH = "StrongGapDkSH"   # (lambda, gamma, t)
    GAP_DALKS = "GapDALkS"              # (lambda), threshold alpha


PARAM_NAMES = {
    GapKind.GAP_DKS: ("lambda",),
    GapKind.GAP_DKS_SIZE: ("lambda", "gamma"),
    GapKind.POLY_GAP_DKS: ("delta", "t"),
    GapKind.POLY_GAP_DKS_SIZE: ("delta", "t", "gamma"),
    GapKind.STRONG_GAP_DKSH: ("lambda", "gamma", "t"),
    GapKind.GAP_DALKS: ("lambda",),
}

_CARRIER_TAG = {Graph: "graph", UniformHypergraph: "hypergraph", GadgetShape: "gadget"}


@dataclass(frozen=True)
class GapInstance:
    """One gap-problem instance.

    ``threshold`` is the edge/subset target for the DkS-style kinds, the
    rounded-up clique-count target for the PolyGapDkS kinds, and the
    density ``alpha`` for GapDALkS.
    """

    kind: GapKind
    carrier: Carrier
    k: int
    threshold: Number
    params: dict[str, Number] = field(default_factory=dict)
    faithful: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GapKind(self.kind))
        params = {name: (int(v) if name == "t" else Fraction(v)) for name, v in self.params.items()}
        object.__setattr__(self, "params", params)
        missing = [p for p in PARAM_NAMES[self.kind] if p not in params]
        if missing:
            raise ParameterError(f"{self.kind.value} instance missing parameters {missing}")
        # GapDALkS(2 - 1/t - eps) drops below 1 at eps = 1; only positivity is kept there
        if self.kind is GapKind.GAP_DALKS and params["lambda"] <= 0:
            raise ParameterError("lambda must be positive")
        for name in ("lambda", "gamma"):
            if self.kind is GapKind.GAP_DALKS and name == "lambda":
                continue
            if name in params and params[name] < 1:
                raise ParameterError(f"{name} must be >= 1, got {fmt_rat(params[name])}")
        if "delta" in params and not 0 < params["delta"] <= 1:
            raise ParameterError("delta must lie in (0, 1]")
        if "eps" in params and not 0 < params["eps"] <= 1:
            raise ParameterError("eps must lie in (0, 1]")
        if "t" in params and params["t"] < 2:
            raise ParameterError("t must be >= 2")
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        expected = {
            GapKind.STRONG_GAP_DKSH: UniformHypergraph,
            GapKind.GAP_DALKS: (Graph, GadgetShape),
        }.get(self.kind, Graph)
        if not isinstance(self.carrier, expected):
            raise InvalidInputError(f"{self.kind.value} cannot carry a {type(self.carrier).__name__}")
        if self.kind is GapKind.GAP_DALKS:
            object.__setattr__(self, "threshold", Fraction(self.threshold))
        else:
            if Fraction(self.threshold).denominator != 1:
                raise ParameterError("integer threshold required for this kind")
            object.__setattr__(self, "threshold", int(self.threshold))

    @property
    def t(self) -> int | None:
        if isinstance(self.carrier, UniformHypergraph):
            return self.carrier.t
        t = self.params.get("t")
        return int(t) if t is not None else None

    def retag(self, kind: GapKind, params: dict[str, Number]) -> "GapInstance":
        return GapInstance(kind, self.carrier, self.k, self.threshold, params, self.faithful)

    def manifest(self, carrier_path: str) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "threshold": fmt_rat(self.threshold),
            "params": {name: fmt_rat(v) for name, v in sorted(self.params.items())},
            "faithful": self.faithful,
            "carrier": {"format": _CARRIER_TAG[type(self.carrier)], "path": carrier_path},
        }


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def carrier_suffix(carrier: Carrier) -> str:
    return {"graph": ".graph", "hypergraph": ".hyper", "gadget": ".gadget"}[_CARRIER_TAG[type(carrier)]]


def save_instance(inst: GapInstance, manifest_path: str | Path) -> Path:
    """Write ``<stem>.json`` plus the carrier file next to it; returns the carrier path."""
    manifest_path = Path(manifest_path)
    carrier_path = manifest_path.with_suffix(carrier_suffix(inst.carrier))
    inst.carrier.save(carrier_path)
    manifest_path.write_text(dumps_json(inst.manifest(carrier_path.name)))
    return carrier_path


def load_carrier(path: str | Path) -> Carrier:
    path = Path(path)
    text = path.read_text()
    first = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")), "")
    if first.startswith("gadget"):
        return GadgetShape.loads(text)
    if len(first.split()) == 3:
        return UniformHypergraph.loads(text)
    return Graph.loads(text)


def instance_from_manifest(doc: dict, base: Path) -> GapInstance:
    try:
        carrier_info = doc["carrier"]
        carrier = load_carrier(base / carrier_info["path"])
        params = {name: (int(parse_rat(v)) if name == "t" else parse_rat(v)) for name, v in doc["params"].items()}
        return GapInstance(
            GapKind(doc["kind"]),
            carrier,
            int(doc["k"]),
            parse_rat(doc["threshold"]),
            params,
            bool(doc.get("faithful", True)),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed instance manifest: {exc}") from exc


def load_instance(manifest_path: str | Path) -> GapInstance:
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{manifest_path}: not valid JSON") from exc
    return instance_from_manifest(doc, manifest_path.parent)
