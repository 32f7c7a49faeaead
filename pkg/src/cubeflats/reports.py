"""Deterministic JSON reports for the command-line front end.

Reports are schema-versioned, echo the command and a digest of the input,
and serialize every collection in sorted id order so identical inputs and
options produce byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .periodic import (DichotomyReport, NonCocompact, ProductOfQuasilines,
                       PushoffResult, WindowHull)

SCHEMA = "cubeflats-report/1"


@dataclass
class Report:
    command: str
    input_digest: str
    options: dict
    result: dict
    warnings: list = field(default_factory=list)
    assumed_hypotheses: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "schema": SCHEMA,
            "command": self.command,
            "input_digest": self.input_digest,
            "options": self.options,
            "result": self.result,
            "warnings": sorted(self.warnings),
            "assumed_hypotheses": sorted(self.assumed_hypotheses),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def error_payload(kind: str, exc: Exception) -> dict:
    out = {"error": kind, "message": str(exc)}
    lemma = getattr(exc, "lemma", None)
    if lemma is not None:
        out["lemma"] = lemma
        if getattr(exc, "witness", None) is not None:
            out["witness"] = _plain(exc.witness)
    return out


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def orbit_ref(ref) -> list:
    return [int(ref[0]), int(ref[1])]


def dichotomy_result(report: DichotomyReport) -> dict:
    out = {
        "verdict": report.kind,
        "window_radius": report.window_radius,
        "hull_vertex_count": report.hull_vertex_count,
        "factor_vertex_counts": list(report.factor_vertex_counts),
    }
    if isinstance(report.verdict, ProductOfQuasilines):
        out["factors"] = [
            {"alignment_class": [orbit_ref(r) for r in f.alignment_class],
             "vertex_count": f.vertex_count,
             "quasiline_width": f.quasiline_width}
            for f in report.verdict.factors]
    elif isinstance(report.verdict, NonCocompact):
        w = report.verdict.witness
        out["witness"] = w.kind
        if w.kind == "excess-classes":
            out["alignment_class_count"] = w.alignment_class_count
            out["rank"] = w.rank
            out["classes"] = [[orbit_ref(r) for r in c] for c in w.classes]
        else:
            out["semi_crossing_pair"] = [orbit_ref(r) for r in w.pair]
            out["maximal_class"] = [orbit_ref(r) for r in w.maximal_class]
            out["pushoff_k"] = w.pushoff_k
            out["min_displacement"] = w.min_displacement
    return out


def window_hull_result(hull: WindowHull) -> dict:
    return {
        "window_radius": hull.radius,
        "vertex_count": hull.complex.n_vertices,
        "hyperplane_count": hull.complex.n_hyperplanes,
        "walls": [{"class": w.class_index, "rep": w.rep_index,
                   "translate": w.translate, "trace": str(w.trace)}
                  for w in hull.walls],
        "complex": hull.complex.to_json_dict(),
    }


def pushoff_result(po: PushoffResult) -> dict:
    return {
        "k": po.k,
        "window_radius": po.domain.radius,
        "codomain_radius": po.codomain.radius,
        "injective": po.audit.injective,
        "distance_nonincreasing": po.audit.distance_nonincreasing,
        "min_canonical_displacement": po.audit.min_canonical_displacement,
        "displacement_pairs_checked": po.audit.displacement_pairs_checked,
    }
