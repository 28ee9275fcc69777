"""File formats: CSV matrices, JSON lattices/relations/decompositions,
whitespace edge lists, and DOT export of partitioned arrows.

Every loader raises :class:`ParseError` on malformed input, naming what went
wrong; serializers are deterministic so reports and fixtures diff cleanly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import ParseError, SemiadditiveCategory
from .functors import LatticeHom
from .matrices import COMPLEX, MatrixCategory, ScalarDomain, ScalarMatrix
from .relations import (
    HeytingTable,
    LRelation,
    RelationCategory,
    b4,
    bool_algebra,
    chain,
    decode_label,
    encode_label,
)
from .spectral import Block, Partition, SpectralDecomposition


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _read_json(path) -> Any:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}") from exc


# ---------------------------------------------------------------------------
# scalar matrices (CSV)


def _parse_scalar(token: str, domain: ScalarDomain):
    token = token.strip()
    try:
        if domain is COMPLEX:
            return complex(token)
        return float(token)
    except ValueError as exc:
        raise ParseError(f"bad {domain.name} entry {token!r}") from exc


def load_matrix_csv(path, domain: ScalarDomain) -> ScalarMatrix:
    rows = []
    width = None
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries = [_parse_scalar(tok, domain) for tok in line.split(",")]
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise ParseError(
                f"{path}: line {lineno} has {len(entries)} entries, expected {width}")
        rows.append(entries)
    if not rows:
        raise ParseError(f"{path}: no matrix rows found")
    return ScalarMatrix(np.array(rows, dtype=domain.dtype), domain)


def _format_scalar(value) -> str:
    if isinstance(value, complex):
        return str(value).strip("()")
    return repr(value)


def save_matrix_csv(matrix: ScalarMatrix, path) -> None:
    lines = [",".join(_format_scalar(v) for v in row)
             for row in matrix.values.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# lattices


def lattice_from_dict(payload: dict) -> HeytingTable:
    try:
        elements = payload["elements"]
        meet = payload["meet"]
        join = payload["join"]
    except (KeyError, TypeError) as exc:
        raise ParseError("lattice JSON needs elements, meet, and join") from exc
    return HeytingTable.from_label_tables(
        elements, meet, join, name=str(payload.get("name", "custom")))


def resolve_lattice(spec: str) -> HeytingTable:
    """Resolve a --lattice selector: builtin name, chain size, or JSON path."""
    name = spec.removeprefix("builtin:")
    if name == "bool":
        return bool_algebra()
    if name == "b4":
        return b4()
    if name.startswith("chain:"):
        try:
            return chain(int(name.split(":", 1)[1]))
        except ValueError as exc:
            raise ParseError(f"bad chain size in {spec!r}") from exc
    if spec.startswith("builtin:"):
        raise ParseError(f"unknown builtin lattice {spec!r}")
    return lattice_from_dict(_read_json(spec))


def save_lattice_json(algebra: HeytingTable, path) -> None:
    Path(path).write_text(canonical_json(algebra.to_dict()))


# ---------------------------------------------------------------------------
# relations


def relation_from_dict(payload: dict, algebra: HeytingTable) -> LRelation:
    try:
        source = [decode_label(l) for l in payload["source"]]
        target = [decode_label(l) for l in payload["target"]]
        values = payload["values"]
    except (KeyError, TypeError) as exc:
        raise ParseError("relation JSON needs source, target, and values") from exc
    if len(values) != len(target):
        raise ParseError(
            f"relation grid has {len(values)} rows, expected {len(target)}")
    try:
        grid = [[algebra.index(v) for v in row] for row in values]
    except KeyError as exc:
        raise ParseError(f"unknown lattice element {exc.args[0]!r}") from exc
    for i, row in enumerate(grid):
        if len(row) != len(source):
            raise ParseError(
                f"relation grid row {i} has {len(row)} entries, "
                f"expected {len(source)}")
    return LRelation(algebra, source, target, grid)


def relation_to_dict(rel: LRelation) -> dict:
    label = rel.algebra.label
    return {
        "source": [encode_label(l) for l in rel.source],
        "target": [encode_label(l) for l in rel.target],
        "values": [[label(v) for v in row] for row in rel.values.tolist()],
    }


def load_relation_json(path, algebra: HeytingTable) -> LRelation:
    return relation_from_dict(_read_json(path), algebra)


def save_relation_json(rel: LRelation, path) -> None:
    Path(path).write_text(canonical_json(relation_to_dict(rel)))


# ---------------------------------------------------------------------------
# decompositions


def _arrow_from_payload(cat: SemiadditiveCategory, payload, src, tgt):
    if isinstance(cat, MatrixCategory):
        arr = np.array(
            [[_parse_scalar(str(v), cat.domain) for v in row] for row in payload],
            dtype=cat.domain.dtype)
        if arr.ndim != 2 or arr.shape != (tgt, src):
            raise ParseError(
                f"matrix block must be {tgt}x{src}, got {arr.shape}")
        return ScalarMatrix(arr, cat.domain)
    if isinstance(cat, RelationCategory):
        return relation_from_dict(
            {"source": [encode_label(l) for l in src],
             "target": [encode_label(l) for l in tgt],
             "values": payload},
            cat.algebra)
    raise ParseError(f"cannot decode arrows for instance {cat.name!r}")


def _arrow_to_payload(cat: SemiadditiveCategory, arrow):
    if isinstance(cat, MatrixCategory):
        return cat.describe_arrow(arrow)["entries"]
    if isinstance(cat, RelationCategory):
        return relation_to_dict(arrow)["values"]
    raise ParseError(f"cannot encode arrows for instance {cat.name!r}")


def _object_from_payload(cat: SemiadditiveCategory, payload):
    if isinstance(cat, MatrixCategory):
        return int(payload)
    return tuple(decode_label(l) for l in payload)


def decomposition_from_dict(payload: dict,
                            cat: SemiadditiveCategory) -> SpectralDecomposition:
    try:
        carrier = _object_from_payload(cat, payload["carrier"])
        raw_blocks = payload["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("decomposition JSON needs carrier and blocks") from exc
    blocks = []
    for i, raw in enumerate(raw_blocks, start=1):
        try:
            space = _object_from_payload(cat, raw["space"])
            project = _arrow_from_payload(cat, raw["project"], carrier, space)
            inject = _arrow_from_payload(cat, raw["inject"], space, carrier)
            local = _arrow_from_payload(cat, raw["local"], space, space)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"decomposition block {i} is malformed: {exc}") from exc
        blocks.append(Block(space, project, inject, local))
    if not blocks:
        raise ParseError("decomposition needs at least one block")
    return SpectralDecomposition(carrier, tuple(blocks))


def decomposition_to_dict(dec: SpectralDecomposition,
                          cat: SemiadditiveCategory) -> dict:
    return {
        "carrier": cat.describe_object(dec.carrier),
        "blocks": [
            {
                "space": cat.describe_object(b.space),
                "project": _arrow_to_payload(cat, b.project),
                "inject": _arrow_to_payload(cat, b.inject),
                "local": _arrow_to_payload(cat, b.local),
            }
            for b in dec.blocks
        ],
    }


def load_decomposition_json(path, cat: SemiadditiveCategory) -> SpectralDecomposition:
    return decomposition_from_dict(_read_json(path), cat)


def save_decomposition_json(dec: SpectralDecomposition,
                            cat: SemiadditiveCategory, path) -> None:
    Path(path).write_text(canonical_json(decomposition_to_dict(dec, cat)))


# ---------------------------------------------------------------------------
# graphs and partitions


def load_graph_edges(path) -> np.ndarray:
    """Adjacency matrix from a whitespace edge list, one '0-based u v' per line."""
    edges = []
    top = -1
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}: line {lineno} is not 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno} has non-integer vertex") from exc
        if u < 0 or v < 0:
            raise ParseError(f"{path}: line {lineno} has a negative vertex")
        edges.append((u, v))
        top = max(top, u, v)
    if top < 0:
        raise ParseError(f"{path}: no edges found")
    adj = np.zeros((top + 1, top + 1), dtype=np.int64)
    for u, v in edges:
        adj[u, v] = 1
        adj[v, u] = 1
    return adj


def partition_from_dict(payload: dict, carrier: tuple) -> Partition:
    try:
        cells = [tuple(cell) for cell in payload["cells"]]
    except (KeyError, TypeError) as exc:
        raise ParseError("partition JSON needs a cells list") from exc
    return Partition(carrier, tuple(cells))


def partition_to_dict(partition: Partition) -> dict:
    return {"cells": [[encode_label(l) for l in cell] for cell in partition.cells]}


def load_partition_json(path, carrier: tuple) -> Partition:
    return partition_from_dict(_read_json(path), carrier)


# ---------------------------------------------------------------------------
# lattice homomorphisms


def hom_from_dict(payload: dict) -> LatticeHom:
    try:
        source_spec = payload["source"]
        target_spec = payload["target"]
        mapping = payload["map"]
    except (KeyError, TypeError) as exc:
        raise ParseError("hom JSON needs source, target, and map") from exc
    source = (resolve_lattice(source_spec) if isinstance(source_spec, str)
              else lattice_from_dict(source_spec))
    target = (resolve_lattice(target_spec) if isinstance(target_spec, str)
              else lattice_from_dict(target_spec))
    return LatticeHom.from_labels(source, target, mapping)


def load_hom_json(path) -> LatticeHom:
    return hom_from_dict(_read_json(path))


# ---------------------------------------------------------------------------
# DOT export (presentation only)


def _dot_name(label) -> str:
    text = ".".join(str(p) for p in label) if isinstance(label, tuple) else str(label)
    return '"' + text.replace('"', r'\"') + '"'


def partitioned_dot(partition: Partition, arrow) -> str:
    """A directed graph with one cluster per cell and labelled edges.

    ``arrow`` may be a relation (edge label = lattice value) or a square
    matrix (edge label = entry, zeros omitted).
    """
    lines = ["digraph decomposition {"]
    for i, cell in enumerate(partition.cells):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f'    label="cell {i}";')
        for label in cell:
            lines.append(f"    {_dot_name(label)};")
        lines.append("  }")
    if isinstance(arrow, LRelation):
        bottom = arrow.algebra.bottom
        for t in range(len(arrow.target)):
            for s in range(len(arrow.source)):
                v = int(arrow.values[t, s])
                if v != bottom:
                    lines.append(
                        f"  {_dot_name(arrow.source[s])} -> "
                        f"{_dot_name(arrow.target[t])} "
                        f'[label="{arrow.algebra.label(v)}"];')
    else:
        values = arrow.values if isinstance(arrow, ScalarMatrix) else np.asarray(arrow)
        for t in range(values.shape[0]):
            for s in range(values.shape[1]):
                v = values[t, s]
                if v != 0:
                    lines.append(
                        f"  {_dot_name(s)} -> {_dot_name(t)} [label=\"{v:g}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
