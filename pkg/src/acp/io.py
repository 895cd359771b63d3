"""JSON pair documents.

Format::

    {"n": 4, "structure": "real" | "complex" | "selfdual",
     "A": [[[re, im], ...], ...], "B": ..., "S": ... (optional)}

Matrices are row-major nested ``[re, im]`` pairs.  ``structure: complex`` with
an ``S`` entry denotes the reflection ``A -> S A^T S^*``; without ``S`` it is
the plain complex (no reflection) case.  Result documents add ``A_prime``,
``B_prime``, ``U`` and a ``diagnostics`` object.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .ensembles import STRUCTURES, reflection_for
from .reflections import Reflection, StructuredMatrix, operator_norm

LOAD_TOL = 1e-8


class DocumentError(ValueError):
    """A pair document failed to parse or validate (CLI exit code 2)."""


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(obj, n: int, name: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{name}: entries must be [re, im] number pairs") from exc
    if arr.shape != (n, n, 2):
        raise DocumentError(f"{name}: expected shape ({n}, {n}, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"{name}: non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class PairDocument:
    n: int
    structure: str
    A: np.ndarray
    B: np.ndarray
    S: Optional[np.ndarray] = None
    extra: Optional[dict] = None

    @property
    def tau(self) -> Optional[Reflection]:
        if self.S is not None:
            return Reflection.generalized(self.S, tol=LOAD_TOL)
        return reflection_for(self.structure)

    def structured(self) -> tuple[StructuredMatrix, StructuredMatrix]:
        tau = self.tau
        A, B = self.A, self.B
        if self.structure == "real":
            A, B = A.real, B.real
        return StructuredMatrix(A, tau), StructuredMatrix(B, tau)

    def violations(self, tol: float = LOAD_TOL) -> list[str]:
        """Names of the structural invariants that ``A`` and ``B`` break."""
        out = []
        tau = self.tau
        for name, M in (("A", self.A), ("B", self.B)):
            scale = max(1.0, operator_norm(M))
            if operator_norm(M - M.conj().T) > tol * scale:
                out.append(f"{name} is not self-adjoint")
            if self.structure == "real" and np.max(np.abs(M.imag), initial=0.0) > tol * scale:
                out.append(f"{name} is not real")
            if tau is not None and operator_norm(M - tau.apply(M)) > tol * scale:
                out.append(f"{name} is not self-tau ({self.structure})")
        return out

    def to_json(self) -> dict:
        doc = {"n": self.n, "structure": self.structure,
               "A": matrix_to_json(self.A), "B": matrix_to_json(self.B)}
        if self.S is not None:
            doc["S"] = matrix_to_json(self.S)
        if self.extra:
            doc.update(self.extra)
        return doc


def parse_document(obj, validate: bool = True) -> PairDocument:
    if not isinstance(obj, dict):
        raise DocumentError("document must be a JSON object")
    for key in ("n", "structure", "A", "B"):
        if key not in obj:
            raise DocumentError(f"missing field {key!r}")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DocumentError("n must be a positive integer")
    structure = obj["structure"]
    if structure not in STRUCTURES:
        raise DocumentError(f"structure must be one of {STRUCTURES}, got {structure!r}")
    if structure == "selfdual" and n % 2:
        raise DocumentError("selfdual dimension must be even")
    A = matrix_from_json(obj["A"], n, "A")
    B = matrix_from_json(obj["B"], n, "B")
    S = None
    if "S" in obj:
        if structure != "complex":
            raise DocumentError("S is only allowed with structure 'complex'")
        S = matrix_from_json(obj["S"], n, "S")
        try:
            Reflection.generalized(S, tol=LOAD_TOL)
        except ValueError as exc:
            raise DocumentError(f"S: {exc}") from exc
    extra = {k: v for k, v in obj.items() if k not in ("n", "structure", "A", "B", "S")}
    doc = PairDocument(n, structure, A, B, S, extra or None)
    if validate:
        bad = doc.violations()
        if bad:
            raise DocumentError("; ".join(bad))
    return doc


def load_document(path, validate: bool = True) -> PairDocument:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return parse_document(obj, validate)


def dump_document(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text
