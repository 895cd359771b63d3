"""Regenerate the bundled sample pair documents in src/acp/fixtures/."""
from pathlib import Path

import numpy as np

from acp.ensembles import random_generalized_reflection, random_hermitian_self_tau, random_structured_pair
from acp.io import PairDocument, dump_document

OUT = Path(__file__).resolve().parents[1] / "src" / "acp" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for seed, structure, n in [(11, "real", 4), (12, "complex", 4), (13, "selfdual", 4), (14, "selfdual", 8)]:
        A, B = random_structured_pair(seed, n, structure, 1e-2)
        doc = PairDocument(n, structure, A.mat, B.mat)
        dump_document(doc.to_json(), OUT / f"{structure}_{n}.json")

    # reflection A -> S A^T S^* with a random symmetric unitary S
    rng = np.random.default_rng(15)
    tau = random_generalized_reflection(rng, 4, +1)
    W, _ = tau.canonical_frame(4)
    A0, B0 = random_structured_pair(15, 4, "real", 1e-2)
    A = W @ A0.mat @ W.conj().T
    B = W @ B0.mat @ W.conj().T
    doc = PairDocument(4, "complex", (A + A.conj().T) / 2, (B + B.conj().T) / 2, np.array(tau.S))
    dump_document(doc.to_json(), OUT / "generalized_4.json")


if __name__ == "__main__":
    main()
