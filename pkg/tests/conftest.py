import itertools

import numpy as np
import pytest

from rchm.bipartite import BipartiteGraph


def graph_from_documents(docs, n_authors=None):
    """Bipartite graph whose j-th P'-vertex is adjacent to the authors in ``docs[j]``."""
    p = [a for d in docs for a in d]
    q = [j for j, d in enumerate(docs) for _ in d]
    n = n_authors if n_authors is not None else (max(p) + 1 if p else 0)
    return BipartiteGraph.from_edges(np.array(p, np.int64), np.array(q, np.int64), n, len(docs))


def random_documents(rng, n_authors, n_docs, max_size):
    return [
        sorted(rng.choice(n_authors, size=rng.integers(1, min(max_size, n_authors) + 1), replace=False).tolist())
        for _ in range(n_docs)
    ]


def gf2_rank(mat):
    m = np.array(mat, dtype=np.uint8) % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
    return rank


def closure(facets, max_dim):
    """All faces of ``facets`` up to ``max_dim``, grouped by dimension."""
    out = [set() for _ in range(max_dim + 1)]
    for f in facets:
        for k in range(1, min(len(f), max_dim + 1) + 1):
            out[k - 1].update(itertools.combinations(sorted(f), k))
    return [sorted(s) for s in out]


def dense_betti(faces, top):
    """Betti numbers from explicitly built dense boundary matrices."""
    n = [len(f) for f in faces]
    ranks = [0]
    for d in range(1, len(faces)):
        index = {s: i for i, s in enumerate(faces[d - 1])}
        mat = np.zeros((n[d - 1], n[d]), np.uint8)
        for j, s in enumerate(faces[d]):
            for i in range(len(s)):
                mat[index[s[:i] + s[i + 1:]], j] = 1
        ranks.append(gf2_rank(mat) if mat.size else 0)
    ranks.append(0)
    return [n[m] - ranks[m] - ranks[m + 1] for m in range(top + 1)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> list of (part, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def record(criterion, part, passed, detail):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name} {'ok' if p else 'FAILED'}: {d}" for name, p, d in parts)
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} | {detail}")
