"""Read author-document incidence files and summarize them."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bipartite import BipartiteGraph
from .dowker import DEFAULT_MAX_AUTHORS, connected_components

HEADER = ["author_id", "document_id"]


class IngestError(ValueError):
    pass


@dataclass
class DropStats:
    rows: int = 0
    duplicate_rows: int = 0
    documents_raw: int = 0
    documents_dropped: int = 0
    incidences_dropped: int = 0
    authors_raw: int = 0
    authors_lost: int = 0


@dataclass
class IngestResult:
    """Capped graph with the ids behind its dense indices, plus the uncapped graph."""

    graph: BipartiteGraph
    author_ids: list[str]
    document_ids: list[str]
    raw_graph: BipartiteGraph
    max_authors_per_document: int | None
    drops: DropStats = field(default_factory=DropStats)


def _intern(values):
    ids = sorted(set(values))
    return ids, {v: i for i, v in enumerate(ids)}


def read_incidences(path) -> tuple[list[tuple[str, str]], int]:
    """Trimmed ``(author, document)`` rows and the number of data rows read."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{path}: empty file")
        if [h.strip() for h in header] != HEADER:
            raise IngestError(f"{path}:1: expected header 'author_id,document_id', got {header}")
        rows = []
        n = 0
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            n += 1
            if len(row) != 2:
                raise IngestError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            a, d = row[0].strip(), row[1].strip()
            if not a or not d:
                raise IngestError(f"{path}:{lineno}: empty author_id or document_id")
            rows.append((a, d))
    if not rows:
        raise IngestError(f"{path}: no incidence rows")
    return rows, n


def _graph(pairs, author_index, doc_index, n_authors, n_docs):
    if pairs:
        arr = np.array([(author_index[a], doc_index[d]) for a, d in pairs], dtype=np.int64)
    else:
        arr = np.empty((0, 2), dtype=np.int64)
    return BipartiteGraph.from_edges(arr[:, 0], arr[:, 1], n_authors, n_docs)


def load_incidence_file(path, max_authors_per_document: int | None = DEFAULT_MAX_AUTHORS) -> IngestResult:
    """Intern ids (sorted order), collapse duplicates and drop over-cap documents.

    Documents with more than ``max_authors_per_document`` distinct authors are
    removed with all their rows; ``None`` keeps everything.  Authors left with no
    document are removed from the capped graph.
    """
    rows, n_rows = read_incidences(path)
    unique = set(rows)
    drops = DropStats(rows=n_rows, duplicate_rows=n_rows - len(unique))
    authors_per_doc = Counter(d for _, d in unique)
    drops.documents_raw = len(authors_per_doc)
    raw_authors, raw_a_index = _intern(a for a, _ in unique)
    raw_docs, raw_d_index = _intern(authors_per_doc)
    drops.authors_raw = len(raw_authors)
    raw_graph = _graph(sorted(unique), raw_a_index, raw_d_index, len(raw_authors), len(raw_docs))

    if max_authors_per_document is None:
        kept = unique
    else:
        too_big = {d for d, k in authors_per_doc.items() if k > max_authors_per_document}
        kept = {(a, d) for a, d in unique if d not in too_big}
        drops.documents_dropped = len(too_big)
        drops.incidences_dropped = len(unique) - len(kept)
    authors, a_index = _intern(a for a, _ in kept)
    docs, d_index = _intern(d for _, d in kept)
    drops.authors_lost = len(raw_authors) - len(authors)
    graph = _graph(sorted(kept), a_index, d_index, len(authors), len(docs))
    return IngestResult(graph, authors, docs, raw_graph, max_authors_per_document, drops)


def write_incidence_file(result_or_graph, path, author_ids=None, document_ids=None):
    """Write ``author_id,document_id`` rows; ids default to the dense indices."""
    if isinstance(result_or_graph, IngestResult):
        graph = result_or_graph.graph
        author_ids = author_ids or result_or_graph.author_ids
        document_ids = document_ids or result_or_graph.document_ids
    else:
        graph = result_or_graph
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        p, pp = graph.edges()
        for i, j in zip(p.tolist(), pp.tolist()):
            w.writerow([author_ids[i] if author_ids else i, document_ids[j] if document_ids else j])


@dataclass
class DatasetSummary:
    n_authors: int
    n_documents: int
    n_incidences: int
    components: int
    largest_component: int
    degenerate: bool
    raw: dict | None = None

    def to_dict(self):
        return asdict(self)


def _counts(graph: BipartiteGraph):
    n_a = int(np.count_nonzero(graph.p_degrees()))
    n_d = int(np.count_nonzero(graph.p_prime_degrees()))
    comps, largest = connected_components(graph)
    return n_a, n_d, int(graph.n_edges), comps, largest


def dataset_summary(obj) -> DatasetSummary:
    """Non-isolated author and document counts, incidences and Dowker 1-skeleton components.

    For an :class:`IngestResult` the uncapped counts are reported under ``raw``.
    """
    graph = obj.graph if isinstance(obj, IngestResult) else obj
    n_a, n_d, n_e, comps, largest = _counts(graph)
    out = DatasetSummary(n_a, n_d, n_e, comps, largest, n_e == 0)
    if isinstance(obj, IngestResult):
        r = _counts(obj.raw_graph)
        out.raw = dict(zip(
            ("n_authors", "n_documents", "n_incidences", "components", "largest_component"), r
        ))
        out.raw["drops"] = asdict(obj.drops)
    return out
