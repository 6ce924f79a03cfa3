# anomaly_detection.py
"""
Change detection on a dynamic graph.

A GraphSequence G_0, ..., G_{N-1} on a shared vertex set is turned into the
consecutive-step series D(i) = d(G_{i-1}, G_i) for i = 1..N-1, normalized by
its own mean. Peaks of the normalized series mark structural changes.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from graph_core import bucket_contacts, interval_width, read_edge_list_dir
from graph_distances import RESISTANCE, RESISTANCE_RENORMALIZED, DistanceSpec, GraphCache, compute_distance
from graph_errors import InvalidParams, SeriesTooShort, ZeroMean

logger = logging.getLogger(__name__)

ZERO_MEAN_TOL = 1e-14
SERIES_HEADER = ("index", "t_label", "raw", "normalized")


@dataclass(frozen=True)
class GraphSequence:
    graphs: tuple
    interval_labels: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        sizes = {g.n for g in self.graphs}
        if len(sizes) > 1:
            raise InvalidParams(f"graphs in a sequence must share one vertex set, got sizes {sorted(sizes)}")
        if self.interval_labels is not None:
            object.__setattr__(self, "interval_labels", tuple(self.interval_labels))
            if len(self.interval_labels) != len(self.graphs):
                raise InvalidParams(
                    f"{len(self.interval_labels)} labels for {len(self.graphs)} graphs"
                )

    def __len__(self):
        return len(self.graphs)

    @property
    def n(self):
        return self.graphs[0].n if self.graphs else 0

    def label(self, i):
        return self.interval_labels[i] if self.interval_labels is not None else i


@dataclass(frozen=True)
class DistanceSeries:
    """raw[pos] = d(G_pos, G_pos+1); normalized = raw / mean(raw)"""

    distance_id: str
    raw: np.ndarray
    normalized: np.ndarray

    def __len__(self):
        return len(self.raw)

    @staticmethod
    def time_index(pos):
        return pos + 1


def _resolve_resistance(seq, spec):
    if spec.kind != RESISTANCE:
        return spec
    disconnected = [i for i, g in enumerate(seq.graphs) if not g.is_connected()]
    if not disconnected:
        return spec
    logger.info(
        "%d of %d graphs are disconnected (first at step %d); using renormalized resistance with penalty n=%d",
        len(disconnected), len(seq), disconnected[0], seq.n,
    )
    return DistanceSpec(RESISTANCE_RENORMALIZED, penalty=float(seq.n))


def consecutive_distances(seq, spec):
    if len(seq) < 2:
        raise SeriesTooShort(f"need at least 2 graphs, got {len(seq)}")
    spec = _resolve_resistance(seq, spec)
    cache = GraphCache()
    graphs = seq.graphs
    raw = np.array(
        [compute_distance(graphs[i - 1], graphs[i], spec, cache) for i in range(1, len(graphs))],
        dtype=float,
    )
    mean = float(raw.mean())
    if mean < ZERO_MEAN_TOL:
        raise ZeroMean(f"{spec.distance_id}: mean consecutive distance is {mean:.3g}")
    return DistanceSeries(spec.distance_id, raw, raw / mean)


def top_anomalies(series, top_k):
    """(position, normalized value) of the top_k largest values; ties go to the earlier position"""
    values = series.normalized
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    return [(i, float(values[i])) for i in order[:max(0, int(top_k))]]


def build_sequence_from_events(events, t_start, t_end, N, n):
    graphs = bucket_contacts(events, t_start, t_end, N, n)
    width = interval_width(t_start, t_end, N)
    return GraphSequence(graphs, tuple(t_start + i * width for i in range(N)))


def read_graph_sequence_dir(path):
    graphs = read_edge_list_dir(path)
    return GraphSequence(graphs, tuple(range(len(graphs))))


def write_series_csv(series, labels, path):
    """
    One row per step: index is the time step i of d(G_{i-1}, G_i) and t_label
    the label of interval i.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SERIES_HEADER)
        for pos, (raw, norm) in enumerate(zip(series.raw, series.normalized)):
            i = series.time_index(pos)
            label = labels[i] if labels is not None else i
            if isinstance(label, (float, np.floating)):
                label = repr(float(label))
            writer.writerow([i, label, repr(float(raw)), repr(float(norm))])
    return Path(path)
