"""Communication networks for forecast-sharing experiments.

Experts sit on an undirected graph whose adjacency matrix always carries
self-loops: an expert listens to herself as well as to her neighbors.
Pooling and centrality computations therefore use self-inclusive degrees.
The random-graph degree distributions at the bottom of this module follow
the opposite, neighbor-counting convention (degree excludes self); the two
conventions are deliberate and never mixed.

Nodes are numbered 1..n in documentation and file formats; in-process
arrays are indexed 0..n-1 as usual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Graph",
    "DegreeParams",
    "make_star",
    "make_line",
    "make_d_regular",
    "sample_poisson_graph",
    "neighbor_count_pmf",
    "neighbor_degree_pmf",
    "edge_list_string",
    "parse_edge_list",
    "write_edge_list",
    "read_edge_list",
]


@dataclass
class Graph:
    """Undirected communication network with mandatory self-loops.

    Attributes:
        n: number of experts.
        adjacency: n x n binary symmetric matrix with unit diagonal.
    """

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one node, got n={self.n}")
        a = np.asarray(self.adjacency)
        if a.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {a.shape} does not match n={self.n}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        a = a.astype(np.int64)
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric (all links reciprocal)")
        if not (np.diag(a) == 1).all():
            raise ValueError("adjacency diagonal must be all ones (self-loops)")
        self.adjacency = a

    @property
    def degrees(self) -> np.ndarray:
        """Self-inclusive degrees: row sums of the adjacency matrix."""
        return self.adjacency.sum(axis=1)

    def neighborhood(self, i: int) -> np.ndarray:
        """Indices of the self-inclusive neighborhood of node i (0-based)."""
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range for n={self.n}")
        return np.flatnonzero(self.adjacency[i])


@dataclass(frozen=True)
class DegreeParams:
    """Poisson random-graph parameters: n nodes, pairwise meeting probability p."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"meeting probability must be in [0, 1], got {self.p}")

    @property
    def expected_degree(self) -> float:
        return (self.n - 1) * self.p


def make_star(n: int) -> Graph:
    """Star network: node 1 is the center, adjacent to all others.

    Self-inclusive degrees are n for the center and 2 for each peripheral.
    """
    if n < 3:
        raise ValueError(f"star needs n >= 3, got {n}")
    a = np.eye(n, dtype=np.int64)
    a[0, :] = 1
    a[:, 0] = 1
    return Graph(n, a)


def make_line(n: int) -> Graph:
    """Line (path) network: node i adjacent to i-1 and i+1 where they exist.

    Self-inclusive degrees are 2 at the endpoints and 3 inside.
    """
    if n < 2:
        raise ValueError(f"line needs n >= 2, got {n}")
    a = np.eye(n, dtype=np.int64)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1
    a[idx + 1, idx] = 1
    return Graph(n, a)


def make_d_regular(n: int, d: int) -> Graph:
    """Circulant d-regular network; d counts neighbors excluding self.

    Each node links to the floor(d/2) nearest nodes on either side of a
    cycle, plus the antipodal node when d is odd (which requires n even).
    d=2 gives the ring, d=n-1 the complete graph. Self-inclusive degrees
    all equal d+1.
    """
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise ValueError(f"no d-regular graph exists for n={n}, d={d} (n*d odd)")
    a = np.eye(n, dtype=np.int64)
    idx = np.arange(n)
    for k in range(1, d // 2 + 1):
        a[idx, (idx + k) % n] = 1
        a[idx, (idx - k) % n] = 1
    if d % 2 == 1:
        a[idx, (idx + n // 2) % n] = 1
    return Graph(n, a)


def sample_poisson_graph(params: DegreeParams, seed: int) -> Graph:
    """Sample a Poisson (Erdos-Renyi) random graph.

    Each unordered pair of distinct nodes is linked independently with
    probability params.p, drawn from a pseudorandom stream keyed by seed;
    self-loops are then forced on. Identical (params, seed) always return
    the identical graph.
    """
    n = params.n
    rng = np.random.default_rng(seed)
    a = np.eye(n, dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    hits = rng.random(iu[0].size) < params.p
    a[iu] = hits
    a[(iu[1], iu[0])] = hits
    return Graph(n, a)


def neighbor_count_pmf(params: DegreeParams, d: int) -> float:
    """P(node has d neighbors), d excluding self: Binomial(n-1, p) pmf."""
    n, p = params.n, params.p
    if not 0 <= d <= n - 1:
        raise ValueError(f"neighbor count must be in [0, {n - 1}], got {d}")
    return math.comb(n - 1, d) * p**d * (1.0 - p) ** (n - 1 - d)


def neighbor_degree_pmf(params: DegreeParams, d: int) -> float:
    """Size-biased degree pmf of a node reached along a random edge.

    Returns P(d) * d / <d> with <d> = (n-1)p. Undefined at p=0.
    """
    mean_degree = params.expected_degree
    if mean_degree <= 0.0:
        raise ValueError("neighbor degree distribution undefined for p=0")
    if not 0 <= d <= params.n - 1:
        raise ValueError(f"degree must be in [0, {params.n - 1}], got {d}")
    if d == 0:
        return 0.0
    return neighbor_count_pmf(params, d) * d / mean_degree


# ---------------------------------------------------------------------------
# Edge-list text format: header "n=<int>", one "i j" line per off-diagonal
# edge with 1-based ids and i < j. Self-loops are implicit, never listed.
# ---------------------------------------------------------------------------


def edge_list_string(g: Graph) -> str:
    lines = [f"n={g.n}"]
    iu = np.triu_indices(g.n, k=1)
    for i, j in zip(*iu):
        if g.adjacency[i, j]:
            lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [(k + 1, ln) for k, ln in enumerate(lines) if ln]
    if not lines:
        raise ValueError("empty edge list: missing 'n=<int>' header")
    first_no, header = lines[0]
    if not header.startswith("n="):
        raise ValueError(f"line {first_no}: expected 'n=<int>' header, got {header!r}")
    try:
        n = int(header[2:])
    except ValueError:
        raise ValueError(f"line {first_no}: bad node count in header {header!r}") from None
    if n < 1:
        raise ValueError(f"line {first_no}: node count must be positive, got {n}")
    a = np.eye(n, dtype=np.int64)
    for line_no, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {line_no}: expected 'i j', got {ln!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {line_no}: non-integer node id in {ln!r}") from None
        if not (1 <= i < j <= n):
            raise ValueError(f"line {line_no}: edge {i} {j} must satisfy 1 <= i < j <= {n}")
        a[i - 1, j - 1] = 1
        a[j - 1, i - 1] = 1
    return Graph(n, a)


def write_edge_list(g: Graph, path: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(edge_list_string(g))
    except OSError as exc:
        raise RuntimeError(f"cannot write edge list to {path}: {exc}") from exc


def read_edge_list(path: str) -> Graph:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise RuntimeError(f"cannot read edge list from {path}: {exc}") from exc
    return parse_edge_list(text)
