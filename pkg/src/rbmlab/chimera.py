"""Chimera hardware graphs and bipartite chain embeddings.

A Chimera graph of grid size m is an m x m array of cells, each a
complete bipartite K_{4,4} over 8 qubits. Side-0 qubits of a cell couple
to the matching side-0 qubits of the cells above and below; side-1
qubits couple left and right. Qubit (row, col, u, k) has linear index
row*8m + col*8 + 4u + k.

A machine with up to 4m visible and 4m hidden units embeds by chains:
visible unit i becomes the vertical chain through column i//4, offset
i%4, one side-0 qubit per cell row; hidden unit j becomes the horizontal
chain through row j//4, offset j%4, one side-1 qubit per cell column.
Every (visible, hidden) pair then meets in exactly one cell, giving one
physical edge per logical coupling.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DimensionError, EmbeddingError
from .ising import IsingProblem

DEFAULT_CHAIN_COUPLING = -2.0  # ferromagnetic: negative favours aligned chains


@dataclasses.dataclass(frozen=True)
class ChimeraGraph:
    """Grid size plus the set of broken (unusable) qubit indices."""

    grid_size: int
    broken_qubits: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.grid_size < 1:
            raise ValueError(f"grid_size must be >= 1, got {self.grid_size}")
        object.__setattr__(self, "broken_qubits", frozenset(self.broken_qubits))
        for q in self.broken_qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"broken qubit {q} outside 0..{self.num_qubits - 1}")

    @property
    def num_qubits(self) -> int:
        return 8 * self.grid_size * self.grid_size

    def qubit_index(self, row: int, col: int, side: int, offset: int) -> int:
        m = self.grid_size
        if not (0 <= row < m and 0 <= col < m and side in (0, 1) and 0 <= offset < 4):
            raise ValueError(f"no qubit at (row={row}, col={col}, side={side}, offset={offset})")
        return row * 8 * m + col * 8 + 4 * side + offset

    def qubit_coords(self, index: int) -> tuple[int, int, int, int]:
        if not 0 <= index < self.num_qubits:
            raise ValueError(f"qubit index {index} outside 0..{self.num_qubits - 1}")
        m = self.grid_size
        row, rest = divmod(index, 8 * m)
        col, within = divmod(rest, 8)
        side, offset = divmod(within, 4)
        return row, col, side, offset

    def are_adjacent(self, a: int, b: int) -> bool:
        """Couplers: intra-cell bipartite, plus same-offset cell neighbours."""
        ra, ca, ua, ka = self.qubit_coords(a)
        rb, cb, ub, kb = self.qubit_coords(b)
        if a == b:
            return False
        if ra == rb and ca == cb:
            return ua != ub
        if ua != ub:
            return False
        if ua == 0:  # vertical couplers
            return ca == cb and ka == kb and abs(ra - rb) == 1
        return ra == rb and ka == kb and abs(ca - cb) == 1


@dataclasses.dataclass(frozen=True)
class ChimeraEmbedding:
    """Chains of physical qubits realising each logical unit.

    coupling_edges maps each surviving logical pair (visible i, hidden j)
    to its single physical edge; pairs whose edge touched a broken qubit
    are listed in missing_couplings instead.
    """

    graph: ChimeraGraph
    visible_chains: tuple[tuple[int, ...], ...]
    hidden_chains: tuple[tuple[int, ...], ...]
    coupling_edges: dict[tuple[int, int], tuple[int, int]]
    missing_couplings: frozenset[tuple[int, int]]
    chain_coupling: float = DEFAULT_CHAIN_COUPLING

    @property
    def n_visible(self) -> int:
        return len(self.visible_chains)

    @property
    def n_hidden(self) -> int:
        return len(self.hidden_chains)


def _contiguous_chain(graph: ChimeraGraph, unit_name: str, cells: list[int],
                      qubit_of_cell) -> tuple[int, ...]:
    """Drop broken qubits from a path chain; reject splits and empties."""
    alive = [c for c in cells if qubit_of_cell(c) not in graph.broken_qubits]
    if not alive:
        raise EmbeddingError(f"{unit_name}: every qubit in its chain is broken")
    lo, hi = alive[0], alive[-1]
    if hi - lo + 1 != len(alive):  # an interior qubit is missing: the path splits
        raise EmbeddingError(f"{unit_name}: chain disconnected by broken qubits")
    return tuple(qubit_of_cell(c) for c in alive)


def build_chimera_embedding(n_visible: int, n_hidden: int, graph: ChimeraGraph,
                            chain_coupling: float = DEFAULT_CHAIN_COUPLING) -> ChimeraEmbedding:
    """Chain embedding for a machine of the given layer sizes.

    Capacity is 4*grid_size units per layer. Broken qubits shorten chains
    where possible; a chain broken in the middle, or a fully dead chain,
    raises EmbeddingError naming the logical unit.
    """
    cap = 4 * graph.grid_size
    if n_visible < 1 or n_hidden < 1:
        raise DimensionError("need at least one unit per layer")
    if n_visible > cap or n_hidden > cap:
        raise EmbeddingError(
            f"grid size {graph.grid_size} fits at most {cap} units per layer, "
            f"requested {n_visible} visible and {n_hidden} hidden")
    if chain_coupling >= 0 or not np.isfinite(chain_coupling):
        raise ValueError(f"chain_coupling must be negative, got {chain_coupling}")

    m = graph.grid_size
    visible_chains = []
    for i in range(n_visible):
        col, off = divmod(i, 4)
        visible_chains.append(_contiguous_chain(
            graph, f"visible unit {i}", list(range(m)),
            lambda row, col=col, off=off: graph.qubit_index(row, col, 0, off)))
    hidden_chains = []
    for j in range(n_hidden):
        row, off = divmod(j, 4)
        hidden_chains.append(_contiguous_chain(
            graph, f"hidden unit {j}", list(range(m)),
            lambda col, row=row, off=off: graph.qubit_index(row, col, 1, off)))

    coupling_edges = {}
    missing = set()
    for i in range(n_visible):
        ci, ki = divmod(i, 4)
        for j in range(n_hidden):
            rj, kj = divmod(j, 4)
            a = graph.qubit_index(rj, ci, 0, ki)  # the chains meet in cell (rj, ci)
            b = graph.qubit_index(rj, ci, 1, kj)
            if a in graph.broken_qubits or b in graph.broken_qubits:
                missing.add((i, j))
            else:
                coupling_edges[(i, j)] = (a, b)
    return ChimeraEmbedding(graph, tuple(visible_chains), tuple(hidden_chains),
                            coupling_edges, frozenset(missing), chain_coupling)


def validate_embedding(emb: ChimeraEmbedding) -> None:
    """Structural checks: chains disjoint, alive, internally connected."""
    seen: dict[int, str] = {}
    for name, chains in (("visible", emb.visible_chains), ("hidden", emb.hidden_chains)):
        for idx, chain in enumerate(chains):
            if not chain:
                raise EmbeddingError(f"{name} unit {idx}: empty chain")
            for q in chain:
                if q in emb.graph.broken_qubits:
                    raise EmbeddingError(f"{name} unit {idx}: uses broken qubit {q}")
                if q in seen:
                    raise EmbeddingError(f"qubit {q} shared by {seen[q]} and {name} unit {idx}")
                seen[q] = f"{name} unit {idx}"
            for a, b in zip(chain, chain[1:]):
                if not emb.graph.are_adjacent(a, b):
                    raise EmbeddingError(f"{name} unit {idx}: {a} and {b} are not coupled")
    for (i, j), (a, b) in emb.coupling_edges.items():
        if a not in emb.visible_chains[i] or b not in emb.hidden_chains[j]:
            raise EmbeddingError(f"coupling ({i}, {j}) edge ({a}, {b}) leaves its chains")
        if not emb.graph.are_adjacent(a, b):
            raise EmbeddingError(f"coupling ({i}, {j}) edge ({a}, {b}) is not a coupler")


def embed_problem(problem: IsingProblem, emb: ChimeraEmbedding) -> IsingProblem:
    """Spread a logical bipartite problem over the physical graph.

    Each logical field is divided equally along its chain; each logical
    coupling lands on its one physical edge; consecutive chain qubits get
    the embedding's ferromagnetic chain coupling. Logical pairs with no
    surviving edge are dropped (they are listed in missing_couplings).
    """
    n, m = emb.n_visible, emb.n_hidden
    if problem.num_spins != n + m:
        raise DimensionError(
            f"problem has {problem.num_spins} spins, embedding fits {n + m}")
    fields = np.zeros(emb.graph.num_qubits)
    couplings: dict[tuple[int, int], float] = {}
    for logical, chain in enumerate(emb.visible_chains + emb.hidden_chains):
        fields[list(chain)] = problem.fields[logical] / len(chain)
        for a, b in zip(chain, chain[1:]):
            couplings[(min(a, b), max(a, b))] = emb.chain_coupling
    for (i, j), value in problem.couplings.items():
        if j < n or i >= n:
            raise ValueError(f"coupling ({i}, {j}) is not visible-to-hidden")
        edge = emb.coupling_edges.get((i, j - n))
        if edge is not None:
            a, b = edge
            couplings[(min(a, b), max(a, b))] = value
    return IsingProblem(emb.graph.num_qubits, fields, couplings)


def resolve_chains(raw_spins, emb: ChimeraEmbedding,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Majority-vote each chain of a raw read back to one logical bit.

    raw_spins is one bipolar vector over all physical qubits. Exact ties
    fall to a fair coin from `rng`. Returns binary (visible, hidden).
    """
    raw = np.asarray(raw_spins, dtype=np.float64)
    if raw.shape != (emb.graph.num_qubits,):
        raise DimensionError(
            f"raw read must cover all {emb.graph.num_qubits} qubits, got {raw.shape}")
    if not np.isin(raw, (-1.0, 1.0)).all():
        raise ValueError("raw read must be bipolar (-1/+1)")

    def vote(chain):
        total = raw[list(chain)].sum()
        if total == 0:
            return 1 if rng.random() < 0.5 else 0
        return 1 if total > 0 else 0

    v = np.array([vote(ch) for ch in emb.visible_chains], dtype=np.uint8)
    h = np.array([vote(ch) for ch in emb.hidden_chains], dtype=np.uint8)
    return v, h
