"""Cover-graph structure: components, blocks, planarity, tree decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .constructions import DEFAULT_MAX_ELEMENTS, kelly_rec, kelly_rec_size
from .errors import SizeGuardExceeded
from .poset import Label, Poset, cover_relation


def cover_graph(P: Poset) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(P.size))
    G.add_edges_from(cover_relation(P))
    return G


def components(P: Poset) -> list[list[int]]:
    """Connected components of the cover graph, each sorted, ordered by
    least id.  Each one is convex, hence a component subposet."""
    seen = [False] * P.size
    nbrs = [set() for _ in range(P.size)]
    for u, v in cover_relation(P):
        nbrs[u].add(v)
        nbrs[v].add(u)
    out = []
    for s in range(P.size):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], [s]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
                    comp.append(v)
        out.append(sorted(comp))
    return out


@dataclass
class BlockDecomposition:
    blocks: list[list[int]]
    cut_vertices: list[int]
    block_edges: list[list[tuple[int, int]]] = field(repr=False)


def _biconnected(n: int, edges: Iterable[tuple[int, int]]):
    """Hopcroft-Tarjan with an explicit stack; yields lists of edges."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for a in adj:
        a.sort()
    disc = [-1] * n
    low = [0] * n
    timer = 0
    found = []
    for root in range(n):
        if disc[root] != -1 or not adj[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        edge_stack: list[tuple[int, int]] = []
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if disc[v] == -1:
                    edge_stack.append((u, v))
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, u, iter(adj[v])))
                    advanced = True
                    break
                if v != parent and disc[v] < disc[u]:
                    edge_stack.append((u, v))
                    low[u] = min(low[u], disc[v])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] >= disc[p]:
                    comp = []
                    while True:
                        e = edge_stack.pop()
                        comp.append(e)
                        if e == (p, u):
                            break
                    found.append(comp)
    return found


def blocks(P: Poset) -> BlockDecomposition:
    """Maximal 2-connected pieces of the cover graph (bridges count as
    2-vertex blocks), ordered by least vertex; isolated points form none."""
    comps = _biconnected(P.size, cover_relation(P))
    entries = []
    for comp in comps:
        verts = sorted({x for e in comp for x in e})
        entries.append((verts, sorted(tuple(sorted(e)) for e in comp)))
    entries.sort()
    count = [0] * P.size
    for verts, _ in entries:
        for x in verts:
            count[x] += 1
    cuts = [x for x in range(P.size) if count[x] >= 2]
    return BlockDecomposition([v for v, _ in entries], cuts, [e for _, e in entries])


# -- planarity ------------------------------------------------------------------

@dataclass
class PlanarityResult:
    planar: bool
    embedding: dict | None = None  # vertex -> clockwise neighbor list
    kuratowski: nx.Graph | None = None
    kind: str | None = None  # "K5" or "K3,3" for non-planar graphs


def _face_count(emb: nx.PlanarEmbedding) -> int:
    seen = set()
    faces = 0
    for u, v in emb.edges():
        if (u, v) not in seen:
            emb.traverse_face(u, v, mark_half_edges=seen)
            faces += 1
    return faces


def _smooth(H: nx.Graph) -> nx.Graph:
    H = nx.Graph(H)
    changed = True
    while changed:
        changed = False
        for x in list(H.nodes):
            if H.degree(x) == 2:
                a, b = H.neighbors(x)
                if not H.has_edge(a, b):
                    H.remove_node(x)
                    H.add_edge(a, b)
                    changed = True
    H.remove_nodes_from([x for x in list(H.nodes) if H.degree(x) == 0])
    return H


def kuratowski_kind(H: nx.Graph) -> str | None:
    """'K5' or 'K3,3' if H is a subdivision of one of them, else None."""
    S = _smooth(H)
    if S.number_of_nodes() == 5 and S.number_of_edges() == 10:
        return "K5"
    if S.number_of_nodes() == 6 and S.number_of_edges() == 9 and nx.is_bipartite(S):
        left, right = nx.bipartite.sets(S)
        if len(left) == 3 and all(S.degree(x) == 3 for x in S):
            return "K3,3"
    return None


def is_planar(G: nx.Graph) -> PlanarityResult:
    """Planarity with a checked witness either way.

    A positive answer carries a rotation system whose face count satisfies
    Euler's formula V - E + F = 1 + C; a negative one carries a subgraph
    that smooths to K5 or K3,3.
    """
    ok, cert = nx.check_planarity(G, counterexample=True)
    if ok:
        cert.check_structure()
        V, E = G.number_of_nodes(), G.number_of_edges()
        C = nx.number_connected_components(G) if V else 0
        if V - E + _face_count(cert) != 1 + C and E:
            raise AssertionError("embedding violates Euler's formula")
        rotation = {x: list(cert.neighbors_cw_order(x)) for x in sorted(cert.nodes)}
        return PlanarityResult(True, embedding=rotation)
    if not all(G.has_edge(u, v) for u, v in cert.edges()):
        raise AssertionError("Kuratowski witness is not a subgraph")
    kind = kuratowski_kind(cert)
    if kind is None:
        raise AssertionError("Kuratowski witness has the wrong shape")
    return PlanarityResult(False, kuratowski=cert, kind=kind)


# -- tree decompositions ----------------------------------------------------------

@dataclass
class TreeDecomposition:
    bags: list[frozenset[int]]
    edges: list[tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


@dataclass
class TDReport:
    valid: bool
    width: int
    violation: tuple | None = None


def verify_tree_decomposition(G: nx.Graph, td: TreeDecomposition) -> TDReport:
    """Check edges, then vertices, then tree shape, then running intersection;
    the first failure found is reported."""
    width = td.width
    where: dict[int, list[int]] = {}
    for i, bag in enumerate(td.bags):
        for x in bag:
            where.setdefault(x, []).append(i)
    for u, v in sorted(tuple(sorted(e)) for e in G.edges()):
        if not set(where.get(u, ())) & set(where.get(v, ())):
            return TDReport(False, width, ("edge", (u, v)))
    for x in sorted(G.nodes):
        if x not in where:
            return TDReport(False, width, ("vertex", x))
    T = nx.Graph()
    T.add_nodes_from(range(len(td.bags)))
    T.add_edges_from(td.edges)
    if len(td.bags) and not nx.is_tree(T):
        return TDReport(False, width, ("tree", None))
    for x in sorted(where):
        if not nx.is_connected(T.subgraph(where[x])):
            return TDReport(False, width, ("running-intersection", x))
    return TDReport(True, width)


def _kelly_block_bags(ix, n: int):
    """Bags and tree edges for one copy of K_n; ``ix(fam, i)`` maps a point
    of the copy to its id.  Also returns, for each a_i, a bag holding it."""
    a = lambda i: ix("a", i)
    b = lambda i: ix("b", i)
    w = lambda i: ix("w", i)
    z = lambda i: ix("z", i)
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    holder: dict[int, int] = {}

    def add(vertices, parent=None):
        bags.append(frozenset(vertices))
        k = len(bags) - 1
        if parent is not None:
            edges.append((parent, k))
        return k

    central = []
    for i in range(1, n - 1):
        central.append(add((w(i), z(i), w(i + 1), z(i + 1)), central[-1] if central else None))
    for i in range(1, n - 1):
        holder[i + 1] = add((z(i), w(i + 1), a(i + 1)), central[i - 1])
        add((w(i), z(i + 1), b(i + 1)), central[i - 1])
    holder[1] = add((a(1), w(1)), central[0])
    add((z(1), b(1)), central[0])
    holder[n] = add((a(n), z(n - 1)), central[-1])
    bottom = add((w(n - 1), b(n)), central[-1])
    return bags, edges, holder, bottom


def kelly_tree_decomposition(n: int, d: int, max_elements: int = DEFAULT_MAX_ELEMENTS) -> TreeDecomposition:
    """Width-3 decomposition of the cover graph of ``kelly_rec(n, d)``.

    Every copy of K_n gets a ladder of bags {w_i, z_i, w_{i+1}, z_{i+1}}
    with the a/b points hanging off it; a copy glued below a_i is attached
    through its (b_n) bag to a bag of the parent holding a_i.  Ids follow
    the layout of ``kelly_rec``.
    """
    if n < 3 or d < 1:
        raise ValueError("kelly_tree_decomposition needs n >= 3 and d >= 1")
    size = kelly_rec_size(n, d)
    if size > max_elements:
        raise SizeGuardExceeded(size, max_elements)
    K = kelly_rec(n, d, max_elements)
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []

    def build(prefix: tuple, depth: int, attach: int | None):
        ix = lambda fam, i: K.index(Label(prefix + ((fam, i),)))
        b_bags, b_edges, holder, bottom = _kelly_block_bags(ix, n)
        off = len(bags)
        bags.extend(b_bags)
        edges.extend((off + u, off + v) for u, v in b_edges)
        if attach is not None:
            edges.append((attach, off + bottom))
        if depth < d:
            for i in range(1, n + 1):
                build(prefix + (("a", i),), depth + 1, off + holder[i])

    build((), 1, None)
    return TreeDecomposition(bags, edges)
