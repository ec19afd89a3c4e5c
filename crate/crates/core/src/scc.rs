//! Strongly connected components of the corporate ownership graph.
//!
//! The graph has an arc `u -> v` whenever `p_uv > 0`, i.e. arcs point from
//! the owned corporation to its owner, which is also the direction in which
//! income flows. Individuals are left out: they never distribute, so they
//! cannot close a cycle.

use crate::network::{OwnershipNetwork, TaxpayerId};

/// Compressed adjacency over `0..n`.
#[derive(Debug, Clone)]
pub struct Digraph {
    start: Vec<usize>,
    targets: Vec<usize>,
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut start = vec![0usize; n + 1];
        for &(u, _) in arcs {
            start[u + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut targets = vec![0usize; arcs.len()];
        for &(u, v) in arcs {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        Digraph { start, targets }
    }

    pub fn len(&self) -> usize {
        self.start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        &self.targets[self.start[u]..self.start[u + 1]]
    }

    pub fn n_arcs(&self) -> usize {
        self.targets.len()
    }
}

/// Nodes grouped into components, stored back to back.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partition {
    nodes: Vec<usize>,
    start: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.start.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members of part `k`, ascending.
    pub fn get(&self, k: usize) -> &[usize] {
        &self.nodes[self.start[k]..self.start[k + 1]]
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &[usize]> + ExactSizeIterator + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }
}

/// Tarjan's algorithm with an explicit stack.
///
/// Components come out in the order Tarjan emits them: a component is
/// emitted only after every component reachable from it.
pub fn tarjan(g: &Digraph) -> Partition {
    // u32 bookkeeping keeps the working set small on large graphs
    const UNVISITED: u32 = u32::MAX;
    let n = g.len();
    assert!(n < UNVISITED as usize, "graph too large");
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    // (node, next successor offset)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut out = Partition {
        nodes: Vec::with_capacity(n),
        start: vec![0],
    };

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let u = top.0;
            let succ = g.successors(u);
            if top.1 < succ.len() {
                let v = succ[top.1];
                top.1 += 1;
                if index[v] == UNVISITED {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                let from = out.nodes.len();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    out.nodes.push(w);
                    if w == u {
                        break;
                    }
                }
                out.nodes[from..].sort_unstable();
                out.start.push(out.nodes.len());
            }
        }
    }
    out
}

/// Corporate subgraph with local indices `0..n_S` mapped to network indices.
#[derive(Debug, Clone)]
pub struct CorporateGraph {
    pub nodes: Vec<usize>,
    pub local: Vec<Option<usize>>,
    pub graph: Digraph,
}

impl CorporateGraph {
    pub fn new(net: &OwnershipNetwork) -> Self {
        let nodes: Vec<usize> = net.corporations().collect();
        let mut local = vec![None; net.len()];
        for (k, &i) in nodes.iter().enumerate() {
            local[i] = Some(k);
        }
        let mut start = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::new();
        start.push(0);
        for &i in &nodes {
            let (owners, shares) = net.row(i);
            for (&j, &p) in owners.iter().zip(shares) {
                // kinds are cheaper to probe than the sparse local map
                if p > 0.0 && net.is_corporation(j) {
                    targets.extend(local[j]);
                }
            }
            start.push(targets.len());
        }
        CorporateGraph {
            graph: Digraph { start, targets },
            nodes,
            local,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component<'a> {
    /// Network indices of the member corporations, ascending.
    pub members: &'a [usize],
    /// True iff some `p_uv > 0` with both ends in the component, self-loops included.
    pub has_internal_edge: bool,
}

impl<'a> Component<'a> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_ids(&self, net: &'a OwnershipNetwork) -> impl Iterator<Item = &'a TaxpayerId> + 'a {
        self.members.iter().map(move |&i| net.id(i))
    }
}

/// Components in income-flow order: whenever `p_uv > 0` links two distinct
/// components, the component of `u` comes first.
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    parts: Partition,
    internal: Vec<bool>,
    component_of: Vec<Option<usize>>,
}

impl ComponentDecomposition {
    pub fn get(&self, pos: usize) -> Component<'_> {
        Component {
            members: self.parts.get(pos),
            has_internal_edge: self.internal[pos],
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Component<'_>> + ExactSizeIterator + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }

    /// Position in processing order of the component holding corporation `i`.
    pub fn component_of(&self, i: usize) -> Option<usize> {
        self.component_of[i]
    }

    pub fn len(&self) -> usize {
        self.internal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.internal.is_empty()
    }

    /// Arcs of the condensation, deduplicated, as pairs of component positions.
    pub fn condensation_arcs(&self, net: &OwnershipNetwork) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for (a, comp) in self.iter().enumerate() {
            for &u in comp.members {
                for (v, p) in net.row_iter(u) {
                    if p <= 0.0 {
                        continue;
                    }
                    if let Some(b) = self.component_of[v] {
                        if a != b {
                            arcs.push((a, b));
                        }
                    }
                }
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        arcs
    }
}

/// Strongly connected components of the corporate graph in income-flow order.
pub fn decompose(net: &OwnershipNetwork) -> ComponentDecomposition {
    let cg = CorporateGraph::new(net);
    decompose_graph(net, &cg)
}

pub(crate) fn decompose_graph(net: &OwnershipNetwork, cg: &CorporateGraph) -> ComponentDecomposition {
    let emitted = tarjan(&cg.graph);
    let mut component_of = vec![None; net.len()];
    let mut parts = Partition {
        nodes: Vec::with_capacity(cg.nodes.len()),
        start: Vec::with_capacity(emitted.len() + 1),
    };
    parts.start.push(0);
    let mut internal = Vec::with_capacity(emitted.len());
    // Tarjan emits owners before the corporations they own.
    for (pos, local_members) in emitted.iter().rev().enumerate() {
        for &k in local_members {
            component_of[cg.nodes[k]] = Some(pos);
            parts.nodes.push(cg.nodes[k]);
        }
        parts.start.push(parts.nodes.len());
        internal.push(if local_members.len() > 1 {
            true
        } else {
            let k = local_members[0];
            cg.graph.successors(k).contains(&k)
        });
    }
    ComponentDecomposition {
        parts,
        internal,
        component_of,
    }
}
