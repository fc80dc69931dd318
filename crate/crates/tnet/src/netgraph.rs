//! Tensor-network graphs, bubbling plans and contraction cost.
//!
//! A bubbling absorbs nodes one at a time into a running tensor. The cost
//! model and the contraction engine share one schedule, so the reported peak
//! is exactly the largest running tensor the engine allocates.

use crate::tensor::{contract, partial_trace, tensor_product, DenseTensor, TensorError, C64};
use thiserror::Error;

pub type NodeId = usize;
pub type LegRef = (NodeId, usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("inconsistent bonds: {0}")]
    InconsistentBonds(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub name: String,
    pub tensor: DenseTensor,
}

#[derive(Clone, Debug, Default)]
pub struct TensorNetwork {
    pub nodes: Vec<Node>,
    pub bonds: Vec<(LegRef, LegRef)>,
    pub open_legs: Vec<LegRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bubbling {
    pub order: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub peak_entries: usize,
    pub total_flops: u128,
    pub per_step: Vec<usize>,
}

impl TensorNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, tensor: DenseTensor) -> NodeId {
        self.nodes.push(Node {
            name: name.into(),
            tensor,
        });
        self.nodes.len() - 1
    }

    pub fn bond(&mut self, a: NodeId, la: usize, b: NodeId, lb: usize) {
        self.bonds.push(((a, la), (b, lb)));
    }

    /// Marks every unbonded leg as open, in node then leg order.
    pub fn open_remaining(&mut self) {
        let mut used: Vec<Vec<bool>> = self
            .nodes
            .iter()
            .map(|n| vec![false; n.tensor.rank()])
            .collect();
        for &(a, b) in &self.bonds {
            for (n, l) in [a, b] {
                if let Some(u) = used.get_mut(n).and_then(|v| v.get_mut(l)) {
                    *u = true;
                }
            }
        }
        for &(n, l) in &self.open_legs {
            if let Some(u) = used.get_mut(n).and_then(|v| v.get_mut(l)) {
                *u = true;
            }
        }
        for (n, legs) in used.iter().enumerate() {
            for (l, &u) in legs.iter().enumerate() {
                if !u {
                    self.open_legs.push((n, l));
                }
            }
        }
    }

    pub fn leg_dim(&self, (n, l): LegRef) -> usize {
        self.nodes[n].tensor.shape()[l]
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Checks that every leg is bonded exactly once or open exactly once.
    pub fn validate(&self) -> Result<(), NetError> {
        let mut count: Vec<Vec<u8>> = self
            .nodes
            .iter()
            .map(|n| vec![0; n.tensor.rank()])
            .collect();
        let mut mark = |r: LegRef| -> Result<(), NetError> {
            let slot = count
                .get_mut(r.0)
                .and_then(|v| v.get_mut(r.1))
                .ok_or_else(|| NetError::InconsistentBonds(format!("leg {:?} does not exist", r)))?;
            *slot += 1;
            Ok(())
        };
        for &(a, b) in &self.bonds {
            mark(a)?;
            mark(b)?;
        }
        for &o in &self.open_legs {
            mark(o)?;
        }
        for (n, legs) in count.iter().enumerate() {
            for (l, &k) in legs.iter().enumerate() {
                if k != 1 {
                    return Err(NetError::InconsistentBonds(format!(
                        "leg {} of node {} is referenced {} times",
                        l, self.nodes[n].name, k
                    )));
                }
            }
        }
        for &(a, b) in &self.bonds {
            if self.leg_dim(a) != self.leg_dim(b) {
                return Err(NetError::InconsistentBonds(format!(
                    "bond {:?}-{:?} joins dimensions {} and {}",
                    a,
                    b,
                    self.leg_dim(a),
                    self.leg_dim(b)
                )));
            }
        }
        Ok(())
    }

    /// Partner of each bonded leg, indexed `[node][leg]`.
    fn partners(&self) -> Vec<Vec<Option<LegRef>>> {
        let mut p: Vec<Vec<Option<LegRef>>> = self
            .nodes
            .iter()
            .map(|n| vec![None; n.tensor.rank()])
            .collect();
        for &(a, b) in &self.bonds {
            p[a.0][a.1] = Some(b);
            p[b.0][b.1] = Some(a);
        }
        p
    }

    /// Connected components, each sorted by node id, ordered by lowest id.
    fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &(a, b) in &self.bonds {
            let ra = find(&mut parent, a.0);
            let rb = find(&mut parent, b.0);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: Vec<Vec<NodeId>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v);
        }
        comps
    }

    fn check_plan(&self, plan: &Bubbling) -> Result<(), NetError> {
        let n = self.nodes.len();
        if plan.order.len() != n {
            return Err(NetError::InvalidPlan(format!(
                "plan has {} entries for {} nodes",
                plan.order.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &v in &plan.order {
            if v >= n || seen[v] {
                return Err(NetError::InvalidPlan(format!("node {} missing or repeated", v)));
            }
            seen[v] = true;
        }
        Ok(())
    }
}

/// One absorption step of a schedule.
#[derive(Clone, Debug)]
struct Step {
    size: usize,
    flops: u128,
}

struct Schedule {
    /// Per component, the absorbed nodes in plan order.
    comps: Vec<Vec<NodeId>>,
    steps: Vec<Step>,
}

fn plan_schedule(net: &TensorNetwork, plan: &Bubbling) -> Schedule {
    let partners = net.partners();
    let mut rank_in_plan = vec![0usize; net.nodes.len()];
    for (k, &v) in plan.order.iter().enumerate() {
        rank_in_plan[v] = k;
    }
    let mut comps = net.components();
    for c in &mut comps {
        c.sort_by_key(|&v| rank_in_plan[v]);
    }
    let mut steps = Vec::new();
    let mut inside = vec![false; net.nodes.len()];
    let mut comp_sizes = Vec::new();
    for comp in &comps {
        let mut legs: Vec<LegRef> = Vec::new();
        for &v in comp {
            let rank = net.nodes[v].tensor.rank();
            let incoming: Vec<LegRef> = (0..rank).map(|l| (v, l)).collect();
            // legs of v bonded to the region already absorbed
            let joined: Vec<LegRef> = incoming
                .iter()
                .copied()
                .filter(|&r| matches!(partners[r.0][r.1], Some(p) if inside[p.0] && p.0 != v))
                .collect();
            let self_pairs = incoming
                .iter()
                .filter(|&&r| matches!(partners[r.0][r.1], Some(p) if p.0 == v))
                .count();
            let before: usize = legs.iter().map(|&r| net.leg_dim(r)).product();
            let node_size = net.nodes[v].tensor.len();
            let k: usize = joined.iter().map(|&r| net.leg_dim(r)).product();
            let mut flops = 0u128;
            if self_pairs > 0 {
                flops += node_size as u128;
            }
            let traced_node: usize = incoming
                .iter()
                .filter(|&&r| !matches!(partners[r.0][r.1], Some(p) if p.0 == v))
                .map(|&r| net.leg_dim(r))
                .product();
            let m = before / k.max(1);
            let nfree = traced_node / k.max(1);
            if !legs.is_empty() {
                flops += (m as u128) * (k as u128) * (nfree as u128);
            }
            let joined_partners: Vec<LegRef> =
                joined.iter().map(|&r| partners[r.0][r.1].unwrap()).collect();
            legs.retain(|r| !joined_partners.contains(r));
            for r in incoming {
                match partners[r.0][r.1] {
                    Some(p) if p.0 == v => {}
                    Some(p) if inside[p.0] => {}
                    _ => legs.push(r),
                }
            }
            inside[v] = true;
            let size: usize = legs.iter().map(|&r| net.leg_dim(r)).product();
            steps.push(Step { size, flops });
        }
        comp_sizes.push(legs.iter().map(|&r| net.leg_dim(r)).product::<usize>());
    }
    let mut acc = comp_sizes.first().copied().unwrap_or(1);
    for &s in comp_sizes.iter().skip(1) {
        acc *= s;
        steps.push(Step {
            size: acc,
            flops: acc as u128,
        });
    }
    Schedule { comps, steps }
}

fn check(net: &TensorNetwork, plan: &Bubbling) -> Result<(), NetError> {
    net.validate()?;
    net.check_plan(plan)
}

/// Cost of a bubbling: running-tensor sizes after each absorption.
pub fn bubbling_cost(net: &TensorNetwork, plan: &Bubbling) -> Result<CostReport, NetError> {
    check(net, plan)?;
    let s = plan_schedule(net, plan);
    let per_step: Vec<usize> = s.steps.iter().map(|st| st.size).collect();
    Ok(CostReport {
        peak_entries: per_step.iter().copied().max().unwrap_or(1),
        total_flops: s.steps.iter().map(|st| st.flops).sum(),
        per_step,
    })
}

/// Contracts the network following `plan`; result legs follow `open_legs`.
pub fn contract_network(net: &TensorNetwork, plan: &Bubbling) -> Result<DenseTensor, NetError> {
    contract_network_traced(net, plan).map(|(t, _)| t)
}

/// Like [`contract_network`], also returning the largest running tensor size.
pub fn contract_network_traced(
    net: &TensorNetwork,
    plan: &Bubbling,
) -> Result<(DenseTensor, usize), NetError> {
    check(net, plan)?;
    let partners = net.partners();
    let sched = plan_schedule(net, plan);
    let mut peak = 0usize;
    let mut inside = vec![false; net.nodes.len()];
    let mut results: Vec<(DenseTensor, Vec<LegRef>)> = Vec::new();
    for comp in &sched.comps {
        let mut run: Option<(DenseTensor, Vec<LegRef>)> = None;
        for &v in comp {
            let mut t = net.nodes[v].tensor.clone();
            let mut legs: Vec<LegRef> = (0..t.rank()).map(|l| (v, l)).collect();
            // trace self-bonds first
            loop {
                let pair = legs.iter().enumerate().find_map(|(i, &r)| match partners[r.0][r.1] {
                    Some(p) if p.0 == v => legs.iter().position(|&q| q == p).map(|j| (i, j)),
                    _ => None,
                });
                match pair {
                    Some((i, j)) => {
                        t = partial_trace(&t, i, j)?;
                        let (hi, lo) = (i.max(j), i.min(j));
                        legs.remove(hi);
                        legs.remove(lo);
                    }
                    None => break,
                }
            }
            run = Some(match run {
                None => (t, legs),
                Some((rt, rlegs)) => {
                    let mut ra = Vec::new();
                    let mut tb = Vec::new();
                    for (j, &r) in legs.iter().enumerate() {
                        if let Some(p) = partners[r.0][r.1] {
                            if inside[p.0] {
                                let i = rlegs.iter().position(|&q| q == p).ok_or_else(|| {
                                    NetError::InconsistentBonds(format!("dangling partner {:?}", p))
                                })?;
                                ra.push(i);
                                tb.push(j);
                            }
                        }
                    }
                    let out = contract(&rt, &ra, &t, &tb)?;
                    let mut nl: Vec<LegRef> = rlegs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !ra.contains(i))
                        .map(|(_, &r)| r)
                        .collect();
                    nl.extend(
                        legs.iter()
                            .enumerate()
                            .filter(|(j, _)| !tb.contains(j))
                            .map(|(_, &r)| r),
                    );
                    (out, nl)
                }
            });
            inside[v] = true;
            peak = peak.max(run.as_ref().unwrap().0.len());
        }
        results.push(run.expect("components are non-empty"));
    }
    let mut acc: Option<(DenseTensor, Vec<LegRef>)> = None;
    for (t, legs) in results {
        acc = Some(match acc {
            None => (t, legs),
            Some((at, mut al)) => {
                let p = tensor_product(&at, &t);
                peak = peak.max(p.len());
                al.extend(legs);
                (p, al)
            }
        });
    }
    let (t, legs) = acc.unwrap_or((DenseTensor::scalar(C64::new(1.0, 0.0)), vec![]));
    let perm: Vec<usize> = net
        .open_legs
        .iter()
        .map(|o| legs.iter().position(|l| l == o).expect("open leg survives"))
        .collect();
    Ok((t.permute(&perm)?, peak))
}

/// Greedy plan: repeatedly absorb the node giving the smallest next boundary
/// product, breaking ties by lowest id.
pub fn greedy_bubbling(net: &TensorNetwork) -> Bubbling {
    let n = net.nodes.len();
    let partners = net.partners();
    let mut inside = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // boundary size of the region plus candidate v
    let boundary_with = |inside: &[bool], v: usize| -> u128 {
        let mut prod: u128 = 1;
        for (u, node) in net.nodes.iter().enumerate() {
            if !(inside[u] || u == v) {
                continue;
            }
            for l in 0..node.tensor.rank() {
                let dangling = match partners[u][l] {
                    None => true,
                    Some(p) => !(inside[p.0] || p.0 == v),
                };
                if dangling {
                    prod = prod.saturating_mul(node.tensor.shape()[l] as u128);
                }
            }
        }
        prod
    };
    for _ in 0..n {
        let mut best: Option<(u128, usize)> = None;
        for v in 0..n {
            if inside[v] {
                continue;
            }
            let c = boundary_with(&inside, v);
            if best.map_or(true, |(bc, _)| c < bc) {
                best = Some((c, v));
            }
        }
        let (_, v) = best.expect("remaining node");
        inside[v] = true;
        order.push(v);
    }
    Bubbling { order }
}

/// Simple undirected graph as an adjacency list.
#[derive(Clone, Debug)]
pub struct Graph {
    pub adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(adjacency: Vec<Vec<usize>>) -> Result<Self, NetError> {
        let n = adjacency.len();
        for (v, nb) in adjacency.iter().enumerate() {
            for (k, &u) in nb.iter().enumerate() {
                if u >= n {
                    return Err(NetError::InvalidGraph(format!("vertex {} out of range", u)));
                }
                if u == v {
                    return Err(NetError::InvalidGraph(format!("self loop at {}", v)));
                }
                if nb[..k].contains(&u) {
                    return Err(NetError::InvalidGraph(format!("repeated edge {}-{}", v, u)));
                }
                if !adjacency[u].contains(&v) {
                    return Err(NetError::InvalidGraph(format!("edge {}-{} is not symmetric", v, u)));
                }
            }
        }
        Ok(Self { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetError> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(NetError::InvalidGraph(format!("edge {}-{} out of range", a, b)));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        Self::new(adj)
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Edges (a, b) with a < b, ordered by a then by adjacency position.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (v, nb) in self.adjacency.iter().enumerate() {
            for &u in nb {
                if v < u {
                    e.push((v, u));
                }
            }
        }
        e
    }

    pub fn petersen() -> Self {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &e).expect("valid graph")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    e.push((v, v + 1));
                }
                if r + 1 < rows {
                    e.push((v, v + cols));
                }
            }
        }
        Self::from_edges(rows * cols, &e).expect("valid graph")
    }

    pub fn complete(n: usize) -> Self {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        Self::from_edges(n, &e).expect("valid graph")
    }
}

/// Copy tensor: 1 when all `rank` indices agree.
pub fn e_tensor(rank: usize, q: usize) -> DenseTensor {
    if rank == 0 {
        return DenseTensor::scalar(C64::new(q as f64, 0.0));
    }
    DenseTensor::from_fn(&vec![q; rank], |i| {
        C64::new(if i.iter().all(|&x| x == i[0]) { 1.0 } else { 0.0 }, 0.0)
    })
}

/// 1 when all `rank` indices are pairwise distinct; identically zero for rank > q.
pub fn n_tensor(rank: usize, q: usize) -> DenseTensor {
    if rank == 0 {
        return DenseTensor::scalar(C64::new(1.0, 0.0));
    }
    if rank > q {
        return DenseTensor::zeros(&vec![q; rank]);
    }
    DenseTensor::from_fn(&vec![q; rank], |i| {
        let distinct = (0..i.len()).all(|a| (a + 1..i.len()).all(|b| i[a] != i[b]));
        C64::new(if distinct { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Network whose value counts proper vertex q-colorings.
pub fn coloring_network(graph: &Graph, q: usize) -> Result<TensorNetwork, NetError> {
    if q == 0 {
        return Err(NetError::InvalidGraph("q must be positive".into()));
    }
    let mut net = TensorNetwork::new();
    let n = graph.n_vertices();
    for v in 0..n {
        net.add_node(format!("v{}", v), e_tensor(graph.adjacency[v].len(), q));
    }
    for (a, b) in graph.edges() {
        let id = net.add_node(format!("e{}-{}", a, b), n_tensor(2, q));
        let la = graph.adjacency[a].iter().position(|&u| u == b).unwrap();
        let lb = graph.adjacency[b].iter().position(|&u| u == a).unwrap();
        net.bond(a, la, id, 0);
        net.bond(b, lb, id, 1);
    }
    Ok(net)
}

/// Network whose value counts proper edge q-colorings.
pub fn edge_coloring_network(graph: &Graph, q: usize) -> Result<TensorNetwork, NetError> {
    if q == 0 {
        return Err(NetError::InvalidGraph("q must be positive".into()));
    }
    let mut net = TensorNetwork::new();
    let n = graph.n_vertices();
    for v in 0..n {
        net.add_node(format!("v{}", v), n_tensor(graph.adjacency[v].len(), q));
    }
    for (a, b) in graph.edges() {
        let id = net.add_node(format!("e{}-{}", a, b), e_tensor(2, q));
        let la = graph.adjacency[a].iter().position(|&u| u == b).unwrap();
        let lb = graph.adjacency[b].iter().position(|&u| u == a).unwrap();
        net.bond(a, la, id, 0);
        net.bond(b, lb, id, 1);
    }
    Ok(net)
}

/// Contracts a closed network with a greedy plan and rounds to an integer count.
pub fn count_value(net: &TensorNetwork) -> Result<u64, NetError> {
    let t = contract_network(net, &greedy_bubbling(net))?;
    let v = t
        .scalar_value()
        .ok_or_else(|| NetError::InconsistentBonds("network has open legs".into()))?;
    Ok(v.re.round().max(0.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> TensorNetwork {
        // nodes 0..4 top row, 4..8 bottom row
        let mut net = TensorNetwork::new();
        let deg = |c: usize| if c == 0 || c == 3 { 2 } else { 3 };
        for row in 0..2 {
            for c in 0..4 {
                net.add_node(format!("{}{}", row, c), DenseTensor::zeros(&vec![2; deg(c)]));
            }
        }
        // leg 0: rung, then left rail, then right rail
        for row in 0..2 {
            for c in 0..3 {
                let a = row * 4 + c;
                let la = if c == 0 { 1 } else { 2 };
                net.bond(a, la, a + 1, 1);
            }
        }
        for c in 0..4 {
            net.bond(c, 0, c + 4, 0);
        }
        net
    }

    #[test]
    fn disjoint_scalars() {
        let mut net = TensorNetwork::new();
        net.add_node("a", DenseTensor::scalar(C64::new(2.0, 0.0)));
        net.add_node("b", DenseTensor::scalar(C64::new(3.0, 0.0)));
        let plan = Bubbling { order: vec![1, 0] };
        let r = contract_network(&net, &plan).unwrap();
        assert_eq!(r.scalar_value(), Some(C64::new(6.0, 0.0)));
    }

    #[test]
    fn single_node() {
        let mut net = TensorNetwork::new();
        let t = DenseTensor::from_fn(&[2, 3], |i| C64::new(i[0] as f64, i[1] as f64));
        net.add_node("t", t.clone());
        net.open_remaining();
        let plan = greedy_bubbling(&net);
        assert_eq!(plan.order, vec![0]);
        assert_eq!(contract_network(&net, &plan).unwrap(), t);
        assert_eq!(bubbling_cost(&net, &plan).unwrap().peak_entries, 6);
    }

    #[test]
    fn ladder_costs() {
        let net = ladder();
        net.validate().unwrap();
        let bad = bubbling_cost(&net, &Bubbling { order: (0..8).collect() }).unwrap();
        assert_eq!(bad.peak_entries, 16);
        let good = bubbling_cost(
            &net,
            &Bubbling {
                order: vec![0, 4, 1, 5, 2, 6, 3, 7],
            },
        )
        .unwrap();
        assert_eq!(good.peak_entries, 8);
        let g = bubbling_cost(&net, &greedy_bubbling(&net)).unwrap();
        assert!(g.peak_entries <= bad.peak_entries);
    }

    #[test]
    fn invalid_plans() {
        let net = ladder();
        assert!(matches!(
            bubbling_cost(&net, &Bubbling { order: vec![0, 1] }),
            Err(NetError::InvalidPlan(_))
        ));
        assert!(matches!(
            contract_network(&net, &Bubbling { order: vec![0, 0, 1, 2, 3, 4, 5, 6] }),
            Err(NetError::InvalidPlan(_))
        ));
    }

    #[test]
    fn mismatched_bond() {
        let mut net = TensorNetwork::new();
        let a = net.add_node("a", DenseTensor::zeros(&[2]));
        let b = net.add_node("b", DenseTensor::zeros(&[3]));
        net.bond(a, 0, b, 0);
        assert!(matches!(net.validate(), Err(NetError::InconsistentBonds(_))));
    }

    #[test]
    fn small_colorings() {
        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(count_value(&coloring_network(&edge, 2).unwrap()).unwrap(), 2);
        assert_eq!(count_value(&edge_coloring_network(&edge, 3).unwrap()).unwrap(), 3);
        let tri = Graph::complete(3);
        assert_eq!(count_value(&coloring_network(&tri, 3).unwrap()).unwrap(), 6);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(count_value(&edge_coloring_network(&path, 2).unwrap()).unwrap(), 2);
        // K4 has degree 3 > q = 2
        assert_eq!(count_value(&edge_coloring_network(&Graph::complete(4), 2).unwrap()).unwrap(), 0);
    }

    #[test]
    fn bad_graphs() {
        assert!(Graph::new(vec![vec![0]]).is_err());
        assert!(Graph::new(vec![vec![1], vec![]]).is_err());
        assert!(Graph::new(vec![vec![1, 1], vec![0, 0]]).is_err());
    }
}
