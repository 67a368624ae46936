//! Tensor networks as edge-weighted hypergraphs.
//!
//! A network is an undirected hypergraph: vertices carry (optional) tensors,
//! edges carry an integer bond dimension. The weight of an edge is the log2 of
//! its bond dimension; all cost arithmetic uses the exact integer dimensions
//! and only reports log2 values alongside.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Vertex handle. Opaque strings in the text format, dense integers here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub(crate) fn new(i: u32) -> Self {
        VertexId(i)
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

/// Edge handle. Stable across symbolic contraction; merged parallel edges get
/// a fresh id with the sources recorded in `Edge::merged_from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u32);

impl EdgeId {
    pub(crate) fn new(i: u32) -> Self {
        EdgeId(i)
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    /// Pairwise distinct endpoints. One endpoint marks an open leg; two an
    /// ordinary wire; three or more a hyperedge (copy-tensor semantics).
    pub endpoints: Vec<VertexId>,
    /// Bond dimension, at least 1.
    pub dim: u64,
    /// Edges this one absorbed during symbolic contraction.
    pub merged_from: Vec<EdgeId>,
}

impl Edge {
    /// log2 of the bond dimension.
    pub fn weight(&self) -> f64 {
        (self.dim as f64).log2()
    }

    pub fn is_open(&self) -> bool {
        self.endpoints.len() == 1
    }

    pub fn is_hyper(&self) -> bool {
        self.endpoints.len() > 2
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.endpoints.contains(&v)
    }
}

/// Unweighted simple graph on vertices `0..n`, used for line graphs and the
/// decomposition bridge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        SimpleGraph { n, edges }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges incident to `v`, as indices into `self.edges`.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(i, _)| i)
            .collect()
    }
}

/// A tensor network: hypergraph plus optional tensor payloads.
///
/// Values are immutable after construction as far as the planning operations
/// are concerned; every operation returns a new network.
#[derive(Debug, Clone)]
pub struct Network {
    names: Vec<String>,
    by_name: BTreeMap<String, VertexId>,
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    next_edge: u32,
    tensors: BTreeMap<VertexId, DenseTensor>,
    environment: Option<VertexId>,
}

/// Reserved name for the synthetic open-leg sink.
pub const ENV_NAME: &str = "@env";

impl Default for Network {
    fn default() -> Self {
        Self::new()
    }
}

impl Network {
    pub fn new() -> Self {
        Network {
            names: Vec::new(),
            by_name: BTreeMap::new(),
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
            next_edge: 0,
            tensors: BTreeMap::new(),
            environment: None,
        }
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let id = VertexId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        self.vertices.insert(id);
        Ok(id)
    }

    pub fn add_edge(&mut self, dim: u64, endpoints: &[VertexId]) -> Result<EdgeId> {
        let id = EdgeId(self.next_edge);
        if dim < 1 {
            return Err(Error::InvalidEdge(id.index(), "bond dimension must be >= 1".into()));
        }
        if endpoints.is_empty() {
            return Err(Error::InvalidEdge(id.index(), "edge needs at least one endpoint".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in endpoints {
            if !self.vertices.contains(&v) {
                return Err(Error::UnknownVertex(self.display_name(v)));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidEdge(id.index(), "endpoints must be distinct".into()));
            }
        }
        self.next_edge += 1;
        self.edges.insert(
            id,
            Edge { id, endpoints: endpoints.to_vec(), dim, merged_from: Vec::new() },
        );
        Ok(id)
    }

    pub fn attach_tensor(&mut self, v: VertexId, tensor: DenseTensor) -> Result<()> {
        self.check_vertex(v)?;
        self.check_tensor_shape(v, &tensor)?;
        self.tensors.insert(v, tensor);
        Ok(())
    }

    fn check_tensor_shape(&self, v: VertexId, tensor: &DenseTensor) -> Result<()> {
        let incident = self.incident_edges(v);
        let mut axes: Vec<EdgeId> = tensor.axes().to_vec();
        axes.sort_unstable();
        if axes != incident {
            return Err(Error::ShapeMismatch {
                vertex: self.display_name(v),
                reason: format!(
                    "tensor axes {:?} do not match incident edges {:?}",
                    tensor.axes().iter().map(|e| e.index()).collect::<Vec<_>>(),
                    incident.iter().map(|e| e.index()).collect::<Vec<_>>()
                ),
            });
        }
        for (axis, &extent) in tensor.axes().iter().zip(tensor.extents()) {
            let dim = self.edges[axis].dim;
            if extent != dim {
                return Err(Error::ShapeMismatch {
                    vertex: self.display_name(v),
                    reason: format!("axis e{} extent {extent} != bond dimension {dim}", axis.index()),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    fn display_name(&self, v: VertexId) -> String {
        self.names.get(v.index()).cloned().unwrap_or_else(|| format!("#{}", v.index()))
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.keys().copied().collect()
    }

    pub fn tensor(&self, v: VertexId) -> Option<&DenseTensor> {
        self.tensors.get(&v)
    }

    pub fn has_tensors(&self) -> bool {
        !self.tensors.is_empty()
    }

    pub fn environment(&self) -> Option<VertexId> {
        self.environment
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(self.display_name(v)))
        }
    }

    /// Incident edge ids, sorted.
    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges.values().filter(|e| e.touches(v)).map(|e| e.id).collect()
    }

    /// Sum of incident edge weights; each incident edge counts once.
    pub fn weighted_degree(&self, v: VertexId) -> Result<f64> {
        self.check_vertex(v)?;
        Ok(self.edges.values().filter(|e| e.touches(v)).map(|e| e.weight()).sum())
    }

    /// Product of incident bond dimensions: the exact size of the tensor at `v`.
    pub fn degree_cost(&self, v: VertexId) -> Result<u128> {
        self.check_vertex(v)?;
        let mut product: u128 = 1;
        for e in self.edges.values().filter(|e| e.touches(v)) {
            product = product
                .checked_mul(e.dim as u128)
                .ok_or_else(|| Error::Overflow(format!("tensor size at `{}`", self.name(v))))?;
        }
        Ok(product)
    }

    pub fn open_legs(&self) -> Vec<EdgeId> {
        self.edges.values().filter(|e| e.is_open()).map(|e| e.id).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.open_legs().is_empty()
    }

    pub fn has_hyperedges(&self) -> bool {
        self.edges.values().any(|e| e.is_hyper())
    }

    /// Merge `u` and `v` on the graph level. Tensors of the merged pair are
    /// dropped; everything else is untouched. Edges strictly between the pair
    /// disappear, hyperedges keep a single occurrence of the merged vertex,
    /// and parallel edges at the merged vertex collapse to one edge whose
    /// dimension is the product.
    pub fn contract_symbolic(&self, u: VertexId, v: VertexId) -> Result<Network> {
        if u == v {
            return Err(Error::SelfContraction(self.display_name(u)));
        }
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let mut out = self.clone();
        out.tensors.remove(&u);
        out.tensors.remove(&v);
        out.vertices.remove(&u);
        out.vertices.remove(&v);
        out.by_name.remove(self.name(u));
        out.by_name.remove(self.name(v));

        let mut merged_name = format!("({}*{})", self.name(u), self.name(v));
        while out.by_name.contains_key(&merged_name) {
            merged_name.push('\'');
        }
        let m = VertexId(out.names.len() as u32);
        out.names.push(merged_name.clone());
        out.by_name.insert(merged_name, m);
        out.vertices.insert(m);

        out.environment = match self.environment {
            Some(env) if env == u || env == v => None,
            other => other,
        };

        let mut kept: BTreeMap<EdgeId, Edge> = BTreeMap::new();
        for edge in self.edges.values() {
            let had_both = edge.endpoints.len() >= 2;
            let mut endpoints: Vec<VertexId> = Vec::with_capacity(edge.endpoints.len());
            let mut saw_merged = false;
            for &p in &edge.endpoints {
                if p == u || p == v {
                    if !saw_merged {
                        endpoints.push(m);
                        saw_merged = true;
                    }
                } else {
                    endpoints.push(p);
                }
            }
            if saw_merged && endpoints.len() < 2 && had_both {
                // edge ran strictly between u and v (possibly a hyperedge
                // reduced below two endpoints): contracted away
                continue;
            }
            kept.insert(edge.id, Edge { endpoints, ..edge.clone() });
        }

        // collapse parallel edges at the merged vertex (open legs stay apart)
        let mut groups: BTreeMap<Vec<VertexId>, Vec<EdgeId>> = BTreeMap::new();
        for edge in kept.values() {
            if edge.touches(m) && edge.endpoints.len() >= 2 {
                let mut key = edge.endpoints.clone();
                key.sort_unstable();
                groups.entry(key).or_default().push(edge.id);
            }
        }
        for (_, ids) in groups {
            if ids.len() < 2 {
                continue;
            }
            let mut dim: u64 = 1;
            for id in &ids {
                dim = dim.checked_mul(kept[id].dim).ok_or_else(|| {
                    Error::Overflow("bond dimension of merged parallel edges".into())
                })?;
            }
            let endpoints = kept[&ids[0]].endpoints.clone();
            for id in &ids {
                kept.remove(id);
            }
            let id = EdgeId(out.next_edge);
            out.next_edge += 1;
            kept.insert(id, Edge { id, endpoints, dim, merged_from: ids });
        }
        out.edges = kept;
        Ok(out)
    }

    /// Line graph: one vertex per edge, adjacency iff the edges share an
    /// endpoint. Returns the graph and the edge id of each line-graph vertex.
    pub fn line_graph(&self) -> (SimpleGraph, Vec<EdgeId>) {
        let ids = self.edge_ids();
        let mut edges = Vec::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let a = &self.edges[&ids[i]];
                let b = &self.edges[&ids[j]];
                if a.endpoints.iter().any(|p| b.endpoints.contains(p)) {
                    edges.push((i, j));
                }
            }
        }
        (SimpleGraph::new(ids.len(), edges), ids)
    }

    /// Wire every open leg to a single fresh environment vertex. A network
    /// with no open legs comes back unchanged; calling twice is a no-op.
    pub fn absorb_open_legs(&self) -> Result<Network> {
        let open = self.open_legs();
        if open.is_empty() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        let mut env_name = ENV_NAME.to_string();
        while out.by_name.contains_key(&env_name) {
            env_name.push('\'');
        }
        let env = out.add_vertex(&env_name)?;
        for id in open {
            let edge = out.edges.get_mut(&id).expect("open leg listed");
            edge.endpoints.push(env);
        }
        out.environment = Some(env);
        Ok(out)
    }

    /// Structural invariants; tensor payloads are checked against the graph.
    pub fn validate(&self) -> Result<()> {
        for edge in self.edges.values() {
            if edge.dim < 1 {
                return Err(Error::InvalidEdge(edge.id.index(), "bond dimension < 1".into()));
            }
            if edge.endpoints.is_empty() {
                return Err(Error::InvalidEdge(edge.id.index(), "no endpoints".into()));
            }
            let mut seen = BTreeSet::new();
            for &p in &edge.endpoints {
                if !self.vertices.contains(&p) {
                    return Err(Error::InvalidEdge(
                        edge.id.index(),
                        format!("endpoint `{}` is not a vertex", self.display_name(p)),
                    ));
                }
                if !seen.insert(p) {
                    return Err(Error::InvalidEdge(edge.id.index(), "repeated endpoint".into()));
                }
            }
        }
        if let Some(env) = self.environment {
            self.check_vertex(env)?;
            if self.tensors.contains_key(&env) {
                return Err(Error::ShapeMismatch {
                    vertex: self.display_name(env),
                    reason: "environment vertex cannot carry a tensor".into(),
                });
            }
            for id in self.incident_edges(env) {
                if self.edges[&id].endpoints.len() != 2 {
                    return Err(Error::InvalidEdge(
                        id.index(),
                        "environment edges must have exactly two endpoints".into(),
                    ));
                }
            }
        }
        for (&v, tensor) in &self.tensors {
            self.check_vertex(v)?;
            self.check_tensor_shape(v, tensor)?;
        }
        Ok(())
    }

    /// Product of every bond dimension, for the full-summation oracle cap.
    pub fn all_dims_product(&self) -> Result<u128> {
        let mut product: u128 = 1;
        for e in self.edges.values() {
            product = product
                .checked_mul(e.dim as u128)
                .ok_or_else(|| Error::Overflow("product of all bond dimensions".into()))?;
        }
        Ok(product)
    }
}
