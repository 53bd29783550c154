//! Tensor-network contraction: sum over all shared indexes of a product of
//! node entries, with a greedy pairwise schedule that never changes the value.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// One shared geometrical index between two tensor axes.
///
/// Both endpoints may live on the same node (a trace edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub node_a: usize,
    pub axis_a: usize,
    pub node_b: usize,
    pub axis_b: usize,
}

impl Edge {
    pub fn new(node_a: usize, axis_a: usize, node_b: usize, axis_b: usize) -> Self {
        Self {
            node_a,
            axis_a,
            node_b,
            axis_b,
        }
    }
}

/// A well-formed tensor network: every axis of every node is either one
/// endpoint of exactly one edge or appears exactly once in `open_axes`,
/// which fixes the mode order of the contraction result.
#[derive(Debug, Clone)]
pub struct ContractionNetwork {
    pub nodes: Vec<DenseTensor>,
    pub edges: Vec<Edge>,
    pub open_axes: Vec<(usize, usize)>,
}

/// Role of one node axis during contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisLabel {
    /// Shared index, keyed by edge position.
    Bond(usize),
    /// Output index, keyed by position in `open_axes`.
    Open(usize),
}

/// A live node of the working set: tensor plus per-axis labels.
/// A fully contracted (scalar) node is shape `[1]` with no labels.
#[derive(Debug, Clone)]
struct Node {
    tensor: DenseTensor,
    labels: Vec<AxisLabel>,
}

impl ContractionNetwork {
    pub fn new(nodes: Vec<DenseTensor>, edges: Vec<Edge>, open_axes: Vec<(usize, usize)>) -> Self {
        Self {
            nodes,
            edges,
            open_axes,
        }
    }

    /// Check the type invariants and assign a label to every axis.
    fn validate(&self) -> Result<Vec<Vec<AxisLabel>>> {
        if self.nodes.is_empty() {
            return Err(Error::Network("network has no nodes".into()));
        }
        let mut labels: Vec<Vec<Option<AxisLabel>>> = self
            .nodes
            .iter()
            .map(|t| vec![None; t.order()])
            .collect();
        let mut set = |node: usize, axis: usize, label: AxisLabel| -> Result<()> {
            if node >= self.nodes.len() || axis >= self.nodes[node].order() {
                return Err(Error::Network(format!(
                    "axis reference ({node},{axis}) out of range"
                )));
            }
            if labels[node][axis].is_some() {
                return Err(Error::Network(format!(
                    "axis ({node},{axis}) referenced more than once"
                )));
            }
            labels[node][axis] = Some(label);
            Ok(())
        };
        for (e, edge) in self.edges.iter().enumerate() {
            set(edge.node_a, edge.axis_a, AxisLabel::Bond(e))?;
            set(edge.node_b, edge.axis_b, AxisLabel::Bond(e))?;
            let da = self.nodes[edge.node_a].shape()[edge.axis_a];
            let db = self.nodes[edge.node_b].shape()[edge.axis_b];
            if da != db {
                return Err(Error::Shape(format!(
                    "edge {e} joins extents {da} and {db}"
                )));
            }
        }
        for (p, &(node, axis)) in self.open_axes.iter().enumerate() {
            set(node, axis, AxisLabel::Open(p))?;
        }
        labels
            .into_iter()
            .enumerate()
            .map(|(n, node_labels)| {
                node_labels
                    .into_iter()
                    .enumerate()
                    .map(|(a, l)| {
                        l.ok_or_else(|| {
                            Error::Network(format!("axis ({n},{a}) is dangling"))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Contract the network. The result's modes follow `open_axes`; an empty
    /// `open_axes` yields the scalar as a singleton (shape `[1]`).
    ///
    /// Scheduling is greedy — repeatedly contract the pair of nodes producing
    /// the smallest intermediate — and by construction cannot change the
    /// value, only the round-off path.
    pub fn contract(&self) -> Result<DenseTensor> {
        let labels = self.validate()?;
        let mut live: Vec<Option<Node>> = self
            .nodes
            .iter()
            .cloned()
            .zip(labels)
            .map(|(tensor, labels)| Some(Node { tensor, labels }))
            .collect();
        // resolve trace edges first so no node carries a repeated bond
        for slot in live.iter_mut() {
            let node = slot.take().unwrap();
            *slot = Some(trace_repeated(node)?);
        }
        loop {
            let alive: Vec<usize> = (0..live.len()).filter(|&i| live[i].is_some()).collect();
            if alive.len() <= 1 {
                break;
            }
            // cheapest pair, preferring pairs that actually share a bond
            let mut best: Option<(usize, usize, usize, bool)> = None;
            for (ai, &i) in alive.iter().enumerate() {
                for &j in &alive[ai + 1..] {
                    let a = live[i].as_ref().unwrap();
                    let b = live[j].as_ref().unwrap();
                    let shares = shared_bonds(a, b);
                    let connected = !shares.is_empty();
                    let cost = result_size(a, b, &shares);
                    let better = match best {
                        None => true,
                        Some((_, _, c, conn)) => {
                            (connected && !conn) || (connected == conn && cost < c)
                        }
                    };
                    if better {
                        best = Some((i, j, cost, connected));
                    }
                }
            }
            let (i, j, _, _) = best.unwrap();
            let a = live[i].take().unwrap();
            let b = live[j].take().unwrap();
            live[i] = Some(merge(a, b)?);
        }
        let node = live.into_iter().flatten().next().unwrap();
        finish(node, self.open_axes.len())
    }
}

fn shared_bonds(a: &Node, b: &Node) -> Vec<usize> {
    let mut ids: Vec<usize> = a
        .labels
        .iter()
        .filter_map(|l| match l {
            AxisLabel::Bond(e) if b.labels.contains(l) => Some(*e),
            _ => None,
        })
        .collect();
    ids.sort_unstable();
    ids
}

fn result_size(a: &Node, b: &Node, shared: &[usize]) -> usize {
    let free = |n: &Node| -> usize {
        n.labels
            .iter()
            .zip(n.tensor.shape())
            .filter(|(l, _)| !matches!(l, AxisLabel::Bond(e) if shared.contains(e)))
            .map(|(_, &d)| d)
            .product()
    };
    free(a) * free(b)
}

/// Sum out any bond appearing on two axes of the same node.
fn trace_repeated(mut node: Node) -> Result<Node> {
    loop {
        let mut pair = None;
        'outer: for i in 0..node.labels.len() {
            for j in i + 1..node.labels.len() {
                if node.labels[i] == node.labels[j] {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else {
            return Ok(node);
        };
        let order = node.tensor.order();
        let mut perm = vec![i, j];
        perm.extend((0..order).filter(|&k| k != i && k != j));
        let t = node.tensor.permute(&perm)?;
        let d = t.shape()[0];
        let rest: usize = t.shape()[2..].iter().product();
        let mut out = vec![0.0; rest];
        let data = t.data();
        for r in 0..rest {
            let mut acc = 0.0;
            for k in 0..d {
                acc += data[k * (1 + d) + d * d * r];
            }
            out[r] = acc;
        }
        let rest_shape: Vec<usize> = t.shape()[2..].to_vec();
        let rest_labels: Vec<AxisLabel> = perm[2..].iter().map(|&k| node.labels[k]).collect();
        node = if rest_shape.is_empty() {
            Node {
                tensor: DenseTensor::new(vec![1], out)?,
                labels: vec![],
            }
        } else {
            Node {
                tensor: DenseTensor::new(rest_shape, out)?,
                labels: rest_labels,
            }
        };
    }
}

/// Reshape a node into (free, shared) matrix form, shared axes ordered by
/// bond id so both merge operands agree.
fn matrix_form(node: &Node, shared: &[usize], shared_first: bool) -> Result<(DenseTensor, Vec<AxisLabel>, Vec<usize>)> {
    let is_shared = |l: &AxisLabel| matches!(l, AxisLabel::Bond(e) if shared.contains(e));
    let free_pos: Vec<usize> = (0..node.labels.len())
        .filter(|&k| !is_shared(&node.labels[k]))
        .collect();
    let mut shared_pos: Vec<usize> = (0..node.labels.len())
        .filter(|&k| is_shared(&node.labels[k]))
        .collect();
    shared_pos.sort_by_key(|&k| match node.labels[k] {
        AxisLabel::Bond(e) => e,
        AxisLabel::Open(_) => unreachable!(),
    });
    let perm: Vec<usize> = if shared_first {
        shared_pos.iter().chain(&free_pos).copied().collect()
    } else {
        free_pos.iter().chain(&shared_pos).copied().collect()
    };
    let free: usize = free_pos.iter().map(|&k| node.tensor.shape()[k]).product();
    let bond: usize = shared_pos.iter().map(|&k| node.tensor.shape()[k]).product();
    let t = if node.labels.is_empty() {
        node.tensor.clone()
    } else {
        node.tensor.permute(&perm)?
    };
    let m = if shared_first {
        t.reshape(&[bond, free])?
    } else {
        t.reshape(&[free, bond])?
    };
    let free_labels: Vec<AxisLabel> = free_pos.iter().map(|&k| node.labels[k]).collect();
    let free_shape: Vec<usize> = free_pos.iter().map(|&k| node.tensor.shape()[k]).collect();
    Ok((m, free_labels, free_shape))
}

/// Contract all bonds shared by two nodes in one matrix product
/// (an outer product when they share none).
fn merge(a: Node, b: Node) -> Result<Node> {
    let shared = shared_bonds(&a, &b);
    let (ma, labels_a, shape_a) = matrix_form(&a, &shared, false)?;
    let (mb, labels_b, shape_b) = matrix_form(&b, &shared, true)?;
    let prod = ma.matmul(&mb)?;
    let mut shape: Vec<usize> = shape_a;
    shape.extend(shape_b);
    let mut labels = labels_a;
    labels.extend(labels_b);
    let tensor = if shape.is_empty() {
        prod.reshape(&[1])?
    } else {
        prod.reshape(&shape)?
    };
    Ok(Node { tensor, labels })
}

/// Permute the surviving node into `open_axes` order.
fn finish(node: Node, open_count: usize) -> Result<DenseTensor> {
    if node.labels.len() != open_count {
        return Err(Error::Network(format!(
            "{} axes survived contraction but {open_count} were declared open",
            node.labels.len()
        )));
    }
    if open_count == 0 {
        return Ok(node.tensor);
    }
    let mut perm = vec![0usize; open_count];
    for (k, l) in node.labels.iter().enumerate() {
        match l {
            AxisLabel::Open(p) => perm[*p] = k,
            AxisLabel::Bond(e) => {
                return Err(Error::Network(format!("bond {e} never contracted")))
            }
        }
    }
    node.tensor.permute(&perm)
}
