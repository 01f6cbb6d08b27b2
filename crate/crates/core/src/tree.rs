//! Branch-sampled path tree.
//!
//! Layer `i` holds the particles at time `t_i`. Every non-root node records the
//! edge that produced it (control, drift sample, Brownian increment) and the
//! running cost accumulated along its unique path back to the root, so each
//! node stands for one sample path of the layer's path measure.

use std::io::Write;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problem::{ControlProblem, TimeGrid};

pub type NodeId = usize;

/// Data carried on the edge into a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub control: DVector<f64>,
    pub drift: DVector<f64>,
    /// Brownian increment `w ~ N(0, Δt I)` used for the step.
    pub noise: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: NodeId,
    pub time_index: usize,
    pub state: DVector<f64>,
    pub parent: Option<NodeId>,
    pub edge: Option<Edge>,
    /// `∫₀^{t_i} ℓ ds` along the root path.
    pub run_cost: f64,
}

/// One element of a root-to-node path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathElement<'a> {
    pub state: &'a DVector<f64>,
    /// Edge leaving this element towards the next one; `None` on the last element.
    pub edge_out: Option<&'a Edge>,
}

/// Scores indexed `[layer][position within layer]`.
pub type LayerScores = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct BranchTree {
    grid: TimeGrid,
    nodes: Vec<TreeNode>,
    layers: Vec<Vec<NodeId>>,
}

impl BranchTree {
    /// Tree whose layer 0 holds one root per given state.
    pub fn new(grid: TimeGrid, roots: Vec<DVector<f64>>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyLayer(0));
        }
        let mut layers = vec![Vec::new(); grid.steps() + 1];
        let nodes = roots
            .into_iter()
            .enumerate()
            .map(|(id, state)| {
                layers[0].push(id);
                TreeNode {
                    id,
                    time_index: 0,
                    state,
                    parent: None,
                    edge: None,
                    run_cost: 0.0,
                }
            })
            .collect();
        Ok(BranchTree {
            grid,
            nodes,
            layers,
        })
    }

    pub fn with_root(grid: TimeGrid, x0: DVector<f64>) -> Self {
        BranchTree::new(grid, vec![x0]).expect("single root")
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&TreeNode> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    pub fn layer(&self, i: usize) -> &[NodeId] {
        self.layers.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn layer_widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn children_count(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                counts[p] += 1;
            }
        }
        counts
    }

    /// Appends a child of `parent` in the next layer. The child's running cost is
    /// `run_cost(parent) + ℓ(t_i, x_parent, u) Δt`.
    pub fn add_edge(
        &mut self,
        problem: &ControlProblem,
        parent: NodeId,
        edge: Edge,
        next_state: DVector<f64>,
    ) -> Result<NodeId> {
        let p = self.node(parent)?;
        let i = p.time_index;
        if i >= self.grid.steps() {
            return Err(Error::TerminalParent(parent));
        }
        if edge.drift.iter().any(|k| !k.is_finite()) {
            return Err(Error::param("drift", "non-finite drift on edge"));
        }
        let increment =
            problem.running_cost(self.grid.time(i), &p.state, &edge.control) * self.grid.dt();
        let run_cost = p.run_cost + increment;
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            id,
            time_index: i + 1,
            state: next_state,
            parent: Some(parent),
            edge: Some(edge),
            run_cost,
        });
        self.layers[i + 1].push(id);
        Ok(id)
    }

    pub fn node_at(&self, i: usize, j: usize) -> Result<&TreeNode> {
        let id = *self
            .layers
            .get(i)
            .and_then(|l| l.get(j))
            .ok_or(Error::PositionOutOfRange {
                layer: i,
                position: j,
            })?;
        Ok(&self.nodes[id])
    }

    /// Root-to-node path for the `j`-th node of layer `i`; length `i + 1`.
    pub fn path_at(&self, i: usize, j: usize) -> Result<Vec<PathElement<'_>>> {
        let mut node = self.node_at(i, j)?;
        let mut rev = vec![PathElement {
            state: &node.state,
            edge_out: None,
        }];
        while let Some(pid) = node.parent {
            let edge = node.edge.as_ref();
            node = &self.nodes[pid];
            rev.push(PathElement {
                state: &node.state,
                edge_out: edge,
            });
        }
        rev.reverse();
        Ok(rev)
    }

    /// Node of layer `i` minimizing `Σ_k w_k (x_k − q_k)²`; ties go to the lowest id.
    pub fn nearest(&self, i: usize, query: &DVector<f64>, weights: &[f64]) -> Result<&TreeNode> {
        let layer = self.layer(i);
        if layer.is_empty() {
            return Err(Error::EmptyLayer(i));
        }
        let mut best = layer[0];
        let mut best_d = f64::INFINITY;
        for &id in layer {
            let x = &self.nodes[id].state;
            let mut d = 0.0;
            for k in 0..x.len() {
                let diff = x[k] - query[k];
                d += weights[k] * diff * diff;
            }
            if d < best_d || (d == best_d && id < best) {
                best_d = d;
                best = id;
            }
        }
        Ok(&self.nodes[best])
    }

    /// Keeps the `⌈keep_fraction · width⌉` lowest-scored nodes of each layer `i ≥ 1`
    /// together with all their ancestors. Node ids are compacted, preserving order.
    pub fn prune(&self, scores: &LayerScores, keep_fraction: f64) -> Result<BranchTree> {
        if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
            return Err(Error::param(
                "keep_fraction",
                format!("must lie in (0, 1], got {keep_fraction}"),
            ));
        }
        let n_layers = self.layers.len();
        let mut keep = vec![false; self.nodes.len()];
        for &root in &self.layers[0] {
            keep[root] = true;
        }
        for i in (1..n_layers).rev() {
            let layer = &self.layers[i];
            if layer.is_empty() {
                continue;
            }
            let s = scores.get(i).ok_or(Error::MissingScores(i))?;
            if s.len() != layer.len() {
                return Err(Error::MissingScores(i));
            }
            let quota = ((keep_fraction * layer.len() as f64).ceil() as usize).min(layer.len());
            let mut order: Vec<usize> = (0..layer.len()).collect();
            order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
            for &pos in &order[..quota] {
                keep[layer[pos]] = true;
            }
            for &id in layer {
                if keep[id] {
                    if let Some(p) = self.nodes[id].parent {
                        keep[p] = true;
                    }
                }
            }
        }

        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut layers = vec![Vec::new(); n_layers];
        for node in &self.nodes {
            if !keep[node.id] {
                continue;
            }
            let id = nodes.len();
            remap[node.id] = id;
            let mut copy = node.clone();
            copy.id = id;
            copy.parent = node.parent.map(|p| remap[p]);
            layers[node.time_index].push(id);
            nodes.push(copy);
        }
        Ok(BranchTree {
            grid: self.grid,
            nodes,
            layers,
        })
    }

    /// CSV dump: `id,time_index,parent_id,x0..,k0..,u0..,run_cost,rho`.
    pub fn write_csv<W: Write>(&self, out: W, rho: Option<&LayerScores>) -> Result<()> {
        let n = self.nodes.first().map_or(0, |node| node.state.len());
        let m = self
            .nodes
            .iter()
            .find_map(|node| node.edge.as_ref().map(|e| e.control.len()))
            .unwrap_or(0);
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["id".to_string(), "time_index".into(), "parent_id".into()];
        header.extend((0..n).map(|k| format!("x{k}")));
        header.extend((0..n).map(|k| format!("k{k}")));
        header.extend((0..m).map(|k| format!("u{k}")));
        header.push("run_cost".into());
        header.push("rho".into());
        wtr.write_record(&header)?;

        let mut position = vec![0; self.nodes.len()];
        for layer in &self.layers {
            for (j, &id) in layer.iter().enumerate() {
                position[id] = j;
            }
        }
        for node in &self.nodes {
            let mut rec = vec![
                node.id.to_string(),
                node.time_index.to_string(),
                node.parent.map(|p| p.to_string()).unwrap_or_default(),
            ];
            rec.extend(node.state.iter().map(|v| v.to_string()));
            match &node.edge {
                Some(e) => {
                    rec.extend(e.drift.iter().map(|v| v.to_string()));
                    rec.extend(e.control.iter().map(|v| v.to_string()));
                }
                None => rec.extend(std::iter::repeat_n(String::new(), n + m)),
            }
            rec.push(node.run_cost.to_string());
            rec.push(
                rho.and_then(|r| r.get(node.time_index))
                    .and_then(|l| l.get(position[node.id]))
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{make_double_integrator_l1, UncontrolledDiffusion};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn edge(u: f64) -> Edge {
        Edge {
            control: v(&[u]),
            drift: v(&[0.0, u]),
            noise: v(&[0.0, 0.0]),
        }
    }

    fn di() -> ControlProblem {
        make_double_integrator_l1(0.5, 0.5, [4.0, 1.0]).unwrap()
    }

    #[test]
    fn add_edge_accrues_running_cost() {
        let p = di();
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let mut tree = BranchTree::with_root(grid, v(&[0.0, 0.0]));
        let c = tree.add_edge(&p, 0, edge(1.0), v(&[0.0, 0.1])).unwrap();
        assert_eq!(tree.layer(1).len(), 1);
        assert!((tree.node(c).unwrap().run_cost - 0.5 * 0.1).abs() < 1e-15);
        let c2 = tree.add_edge(&p, 0, edge(0.0), v(&[0.0, 0.0])).unwrap();
        assert_eq!(tree.layer(1).len(), 2);
        assert_eq!(tree.node(c2).unwrap().parent, Some(0));
        assert_eq!(tree.node(c2).unwrap().run_cost, 0.0);
        assert_eq!(tree.children_count()[0], 2);
    }

    #[test]
    fn terminal_parent_rejected() {
        let p = di();
        let grid = TimeGrid::new(0.2, 1).unwrap();
        let mut tree = BranchTree::with_root(grid, v(&[0.0, 0.0]));
        let c = tree.add_edge(&p, 0, edge(0.0), v(&[0.0, 0.0])).unwrap();
        assert!(matches!(
            tree.add_edge(&p, c, edge(0.0), v(&[0.0, 0.0])),
            Err(Error::TerminalParent(_))
        ));
        assert!(matches!(
            tree.add_edge(&p, 99, edge(0.0), v(&[0.0, 0.0])),
            Err(Error::UnknownNode(99))
        ));
    }

    #[test]
    fn path_reconstruction() {
        let p = di();
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let mut tree = BranchTree::with_root(grid, v(&[1.0, 2.0]));
        let root_path = tree.path_at(0, 0).unwrap();
        assert_eq!(root_path.len(), 1);
        assert_eq!(root_path[0].state, &v(&[1.0, 2.0]));
        let mut id = 0;
        for s in 1..=3 {
            id = tree
                .add_edge(&p, id, edge(1.0), v(&[s as f64, 0.0]))
                .unwrap();
        }
        let path = tree.path_at(3, 0).unwrap();
        assert_eq!(path.len(), 4);
        assert_eq!(path[3].state, &v(&[3.0, 0.0]));
        assert!(path[3].edge_out.is_none());
        assert!(path[..3].iter().all(|e| e.edge_out.is_some()));
        assert!(tree.path_at(4, 0).is_err());
        assert!(tree.path_at(3, 1).is_err());
    }

    #[test]
    fn nearest_examples() {
        let p = di();
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let tree = BranchTree::with_root(grid, v(&[0.0, 0.0]));
        assert_eq!(tree.nearest(0, &v(&[5.0, 5.0]), &[1.0, 1.0]).unwrap().id, 0);
        assert!(matches!(
            tree.nearest(1, &v(&[0.0, 0.0]), &[1.0, 1.0]),
            Err(Error::EmptyLayer(1))
        ));
        let mut tree = tree;
        let a = tree.add_edge(&p, 0, edge(0.0), v(&[0.0, 0.0])).unwrap();
        let b = tree.add_edge(&p, 0, edge(0.0), v(&[1.0, 0.0])).unwrap();
        assert_eq!(tree.nearest(1, &v(&[0.4, 0.0]), &[1.0, 1.0]).unwrap().id, a);
        assert_eq!(tree.nearest(1, &v(&[0.6, 0.0]), &[1.0, 1.0]).unwrap().id, b);
        // equidistant: lowest id wins
        assert_eq!(tree.nearest(1, &v(&[0.5, 0.0]), &[1.0, 1.0]).unwrap().id, a);
    }

    #[test]
    fn nearest_matches_exhaustive_scan() {
        let p = di();
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut tree = BranchTree::with_root(grid, v(&[0.0, 0.0]));
            for _ in 0..100 {
                let x = v(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
                tree.add_edge(&p, 0, edge(0.0), x).unwrap();
            }
            let w = [rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)];
            let q = v(&[rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]);
            let brute = tree
                .layer(1)
                .iter()
                .map(|&id| {
                    let x = &tree.node(id).unwrap().state;
                    (
                        w[0] * (x[0] - q[0]).powi(2) + w[1] * (x[1] - q[1]).powi(2),
                        id,
                    )
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .unwrap()
                .1;
            assert_eq!(tree.nearest(1, &q, &w).unwrap().id, brute);
        }
    }

    fn chain_pair() -> (ControlProblem, BranchTree) {
        // two parallel chains over two steps; chain B is cheaper
        let p = di();
        let grid = TimeGrid::new(0.2, 2).unwrap();
        let mut tree = BranchTree::with_root(grid, v(&[0.0, 0.0]));
        let a1 = tree.add_edge(&p, 0, edge(1.0), v(&[0.0, 0.1])).unwrap();
        let b1 = tree.add_edge(&p, 0, edge(0.0), v(&[0.0, 0.0])).unwrap();
        tree.add_edge(&p, a1, edge(1.0), v(&[0.01, 0.2])).unwrap();
        tree.add_edge(&p, b1, edge(0.0), v(&[0.0, 0.0])).unwrap();
        (p, tree)
    }

    fn run_cost_scores(tree: &BranchTree) -> LayerScores {
        (0..=tree.steps())
            .map(|i| {
                tree.layer(i)
                    .iter()
                    .map(|&id| tree.node(id).unwrap().run_cost)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn prune_keep_all_is_identity() {
        let (_, tree) = chain_pair();
        let pruned = tree.prune(&run_cost_scores(&tree), 1.0).unwrap();
        assert_eq!(pruned.nodes(), tree.nodes());
        assert_eq!(pruned.layer_widths(), tree.layer_widths());
    }

    #[test]
    fn prune_chain_keeps_cheapest_half() {
        let (_, tree) = chain_pair();
        let pruned = tree.prune(&run_cost_scores(&tree), 0.5).unwrap();
        // layer 2 keeps the cheap leaf; closure keeps its parent; root stays
        assert_eq!(pruned.layer_widths(), vec![1, 1, 1]);
        let leaf = pruned.node_at(2, 0).unwrap();
        assert_eq!(leaf.run_cost, 0.0);
        assert_eq!(leaf.state, v(&[0.0, 0.0]));
        let parent = pruned.node(leaf.parent.unwrap()).unwrap();
        assert_eq!(parent.time_index, 1);
        assert_eq!(parent.parent, Some(0));
    }

    #[test]
    fn prune_rejects_bad_input() {
        let (_, tree) = chain_pair();
        assert!(tree.prune(&run_cost_scores(&tree), 0.0).is_err());
        let mut short = run_cost_scores(&tree);
        short.pop();
        assert!(matches!(
            tree.prune(&short, 0.5),
            Err(Error::MissingScores(2))
        ));
    }

    #[test]
    fn prune_preserves_ancestry_and_telescoping() {
        let p = UncontrolledDiffusion::default().build().unwrap();
        let grid = TimeGrid::new(1.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tree = BranchTree::with_root(grid, v(&[0.0]));
        for _ in 0..200 {
            let i = rng.random_range(0..6);
            let layer = tree.layer(i).to_vec();
            if layer.is_empty() {
                continue;
            }
            let parent = layer[rng.random_range(0..layer.len())];
            let x = &tree.node(parent).unwrap().state + v(&[rng.random_range(-0.3..0.3)]);
            tree.add_edge(
                &p,
                parent,
                Edge {
                    control: v(&[0.0]),
                    drift: v(&[0.0]),
                    noise: v(&[0.0]),
                },
                x,
            )
            .unwrap();
        }
        let scores: LayerScores = (0..=6)
            .map(|i| tree.layer(i).iter().map(|_| rng.random::<f64>()).collect())
            .collect();
        let pruned = tree.prune(&scores, 0.3).unwrap();
        for i in 1..=6 {
            let w = tree.layer(i).len();
            if w > 0 {
                assert!(pruned.layer(i).len() >= (0.3 * w as f64).ceil() as usize);
            }
        }
        for node in pruned.nodes() {
            let mut cur = node;
            while let Some(pid) = cur.parent {
                let parent = pruned.node(pid).unwrap();
                assert_eq!(parent.time_index + 1, cur.time_index);
                cur = parent;
            }
            assert_eq!(cur.time_index, 0);
        }
    }

    #[test]
    fn csv_dump_shape() {
        let (_, tree) = chain_pair();
        let mut buf = Vec::new();
        tree.write_csv(&mut buf, Some(&run_cost_scores(&tree)))
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "id,time_index,parent_id,x0,x1,k0,k1,u0,run_cost,rho"
        );
        assert_eq!(lines.len(), 1 + tree.len());
        assert!(lines[1].starts_with("0,0,,0,0,,,,0,"));
    }
}
