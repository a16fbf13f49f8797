//! Time-varying hierarchies and their per-step normalization.
//!
//! A dataset is a fixed tree whose leaves carry one weight per time step.
//! A weight of zero means the leaf is absent at that step. Internal node
//! weights are never stored; they are the sums of their alive leaves.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk node record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// On-disk dataset record, the JSON schema read by [`parse_dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub name: String,
    pub num_timesteps: usize,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Present on leaves only.
    pub weights: Option<Vec<f64>>,
    pub depth: usize,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.weights.is_some()
    }
}

/// A validated rooted hierarchy with per-leaf weight series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVaryingTree {
    pub name: String,
    num_timesteps: usize,
    nodes: Vec<Node>,
    root: usize,
    index: HashMap<String, usize>,
}

/// Leaf areas at one time step, scaled so they sum to the area of the
/// input rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedStep {
    pub timestep: usize,
    pub areas: BTreeMap<String, f64>,
}

impl NormalizedStep {
    pub fn area(&self, id: &str) -> f64 {
        self.areas.get(id).copied().unwrap_or(0.0)
    }

    pub fn is_alive(&self, id: &str) -> bool {
        self.area(id) > 0.0
    }

    pub fn alive(&self) -> impl Iterator<Item = (&str, f64)> {
        self.areas
            .iter()
            .filter(|(_, &a)| a > 0.0)
            .map(|(k, &a)| (k.as_str(), a))
    }

    pub fn total(&self) -> f64 {
        self.areas.values().sum()
    }
}

/// Parses and validates a dataset from its JSON bytes.
pub fn parse_dataset(bytes: &[u8]) -> Result<TimeVaryingTree> {
    let record: DatasetRecord = serde_json::from_slice(bytes)?;
    TimeVaryingTree::from_record(record)
}

/// Canonical JSON form of a dataset.
pub fn serialize_dataset(tree: &TimeVaryingTree) -> String {
    let mut s = serde_json::to_string_pretty(&tree.to_record()).expect("dataset serializes");
    s.push('\n');
    s
}

impl TimeVaryingTree {
    pub fn from_record(record: DatasetRecord) -> Result<Self> {
        let t_len = record.num_timesteps;
        if t_len == 0 {
            return Err(Error::NoTimesteps);
        }
        let mut index = HashMap::with_capacity(record.nodes.len());
        for (i, n) in record.nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(n.id.clone()));
            }
        }
        let mut root = None;
        let mut nodes: Vec<Node> = Vec::with_capacity(record.nodes.len());
        for n in &record.nodes {
            let parent = match &n.parent {
                None => {
                    if let Some(r) = root {
                        let first: &NodeRecord = &record.nodes[r];
                        return Err(Error::MultipleRoots(first.id.clone(), n.id.clone()));
                    }
                    root = Some(nodes.len());
                    None
                }
                Some(p) => Some(*index.get(p).ok_or_else(|| Error::UnknownParent {
                    node: n.id.clone(),
                    parent: p.clone(),
                })?),
            };
            nodes.push(Node {
                id: n.id.clone(),
                parent,
                children: Vec::new(),
                weights: n.weights.clone(),
                depth: 0,
            });
        }
        let root = root.ok_or(Error::NoRoot)?;
        for i in 0..nodes.len() {
            if let Some(p) = nodes[i].parent {
                nodes[p].children.push(i);
            }
        }
        // Depth-first from the root; anything unvisited sits on a cycle.
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![(root, 0usize)];
        while let Some((i, d)) = stack.pop() {
            seen[i] = true;
            nodes[i].depth = d;
            for &c in &nodes[i].children {
                stack.push((c, d + 1));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Cycle(nodes[i].id.clone()));
        }
        for n in &nodes {
            match (&n.weights, n.children.is_empty()) {
                (Some(_), false) => return Err(Error::InternalWeights(n.id.clone())),
                (None, true) if n.parent.is_some() || nodes.len() == 1 => {
                    return Err(Error::MissingWeights(n.id.clone()))
                }
                _ => {}
            }
            if let Some(w) = &n.weights {
                if w.len() != t_len {
                    return Err(Error::LengthMismatch {
                        id: n.id.clone(),
                        expected: t_len,
                        got: w.len(),
                    });
                }
                if let Some((t, &v)) = w.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
                    return Err(Error::NegativeWeight {
                        id: n.id.clone(),
                        t,
                        value: v,
                    });
                }
            }
        }
        let tree = TimeVaryingTree {
            name: record.name,
            num_timesteps: t_len,
            nodes,
            root,
            index,
        };
        for t in 0..t_len {
            if tree.total_weight(t) <= 0.0 {
                return Err(Error::ZeroTotal(t));
            }
        }
        Ok(tree)
    }

    pub fn to_record(&self) -> DatasetRecord {
        DatasetRecord {
            name: self.name.clone(),
            num_timesteps: self.num_timesteps,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.clone(),
                    parent: n.parent.map(|p| self.nodes[p].id.clone()),
                    weights: n.weights.clone(),
                })
                .collect(),
        }
    }

    pub fn num_timesteps(&self) -> usize {
        self.num_timesteps
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Leaf indices in dataset order.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().count()
    }

    pub fn leaf_weight(&self, i: usize, t: usize) -> f64 {
        self.nodes[i].weights.as_ref().map_or(0.0, |w| w[t])
    }

    /// Sum of descendant leaf weights at `t`.
    pub fn weight(&self, i: usize, t: usize) -> f64 {
        let n = &self.nodes[i];
        match &n.weights {
            Some(w) => w[t],
            None => n.children.iter().map(|&c| self.weight(c, t)).sum(),
        }
    }

    /// Weights of every node at `t`, computed bottom-up in one pass.
    pub fn node_weights(&self, t: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        self.fill_weights(self.root, t, &mut out);
        out
    }

    fn fill_weights(&self, i: usize, t: usize, out: &mut [f64]) -> f64 {
        let n = &self.nodes[i];
        let w = match &n.weights {
            Some(w) => w[t],
            None => n.children.iter().map(|&c| self.fill_weights(c, t, out)).sum(),
        };
        out[i] = w;
        w
    }

    pub fn total_weight(&self, t: usize) -> f64 {
        self.leaves().map(|i| self.leaf_weight(i, t)).sum()
    }

    /// Ids of leaves with positive weight at `t`.
    pub fn alive(&self, t: usize) -> Vec<&str> {
        self.leaves()
            .filter(|&i| self.leaf_weight(i, t) > 0.0)
            .map(|i| self.nodes[i].id.as_str())
            .collect()
    }

    /// Maximum leaf depth, counting the root's children as level 1.
    pub fn levels(&self) -> usize {
        self.leaves().map(|i| self.nodes[i].depth).max().unwrap_or(0)
    }

    /// Parent id for every non-root node.
    pub fn parent_map(&self) -> BTreeMap<String, String> {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (n.id.clone(), self.nodes[p].id.clone())))
            .collect()
    }
}

/// Scales the leaf weights at `t` so that they sum to `rect_area`.
pub fn normalize_step(tree: &TimeVaryingTree, t: usize, rect_area: f64) -> Result<NormalizedStep> {
    if t >= tree.num_timesteps() {
        return Err(Error::TimestepOutOfRange {
            t,
            len: tree.num_timesteps(),
        });
    }
    if !(rect_area > 0.0) {
        return Err(Error::InvalidRect(format!("area {rect_area}")));
    }
    let total = tree.total_weight(t);
    if !(total > 0.0) {
        return Err(Error::ZeroTotal(t));
    }
    let areas = tree
        .leaves()
        .map(|i| {
            let node = tree.node(i);
            (node.id.clone(), tree.leaf_weight(i, t) / total * rect_area)
        })
        .collect();
    Ok(NormalizedStep { timestep: t, areas })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(weights: &[&[f64]]) -> String {
        let t = weights[0].len();
        let mut nodes = vec![r#"{"id":"root","parent":null}"#.to_string()];
        for (i, w) in weights.iter().enumerate() {
            nodes.push(format!(
                r#"{{"id":"l{}","parent":"root","weights":{:?}}}"#,
                i + 1,
                w
            ));
        }
        format!(
            r#"{{"name":"flat","num_timesteps":{t},"nodes":[{}]}}"#,
            nodes.join(",")
        )
    }

    #[test]
    fn parses_deletion() {
        let tree = parse_dataset(flat(&[&[1.0, 2.0], &[1.0, 2.0], &[2.0, 0.0]]).as_bytes()).unwrap();
        assert_eq!(tree.num_leaves(), 3);
        assert_eq!(tree.alive(0), vec!["l1", "l2", "l3"]);
        assert_eq!(tree.alive(1), vec!["l1", "l2"]);
        assert_eq!(tree.levels(), 1);
    }

    #[test]
    fn rejects_multiple_roots() {
        let src = r#"{"name":"x","num_timesteps":1,"nodes":[
            {"id":"a","parent":null,"weights":[1]},
            {"id":"b","parent":null,"weights":[1]}]}"#;
        let err = parse_dataset(src.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MultipleRoots(..)));
        assert!(err.to_string().contains("multiple roots"));
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = parse_dataset(flat(&[&[1.0, 2.0], &[1.0, 2.0]]).replace("[1.0, 2.0]}", "[1.0, 2.0, 3.0]}").as_bytes())
            .unwrap_err();
        assert!(err.to_string().contains("length mismatch"), "{err}");
    }

    #[test]
    fn rejects_other_violations() {
        let dup = r#"{"name":"x","num_timesteps":1,"nodes":[
            {"id":"r","parent":null},{"id":"a","parent":"r","weights":[1]},{"id":"a","parent":"r","weights":[1]}]}"#;
        assert!(matches!(parse_dataset(dup.as_bytes()), Err(Error::DuplicateId(_))));
        let neg = flat(&[&[1.0], &[-1.0]]);
        assert!(matches!(parse_dataset(neg.as_bytes()), Err(Error::NegativeWeight { .. })));
        let zero = flat(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(parse_dataset(zero.as_bytes()), Err(Error::ZeroTotal(1))));
        assert!(matches!(parse_dataset(b"{not json"), Err(Error::Syntax(_))));
        let cyc = r#"{"name":"x","num_timesteps":1,"nodes":[
            {"id":"r","parent":null},{"id":"a","parent":"b"},{"id":"b","parent":"a"},{"id":"c","parent":"r","weights":[1]}]}"#;
        assert!(matches!(parse_dataset(cyc.as_bytes()), Err(Error::Cycle(_))));
    }

    #[test]
    fn normalizes_proportionally() {
        let tree = parse_dataset(flat(&[&[2.0], &[3.0], &[5.0]]).as_bytes()).unwrap();
        let step = normalize_step(&tree, 0, 1.0).unwrap();
        let got: Vec<f64> = step.areas.values().copied().collect();
        assert_eq!(got, vec![0.2, 0.3, 0.5]);

        let single = parse_dataset(flat(&[&[1.0]]).as_bytes()).unwrap();
        let step = normalize_step(&single, 0, 1e6).unwrap();
        assert_eq!(step.area("l1"), 1e6);
    }

    #[test]
    fn normalize_rejects_zero_total() {
        // Parsing refuses all-zero steps, so build the tree by hand.
        let mut rec = DatasetRecord {
            name: "z".into(),
            num_timesteps: 2,
            nodes: vec![
                NodeRecord { id: "r".into(), parent: None, weights: None },
                NodeRecord { id: "a".into(), parent: Some("r".into()), weights: Some(vec![1.0, 0.0]) },
                NodeRecord { id: "b".into(), parent: Some("r".into()), weights: Some(vec![1.0, 0.0]) },
            ],
        };
        assert!(TimeVaryingTree::from_record(rec.clone()).is_err());
        rec.nodes[1].weights = Some(vec![1.0, 1.0]);
        let mut tree = TimeVaryingTree::from_record(rec).unwrap();
        tree.nodes[1].weights = Some(vec![1.0, 0.0]);
        assert!(matches!(normalize_step(&tree, 1, 1.0), Err(Error::ZeroTotal(1))));
    }

    #[test]
    fn round_trips_canonical_form() {
        let tree = parse_dataset(flat(&[&[1.0, 2.0], &[3.0, 0.5]]).as_bytes()).unwrap();
        let text = serialize_dataset(&tree);
        let again = parse_dataset(text.as_bytes()).unwrap();
        assert_eq!(tree, again);
        assert_eq!(text, serialize_dataset(&again));
    }
}
