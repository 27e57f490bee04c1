//! Noise amplification factors `1 = c_0 < c_1 < … < c_n`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QemError, Result};

pub const DEFAULT_MIN_SEPARATION: f64 = 0.05;
pub const DEFAULT_C_MAX: f64 = 4.0;
const MAX_RESAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    /// `c_j = base^j`.
    BulirschStoer { base: f64 },
    /// `c_j = j + 1`.
    Harmonic,
    /// `1` followed by `n` sorted uniform draws from `(1, c_max]`.
    RandomPartition { c_max: f64 },
    Explicit { nodes: Vec<f64> },
}

impl Default for NodeKind {
    fn default() -> Self {
        NodeKind::RandomPartition { c_max: DEFAULT_C_MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSequence {
    pub kind: NodeKind,
    pub c: Vec<f64>,
}

impl NodeSequence {
    /// Checks `c_0 = 1`, strict increase and the minimum spacing.
    pub fn new(kind: NodeKind, c: Vec<f64>, min_separation: f64) -> Result<Self> {
        if c.first() != Some(&1.0) {
            return Err(QemError::InvalidArgument(format!("node sequence must start at 1, got {:?}", c.first())));
        }
        for w in c.windows(2) {
            if !(w[1].is_finite() && w[1] - w[0] >= min_separation) {
                return Err(QemError::InvalidArgument(format!(
                    "nodes {} and {} violate increasing order with spacing {min_separation}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { kind, c })
    }

    /// Extrapolation order `n`.
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.c
    }
}

pub fn make_node_sequence<R: Rng + ?Sized>(
    kind: &NodeKind,
    n: usize,
    min_separation: f64,
    rng: &mut R,
) -> Result<NodeSequence> {
    match kind {
        NodeKind::BulirschStoer { base } => {
            if !(*base > 1.0) {
                return Err(QemError::InvalidArgument(format!("Bulirsch-Stoer base {base} must exceed 1")));
            }
            NodeSequence::new(kind.clone(), (0..=n).map(|j| base.powi(j as i32)).collect(), min_separation)
        }
        NodeKind::Harmonic => NodeSequence::new(kind.clone(), (0..=n).map(|j| (j + 1) as f64).collect(), min_separation),
        NodeKind::Explicit { nodes } => {
            if nodes.len() != n + 1 {
                return Err(QemError::InvalidArgument(format!("{} explicit nodes given for order {n}", nodes.len())));
            }
            NodeSequence::new(kind.clone(), nodes.clone(), min_separation)
        }
        NodeKind::RandomPartition { c_max } => {
            if !(*c_max > 1.0 && c_max.is_finite()) {
                return Err(QemError::InvalidArgument(format!("c_max {c_max} must exceed 1")));
            }
            for _ in 0..MAX_RESAMPLES {
                let mut c: Vec<f64> = (0..n).map(|_| c_max - (c_max - 1.0) * rng.gen::<f64>()).collect();
                c.sort_by(f64::total_cmp);
                c.insert(0, 1.0);
                if let Ok(seq) = NodeSequence::new(kind.clone(), c, min_separation) {
                    return Ok(seq);
                }
            }
            Err(QemError::InvalidArgument(format!(
                "no random partition of (1, {c_max}] with {n} nodes {min_separation} apart after {MAX_RESAMPLES} draws"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn bulirsch_stoer_base_two() {
        let s = make_node_sequence(&NodeKind::BulirschStoer { base: 2.0 }, 2, DEFAULT_MIN_SEPARATION, &mut stream(0, &[])).unwrap();
        assert_eq!(s.c, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn explicit_single_node() {
        let s = make_node_sequence(&NodeKind::Explicit { nodes: vec![1.0] }, 0, 0.05, &mut stream(0, &[])).unwrap();
        assert_eq!(s.order(), 0);
    }

    #[test]
    fn random_partition_is_deterministic_and_in_range() {
        let kind = NodeKind::RandomPartition { c_max: 4.0 };
        let a = make_node_sequence(&kind, 3, 0.05, &mut stream(12, &[])).unwrap();
        let b = make_node_sequence(&kind, 3, 0.05, &mut stream(12, &[])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.c.len(), 4);
        assert!(a.c.iter().all(|&x| (1.0..=4.0).contains(&x)));
    }

    #[test]
    fn impossible_spacing_fails() {
        let kind = NodeKind::RandomPartition { c_max: 1.2 };
        assert!(make_node_sequence(&kind, 5, 0.05, &mut stream(1, &[])).is_err());
        assert!(NodeSequence::new(NodeKind::Harmonic, vec![1.0, 1.01], 0.05).is_err());
        assert!(NodeSequence::new(NodeKind::Harmonic, vec![2.0, 3.0], 0.05).is_err());
    }
}
