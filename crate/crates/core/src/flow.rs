//! Maximum flow / minimum s-t cut (Dinic's algorithm) over integer or
//! floating capacities.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::ops::{Add, Sub};

pub trait Capacity: Copy + PartialOrd + Debug + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
    /// Whether a residual capacity can still carry flow.
    fn is_positive(self) -> bool;
}

impl Capacity for u64 {
    const ZERO: Self = 0;
    fn is_positive(self) -> bool {
        self > 0
    }
}

impl Capacity for f64 {
    const ZERO: Self = 0.0;
    fn is_positive(self) -> bool {
        self > 1e-15
    }
}

#[derive(Clone, Debug)]
struct Arc<C> {
    to: usize,
    residual: C,
}

/// Arcs are stored in pairs: arc `2k` and its reverse `2k + 1`.
#[derive(Clone, Debug)]
pub struct FlowNetwork<C> {
    arcs: Vec<Arc<C>>,
    adjacency: Vec<Vec<usize>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: C) {
        self.adjacency[from].push(self.arcs.len());
        self.arcs.push(Arc { to, residual: cap });
        self.adjacency[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            residual: C::ZERO,
        });
    }

    fn levels(&self, source: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.node_count()];
        level[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = level[u].map(|l| l + 1);
            for &a in &self.adjacency[u] {
                let arc = &self.arcs[a];
                if arc.residual.is_positive() && level[arc.to].is_none() {
                    level[arc.to] = next;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(
        &mut self,
        u: usize,
        sink: usize,
        limit: C,
        level: &[Option<usize>],
        cursor: &mut [usize],
    ) -> C {
        if u == sink {
            return limit;
        }
        while cursor[u] < self.adjacency[u].len() {
            let a = self.adjacency[u][cursor[u]];
            let Arc { to, residual } = self.arcs[a];
            if residual.is_positive() && level[to].is_some() && level[to] == level[u].map(|l| l + 1)
            {
                let push = if residual < limit { residual } else { limit };
                let pushed = self.augment(to, sink, push, level, cursor);
                if pushed.is_positive() {
                    self.arcs[a].residual = self.arcs[a].residual - pushed;
                    self.arcs[a ^ 1].residual = self.arcs[a ^ 1].residual + pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        C::ZERO
    }

    /// Saturates the network and returns the maximum flow value. `unbounded`
    /// must exceed any finite cut.
    pub fn max_flow(&mut self, source: usize, sink: usize, unbounded: C) -> C {
        let mut total = C::ZERO;
        loop {
            let level = self.levels(source);
            if level[sink].is_none() {
                return total;
            }
            let mut cursor = vec![0; self.node_count()];
            loop {
                let pushed = self.augment(source, sink, unbounded, &level, &mut cursor);
                if !pushed.is_positive() {
                    break;
                }
                total = total + pushed;
            }
        }
    }

    /// Nodes reachable from `source` in the residual graph; after
    /// `max_flow` this is the source side of a minimum cut.
    pub fn source_side(&self, source: usize) -> Vec<bool> {
        self.levels(source).iter().map(Option::is_some).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1, max flow 23
        let mut g = FlowNetwork::<u64>::new(6);
        for (u, v, c) in [
            (0, 1, 16),
            (0, 2, 13),
            (1, 3, 12),
            (2, 1, 4),
            (2, 4, 14),
            (3, 2, 9),
            (3, 5, 20),
            (4, 3, 7),
            (4, 5, 4),
        ] {
            g.add_edge(u, v, c);
        }
        assert_eq!(g.max_flow(0, 5, u64::MAX), 23);
        let side = g.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn float_capacities() {
        let mut g = FlowNetwork::<f64>::new(4);
        g.add_edge(0, 1, 0.25);
        g.add_edge(0, 2, 0.5);
        g.add_edge(1, 3, 1.0);
        g.add_edge(2, 3, 0.125);
        g.add_edge(1, 2, 1.0);
        let f = g.max_flow(0, 3, 10.0);
        assert!((f - 0.375).abs() < 1e-15);
    }

    #[test]
    fn disconnected_sink() {
        let mut g = FlowNetwork::<u64>::new(3);
        g.add_edge(0, 1, 5);
        assert_eq!(g.max_flow(0, 2, 100), 0);
        assert_eq!(g.source_side(0), vec![true, true, false]);
    }
}
