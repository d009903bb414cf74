use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Grid { rows: usize, cols: usize },
    Full,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("coupling map needs at least one qubit")]
    Empty,
    #[error("edge ({0}, {1}) is invalid for {2} physical qubits")]
    BadEdge(usize, usize, usize),
    #[error("coupling map is not connected")]
    Disconnected,
}

/// Undirected physical connectivity. Edges are stored as ordered pairs
/// `(low, high)`; neighbour lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    num_physical: usize,
    topology: Topology,
    edges: BTreeSet<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    distance: Vec<Vec<u32>>,
}

impl CouplingMap {
    /// Rectangular 4-neighbour lattice; physical index is `row * cols + col`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, CouplingError> {
        if rows == 0 || cols == 0 {
            return Err(CouplingError::Empty);
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let p = r * cols + c;
                if c + 1 < cols {
                    edges.push((p, p + 1));
                }
                if r + 1 < rows {
                    edges.push((p, p + cols));
                }
            }
        }
        Self::build(rows * cols, edges, Topology::Grid { rows, cols })
    }

    /// Smallest near-square grid holding `num_qubits`: `rows = ceil(sqrt(q))`,
    /// `cols = ceil(q / rows)`, so ties lean toward more rows.
    pub fn grid_for(num_qubits: usize) -> Result<Self, CouplingError> {
        if num_qubits == 0 {
            return Err(CouplingError::Empty);
        }
        let mut rows = (num_qubits as f64).sqrt() as usize;
        while rows * rows < num_qubits {
            rows += 1;
        }
        let cols = num_qubits.div_ceil(rows);
        Self::grid(rows, cols)
    }

    /// Complete graph.
    pub fn full(n: usize) -> Result<Self, CouplingError> {
        if n == 0 {
            return Err(CouplingError::Empty);
        }
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::build(n, edges, Topology::Full)
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CouplingError> {
        if n == 0 {
            return Err(CouplingError::Empty);
        }
        Self::build(n, edges.into_iter().collect(), Topology::Custom)
    }

    fn build(
        n: usize,
        raw: Vec<(usize, usize)>,
        topology: Topology,
    ) -> Result<Self, CouplingError> {
        let mut edges = BTreeSet::new();
        let mut neighbours = vec![Vec::new(); n];
        for (a, b) in raw {
            if a >= n || b >= n || a == b {
                return Err(CouplingError::BadEdge(a, b, n));
            }
            let e = (a.min(b), a.max(b));
            if edges.insert(e) {
                neighbours[a].push(b);
                neighbours[b].push(a);
            }
        }
        for list in &mut neighbours {
            list.sort_unstable();
        }
        let distance: Vec<Vec<u32>> = (0..n).map(|s| bfs(&neighbours, s)).collect();
        if distance[0].contains(&u32::MAX) {
            return Err(CouplingError::Disconnected);
        }
        Ok(Self {
            num_physical: n,
            topology,
            edges,
            neighbours,
            distance,
        })
    }

    pub fn num_physical(&self) -> usize {
        self.num_physical
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn neighbours(&self, p: usize) -> &[usize] {
        &self.neighbours[p]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.distance[a][b] == 1
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.distance[a][b]
    }

    /// The lexicographically smallest shortest path from `from` to `to`,
    /// both endpoints included.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let d = self.distance[cur][to];
            cur = *self.neighbours[cur]
                .iter()
                .find(|&&nb| self.distance[nb][to] + 1 == d)
                .expect("connected map always has a closer neighbour");
            path.push(cur);
        }
        path
    }
}

fn bfs(neighbours: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; neighbours.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(p) = queue.pop_front() {
        for &nb in &neighbours[p] {
            if dist[nb] == u32::MAX {
                dist[nb] = dist[p] + 1;
                queue.push_back(nb);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_two_by_two() {
        let m = CouplingMap::grid(2, 2).unwrap();
        let expect: BTreeSet<_> = [(0, 1), (2, 3), (0, 2), (1, 3)].into_iter().collect();
        assert_eq!(m.edges(), &expect);
        assert_eq!(m.topology(), Topology::Grid { rows: 2, cols: 2 });
    }

    #[test]
    fn full_and_path() {
        assert_eq!(CouplingMap::full(4).unwrap().edges().len(), 6);
        let path = CouplingMap::grid(1, 5).unwrap();
        let expect: BTreeSet<_> = (0..4).map(|i| (i, i + 1)).collect();
        assert_eq!(path.edges(), &expect);
        assert_eq!(path.distance(0, 4), 4);
    }

    #[test]
    fn zero_dimension_and_disconnected() {
        assert_eq!(CouplingMap::grid(0, 3), Err(CouplingError::Empty));
        assert_eq!(CouplingMap::full(0), Err(CouplingError::Empty));
        assert_eq!(
            CouplingMap::from_edges(3, [(0, 1)]),
            Err(CouplingError::Disconnected)
        );
        assert_eq!(
            CouplingMap::from_edges(2, [(0, 2)]),
            Err(CouplingError::BadEdge(0, 2, 2))
        );
    }

    #[test]
    fn lexicographic_shortest_path() {
        // 3x3 grid, corner to corner: several shortest paths, smallest goes right first
        let m = CouplingMap::grid(3, 3).unwrap();
        assert_eq!(m.shortest_path(0, 8), vec![0, 1, 2, 5, 8]);
        assert_eq!(m.shortest_path(8, 0), vec![8, 5, 2, 1, 0]);
        assert_eq!(m.shortest_path(4, 4), vec![4]);
    }

    #[test]
    fn grid_for_shapes() {
        let dims = |q| match CouplingMap::grid_for(q).unwrap().topology() {
            Topology::Grid { rows, cols } => (rows, cols),
            _ => unreachable!(),
        };
        assert_eq!(dims(1), (1, 1));
        assert_eq!(dims(4), (2, 2));
        assert_eq!(dims(5), (3, 2));
        assert_eq!(dims(6), (3, 2));
        assert_eq!(dims(13), (4, 4));
    }
}
