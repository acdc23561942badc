//! Row-normalized combined adjacency used by every convolution layer.
//!
//! With `P = O + A` the combined matrix is
//!
//! ```text
//! M = | S   P | + I        users in rows 0..n, items in rows n..n+m
//!     | Pᵀ  0 |
//! ```
//!
//! and the operator is `D⁻¹M`, where `D_ii` counts the structural entries of
//! row `i` of `M` (self-loop included), not their weights.

use crate::graph::SoanGraph;
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationMatrix {
    matrix: CsrMatrix,
    degrees: Vec<usize>,
    n_users: usize,
    n_items: usize,
}

impl PropagationMatrix {
    pub fn new(graph: &SoanGraph) -> Self {
        let (n, m) = (graph.n_users(), graph.n_items());
        let combined = combined_bipartite(graph);
        let mut triplets = Vec::with_capacity(n + m + graph.social.nnz() + 2 * combined.len());
        for k in 0..n + m {
            triplets.push((k, k, 1.0));
        }
        // Zero diagonal on S keeps the self-loop weight at exactly 1.
        triplets.extend(graph.social.triplets());
        for &(u, i, w) in &combined {
            triplets.push((u, n + i, w));
            triplets.push((n + i, u, w));
        }
        let mut matrix = CsrMatrix::from_triplets(n + m, n + m, triplets)
            .expect("validated graph yields distinct coordinates");
        let degrees: Vec<usize> = (0..n + m).map(|r| matrix.row_nnz(r)).collect();
        // Rows are contiguous in CSR order, so walk values row by row.
        let mut offset = 0;
        let values = matrix.values_mut();
        for &deg in &degrees {
            let inv = 1.0 / deg as f64;
            for v in &mut values[offset..offset + deg] {
                *v *= inv;
            }
            offset += deg;
        }
        PropagationMatrix {
            matrix,
            degrees,
            n_users: n,
            n_items: m,
        }
    }

    /// The normalized operator `D⁻¹M`.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_nodes(&self) -> usize {
        self.n_users + self.n_items
    }

    /// Row of item `i` in node-indexed matrices.
    pub fn item_row(&self, item: usize) -> usize {
        self.n_users + item
    }
}

pub fn propagation_matrix(graph: &SoanGraph) -> PropagationMatrix {
    PropagationMatrix::new(graph)
}

/// Structural union of ownership and assessment with summed weights.
fn combined_bipartite(graph: &SoanGraph) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(graph.ownership.nnz() + graph.assessment.nnz());
    for u in 0..graph.n_users() {
        let mut own = graph.ownership.row(u).peekable();
        let mut asm = graph.assessment.row(u).peekable();
        loop {
            let entry = match (own.peek().copied(), asm.peek().copied()) {
                (None, None) => break,
                (Some(o), None) => {
                    own.next();
                    o
                }
                (None, Some(a)) => {
                    asm.next();
                    a
                }
                (Some(o), Some(a)) if o.0 < a.0 => {
                    own.next();
                    o
                }
                (Some(o), Some(a)) if a.0 < o.0 => {
                    asm.next();
                    a
                }
                (Some(o), Some(a)) => {
                    own.next();
                    asm.next();
                    (o.0, o.1 + a.1)
                }
            };
            out.push((u, entry.0, entry.1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, GraphBuilder};

    fn dense(p: &PropagationMatrix) -> Vec<Vec<f64>> {
        p.matrix()
            .to_dense()
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect()
    }

    #[test]
    fn single_assessment() {
        let g = build_graph(&[("u1", "i1", 0.8)], &[], &[]).unwrap();
        let p = propagation_matrix(&g);
        assert_eq!(p.degrees(), &[2, 2]);
        assert_eq!(dense(&p), vec![vec![0.5, 0.4], vec![0.4, 0.5]]);
    }

    #[test]
    fn empty_graph_is_identity() {
        let g = GraphBuilder::new().user("u1").item("i1").build().unwrap();
        let p = propagation_matrix(&g);
        assert_eq!(p.degrees(), &[1, 1]);
        assert_eq!(dense(&p), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn ownership_and_assessment_add() {
        let g = build_graph(&[("u1", "i1", 0.5)], &[("u1", "i1", 1.0)], &[]).unwrap();
        let p = propagation_matrix(&g);
        assert_eq!(p.degrees(), &[2, 2]);
        assert_eq!(dense(&p), vec![vec![0.5, 0.75], vec![0.75, 0.5]]);
    }

    #[test]
    fn zero_grade_counts_toward_degree() {
        let g = build_graph(&[("u1", "i1", 0.0)], &[], &[]).unwrap();
        let p = propagation_matrix(&g);
        assert_eq!(p.degrees(), &[2, 2]);
        assert_eq!(dense(&p), vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
    }

    #[test]
    fn social_block_sits_in_user_rows() {
        let g = build_graph(
            &[("a", "x", 1.0)],
            &[("b", "x", 1.0)],
            &[("a", "b", 1.0)],
        )
        .unwrap();
        let p = propagation_matrix(&g);
        // a: self, b, x; b: self, a, x; x: self, a, b
        assert_eq!(p.degrees(), &[3, 3, 3]);
        let third = 1.0 / 3.0;
        for row in dense(&p) {
            assert_eq!(row, vec![third; 3]);
        }
    }
}
