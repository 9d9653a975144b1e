use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::triplets::{is_filtering_set, FilteringTriplet, MultiplexTriplet};
use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::RestrictionGraph;

/// An `ell × k` matrix whose rows are the permutations used to combine `ell`
/// copies of one protocol under a filtering set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixA {
    rows: Vec<Permutation>,
    /// `fixed[r][c]` marks entries pinned by the triplets (and the identity
    /// first row); everything else was filled in by the completion rule.
    fixed: Vec<Vec<bool>>,
    /// `row_of[i][j]` is the 1-based row assigned to `(B_{i+1})_{j+1}`.
    row_of: Vec<Vec<usize>>,
}

impl MatrixA {
    pub fn ell(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.rows[0].k()
    }

    /// Row `r` (1-based) as a permutation.
    pub fn row(&self, r: usize) -> &Permutation {
        &self.rows[r - 1]
    }

    pub fn rows(&self) -> &[Permutation] {
        &self.rows
    }

    /// `A[r][c]`, 1-based.
    pub fn entry(&self, r: usize, c: usize) -> usize {
        self.rows[r - 1].apply(c)
    }

    pub fn is_fixed(&self, r: usize, c: usize) -> bool {
        self.fixed[r - 1][c - 1]
    }

    /// The row assigned to the `j`-th element of triplet `i`'s set.
    pub fn row_of(&self, i: usize, j: usize) -> usize {
        self.row_of[i - 1][j - 1]
    }
}

impl fmt::Display for MatrixA {
    /// Derived entries are starred.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 1..=self.ell() {
            let cells: Vec<String> = (1..=self.k())
                .map(|c| {
                    let mark = if self.is_fixed(r, c) { "" } else { "*" };
                    format!("{}{mark}", self.entry(r, c))
                })
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Builds the matrix for an `ell`-filtering set.
///
/// Triplets sharing a sender take consecutive rows starting at row 2, in set
/// order. In row `row(i, j)`, column `a_i` holds `a_i` and column `b_i` holds
/// `(B_i)_j`; the columns of `B_i` take the rest of `B_i ∪ {b_i}` in
/// ascending order, and every other column is filled in ascending order.
pub fn build_matrix_a(
    graph: &RestrictionGraph,
    ell: usize,
    set: &[FilteringTriplet],
) -> Result<MatrixA> {
    let analysis = is_filtering_set(set, graph, ell)?;
    if let Err(v) = analysis.verdict {
        return Err(Error::Certificate(format!("not a filtering set: {v}")));
    }
    if !analysis.ell_filtering {
        return Err(Error::Certificate(format!(
            "R(S) = {} exceeds ell - 1 = {}",
            analysis.r_max,
            ell.saturating_sub(1)
        )));
    }
    let k = graph.k();

    let mut row_of = Vec::with_capacity(set.len());
    for (i, t) in set.iter().enumerate() {
        let last = 1 + set[..i]
            .iter()
            .filter(|u| u.a == t.a)
            .map(|u| u.set.len())
            .sum::<usize>();
        row_of.push((1..=t.set.len()).map(|j| last + j).collect::<Vec<_>>());
    }

    // partial rows: column -> (value, fixed)
    let mut partial: Vec<Vec<Option<(usize, bool)>>> = vec![vec![None; k]; ell];
    for c in 1..=k {
        partial[0][c - 1] = Some((c, true));
    }
    for (i, t) in set.iter().enumerate() {
        let mut cols = t.set.clone();
        cols.sort_unstable();
        for (j, &bj) in t.set.iter().enumerate() {
            let row = &mut partial[row_of[i][j] - 1];
            let mut put = |c: usize, v: usize, fixed: bool| -> Result<()> {
                match row[c - 1] {
                    Some((old, _)) if old != v => Err(Error::Internal(format!(
                        "matrix row {} column {c} assigned both {old} and {v}",
                        row_of[i][j]
                    ))),
                    _ => {
                        row[c - 1] = Some((v, fixed));
                        Ok(())
                    }
                }
            };
            put(t.a, t.a, true)?;
            put(t.b, bj, true)?;
            let values: BTreeSet<usize> =
                t.set.iter().copied().chain([t.b]).filter(|&v| v != bj).collect();
            for (&c, v) in cols.iter().zip(values) {
                put(c, v, false)?;
            }
        }
    }

    let mut rows = Vec::with_capacity(ell);
    let mut fixed = Vec::with_capacity(ell);
    for (r, cells) in partial.into_iter().enumerate() {
        let used: BTreeSet<usize> = cells.iter().flatten().map(|&(v, _)| v).collect();
        let mut free = (1..=k).filter(|v| !used.contains(v));
        let mut image = Vec::with_capacity(k);
        let mut marks = Vec::with_capacity(k);
        for cell in cells {
            let (v, f) = match cell {
                Some(vf) => vf,
                None => (free.next().ok_or_else(|| {
                    Error::Internal(format!("matrix row {} ran out of values", r + 1))
                })?, false),
            };
            image.push(v);
            marks.push(f);
        }
        let row = Permutation::new(image)
            .map_err(|e| Error::Internal(format!("matrix row {} is not a permutation: {e}", r + 1)))?;
        rows.push(row);
        fixed.push(marks);
    }
    let matrix = MatrixA { rows, fixed, row_of };
    check_matrix(&matrix, graph, set)?;
    Ok(matrix)
}

/// Re-checks the properties the construction guarantees: every row is a
/// permutation, row 1 is the identity, each `(i, j)` row maps `a_i → a_i`
/// and `b_i → (B_i)_j`, and under it `a_i` sees nothing of `{b_i} ∪ B_i`
/// except possibly `(B_i)_j`'s preimage.
pub fn check_matrix(
    matrix: &MatrixA,
    graph: &RestrictionGraph,
    set: &[FilteringTriplet],
) -> Result<()> {
    let fail = |msg: String| Err(Error::Certificate(msg));
    if !matrix.row(1).is_identity() {
        return fail("row 1 is not the identity".into());
    }
    for (i, t) in set.iter().enumerate() {
        for (j, &bj) in t.set.iter().enumerate() {
            let r = matrix.row_of(i + 1, j + 1);
            let pi = matrix.row(r);
            if pi.apply(t.a) != t.a || pi.apply(t.b) != bj {
                return fail(format!("row {r} does not route {} → {bj} for sender {}", t.b, t.a));
            }
            let permuted = graph.permuted(pi)?;
            for p in t.set.iter().copied().chain([t.b]).filter(|&p| p != bj) {
                if permuted.has_edge(t.a, p) {
                    return fail(format!("row {r}: sender {} sees {p} after permuting", t.a));
                }
            }
        }
    }
    Ok(())
}

/// Turns an `ell`-filtering set into a multiplexing set for the rows of
/// `matrix`. Triplets with an empty set contribute nothing and are dropped.
pub fn filtering_to_multiplexing(
    set: &[FilteringTriplet],
    matrix: &MatrixA,
) -> Result<Vec<MultiplexTriplet>> {
    set.iter()
        .enumerate()
        .filter(|(_, t)| !t.set.is_empty())
        .map(|(i, t)| {
            MultiplexTriplet::new(t.a, t.b, (1..=t.set.len()).map(|j| matrix.row_of(i + 1, j)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::is_multiplexing_set;

    fn two_senders() -> (RestrictionGraph, Vec<FilteringTriplet>) {
        let g = RestrictionGraph::new(9, [(1, 2), (1, 5), (7, 8)]).unwrap();
        let s = vec![
            FilteringTriplet::new(1, 2, vec![3, 4]).unwrap(),
            FilteringTriplet::new(1, 5, vec![6]).unwrap(),
            FilteringTriplet::new(7, 8, vec![9]).unwrap(),
        ];
        (g, s)
    }

    #[test]
    fn two_sender_rows() {
        let (g, s) = two_senders();
        let a = build_matrix_a(&g, 4, &s).unwrap();
        let row = |r: usize| a.row(r).images().to_vec();
        assert_eq!(row(1), (1..=9).collect::<Vec<_>>());
        assert_eq!(row(2), vec![1, 3, 2, 4, 5, 6, 7, 9, 8]);
        assert_eq!(row(3), vec![1, 4, 2, 3, 5, 6, 7, 8, 9]);
        assert_eq!(row(4), vec![1, 2, 3, 4, 6, 5, 7, 8, 9]);
        assert!(a.is_fixed(2, 1) && a.is_fixed(2, 2) && a.is_fixed(2, 8));
        assert!(!a.is_fixed(2, 3) && !a.is_fixed(4, 6));
        assert_eq!((a.row_of(1, 1), a.row_of(1, 2), a.row_of(2, 1), a.row_of(3, 1)), (2, 3, 4, 2));
    }

    #[test]
    fn two_sender_conversion() {
        let (g, s) = two_senders();
        let a = build_matrix_a(&g, 4, &s).unwrap();
        let m = filtering_to_multiplexing(&s, &a).unwrap();
        let expected = vec![
            MultiplexTriplet::new(1, 2, [2, 3]).unwrap(),
            MultiplexTriplet::new(1, 5, [4]).unwrap(),
            MultiplexTriplet::new(7, 8, [2]).unwrap(),
        ];
        assert_eq!(m, expected);
        assert_eq!(is_multiplexing_set(&m, a.rows(), &g).unwrap(), Ok(()));
    }

    #[test]
    fn too_few_rows_is_a_certificate_error() {
        let (g, s) = two_senders();
        assert!(matches!(build_matrix_a(&g, 3, &s), Err(Error::Certificate(_))));
    }

    #[test]
    fn empty_set_gives_identity_rows() {
        let g = RestrictionGraph::empty(3).unwrap();
        let a = build_matrix_a(&g, 2, &[]).unwrap();
        assert!(a.rows().iter().all(Permutation::is_identity));
        assert!(filtering_to_multiplexing(&[], &a).unwrap().is_empty());
    }

    #[test]
    fn display_marks_derived_entries() {
        let (g, s) = two_senders();
        let text = build_matrix_a(&g, 4, &s).unwrap().to_string();
        assert_eq!(text.lines().nth(3).unwrap(), "1 2* 3* 4* 6 5* 7* 8* 9*");
    }
}
