//! Score-maximizing assignment of items to positions.
//!
//! Any score function that decomposes over (item, position) pairs reduces
//! inference to a linear sum assignment problem over its `n × n` scoring
//! matrix `S`, where `S[i][j]` is the contribution of placing item `i` at
//! position `j`. Three solvers are provided:
//!
//! - [`solve_lsap_exact`] — shortest-augmenting-path method, `O(n³)`;
//! - [`solve_lsap_greedy`] — pick the largest free entry repeatedly, with a
//!   ½-optimality guarantee on non-negative matrices;
//! - [`brute_force_assign`] — exhaustive `O(n!)` search, the test oracle.

use itertools::Itertools;
use ndarray::Array2;

use crate::data::Permutation;
use crate::error::{Error, Result};

/// A permutation of items to positions together with the sum of the
/// scoring-matrix entries it selects.
#[derive(Debug, Clone)]
pub struct Assignment {
    item_to_position: Permutation,
    total: f64,
}

impl Assignment {
    /// The chosen permutation: `position_of(i)` is where item `i` goes.
    pub fn item_to_position(&self) -> &Permutation {
        &self.item_to_position
    }

    /// Sum of the selected matrix entries.
    pub fn total(&self) -> f64 {
        self.total
    }
}

fn validate_square(scores: &Array2<f64>) -> Result<usize> {
    let (rows, cols) = scores.dim();
    if rows != cols {
        return Err(Error::InvalidInput(format!(
            "scoring matrix must be square, got {} x {}",
            rows, cols
        )));
    }
    if rows == 0 {
        return Err(Error::InvalidInput("scoring matrix is empty".into()));
    }
    if scores.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "scoring matrix contains a non-finite entry".into(),
        ));
    }
    Ok(rows)
}

/// Sums the entries selected by `positions` in item order, so that equal
/// permutations always produce bit-identical totals across solvers.
fn selected_total(scores: &Array2<f64>, positions: &[usize]) -> f64 {
    positions
        .iter()
        .enumerate()
        .map(|(item, &pos)| scores[[item, pos]])
        .sum()
}

/// Maximizes `Σ_i S[i][σ(i)]` over all permutations `σ` with the
/// shortest-augmenting-path method (dual potentials over the negated
/// matrix), in `O(n³)`.
pub fn solve_lsap_exact(scores: &Array2<f64>) -> Result<Assignment> {
    let n = validate_square(scores)?;
    // minimize the negated scores; 1-based arrays with column 0 as sentinel
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_at = vec![0usize; n + 1]; // row assigned to each column, 0 = free
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_at[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];

        loop {
            used[j0] = true;
            let i0 = row_at[j0];
            let mut delta = inf;
            let mut j1 = 0usize;

            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = -scores[[i0 - 1, j - 1]] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }

            for j in 0..=n {
                if used[j] {
                    u[row_at[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }

            j0 = j1;
            if row_at[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_at[j0] = row_at[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut positions = vec![0usize; n];
    for j in 1..=n {
        positions[row_at[j] - 1] = j - 1;
    }
    let total = selected_total(scores, &positions);
    Ok(Assignment {
        item_to_position: Permutation::new(positions)?,
        total,
    })
}

/// Repeatedly selects the largest remaining entry whose row and column are
/// both unassigned. Requires non-negative entries; the returned total is at
/// least half the exact optimum. Ties go to the smaller row, then column.
pub fn solve_lsap_greedy(scores: &Array2<f64>) -> Result<Assignment> {
    let n = validate_square(scores)?;
    if scores.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput(
            "greedy assignment requires non-negative entries".into(),
        ));
    }
    let mut entries: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).collect();
    entries.sort_by(|&(ai, aj), &(bi, bj)| {
        scores[[bi, bj]]
            .total_cmp(&scores[[ai, aj]])
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });

    let mut positions = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    let mut assigned = 0;
    for (i, j) in entries {
        if positions[i] != usize::MAX || col_used[j] {
            continue;
        }
        positions[i] = j;
        col_used[j] = true;
        assigned += 1;
        if assigned == n {
            break;
        }
    }
    let total = selected_total(scores, &positions);
    Ok(Assignment {
        item_to_position: Permutation::new(positions)?,
        total,
    })
}

/// Exhaustive maximum over all `n!` permutations; ties broken by the
/// lexicographically smallest item-to-position vector. Rejects `n > 8`.
pub fn brute_force_assign(scores: &Array2<f64>) -> Result<Assignment> {
    let n = validate_square(scores)?;
    if n > 8 {
        return Err(Error::InvalidInput(format!(
            "brute force limited to n <= 8, got {}",
            n
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    // permutations of 0..n arrive in lexicographic order, so keeping the
    // first strict maximum yields the lexicographically smallest tie
    for perm in (0..n).permutations(n) {
        let total = selected_total(scores, &perm);
        match &best {
            Some((_, t)) if total <= *t => {}
            _ => best = Some((perm, total)),
        }
    }
    let (positions, total) = best.expect("n >= 1 guarantees at least one permutation");
    Ok(Assignment {
        item_to_position: Permutation::new(positions)?,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Random matrix whose entries are dyadic rationals (multiples of
    /// 2^-8), so every total is exact in f64 and cross-solver totals can be
    /// compared with `==`.
    pub(crate) fn random_dyadic(n: usize, rng: &mut impl Rng) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |_| rng.random_range(0..=4096) as f64 / 256.0)
    }

    #[test]
    fn singleton_matrix() {
        let s = array![[3.5]];
        for a in [
            solve_lsap_exact(&s).unwrap(),
            solve_lsap_greedy(&s).unwrap(),
            brute_force_assign(&s).unwrap(),
        ] {
            assert_eq!(a.item_to_position().one_based(), vec![1]);
            assert_eq!(a.total(), 3.5);
        }
    }

    #[test]
    fn two_by_two_prefers_swap() {
        let s = array![[1.0, 2.0], [4.0, 3.0]];
        let a = solve_lsap_exact(&s).unwrap();
        assert_eq!(a.item_to_position().one_based(), vec![2, 1]);
        assert_eq!(a.total(), 6.0);
        let b = brute_force_assign(&s).unwrap();
        assert_eq!(b.item_to_position().one_based(), vec![2, 1]);
        assert_eq!(b.total(), 6.0);
    }

    #[test]
    fn diagonally_dominant_keeps_identity() {
        let s = array![
            [10.0, 1.0, 2.0],
            [0.5, 12.0, 1.5],
            [2.0, 0.0, 11.0]
        ];
        let a = solve_lsap_exact(&s).unwrap();
        assert_eq!(a.item_to_position().one_based(), vec![1, 2, 3]);
    }

    #[test]
    fn exact_matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=7 {
            for _ in 0..20 {
                let s = random_dyadic(n, &mut rng);
                let exact = solve_lsap_exact(&s).unwrap();
                let brute = brute_force_assign(&s).unwrap();
                assert_eq!(exact.total(), brute.total(), "n = {}", n);
            }
        }
    }

    #[test]
    fn greedy_is_half_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = random_dyadic(8, &mut rng);
            let exact = solve_lsap_exact(&s).unwrap();
            let greedy = solve_lsap_greedy(&s).unwrap();
            assert!(greedy.total() >= 0.5 * exact.total());
            assert!(greedy.total() <= exact.total() + 1e-12);
        }
    }

    #[test]
    fn greedy_solves_rank_one_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = 6;
            let g: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let s = Array2::from_shape_fn((n, n), |(i, j)| g[j] * p[i]);
            let exact = solve_lsap_exact(&s).unwrap();
            let greedy = solve_lsap_greedy(&s).unwrap();
            assert!((greedy.total() - exact.total()).abs() < 1e-12);
        }
    }

    #[test]
    fn total_shifts_by_row_constant_and_argmax_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_dyadic(5, &mut rng);
        let base = solve_lsap_exact(&s).unwrap();
        let mut shifted = s.clone();
        for j in 0..5 {
            shifted[[2, j]] += 8.0; // dyadic shift keeps arithmetic exact
        }
        let after = solve_lsap_exact(&shifted).unwrap();
        assert_eq!(after.total(), base.total() + 8.0);
        assert_eq!(
            selected_total(&s, after.item_to_position().positions()),
            base.total()
        );
    }

    #[test]
    fn all_equal_matrix_brute_force_picks_identity() {
        let s = Array2::from_elem((4, 4), 1.25);
        let a = brute_force_assign(&s).unwrap();
        assert_eq!(a.item_to_position().one_based(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn input_validation() {
        let rect = Array2::zeros((2, 3));
        assert!(solve_lsap_exact(&rect).is_err());
        let nan = array![[f64::NAN]];
        assert!(solve_lsap_exact(&nan).is_err());
        let neg = array![[-1.0, 0.0], [0.0, 1.0]];
        assert!(solve_lsap_greedy(&neg).is_err());
        assert!(solve_lsap_exact(&neg).is_ok());
        let big = Array2::zeros((9, 9));
        assert!(brute_force_assign(&big).is_err());
    }
}
