//! Maximum-weight bipartite assignment on small integer matrices.
//!
//! Used to align predicted local speakers with reference speakers per
//! window. Matrices are tiny (one side per local speaker), so the classic
//! O(n^3) Hungarian algorithm with potentials is plenty; the canonical
//! solution additionally breaks ties toward lexicographically smallest
//! pair lists via repeated sub-problem solves.

/// Maximum-weight injective partial assignment of rows to columns.
///
/// Returns `result[row] = Some(col)` for matched rows. Pairs with zero
/// weight are left unmatched (they carry no co-activity evidence). Among
/// assignments of maximal total weight, the one whose matched `(row, col)`
/// pair list is lexicographically smallest is returned.
pub fn max_weight_assignment(weights: &[Vec<u64>]) -> Vec<Option<usize>> {
    let n_rows = weights.len();
    let n_cols = weights.first().map_or(0, Vec::len);
    let mut result = vec![None; n_rows];
    if n_rows == 0 || n_cols == 0 {
        return result;
    }
    let all_cols: Vec<usize> = (0..n_cols).collect();
    let mut remaining = optimal_value(weights, &(0..n_rows).collect::<Vec<_>>(), &all_cols);
    let mut avail_cols = all_cols;
    for row in 0..n_rows {
        let rest_rows: Vec<usize> = (row + 1..n_rows).collect();
        let mut chosen = None;
        for (slot, &col) in avail_cols.iter().enumerate() {
            let w = weights[row][col];
            if w == 0 {
                continue;
            }
            let mut cols_without = avail_cols.clone();
            cols_without.remove(slot);
            if w + optimal_value(weights, &rest_rows, &cols_without) == remaining {
                chosen = Some((slot, col, w));
                break;
            }
        }
        if let Some((slot, col, w)) = chosen {
            result[row] = Some(col);
            avail_cols.remove(slot);
            remaining -= w;
        }
    }
    result
}

/// Total weight of the best assignment (convenience for tests and scoring).
pub fn assignment_value(weights: &[Vec<u64>]) -> u64 {
    let n_rows = weights.len();
    let n_cols = weights.first().map_or(0, Vec::len);
    optimal_value(
        weights,
        &(0..n_rows).collect::<Vec<_>>(),
        &(0..n_cols).collect::<Vec<_>>(),
    )
}

/// Best total weight over the given row/column subsets.
fn optimal_value(weights: &[Vec<u64>], rows: &[usize], cols: &[usize]) -> u64 {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let n = rows.len().max(cols.len());
    // Square pad with zeros; minimize negated weights.
    let mut cost = vec![vec![0i64; n]; n];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            cost[i][j] = -(weights[r][c] as i64);
        }
    }
    let matched = hungarian_square(&cost);
    let mut total = 0u64;
    for (i, &r) in rows.iter().enumerate() {
        if let Some(&j) = matched.get(i) {
            if j < cols.len() {
                total += weights[r][cols[j]];
            }
        }
    }
    total
}

/// Minimum-cost perfect matching on a square matrix; returns the column
/// assigned to each row. Kuhn-Munkres with row/column potentials, O(n^3).
fn hungarian_square(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // matched_row[col] = row (1-based, 0 = free)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] != 0 {
            result[matched_row[j] - 1] = j - 1;
        }
    }
    result
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive assignment search, kept independent of the solver above.

    /// Enumerates every injective assignment and returns the one with
    /// maximal total weight, breaking ties by lexicographically smallest
    /// positive-weight pair list.
    pub fn brute_force_assignment(weights: &[Vec<u64>]) -> (u64, Vec<Option<usize>>) {
        let n_rows = weights.len();
        let n_cols = weights.first().map_or(0, Vec::len);
        let mut best_value = 0u64;
        let mut best_pairs: Option<Vec<(usize, usize)>> = None;
        let mut assignment = vec![None; n_rows];
        fn recurse(
            weights: &[Vec<u64>],
            row: usize,
            used: &mut Vec<bool>,
            assignment: &mut Vec<Option<usize>>,
            best_value: &mut u64,
            best_pairs: &mut Option<Vec<(usize, usize)>>,
        ) {
            if row == weights.len() {
                let mut value = 0u64;
                let mut pairs = Vec::new();
                for (r, slot) in assignment.iter().enumerate() {
                    if let Some(c) = slot {
                        let w = weights[r][*c];
                        if w > 0 {
                            value += w;
                            pairs.push((r, *c));
                        }
                    }
                }
                let better = value > *best_value
                    || (value == *best_value
                        && best_pairs.as_ref().is_none_or(|b| pairs < *b));
                if better {
                    *best_value = value;
                    *best_pairs = Some(pairs);
                }
                return;
            }
            // Option: leave this row unmatched.
            assignment[row] = None;
            recurse(weights, row + 1, used, assignment, best_value, best_pairs);
            for col in 0..used.len() {
                if !used[col] {
                    used[col] = true;
                    assignment[row] = Some(col);
                    recurse(weights, row + 1, used, assignment, best_value, best_pairs);
                    assignment[row] = None;
                    used[col] = false;
                }
            }
        }
        let mut used = vec![false; n_cols];
        recurse(
            weights,
            0,
            &mut used,
            &mut assignment,
            &mut best_value,
            &mut best_pairs,
        );
        let mut result = vec![None; n_rows];
        for (r, c) in best_pairs.unwrap_or_default() {
            result[r] = Some(c);
        }
        (best_value, result)
    }
}
