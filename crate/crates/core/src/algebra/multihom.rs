//! Multihomogeneous Bézout numbers.

use std::collections::HashMap;

use super::poly::Poly;
use super::system::{AlgebraError, PolySystem};

/// A partition of variable indices into groups, all treated as affine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableGroups {
    groups: Vec<Vec<usize>>,
}

impl VariableGroups {
    pub fn new(num_vars: usize, groups: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        let mut seen = vec![false; num_vars];
        for &v in groups.iter().flatten() {
            if v >= num_vars || seen[v] {
                return Err(AlgebraError::BadGroups);
            }
            seen[v] = true;
        }
        if seen.iter().any(|s| !s) || groups.iter().any(|g| g.is_empty()) {
            return Err(AlgebraError::BadGroups);
        }
        Ok(VariableGroups { groups })
    }

    pub fn single(num_vars: usize) -> Self {
        VariableGroups {
            groups: vec![(0..num_vars).collect()],
        }
    }

    /// Consecutive blocks of the given sizes.
    pub fn blocks(sizes: &[usize]) -> Self {
        let mut start = 0;
        let groups = sizes
            .iter()
            .map(|&s| {
                let g: Vec<usize> = (start..start + s).collect();
                start += s;
                g
            })
            .collect();
        VariableGroups { groups }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `table[i][g]` = degree of polynomial `i` in the variables of group `g`.
    pub fn multidegrees(&self, polys: &[Poly]) -> Vec<Vec<u32>> {
        polys
            .iter()
            .map(|p| self.groups.iter().map(|g| p.degree_in(g)).collect())
            .collect()
    }
}

/// Multihomogeneous Bézout number of a square system.
///
/// Equals the coefficient of `prod_g X_g^{|g|}` in
/// `prod_i (sum_g d_ig X_g)`, computed by dynamic programming over the
/// number of equations still to be assigned to each group.
pub fn multihomogeneous_count(
    system: &PolySystem,
    groups: &VariableGroups,
) -> Result<u128, AlgebraError> {
    if system.polys().len() != system.num_vars() {
        return Err(AlgebraError::NotSquare {
            polys: system.polys().len(),
            vars: system.num_vars(),
        });
    }
    let table = groups.multidegrees(system.polys());
    let sizes: Vec<usize> = groups.groups().iter().map(Vec::len).collect();
    Ok(count_from_table(&table, &sizes))
}

fn count_from_table(table: &[Vec<u32>], sizes: &[usize]) -> u128 {
    fn go(
        i: usize,
        remaining: &mut Vec<usize>,
        table: &[Vec<u32>],
        memo: &mut HashMap<(usize, Vec<usize>), u128>,
    ) -> u128 {
        if i == table.len() {
            return u128::from(remaining.iter().all(|&r| r == 0));
        }
        let key = (i, remaining.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut total = 0u128;
        for g in 0..remaining.len() {
            let d = table[i][g];
            if d == 0 || remaining[g] == 0 {
                continue;
            }
            remaining[g] -= 1;
            total += d as u128 * go(i + 1, remaining, table, memo);
            remaining[g] += 1;
        }
        memo.insert(key, total);
        total
    }
    let mut remaining = sizes.to_vec();
    go(0, &mut remaining, table, &mut HashMap::new())
}
