//! 0/1 colorings with exactly one `1` per basis, by backtracking with unit
//! propagation.

use serde::Serialize;

use super::VectorSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    /// Color of each vector, indexed like the set.
    pub assignment: Vec<u8>,
}

impl Coloring {
    /// Exactly one vector colored 1 in every basis.
    pub fn is_valid(&self, set: &VectorSet) -> bool {
        self.assignment.len() == set.vectors().len()
            && self.assignment.iter().all(|&c| c <= 1)
            && set
                .bases()
                .iter()
                .all(|b| b.iter().filter(|&&i| self.assignment[i] == 1).count() == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ColoringOutcome {
    Sat {
        coloring: Coloring,
        nodes: u64,
    },
    /// No coloring exists; `nodes` is the size of the exhausted search tree.
    Unsat {
        nodes: u64,
    },
}

impl ColoringOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            ColoringOutcome::Sat { nodes, .. } | ColoringOutcome::Unsat { nodes } => *nodes,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, ColoringOutcome::Sat { .. })
    }
}

struct Search<'a> {
    set: &'a VectorSet,
    order: Vec<usize>,
    /// Bases containing each vector.
    incident: Vec<Vec<usize>>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(set: &'a VectorSet) -> Self {
        let n = set.vectors().len();
        let mut incident = vec![Vec::new(); n];
        for (b, basis) in set.bases().iter().enumerate() {
            for &i in basis {
                incident[i].push(b);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(incident[i].len()));
        Self {
            set,
            order,
            incident,
            nodes: 0,
        }
    }

    /// Assigns `value` to `var` and propagates; `false` on conflict.
    /// Every assignment made is pushed on `trail`.
    fn assign(
        &self,
        colors: &mut [Option<u8>],
        trail: &mut Vec<usize>,
        var: usize,
        value: u8,
    ) -> bool {
        let mut queue = vec![(var, value)];
        while let Some((v, c)) = queue.pop() {
            match colors[v] {
                Some(old) if old == c => continue,
                Some(_) => return false,
                None => {
                    colors[v] = Some(c);
                    trail.push(v);
                }
            }
            for &b in &self.incident[v] {
                let basis = &self.set.bases()[b];
                let ones = basis.iter().filter(|&&i| colors[i] == Some(1)).count();
                let free: Vec<usize> = basis
                    .iter()
                    .copied()
                    .filter(|&i| colors[i].is_none())
                    .collect();
                if ones > 1 {
                    return false;
                }
                if ones == 1 {
                    queue.extend(free.into_iter().map(|i| (i, 0)));
                } else if free.is_empty() {
                    return false;
                } else if free.len() == 1 {
                    queue.push((free[0], 1));
                }
            }
        }
        true
    }

    /// Depth-first search; `visit` returns `true` to stop at a solution.
    fn run(
        &mut self,
        colors: &mut Vec<Option<u8>>,
        visit: &mut dyn FnMut(&[Option<u8>]) -> bool,
    ) -> bool {
        let Some(&var) = self.order.iter().find(|&&i| colors[i].is_none()) else {
            return visit(colors);
        };
        for value in [1, 0] {
            self.nodes += 1;
            let mut trail = Vec::new();
            if self.assign(colors, &mut trail, var, value) && self.run(colors, visit) {
                return true;
            }
            for v in trail {
                colors[v] = None;
            }
        }
        false
    }
}

fn finish(colors: &[Option<u8>]) -> Coloring {
    Coloring {
        // vectors in no basis are unconstrained; they stay 0
        assignment: colors.iter().map(|c| c.unwrap_or(0)).collect(),
    }
}

/// Searches vectors in descending basis-membership order, trying color 1
/// before 0, and returns the first coloring found or the node count of the
/// exhausted tree. A node is one tentative assignment of a branching vector.
pub fn ks_coloring_search(set: &VectorSet) -> ColoringOutcome {
    let mut search = Search::new(set);
    let mut colors = vec![None; set.vectors().len()];
    // vectors outside every basis never need a decision
    for (i, inc) in search.incident.iter().enumerate() {
        if inc.is_empty() {
            colors[i] = Some(0);
        }
    }
    let mut found = None;
    search.run(&mut colors, &mut |c| {
        found = Some(finish(c));
        true
    });
    match found {
        Some(coloring) => ColoringOutcome::Sat {
            coloring,
            nodes: search.nodes,
        },
        None => ColoringOutcome::Unsat {
            nodes: search.nodes,
        },
    }
}

/// Every valid coloring, in search order. Vectors outside every basis are
/// fixed to 0.
pub fn enumerate_colorings(set: &VectorSet) -> Vec<Coloring> {
    let mut search = Search::new(set);
    let mut colors = vec![None; set.vectors().len()];
    for (i, inc) in search.incident.iter().enumerate() {
        if inc.is_empty() {
            colors[i] = Some(0);
        }
    }
    let mut all = Vec::new();
    search.run(&mut colors, &mut |c| {
        all.push(finish(c));
        false
    });
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ket64;

    fn single_basis(dim: usize) -> VectorSet {
        let v = (0..dim)
            .map(|k| Ket64::basis(dim, k).unwrap().ray())
            .collect();
        VectorSet::new(dim, v, vec![(0..dim).collect()]).unwrap()
    }

    /// Brute force over all `2^n` assignments.
    fn brute_force_count(set: &VectorSet) -> usize {
        let n = set.vectors().len();
        (0u32..1 << n)
            .filter(|mask| {
                let c = Coloring {
                    assignment: (0..n).map(|i| ((mask >> i) & 1) as u8).collect(),
                };
                c.is_valid(set)
            })
            .count()
    }

    #[test]
    fn single_qutrit_basis_has_three_colorings() {
        let s = single_basis(3);
        let all = enumerate_colorings(&s);
        assert_eq!(all.len(), 3);
        assert_eq!(brute_force_count(&s), 3);
        match ks_coloring_search(&s) {
            ColoringOutcome::Sat { coloring, .. } => assert_eq!(coloring.assignment, vec![1, 0, 0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bundled_set_is_uncolorable() {
        let s = VectorSet::ks18();
        let out = ks_coloring_search(&s);
        assert!(!out.is_sat());
        assert!(out.nodes() <= 1 << 18);
        assert_eq!(brute_force_count(&s), 0);
    }

    #[test]
    fn dropping_a_basis_makes_it_colorable() {
        let full = VectorSet::ks18();
        let set = VectorSet::new(4, full.vectors().to_vec(), full.bases()[1..].to_vec()).unwrap();
        let out = ks_coloring_search(&set);
        let ColoringOutcome::Sat { coloring, .. } = out else {
            panic!("expected a coloring")
        };
        assert!(coloring.is_valid(&set));
        assert_eq!(enumerate_colorings(&set).len(), brute_force_count(&set));
    }
}
