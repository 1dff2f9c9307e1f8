//! Field-sharing cohesion: TCC, LCC and LCOM.

use std::collections::BTreeSet;

use crate::java::ClassModel;

/// Field-access sets of the methods that take part in cohesion, in
/// declaration order. Constructors are left out.
pub fn cohesion_access_sets(class: &ClassModel) -> Vec<&BTreeSet<String>> {
    class.methods.iter().filter(|m| !m.is_constructor).map(|m| &m.accessed_field_names).collect()
}

fn connected(a: &BTreeSet<String>, b: &BTreeSet<String>) -> bool {
    !a.is_disjoint(b)
}

/// `(tcc, lcc)` over the given access sets. Fewer than two methods gives
/// `(0, 0)`.
pub fn tcc_lcc(access: &[&BTreeSet<String>]) -> (f64, f64) {
    let n = access.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let possible = n * (n - 1) / 2;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut direct = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if connected(access[i], access[j]) {
                direct += 1;
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }

    let mut component_size = vec![0usize; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        component_size[root] += 1;
    }
    let indirect: usize = component_size.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();

    (direct as f64 / possible as f64, indirect as f64 / possible as f64)
}

/// LCOM1 floored at zero: pairs sharing no field minus pairs sharing one.
pub fn lcom(access: &[&BTreeSet<String>]) -> usize {
    let (mut sharing, mut disjoint) = (0usize, 0usize);
    for i in 0..access.len() {
        for j in i + 1..access.len() {
            if connected(access[i], access[j]) {
                sharing += 1;
            } else {
                disjoint += 1;
            }
        }
    }
    disjoint.saturating_sub(sharing)
}

pub fn tight_and_loose_cohesion(class: &ClassModel) -> (f64, f64) {
    tcc_lcc(&cohesion_access_sets(class))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(spec: &[&[&str]]) -> Vec<BTreeSet<String>> {
        spec.iter().map(|s| s.iter().map(|f| f.to_string()).collect()).collect()
    }

    fn run(spec: &[&[&str]]) -> (f64, f64) {
        let owned = sets(spec);
        let refs: Vec<_> = owned.iter().collect();
        tcc_lcc(&refs)
    }

    #[test]
    fn chain_is_loosely_but_not_tightly_connected() {
        let (tcc, lcc) = run(&[&["f"], &["f", "g"], &["g"]]);
        assert_eq!(tcc, 2.0 / 3.0);
        assert_eq!(lcc, 1.0);
    }

    #[test]
    fn one_shared_pair_of_three() {
        assert_eq!(run(&[&["f"], &["f"], &[]]), (1.0 / 3.0, 1.0 / 3.0));
    }

    #[test]
    fn degenerate_and_complete() {
        assert_eq!(run(&[&["f"]]), (0.0, 0.0));
        assert_eq!(run(&[]), (0.0, 0.0));
        assert_eq!(run(&[&["f"], &["f"], &["f"]]), (1.0, 1.0));
    }

    #[test]
    fn lcom_floor() {
        let owned = sets(&[&["a"], &["b"], &["c"]]);
        assert_eq!(lcom(&owned.iter().collect::<Vec<_>>()), 3);
        let owned = sets(&[&["a"], &["a"], &["a"]]);
        assert_eq!(lcom(&owned.iter().collect::<Vec<_>>()), 0);
    }
}
