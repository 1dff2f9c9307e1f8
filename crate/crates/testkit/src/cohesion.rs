//! Pair-enumeration cohesion oracle and a matching class generator.

/// `(tcc, lcc, lcom)` for methods given as lists of accessed field indices.
/// Reachability is a Floyd–Warshall closure over the direct-sharing graph.
pub fn pair_cohesion(access: &[Vec<usize>]) -> (f64, f64, usize) {
    let n = access.len();
    let shares = |a: &[usize], b: &[usize]| a.iter().any(|f| b.contains(f));
    let mut reach = vec![vec![false; n]; n];
    let (mut direct, mut disjoint) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i != j && shares(&access[i], &access[j]) {
                reach[i][j] = true;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if reach[i][j] {
                direct += 1;
            } else {
                disjoint += 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let indirect = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| reach[i][j]).count();
    let lcom = disjoint.saturating_sub(direct);
    if n < 2 {
        return (0.0, 0.0, lcom);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    (direct as f64 / pairs, indirect as f64 / pairs, lcom)
}

/// Java class `Cohesive` with `fields` int fields and one method per
/// access list. Reads and writes alternate; `this.` is used on odd fields.
pub fn cohesion_class(fields: usize, access: &[Vec<usize>]) -> String {
    let mut s = String::from("class Cohesive {\n");
    for f in 0..fields {
        s.push_str(&format!("    private int f{f};\n"));
    }
    for (m, used) in access.iter().enumerate() {
        s.push_str(&format!("    void m{m}() {{\n"));
        for (k, f) in used.iter().enumerate() {
            let target = if f % 2 == 1 { format!("this.f{f}") } else { format!("f{f}") };
            if (k + m) % 2 == 0 {
                s.push_str(&format!("        {target} = {k};\n"));
            } else {
                s.push_str(&format!("        int v{k} = {target};\n"));
            }
        }
        s.push_str("    }\n");
    }
    s.push_str("}\n");
    s
}
