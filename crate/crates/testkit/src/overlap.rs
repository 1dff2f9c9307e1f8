//! Brute-force moved-statement overlap.

/// Share of the distinct statements of `extracted` that occur in
/// `before_parent` and not in `after_parent`, by linear scans.
pub fn brute_force_overlap(extracted: &[String], before_parent: &[String], after_parent: &[String]) -> f64 {
    let mut distinct: Vec<&String> = Vec::new();
    for s in extracted {
        if !distinct.iter().any(|d| *d == s) {
            distinct.push(s);
        }
    }
    if distinct.is_empty() {
        return 0.0;
    }
    let mut moved = 0;
    for s in &distinct {
        let was_there = before_parent.iter().any(|b| b == *s);
        let still_there = after_parent.iter().any(|a| a == *s);
        if was_there && !still_there {
            moved += 1;
        }
    }
    moved as f64 / distinct.len() as f64
}
