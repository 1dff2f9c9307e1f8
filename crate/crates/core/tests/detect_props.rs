use proptest::prelude::*;

use refscout_core::detect::{detect_extract_method, statement_set};
use refscout_core::java::{parse_compilation_unit, CodeModel};
use refscout_testkit::overlap::brute_force_overlap;

/// A class of `bodies.len()` methods `m0..`, each a list of unique call
/// statements, plus the planted extractions `(method, start, len)`.
fn render(bodies: &[Vec<String>], extractions: &[(usize, usize, usize)]) -> (String, String) {
    let mut before = String::from("class P {\n");
    let mut after = String::from("class P {\n");
    let mut extracted = Vec::new();
    for (i, body) in bodies.iter().enumerate() {
        before.push_str(&format!("    void m{i}() {{\n"));
        for s in body {
            before.push_str(&format!("        {s}\n"));
        }
        before.push_str("    }\n");

        after.push_str(&format!("    void m{i}() {{\n"));
        let cut = extractions.iter().find(|e| e.0 == i);
        for (k, s) in body.iter().enumerate() {
            match cut {
                Some(&(_, start, len)) if k == start => {
                    after.push_str(&format!("        ext{i}();\n"));
                    extracted.push((i, body[start..start + len].to_vec()));
                }
                Some(&(_, start, len)) if k > start && k < start + len => {}
                _ => after.push_str(&format!("        {s}\n")),
            }
        }
        after.push_str("    }\n");
    }
    for (i, stmts) in extracted {
        after.push_str(&format!("    void ext{i}() {{\n"));
        for s in stmts {
            after.push_str(&format!("        {s}\n"));
        }
        after.push_str("    }\n");
    }
    before.push_str("}\n");
    after.push_str("}\n");
    (before, after)
}

fn corpus() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<(usize, usize, usize)>)> {
    prop::collection::vec(1usize..7, 1..6)
        .prop_flat_map(|sizes| {
            let mut next = 0;
            let bodies: Vec<Vec<String>> = sizes
                .iter()
                .map(|&n| {
                    (0..n)
                        .map(|_| {
                            next += 1;
                            format!("s{next}(v + {next});")
                        })
                        .collect()
                })
                .collect();
            let picks: Vec<_> = sizes
                .iter()
                .map(|&n| (any::<bool>(), 0..n, 1..=n))
                .collect();
            (Just(bodies), picks)
        })
        .prop_map(|(bodies, picks)| {
            let extractions = picks
                .into_iter()
                .enumerate()
                .filter(|(_, (on, _, _))| *on)
                .map(|(i, (_, start, len))| {
                    let len = len.min(bodies[i].len() - start);
                    (i, start, len)
                })
                .collect();
            (bodies, extractions)
        })
}

fn parse(src: &str) -> CodeModel {
    parse_compilation_unit(src, "P.java").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn planted_extractions_are_found_exactly((bodies, extractions) in corpus()) {
        let (before, after) = render(&bodies, &extractions);
        let (b, a) = (parse(&before), parse(&after));
        let found = detect_extract_method(&b, &a, "c");
        prop_assert_eq!(found.len(), extractions.len());
        for (inst, &(i, _, _)) in found.iter().zip(&extractions) {
            prop_assert_eq!(&inst.parent_method.signature, &format!("m{i}()"));
            prop_assert_eq!(&inst.extracted_method.signature, &format!("ext{i}()"));
            prop_assert_eq!(inst.overlap_ratio, 1.0);
        }
    }

    #[test]
    fn swapped_versions_never_report_the_same_instance((bodies, extractions) in corpus()) {
        let (before, after) = render(&bodies, &extractions);
        let (b, a) = (parse(&before), parse(&after));
        let forward = detect_extract_method(&b, &a, "c");
        let backward = detect_extract_method(&a, &b, "c");
        for f in &forward {
            prop_assert!(!backward.iter().any(|r| r.parent_method == f.parent_method
                && r.extracted_method == f.extracted_method));
        }
    }

    #[test]
    fn ratio_matches_brute_force(
        ext in prop::collection::vec(0u8..8, 1..8),
        before_parent in prop::collection::vec(0u8..8, 0..10),
        after_parent in prop::collection::vec(0u8..8, 0..10),
    ) {
        let stmt = |v: &Vec<u8>| v.iter().map(|k| format!("s{k}();")).collect::<Vec<_>>();
        let (e, bp, ap) = (stmt(&ext), stmt(&before_parent), stmt(&after_parent));
        let body = |v: &[String]| v.concat();
        let src_before = format!("class R {{ void p() {{ {} }} }}", body(&bp));
        let src_after = format!("class R {{ void p() {{ n(); {} }} void n() {{ {} }} }}", body(&ap), body(&e));
        let (b, a) = (parse(&src_before), parse(&src_after));
        let ext_set = statement_set(a.class("R").unwrap().method("n()").unwrap());
        let bp_set = statement_set(b.class("R").unwrap().method("p()").unwrap());
        let ap_set = statement_set(a.class("R").unwrap().method("p()").unwrap());
        let (ratio, _) = refscout_core::detect::overlap(&ext_set, &bp_set, &ap_set);
        prop_assert_eq!(ratio, brute_force_overlap(&e, &bp, &ap));
        let found = detect_extract_method(&b, &a, "c");
        if let Some(inst) = found.first() {
            prop_assert_eq!(inst.overlap_ratio, brute_force_overlap(&e, &bp, &ap));
        }
    }
}
