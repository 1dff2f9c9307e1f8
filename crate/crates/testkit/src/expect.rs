//! Reader for `.expected` metric files.
//!
//! ```text
//! [class Foo]
//! Loc = 10
//! TCC = 1/3
//!
//! [method Foo#bar(int)]
//! ReturnQty = 1
//! ```
//!
//! Features that are not listed are expected to be zero.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Class(String),
    /// `(class qualified name, method signature)`
    Method(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub target: Target,
    pub values: BTreeMap<String, f64>,
}

impl Section {
    pub fn get(&self, feature: &str) -> f64 {
        self.values.get(feature).copied().unwrap_or(0.0)
    }
}

fn parse_value(text: &str) -> Result<f64, String> {
    match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{text}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{text}: {e}"))?;
            Ok(a / b)
        }
        None => text.trim().parse().map_err(|e| format!("{text}: {e}")),
    }
}

pub fn parse_expectations(text: &str) -> Result<Vec<Section>, String> {
    let mut sections: Vec<Section> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let target = if let Some(name) = header.strip_prefix("class ") {
                Target::Class(name.trim().to_string())
            } else if let Some(rest) = header.strip_prefix("method ") {
                let (class, sig) = rest.split_once('#').ok_or_else(|| format!("line {}: missing '#'", n + 1))?;
                Target::Method(class.trim().to_string(), sig.trim().to_string())
            } else {
                return Err(format!("line {}: unknown section {header}", n + 1));
            };
            sections.push(Section { target, values: BTreeMap::new() });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let section = sections.last_mut().ok_or_else(|| format!("line {}: value outside a section", n + 1))?;
        section.values.insert(key.trim().to_string(), parse_value(value)?);
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_sections_and_fractions() {
        let s = parse_expectations("# c\n[class A]\nLoc = 2\nTCC = 1/3\n\n[method A#f(int)]\nWmc = 1\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].get("TCC"), 1.0 / 3.0);
        assert_eq!(s[0].get("Cbo"), 0.0);
        assert_eq!(s[1].target, Target::Method("A".into(), "f(int)".into()));
    }
}
