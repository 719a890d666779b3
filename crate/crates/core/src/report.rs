//! Deterministic JSON and CSV report writers.
//!
//! Floats are printed with 17 significant digits and keys are sorted, so
//! equal inputs give byte-identical files. Every number is an object
//! `{"provenance": …, "value": …}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Formula,
    Quadrature,
    Enumeration,
    SampledSup,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Formula => "formula",
            Provenance::Quadrature => "quadrature",
            Provenance::Enumeration => "enumeration",
            Provenance::SampledSup => "sampled-sup",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Null,
    Bool(bool),
    Str(String),
    Num(f64, Provenance),
    Int(i64, Provenance),
    List(Vec<Node>),
    Map(BTreeMap<String, Node>),
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

fn escape(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl Node {
    pub fn num(v: f64, p: Provenance) -> Self {
        Node::Num(v, p)
    }

    pub fn int(v: usize, p: Provenance) -> Self {
        Node::Int(v as i64, p)
    }

    pub fn str(s: impl Into<String>) -> Self {
        Node::Str(s.into())
    }

    pub fn nums(values: &[f64], p: Provenance) -> Self {
        Node::List(values.iter().map(|&v| Node::Num(v, p)).collect())
    }

    pub fn strs<S: AsRef<str>>(values: &[S]) -> Self {
        Node::List(values.iter().map(|s| Node::str(s.as_ref())).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = |n: usize| "  ".repeat(n);
        match self {
            Node::Null => out.push_str("null"),
            Node::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Node::Str(s) => out.push_str(&escape(s)),
            Node::Num(v, p) => {
                let _ = write!(out, "{{\"provenance\": \"{}\", \"value\": {}}}", p.as_str(), fmt_f64(*v));
            }
            Node::Int(v, p) => {
                let _ = write!(out, "{{\"provenance\": \"{}\", \"value\": {v}}}", p.as_str());
            }
            Node::List(items) if items.is_empty() => out.push_str("[]"),
            Node::List(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
            Node::Map(m) if m.is_empty() => out.push_str("{}"),
            Node::Map(m) => {
                out.push_str("{\n");
                for (i, (k, v)) in m.iter().enumerate() {
                    let _ = write!(out, "{}{}: ", pad(indent + 1), escape(k));
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
        }
    }
}

/// Builder for a JSON object with sorted keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section(pub BTreeMap<String, Node>);

impl Section {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, node: Node) -> &mut Self {
        self.0.insert(key.to_string(), node);
        self
    }

    pub fn num(&mut self, key: &str, v: f64, p: Provenance) -> &mut Self {
        self.set(key, Node::Num(v, p))
    }

    pub fn int(&mut self, key: &str, v: usize, p: Provenance) -> &mut Self {
        self.set(key, Node::int(v, p))
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) -> &mut Self {
        self.set(key, Node::Str(s.into()))
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.set(key, Node::Bool(b))
    }

    pub fn child(&mut self, key: &str, s: Section) -> &mut Self {
        self.set(key, s.into_node())
    }

    pub fn into_node(self) -> Node {
        Node::Map(self.0)
    }
}

/// The full report: the body is deterministic; `metadata` goes on one line
/// at the end so it can be dropped when comparing runs.
pub fn render_report(body: &Section, metadata: &Section) -> String {
    let meta = metadata.clone().into_node().render();
    let compact = meta.split_whitespace().collect::<Vec<_>>().join(" ");
    if body.0.is_empty() {
        return format!("{{\n  \"metadata\": {compact}\n}}\n");
    }
    let mut text = body.clone().into_node().render();
    text.truncate(text.trim_end().len() - 1);
    format!("{},\n  \"metadata\": {compact}\n}}\n", text.trim_end())
}

/// Removes the metadata line from a rendered report.
pub fn strip_metadata(report: &str) -> String {
    report.lines().filter(|l| !l.trim_start().starts_with("\"metadata\"")).collect::<Vec<_>>().join("\n")
}

/// Writes rows with 17-significant-digit floats; `None` cells stay empty.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| crate::Error::Io(std::io::Error::other(e)))?;
    let csv_err = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Some(v) => fmt_f64(*v).trim_matches('"').to_string(),
                None => String::new(),
            })
            .collect();
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "\"inf\"");
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -1.7e-300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rendered_report_is_valid_json() {
        let mut body = Section::new();
        let mut inner = Section::new();
        inner.num("residual", 1e-13, Provenance::SampledSup).int("count", 7, Provenance::Enumeration);
        inner.set("list", Node::nums(&[1.0, 2.0], Provenance::Formula)).set("empty", Node::List(vec![]));
        body.child("zeta", inner).text("alpha", "a \"quoted\" string").flag("passed", true);
        let mut meta = Section::new();
        meta.text("timestamp", "123");
        let text = render_report(&body, &meta);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["zeta"]["count"]["value"], 7);
        assert_eq!(v["zeta"]["residual"]["provenance"], "sampled-sup");
        assert_eq!(v["metadata"]["timestamp"], "123");
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["alpha", "metadata", "passed", "zeta"]);
        let stripped = strip_metadata(&text);
        assert!(!stripped.contains("timestamp") && stripped.contains("zeta"));
    }

    #[test]
    fn csv_cells() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &["n", "x"], &[vec![Some(1.0), None], vec![Some(2.0), Some(0.5)]]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "n,x\n1.0000000000000000e0,\n2.0000000000000000e0,5.0000000000000000e-1\n");
    }

    fn leaf() -> impl proptest::strategy::Strategy<Value = Node> {
        use proptest::prelude::*;
        let prov = prop_oneof![
            Just(Provenance::Formula),
            Just(Provenance::Quadrature),
            Just(Provenance::Enumeration),
            Just(Provenance::SampledSup)
        ];
        prop_oneof![
            (proptest::num::f64::ANY, prov.clone()).prop_map(|(v, p)| Node::Num(v, p)),
            (0usize..1_000_000, prov).prop_map(|(v, p)| Node::int(v, p)),
            "[a-z ]{0,8}".prop_map(Node::Str),
            any::<bool>().prop_map(Node::Bool),
        ]
    }

    fn tree() -> impl proptest::strategy::Strategy<Value = Node> {
        use proptest::prelude::*;
        leaf().prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..4).prop_map(Node::List),
                proptest::collection::btree_map("[a-z]{1,6}", inner, 0..4).prop_map(Node::Map),
            ]
        })
    }

    fn numbers_have_provenance(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(_) => false,
            serde_json::Value::Array(a) => a.iter().all(numbers_have_provenance),
            serde_json::Value::Object(o) if o.contains_key("value") && o.contains_key("provenance") => {
                ["formula", "quadrature", "enumeration", "sampled-sup"].contains(&o["provenance"].as_str().unwrap_or(""))
            }
            serde_json::Value::Object(o) => o.values().all(numbers_have_provenance),
            _ => true,
        }
    }

    proptest::proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            proptest::prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn every_number_carries_provenance(body in proptest::collection::btree_map("[a-z]{1,6}", tree(), 0..5)) {
            let body = Section(body);
            let mut meta = Section::new();
            meta.text("timestamp", "0");
            let text = render_report(&body, &meta);
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            proptest::prop_assert!(numbers_have_provenance(&v));
            proptest::prop_assert_eq!(render_report(&body, &meta), text.clone());
            proptest::prop_assert!(!strip_metadata(&text).contains("timestamp"));
        }
    }
}
