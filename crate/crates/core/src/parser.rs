//! Text formats: Steenrod expressions and JSON module/algebra documents.
//!
//! Expression grammar, with whitespace allowed between tokens but not inside
//! `Sq<k>`:
//!
//! ```text
//! expr  := "0" | term { "+" term }
//! term  := "1" | sqop { sqop }
//! sqop  := "Sq" integer        (decimal, >= 1)
//! ```
//!
//! `"0"` is the empty sum, so every printed [`AdmissibleSum`] parses back.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::modules::{
    make_algebra, make_finite, AlgebraDescription, FiniteUnstableAlgebra, FiniteUnstableModule, ModuleDescription,
    ModuleElement, ModuleError, ProductTable, StructuredModule,
};
use crate::steenrod::{adem_normalize, AdmissibleSum, SteenrodExpression};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

/// Largest accepted index, so that degrees of parsed words cannot overflow.
pub const MAX_INDEX: usize = u32::MAX as usize;

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos == self.text.len()
    }

    fn error(&self, expected: &str) -> ParseError {
        let found: String = match self.rest().split_whitespace().next() {
            None => "end of input".into(),
            Some(tok) => format!("{:?}", tok.chars().take(16).collect::<String>()),
        };
        ParseError {
            position: self.pos,
            expected: expected.into(),
            found,
        }
    }

    /// A decimal integer immediately at the cursor.
    fn integer(&mut self) -> Result<usize, ParseError> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("a decimal index"));
        }
        let text = &self.rest()[..digits];
        let value: usize = text
            .parse()
            .ok()
            .filter(|&v| v <= MAX_INDEX)
            .ok_or_else(|| ParseError {
                position: self.pos,
                expected: format!("an index at most {MAX_INDEX}"),
                found: format!("{text:?}"),
            })?;
        self.pos += digits;
        Ok(value)
    }

    fn sqop(&mut self) -> Result<usize, ParseError> {
        if !self.rest().starts_with("Sq") {
            return Err(self.error("\"Sq\""));
        }
        let start = self.pos;
        self.pos += 2;
        let i = self.integer()?;
        if i == 0 {
            return Err(ParseError {
                position: start,
                expected: "an index >= 1 (the unit is written \"1\")".into(),
                found: "\"Sq0\"".into(),
            });
        }
        Ok(i)
    }

    /// A term ends at "+" or at the end of input.
    fn term(&mut self) -> Result<Vec<usize>, ParseError> {
        self.skip_ws();
        if let Some(after) = self.rest().strip_prefix('1') {
            if !after.starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
                return Ok(Vec::new());
            }
        }
        let mut word = vec![self.sqop()?];
        loop {
            let before = self.pos;
            self.skip_ws();
            if self.at_end() || self.rest().starts_with('+') {
                return Ok(word);
            }
            if self.pos == before {
                // "Sq2Sq1": sqops must be separated
                return Err(self.error("whitespace, \"+\" or end of input"));
            }
            word.push(self.sqop()?);
        }
    }
}

/// Parses an expression; indices are not required to be admissible.
pub fn parse_op(text: &str) -> Result<SteenrodExpression, ParseError> {
    let mut c = Cursor { text, pos: 0 };
    c.skip_ws();
    if let Some(after) = c.rest().strip_prefix('0') {
        if after.trim().is_empty() {
            return Ok(SteenrodExpression::new(Vec::new()).expect("empty"));
        }
    }
    let mut terms = vec![c.term()?];
    loop {
        c.skip_ws();
        if c.at_end() {
            break;
        }
        if !c.rest().starts_with('+') {
            return Err(c.error("\"+\" or end of input"));
        }
        c.pos += 1;
        terms.push(c.term()?);
    }
    Ok(SteenrodExpression::new(terms).expect("indices checked by the parser"))
}

/// Parses and normalizes.
pub fn parse_sum(text: &str) -> Result<AdmissibleSum, ParseError> {
    Ok(adem_normalize(&parse_op(text)?))
}

/// A problem in a JSON document, located by a path such as
/// `ops.Sq2[1][0]`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Module(#[from] ModuleError),
}

fn schema(path: &str, message: impl fmt::Display) -> DocumentError {
    DocumentError::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// A loaded document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Module(FiniteUnstableModule),
    Algebra(FiniteUnstableAlgebra),
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, DocumentError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, DocumentError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn natural(v: &Value, path: &str) -> Result<usize, DocumentError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn bits(v: &Value, len: usize, path: &str) -> Result<Gf2Vector, DocumentError> {
    let a = array(v, path)?;
    if a.len() != len {
        return Err(schema(path, format!("expected {len} entries, found {}", a.len())));
    }
    let mut out = Gf2Vector::zeros(len);
    for (k, b) in a.iter().enumerate() {
        match b.as_u64() {
            Some(0) => {}
            Some(1) => out.set(k, true),
            _ => return Err(schema(&format!("{path}[{k}]"), "expected 0 or 1")),
        }
    }
    Ok(out)
}

fn matrix(v: &Value, rows: usize, cols: usize, path: &str) -> Result<Gf2Matrix, DocumentError> {
    let a = array(v, path)?;
    if a.is_empty() {
        // shorthand for a zero block of any shape
        return Ok(Gf2Matrix::zeros(rows, cols));
    }
    if a.len() != rows {
        return Err(schema(path, format!("expected {rows} rows, found {}", a.len())));
    }
    let rows: Vec<Gf2Vector> = a
        .iter()
        .enumerate()
        .map(|(r, row)| bits(row, cols, &format!("{path}[{r}]")))
        .collect::<Result<_, _>>()?;
    Ok(Gf2Matrix::from_rows(cols, rows).expect("row lengths checked"))
}

fn pair_key(key: &str, path: &str) -> Result<(usize, usize), DocumentError> {
    let parse = |s: &str| s.trim().parse::<usize>().ok();
    match key.split_once(',') {
        Some((a, b)) => match (parse(a), parse(b)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(schema(path, format!("key {key:?} is not of the form \"d,i\""))),
        },
        None => Err(schema(path, format!("key {key:?} is not of the form \"d,i\""))),
    }
}

const MODULE_FIELDS: [&str; 6] = ["name", "top_degree", "dims", "ops", "products", "labels"];

fn module_description(root: &Map<String, Value>) -> Result<ModuleDescription, DocumentError> {
    for key in root.keys() {
        if !MODULE_FIELDS.contains(&key.as_str()) {
            return Err(schema(key, "unknown field"));
        }
    }
    let name = match root.get("name") {
        None => "M".to_string(),
        Some(v) => v.as_str().ok_or_else(|| schema("name", "expected a string"))?.to_string(),
    };
    let dims: Vec<usize> = array(root.get("dims").ok_or_else(|| schema("dims", "missing field"))?, "dims")?
        .iter()
        .enumerate()
        .map(|(d, v)| natural(v, &format!("dims[{d}]")))
        .collect::<Result<_, _>>()?;
    if dims.is_empty() {
        return Err(schema("dims", "expected at least degree 0"));
    }
    let top = dims.len() - 1;
    if let Some(t) = root.get("top_degree") {
        let t = natural(t, "top_degree")?;
        if t != top {
            return Err(schema("top_degree", format!("is {t} but dims has length {}", dims.len())));
        }
    }
    let mut ops = BTreeMap::new();
    if let Some(v) = root.get("ops") {
        for (key, blocks) in object(v, "ops")? {
            let path = format!("ops.{key}");
            let i = key
                .strip_prefix("Sq")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= top)
                .ok_or_else(|| schema(&path, format!("expected a key Sq<i> with 1 <= i <= {top}")))?;
            let blocks = array(blocks, &path)?;
            if blocks.len() > top + 1 - i {
                return Err(schema(
                    &path,
                    format!("at most {} per-degree matrices (degrees 0..={})", top + 1 - i, top - i),
                ));
            }
            let mut per_degree = BTreeMap::new();
            for (d, m) in blocks.iter().enumerate() {
                let m = matrix(m, dims[d + i], dims[d], &format!("{path}[{d}]"))?;
                if !m.is_zero() {
                    per_degree.insert(d, m);
                }
            }
            if !per_degree.is_empty() {
                ops.insert(i, per_degree);
            }
        }
    }
    let mut labels = BTreeMap::new();
    if let Some(v) = root.get("labels") {
        for (key, label) in object(v, "labels")? {
            let path = format!("labels.{key}");
            let (d, i) = pair_key(key, &path)?;
            if d > top || i >= dims[d] {
                return Err(schema(&path, "no such basis element"));
            }
            let s = label.as_str().ok_or_else(|| schema(&path, "expected a string"))?;
            labels.insert((d, i), s.to_string());
        }
    }
    Ok(ModuleDescription { name, dims, ops, labels })
}

fn products(v: &Value, dims: &[usize]) -> Result<ProductTable, DocumentError> {
    let mut out = BTreeMap::new();
    let top = dims.len() - 1;
    for (key, table) in object(v, "products")? {
        let path = format!("products.{key}");
        let (d1, d2) = pair_key(key, &path)?;
        if d1 + d2 > top {
            return Err(schema(&path, format!("degree {} is above the top degree {top}", d1 + d2)));
        }
        let rows = array(table, &path)?;
        if rows.len() != dims[d1] {
            return Err(schema(&path, format!("expected {} rows, found {}", dims[d1], rows.len())));
        }
        let mut t = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row_path = format!("{path}[{i}]");
            let entries = array(row, &row_path)?;
            if entries.len() != dims[d2] {
                return Err(schema(&row_path, format!("expected {} entries, found {}", dims[d2], entries.len())));
            }
            t.push(
                entries
                    .iter()
                    .enumerate()
                    .map(|(j, e)| bits(e, dims[d1 + d2], &format!("{row_path}[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        out.insert((d1, d2), t);
    }
    Ok(out)
}

fn parse_json(text: &str) -> Result<Value, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Loads a finite module, or an algebra when `products` is present; all
/// constructor validations run.
pub fn load_module(text: &str) -> Result<Document, DocumentError> {
    let root = parse_json(text)?;
    document_from_value(&root)
}

fn document_from_value(root: &Value) -> Result<Document, DocumentError> {
    let root = object(root, "$")?;
    let module = module_description(root)?;
    match root.get("products") {
        Some(p) => {
            let products = products(p, &module.dims)?;
            Ok(Document::Algebra(make_algebra(&AlgebraDescription { module, products })?))
        }
        None => Ok(Document::Module(make_finite(&module)?)),
    }
}

fn bits_json(v: &Gf2Vector) -> Value {
    Value::Array(v.to_bits().into_iter().map(Value::from).collect())
}

fn module_json(m: &FiniteUnstableModule) -> Map<String, Value> {
    let desc = m.description();
    let top = m.top_degree();
    let mut ops = Map::new();
    for (&i, blocks) in &desc.ops {
        let per_degree: Vec<Value> = (0..=top - i)
            .map(|d| {
                let block = blocks.get(&d).cloned().unwrap_or_else(|| Gf2Matrix::zeros(m.dim(d + i), m.dim(d)));
                Value::Array(block.row_vectors().iter().map(bits_json).collect())
            })
            .collect();
        ops.insert(format!("Sq{i}"), Value::Array(per_degree));
    }
    let mut out = Map::new();
    out.insert("name".into(), json!(desc.name));
    out.insert("top_degree".into(), json!(top));
    out.insert("dims".into(), json!(desc.dims));
    out.insert("ops".into(), Value::Object(ops));
    if !desc.labels.is_empty() {
        let labels: Map<String, Value> = desc
            .labels
            .iter()
            .map(|(&(d, i), s)| (format!("{d},{i}"), json!(s)))
            .collect();
        out.insert("labels".into(), Value::Object(labels));
    }
    out
}

/// The canonical document: nonzero operations only, each listing every
/// source degree; nonzero product tables only.
pub fn save_module(doc: &Document) -> String {
    let value = match doc {
        Document::Module(m) => Value::Object(module_json(m)),
        Document::Algebra(a) => {
            let mut out = module_json(a.module());
            let desc = a.description();
            let products: Map<String, Value> = desc
                .products
                .iter()
                .filter(|(&(d1, d2), _)| d1 > 0 && d2 > 0)
                .map(|(&(d1, d2), t)| {
                    let rows: Vec<Value> = t.iter().map(|row| Value::Array(row.iter().map(bits_json).collect())).collect();
                    (format!("{d1},{d2}"), Value::Array(rows))
                })
                .collect();
            let labels = out.remove("labels");
            out.insert("products".into(), Value::Object(products));
            if let Some(l) = labels {
                out.insert("labels".into(), l);
            }
            Value::Object(out)
        }
    };
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

/// A module of any structured shape. Besides a finite document (the
/// default), the `shape` field selects `"free"` (`n`, `bound`),
/// `"rp_infinity"`, `"suspension"` (`s`, `inner`) or `"tensor"` (`left`,
/// `right`).
pub fn load_structured(text: &str) -> Result<StructuredModule, DocumentError> {
    structured_from_value(&parse_json(text)?, "$")
}

fn structured_from_value(v: &Value, path: &str) -> Result<StructuredModule, DocumentError> {
    let root = object(v, path)?;
    let Some(shape) = root.get("shape") else {
        return match document_from_value(v)? {
            Document::Module(m) => Ok(m.into()),
            Document::Algebra(a) => Ok(a.module().clone().into()),
        };
    };
    let field = |name: &str| {
        root.get(name)
            .ok_or_else(|| schema(&format!("{path}.{name}"), "missing field"))
    };
    let shape_path = format!("{path}.shape");
    let expect_fields = |allowed: &[&str]| -> Result<(), DocumentError> {
        for key in root.keys() {
            if key != "shape" && !allowed.contains(&key.as_str()) {
                return Err(schema(&format!("{path}.{key}"), "unknown field"));
            }
        }
        Ok(())
    };
    match shape.as_str() {
        Some("finite") => {
            let mut inner = root.clone();
            inner.remove("shape");
            structured_from_value(&Value::Object(inner), path)
        }
        Some("free") => {
            expect_fields(&["n", "bound"])?;
            let n = natural(field("n")?, &format!("{path}.n"))?;
            let bound = natural(field("bound")?, &format!("{path}.bound"))?;
            if n == 0 {
                return Err(schema(&format!("{path}.n"), "the generator degree must be positive"));
            }
            Ok(StructuredModule::free(n, bound))
        }
        Some("rp_infinity") => {
            expect_fields(&[])?;
            Ok(StructuredModule::RpInfinity)
        }
        Some("suspension") => {
            expect_fields(&["s", "inner"])?;
            let s = natural(field("s")?, &format!("{path}.s"))?;
            if s == 0 {
                return Err(schema(&format!("{path}.s"), "expected s >= 1"));
            }
            Ok(structured_from_value(field("inner")?, &format!("{path}.inner"))?.suspend(s))
        }
        Some("tensor") => {
            expect_fields(&["left", "right"])?;
            let left = structured_from_value(field("left")?, &format!("{path}.left"))?;
            let right = structured_from_value(field("right")?, &format!("{path}.right"))?;
            Ok(left.tensor(right))
        }
        _ => Err(schema(
            &shape_path,
            "expected one of \"finite\", \"free\", \"rp_infinity\", \"suspension\", \"tensor\"",
        )),
    }
}

/// Parses an element `"d:i,j + d':k"` of `m`: basis indices per degree;
/// `"0"` is zero.
pub fn parse_element(text: &str, m: &StructuredModule) -> Result<ModuleElement, ParseError> {
    let mut out = ModuleElement::zero();
    if text.trim() == "0" {
        return Ok(out);
    }
    let mut offset = 0;
    for part in text.split('+') {
        let start = offset + part.len() - part.trim_start().len();
        offset += part.len() + 1;
        let err = |expected: String| ParseError {
            position: start,
            expected,
            found: format!("{:?}", part.trim()),
        };
        let (d, idx) = part
            .trim()
            .split_once(':')
            .ok_or_else(|| err("\"degree:index,...\"".into()))?;
        let d: usize = d.trim().parse().map_err(|_| err("a decimal degree".into()))?;
        let dim = m.dim(d).map_err(|e| err(format!("a degree inside the module ({e})")))?;
        let mut v = Gf2Vector::zeros(dim);
        for s in idx.split(',') {
            let i: usize = s.trim().parse().map_err(|_| err("comma-separated decimal indices".into()))?;
            if i >= dim {
                return Err(err(format!("indices below {dim} in degree {d}")));
            }
            v.flip(i);
        }
        out.add_part(d, &v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::{full_basis, normalize_word};

    #[test]
    fn grammar_examples() {
        assert_eq!(parse_op("Sq4 Sq4").unwrap().terms(), &[vec![4, 4]]);
        assert_eq!(parse_op("Sq3 Sq1 + Sq4").unwrap().terms(), &[vec![3, 1], vec![4]]);
        assert_eq!(parse_op(" 1 +Sq2").unwrap().terms(), &[vec![], vec![2]]);
        assert_eq!(parse_op("0").unwrap().terms().len(), 0);
    }

    #[test]
    fn rejections_carry_positions() {
        let e = parse_op("Sq0").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse_op("Sq2 + Sq").unwrap_err();
        assert_eq!(e.position, 8);
        let e = parse_op("Sq2Sq1").unwrap_err();
        assert_eq!(e.position, 3);
        let e = parse_op("Sq 2").unwrap_err();
        assert_eq!(e.position, 2);
        for bad in ["", "+", "Sq1 +", "2", "11", "sq1", "Sq1 * Sq2", "Sq99999999999999999999999", "0 + Sq1"] {
            let e = parse_op(bad).unwrap_err();
            assert!(e.position <= bad.len(), "{bad}");
        }
    }

    #[test]
    fn printing_round_trips() {
        for d in 0..=12 {
            for m in full_basis(d) {
                let s = AdmissibleSum::from(m);
                assert_eq!(parse_sum(&s.to_string()).unwrap(), s);
            }
        }
        let x = normalize_word(&[4, 4]);
        assert_eq!(x.to_string(), "Sq7 Sq1 + Sq6 Sq2");
        assert_eq!(parse_sum("Sq4 Sq4").unwrap(), x);
        assert_eq!(parse_sum(&AdmissibleSum::zero().to_string()).unwrap(), AdmissibleSum::zero());
    }

    const SIGMA: &str = r#"{"name": "S1", "dims": [0, 1]}"#;
    const RP2: &str = r#"{"name": "RP2", "top_degree": 2, "dims": [0, 1, 1],
        "ops": {"Sq1": [[], [[1]]]}}"#;

    #[test]
    fn loads_documented_examples() {
        match load_module(SIGMA).unwrap() {
            Document::Module(m) => assert_eq!(m.dims(), &[0, 1]),
            _ => panic!(),
        }
        match load_module(RP2).unwrap() {
            Document::Module(m) => assert_eq!(m.sq_block(1, 1), Gf2Matrix::identity(1)),
            _ => panic!(),
        }
    }

    #[test]
    fn adem_failure_names_the_pair() {
        // Sq2 Sq2 x != 0 = Sq3 Sq1 x for x in degree 2
        let doc = r#"{"dims": [0, 0, 1, 0, 1, 0, 1],
            "ops": {"Sq2": [[], [], [[1]], [], [[1]]]}}"#;
        let err = load_module(doc).unwrap_err();
        assert!(err.to_string().contains("Sq2 Sq2"), "{err}");
    }

    #[test]
    fn schema_errors_have_paths() {
        let cases = [
            (r#"{"dims": [0, 1], "ops": {"Sq1": [[[1, 0]]]}}"#, "ops.Sq1[0][0]"),
            (r#"{"dims": [0, 1, 1], "ops": {"Sq1": [[], [[2]]]}}"#, "ops.Sq1[1][0][0]"),
            (r#"{"dims": [0, 1], "ops": {"Sq3": []}}"#, "ops.Sq3"),
            (r#"{"dims": [1, 1], "top_degree": 4}"#, "top_degree"),
            (r#"{"dim": [1]}"#, "dim"),
            (r#"{"dims": [1, 1], "labels": {"1,1": "x"}}"#, "labels.1,1"),
        ];
        for (doc, path) in cases {
            match load_module(doc).unwrap_err() {
                DocumentError::Schema { path: p, .. } => assert_eq!(p, path, "{doc}"),
                other => panic!("{doc}: {other}"),
            }
        }
        assert!(matches!(load_module("{").unwrap_err(), DocumentError::Json { .. }));
    }

    #[test]
    fn save_load_is_identity() {
        let docs = [
            Document::Module(FiniteUnstableModule::sphere(2)),
            Document::Algebra(FiniteUnstableAlgebra::truncated_polynomial(1, 4).unwrap()),
            Document::Algebra(
                FiniteUnstableAlgebra::exterior(1)
                    .tensor(&FiniteUnstableAlgebra::truncated_polynomial(1, 3).unwrap())
                    .unwrap(),
            ),
        ];
        for doc in docs {
            let text = save_module(&doc);
            let back = load_module(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(save_module(&back), text);
        }
    }

    #[test]
    fn structured_shapes() {
        let m = load_structured(
            r#"{"shape": "tensor", "left": {"dims": [0, 0, 2]},
                "right": {"shape": "free", "n": 1, "bound": 64}}"#,
        )
        .unwrap();
        assert_eq!(m.dim(6).unwrap(), 2);
        let rp = load_structured(r#"{"shape": "rp_infinity"}"#).unwrap();
        assert_eq!(rp, StructuredModule::RpInfinity);
        let e = load_structured(r#"{"shape": "suspension", "s": 0, "inner": {"dims": [1]}}"#).unwrap_err();
        assert!(matches!(e, DocumentError::Schema { ref path, .. } if path == "$.s"));
    }

    #[test]
    fn elements() {
        let m = StructuredModule::free(2, 8);
        let x = parse_element("2:0 + 5:0", &m).unwrap();
        assert_eq!(x.parts().len(), 2);
        assert!(parse_element("0", &m).unwrap().is_zero());
        assert_eq!(parse_element("2:0 + x", &m).unwrap_err().position, 6);
        assert_eq!(parse_element("2:1", &m).unwrap_err().position, 0);
        assert!(parse_element("9:0", &m).is_err());
    }
}
