//! Text formats: JSON algebra, extension, Fredholm and homotopy files, and
//! element and form literals.
//!
//! An algebra is either a builtin name (`field`, `dual`, `m2`, `upper2`,
//! `truncpoly3`, `null1`, `laurent6`, `cyclic4`, `zero`) or a record
//!
//! ```json
//! { "basis": ["1", "eps"], "unit": "1",
//!   "table": [{"left": "1", "right": "eps", "result": [{"basis": "eps", "coeff": "1"}]}] }
//! ```
//!
//! Element literals are sums of `coeff*label` terms such as `E11 - 1/2*E12`
//! or `(1+i)*u^-1`; form literals chain factors with `.`, as in
//! `2*a.d(b).d(c) - d(b).d(c)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{self, make_split_extension, AlgebraElement, BasedAlgebra, LinearMapT, SplitExtension};
use crate::chern::{matrix_to_vec, FredholmData};
use crate::error::{Error, Result};
use crate::forms::{FormVector, Monomial};
use crate::homology::homotopy::PolynomialHomotopy;
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub basis: String,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub left: String,
    pub right: String,
    pub result: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraRecord {
    pub basis: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default)]
    pub table: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<BTreeMap<String, i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Builtin(String),
    Record(AlgebraRecord),
}

/// Maps given by the image of each basis label as an element literal of the
/// codomain; missing labels map to zero.
pub type MapRecord = BTreeMap<String, String>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionRecord {
    #[serde(rename = "K")]
    pub k: AlgebraSpec,
    #[serde(rename = "E")]
    pub e: AlgebraSpec,
    #[serde(rename = "Q")]
    pub q: AlgebraSpec,
    pub i: MapRecord,
    pub p: MapRecord,
    pub s: MapRecord,
}

/// Matrices are lists of rows of scalar strings.
pub type MatrixRecord = Vec<Vec<String>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FredholmRecord {
    pub algebra: AlgebraSpec,
    #[serde(rename = "F")]
    pub f: MatrixRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MatrixRecord>,
    pub phi: BTreeMap<String, MatrixRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyRecord {
    pub source: AlgebraSpec,
    pub target: AlgebraSpec,
    /// Coefficient maps of `t⁰, t¹, …`.
    pub coeffs: Vec<MapRecord>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

fn context(what: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse { line, column, message } => Error::Parse { line, column, message: format!("{what}: {message}") },
        Error::Malformed(m) => Error::Malformed(format!("{what}: {m}")),
        Error::Invalid(m) => Error::Invalid(format!("{what}: {m}")),
        other => other,
    }
}

fn parse_count(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix).and_then(|r| r.parse().ok()).filter(|&n| n >= 1)
}

/// A builtin algebra by name.
pub fn builtin_algebra(name: &str) -> Result<BasedAlgebra> {
    let a = match name {
        "field" | "Q" | "c" => algebra::field(),
        "dual" => algebra::dual_numbers(),
        "zero" => algebra::zero_algebra(),
        _ => {
            if let Some(n) = parse_count(name, "upper") {
                algebra::upper_triangular(n)
            } else if let Some(n) = parse_count(name, "truncpoly") {
                algebra::truncated_poly(n)
            } else if let Some(n) = parse_count(name, "null") {
                algebra::null_algebra(n)
            } else if let Some(n) = parse_count(name, "laurent") {
                algebra::laurent_window(n)
            } else if let Some(n) = parse_count(name, "cyclic") {
                algebra::cyclic_group_algebra(n)
            } else if let Some(n) = parse_count(name, "m") {
                algebra::matrix_algebra(n)
            } else {
                return Err(Error::invalid(format!("unknown builtin algebra `{name}`")));
            }
        }
    };
    Ok(a)
}

fn label_index(a: &BasedAlgebra, label: &str) -> Result<usize> {
    a.index_of(label).ok_or_else(|| Error::Malformed(format!("unknown basis label `{label}`")))
}

fn scalar(s: &str) -> Result<Scalar> {
    s.parse()
}

fn algebra_from_record(r: &AlgebraRecord) -> Result<BasedAlgebra> {
    let labels = r.basis.clone();
    let probe = BasedAlgebra::new(labels.clone(), Vec::new(), None, None)?;
    let unit = r.unit.as_deref().map(|u| label_index(&probe, u)).transpose().map_err(context("unit"))?;
    let window = match &r.window {
        None => None,
        Some(w) => {
            for key in w.keys() {
                label_index(&probe, key).map_err(context("window"))?;
            }
            Some(
                labels
                    .iter()
                    .map(|l| w.get(l).copied().ok_or_else(|| Error::Malformed(format!("window: no degree for `{l}`"))))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
    };
    let mut entries = Vec::with_capacity(r.table.len());
    for (k, entry) in r.table.iter().enumerate() {
        let ctx = format!("table[{k}]");
        let i = label_index(&probe, &entry.left).map_err(context(&ctx))?;
        let j = label_index(&probe, &entry.right).map_err(context(&ctx))?;
        let mut v = SparseVec::new();
        for t in &entry.result {
            let b = label_index(&probe, &t.basis).map_err(context(&ctx))?;
            v = v.axpy(&scalar(&t.coeff).map_err(context(&ctx))?, &SparseVec::unit(b));
        }
        entries.push((i, j, v));
    }
    BasedAlgebra::new(labels, entries, unit, window)
}

pub fn algebra_from_spec(spec: &AlgebraSpec) -> Result<BasedAlgebra> {
    match spec {
        AlgebraSpec::Builtin(name) => builtin_algebra(name),
        AlgebraSpec::Record(r) => algebra_from_record(r),
    }
}

/// Parses an algebra file. Table consistency is left to `validate_algebra`.
pub fn parse_algebra(text: &str) -> Result<BasedAlgebra> {
    algebra_from_spec(&from_json(text)?)
}

pub fn algebra_record(a: &BasedAlgebra) -> AlgebraRecord {
    let label = |i: usize| a.label(i).to_string();
    let mut table = Vec::new();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let Ok(v) = a.basis_product(i, j) else { continue };
            if v.is_zero() {
                continue;
            }
            let result = v.iter().map(|(k, c)| TermRecord { basis: label(*k), coeff: c.to_string() }).collect();
            table.push(TableEntry { left: label(i), right: label(j), result });
        }
    }
    AlgebraRecord {
        basis: a.labels().to_vec(),
        unit: a.unit().map(label),
        table,
        window: a.window().map(|w| (0..a.dim()).map(|i| (label(i), w[i])).collect()),
    }
}

/// Serializes an algebra to the file format.
pub fn algebra_to_json(a: &BasedAlgebra) -> String {
    serde_json::to_string_pretty(&algebra_record(a)).expect("algebra records serialize")
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { text, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let column = self.text[..self.pos].chars().count() + 1;
        Error::Parse { line: 1, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    /// A maximal run of characters other than separators; a `-` directly
    /// after `^` belongs to the token.
    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let mut prev = None;
        while let Some(c) = self.peek() {
            let sep = matches!(c, '+' | '*' | '.' | '(' | ')') || c.is_whitespace() || (c == '-' && prev != Some('^'));
            if sep {
                break;
            }
            prev = Some(c);
            self.pos += c.len_utf8();
        }
        &self.text[start..self.pos]
    }

    /// Text up to the matching `)`.
    fn parenthesized(&mut self) -> Result<&'a str> {
        let start = self.pos;
        match self.text[start..].find(')') {
            Some(k) => {
                self.pos = start + k + 1;
                Ok(&self.text[start..start + k])
            }
            None => Err(self.error("missing `)`")),
        }
    }
}

/// Splits off an optional `coeff*` prefix; complex coefficients must be
/// parenthesized.
fn coefficient(cur: &mut Cursor) -> Result<Scalar> {
    let save = cur.pos;
    cur.skip_ws();
    let at = cur.pos;
    let text = if cur.eat("(") {
        let inner = cur.parenthesized()?;
        if !cur.eat("*") {
            cur.pos = at;
            return Err(cur.error("expected `*` after a parenthesized coefficient"));
        }
        inner
    } else {
        let t = cur.token();
        if !cur.eat("*") {
            cur.pos = save;
            return Ok(Scalar::ONE);
        }
        return t.parse().map_err(|_| {
            cur.pos = at;
            cur.error(format!("bad coefficient `{t}`"))
        });
    };
    text.parse().map_err(|_| {
        cur.pos = at;
        cur.error(format!("bad coefficient `{text}`"))
    })
}

fn label_at(cur: &mut Cursor, a: &BasedAlgebra) -> Result<usize> {
    cur.skip_ws();
    let at = cur.pos;
    let t = cur.token();
    if t.is_empty() {
        return Err(cur.error("expected a basis label"));
    }
    a.index_of(t).ok_or_else(|| {
        cur.pos = at;
        cur.error(format!("unknown basis label `{t}`"))
    })
}

/// Parses `±term ± term …`, calling `term` after each sign and coefficient.
fn signed_sum<T>(
    text: &str,
    mut term: impl FnMut(&mut Cursor) -> Result<T>,
    mut add: impl FnMut(T, Scalar),
) -> Result<()> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Err(cur.error("empty literal"));
    }
    let mut first = true;
    loop {
        let mut sign = Scalar::ONE;
        if cur.eat("-") {
            sign = -Scalar::ONE;
        } else if !cur.eat("+") && !first {
            return Err(cur.error("expected `+` or `-`"));
        }
        first = false;
        let c = coefficient(&mut cur)?;
        let t = term(&mut cur)?;
        add(t, sign * c);
        if cur.at_end() {
            return Ok(());
        }
    }
}

/// Parses an element literal such as `E11 - 1/2*E12` or `0`.
pub fn parse_element(a: &BasedAlgebra, text: &str) -> Result<AlgebraElement> {
    if text.trim() == "0" && a.index_of("0").is_none() {
        return Ok(SparseVec::new());
    }
    let mut out = SparseVec::new();
    signed_sum(text, |cur| label_at(cur, a), |i, c| out = out.axpy(&c, &SparseVec::unit(i)))?;
    Ok(out)
}

/// Parses a form literal such as `a.d(b).d(c) + 2*d(b)`; `1` stands for the
/// formal unit when `1` is not a basis label.
pub fn parse_form(a: &BasedAlgebra, text: &str) -> Result<FormVector> {
    let mut out = FormVector::zero();
    let monomial = |cur: &mut Cursor| -> Result<Monomial> {
        let mut lead = None;
        let mut tail = Vec::new();
        let mut first = true;
        loop {
            if cur.eat("d(") {
                tail.push(label_at(cur, a)?);
                if !cur.eat(")") {
                    return Err(cur.error("missing `)`"));
                }
            } else if first {
                cur.skip_ws();
                let at = cur.pos;
                let t = cur.token();
                if t == "1" && a.index_of("1").is_none() {
                    lead = None;
                } else {
                    cur.pos = at;
                    lead = Some(label_at(cur, a)?);
                }
            } else {
                return Err(cur.error("expected `d(…)`"));
            }
            first = false;
            if !cur.eat(".") {
                return Ok(Monomial::new(lead, tail));
            }
        }
    };
    signed_sum(text, monomial, |m, c| out.add_term(m, &c))?;
    Ok(out)
}

fn map_from_record(src: &BasedAlgebra, dst: &BasedAlgebra, r: &MapRecord) -> Result<LinearMapT> {
    let mut images = vec![SparseVec::new(); src.dim()];
    for (label, lit) in r {
        let i = label_index(src, label)?;
        images[i] = parse_element(dst, lit).map_err(context(label))?;
    }
    LinearMapT::new(src.dim(), dst.dim(), images)
}

pub fn parse_extension(text: &str) -> Result<SplitExtension> {
    let r: ExtensionRecord = from_json(text)?;
    let k = algebra_from_spec(&r.k).map_err(context("K"))?;
    let e = algebra_from_spec(&r.e).map_err(context("E"))?;
    let q = algebra_from_spec(&r.q).map_err(context("Q"))?;
    let i = map_from_record(&k, &e, &r.i).map_err(context("i"))?;
    let p = map_from_record(&e, &q, &r.p).map_err(context("p"))?;
    let s = map_from_record(&q, &e, &r.s).map_err(context("s"))?;
    make_split_extension(k, e, q, i, p, s)
}

fn matrix_from_record(r: &MatrixRecord, n: Option<usize>) -> Result<SparseMatrix> {
    let n = n.unwrap_or(r.len());
    if r.len() != n || r.iter().any(|row| row.len() != n) {
        return Err(Error::invalid(format!("expected a {n}×{n} matrix")));
    }
    let rows =
        r.iter().map(|row| row.iter().map(|s| scalar(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_dense_rows(&rows))
}

pub fn parse_fredholm(text: &str) -> Result<FredholmData> {
    let r: FredholmRecord = from_json(text)?;
    let a = algebra_from_spec(&r.algebra).map_err(context("algebra"))?;
    let f = matrix_from_record(&r.f, None).map_err(context("F"))?;
    let n = f.rows;
    let gamma = r.gamma.as_ref().map(|g| matrix_from_record(g, Some(n))).transpose().map_err(context("gamma"))?;
    let mut images = vec![SparseVec::new(); a.dim()];
    for (label, m) in &r.phi {
        let i = label_index(&a, label).map_err(context("phi"))?;
        images[i] = matrix_to_vec(&matrix_from_record(m, Some(n)).map_err(context(label))?);
    }
    FredholmData::new(&a, f, gamma, &LinearMapT::new(a.dim(), n * n, images)?)
}

pub fn parse_homotopy(text: &str) -> Result<PolynomialHomotopy> {
    let r: HomotopyRecord = from_json(text)?;
    let src = algebra_from_spec(&r.source).map_err(context("source"))?;
    let dst = algebra_from_spec(&r.target).map_err(context("target"))?;
    let coeffs = r
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, m)| map_from_record(&src, &dst, m).map_err(context(&format!("coeffs[{k}]"))))
        .collect::<Result<Vec<_>>>()?;
    PolynomialHomotopy::new(&src, &dst, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, laurent_window, matrix_algebra, validate_algebra, Diagnostics};

    #[test]
    fn builtins_round_trip() {
        for name in ["field", "dual", "m2", "upper2", "truncpoly3", "null1", "laurent3", "cyclic4", "zero"] {
            let a = builtin_algebra(name).unwrap();
            let b = parse_algebra(&algebra_to_json(&a)).unwrap();
            assert_eq!(a.labels(), b.labels());
            assert_eq!(a.unit(), b.unit());
            assert_eq!(a.window(), b.window());
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    assert_eq!(a.basis_product(i, j).ok(), b.basis_product(i, j).ok(), "{name}");
                }
            }
        }
        assert!(builtin_algebra("m0").is_err());
        assert!(builtin_algebra("octonions").is_err());
    }

    #[test]
    fn builtin_name_as_file() {
        let a = parse_algebra("\"m2\"").unwrap();
        assert_eq!(a.dim(), 4);
    }

    #[test]
    fn json_errors_carry_positions() {
        let err = parse_algebra("{\n  \"basis\": [\"a\",\n  ]\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_algebra("{\"basis\": [\"a\"], \"colour\": 1}").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err:?}");
    }

    #[test]
    fn malformed_tables() {
        let text = r#"{"basis": ["a"], "table": [{"left": "a", "right": "b", "result": []}]}"#;
        let err = parse_algebra(text).unwrap_err();
        assert!(err.to_string().contains("unknown basis label `b`"), "{err}");
        let text =
            r#"{"basis": ["a"], "table": [{"left": "a", "right": "a", "result": [{"basis": "a", "coeff": "x"}]}]}"#;
        assert!(parse_algebra(text).is_err());
    }

    #[test]
    fn non_associative_table_parses_then_fails_validation() {
        let text = r#"{"basis": ["e1", "e2"], "table": [
            {"left": "e1", "right": "e1", "result": [{"basis": "e2", "coeff": "1"}]},
            {"left": "e2", "right": "e1", "result": [{"basis": "e1", "coeff": "1"}]}]}"#;
        let a = parse_algebra(text).unwrap();
        assert_eq!(validate_algebra(&a), Diagnostics::Associativity(0, 0, 0));
    }

    #[test]
    fn element_literals() {
        let m2 = matrix_algebra(2);
        let x = parse_element(&m2, "E11 - 1/2*E12 + (1+i)*E22").unwrap();
        assert_eq!(x.get(0), Scalar::ONE);
        assert_eq!(x.get(1), Scalar::ratio(-1, 2));
        assert_eq!(x.get(3), "1+i".parse().unwrap());
        assert!(parse_element(&m2, "0").unwrap().is_zero());
        let l = laurent_window(2);
        let y = parse_element(&l, "u^-1 - 1").unwrap();
        assert_eq!(y.nnz(), 2);
        match parse_element(&m2, "E11 + E33") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        assert!(parse_element(&m2, "E11 E12").is_err());
        assert!(parse_element(&m2, "").is_err());
    }

    #[test]
    fn form_literals() {
        let a = dual_numbers();
        let w = parse_form(&a, "eps.d(eps).d(1) - 2*d(eps)").unwrap();
        assert_eq!(w.coeff(&Monomial::new(Some(1), vec![1, 0])), Scalar::ONE);
        assert_eq!(w.coeff(&Monomial::new(None, vec![1])), Scalar::int(-2));
        let m2 = matrix_algebra(2);
        let v = parse_form(&m2, "1 + E12").unwrap();
        assert_eq!(v.coeff(&Monomial::unit()), Scalar::ONE);
        assert!(parse_form(&m2, "E11.E12").is_err());
        assert!(parse_form(&m2, "d(E11").is_err());
    }

    #[test]
    fn extension_file() {
        let text = r#"{
            "K": "null1", "E": "upper2",
            "Q": {"basis": ["q1", "q2"], "table": [
                {"left": "q1", "right": "q1", "result": [{"basis": "q1", "coeff": "1"}]},
                {"left": "q2", "right": "q2", "result": [{"basis": "q2", "coeff": "1"}]}]},
            "i": {"n1": "E12"},
            "p": {"E11": "q1", "E22": "q2"},
            "s": {"q1": "E11 + E12", "q2": "E22"}
        }"#;
        let ext = parse_extension(text).unwrap();
        assert_eq!(ext.e.dim(), 3);
        let bad = text.replace("\"E11\": \"q1\"", "\"E11\": \"q2\"");
        assert!(parse_extension(&bad).is_err());
    }

    #[test]
    fn fredholm_file() {
        let text = r#"{"algebra": "field", "F": [["0","1"],["1","0"]], "gamma": [["1","0"],["0","-1"]],
            "phi": {"e": [["1","0"],["0","0"]]}}"#;
        let fd = parse_fredholm(text).unwrap();
        assert_eq!(fd.dimension(), 2);
        let bad = text.replace("[[\"0\",\"1\"],[\"1\",\"0\"]]", "[[\"1\",\"0\"],[\"0\",\"-1\"]]");
        assert!(parse_fredholm(&bad).is_err());
    }

    #[test]
    fn homotopy_file() {
        let text = r#"{"source": "field", "target": "m2", "coeffs": [{"e": "E11"}, {"e": "E12"}]}"#;
        let h = parse_homotopy(text).unwrap();
        assert_eq!(h.degree(), 1);
        let bad = r#"{"source": "field", "target": "m2", "coeffs": [{"e": "E11"}, {"e": "E21 + E12"}]}"#;
        assert!(parse_homotopy(bad).is_err());
    }
}
