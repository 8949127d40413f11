//! JSON torus documents: generators, a 2x4 period matrix of expressions and
//! optional multiplications by square roots.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ConjKind, FieldElement, GeneratorSpec, NumberField};
use crate::interval::ComplexBox;
use crate::matrix::FMatrix;
use crate::rational::Rational;
use crate::torus::{attach_multiplication, build_torus, MultiplicationDatum, PeriodMatrix, Torus};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    re: [String; 2],
    im: [String; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    min_poly: Vec<String>,
    root: RawBox,
    conj: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiplication {
    #[serde(rename = "D")]
    d_matrix: Vec<Vec<String>>,
    d: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    generators: Vec<RawGenerator>,
    period: Vec<Vec<String>>,
    #[serde(default)]
    multiplications: Vec<RawMultiplication>,
}

/// A parsed and validated document. Entries live in `field`; `i` is always
/// present and never listed among the generators.
#[derive(Debug, Clone)]
pub struct TorusDocument {
    pub field: Arc<NumberField>,
    pub period: PeriodMatrix,
    pub multiplications: Vec<(FMatrix, i64)>,
}

/// Exact rational literal "p" or "p/q"; decimal points and exponents are
/// rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Validation(format!("float literal `{s}` is not allowed; use p/q")));
    }
    Rational::from_str(t).map_err(|_| Error::Validation(format!("`{s}` is not a rational number")))
}

fn conj_name(c: ConjKind) -> &'static str {
    match c {
        ConjKind::Real => "real",
        ConjKind::ImaginaryNegation => "imaginary",
    }
}

fn parse_conj(s: &str) -> Result<ConjKind> {
    match s {
        "real" => Ok(ConjKind::Real),
        "imaginary" => Ok(ConjKind::ImaginaryNegation),
        _ => Err(Error::Validation(format!("conj must be \"real\" or \"imaginary\", got `{s}`"))),
    }
}

/// Line and column (1-based) of byte offset `pos` in `text`.
fn line_column(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |k| before.len() - k - 1) + 1;
    (line, column)
}

/// Re-anchors an expression parse error to its position in the source text.
fn locate(text: &str, expr: &str, err: Error) -> Error {
    match err {
        Error::Parse { column, message, .. } => {
            let needle = serde_json::to_string(expr).unwrap_or_default();
            let start = text.find(&needle).map_or(0, |k| k + 1);
            let (line, col) = line_column(text, start + column.saturating_sub(1));
            Error::Parse { line, column: col, message }
        }
        other => other,
    }
}

impl TorusDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let mut gens = Vec::with_capacity(raw.generators.len());
        for g in &raw.generators {
            let min_poly = g.min_poly.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>()?;
            if min_poly.last().is_none_or(|c| *c != Rational::from_integer(1.into())) {
                return Err(Error::Validation(format!("min_poly of `{}` is not monic", g.name)));
            }
            let [re_lo, re_hi] = &g.root.re;
            let [im_lo, im_hi] = &g.root.im;
            let (re_lo, re_hi) = (parse_rational(re_lo)?, parse_rational(re_hi)?);
            let (im_lo, im_hi) = (parse_rational(im_lo)?, parse_rational(im_hi)?);
            if re_lo > re_hi || im_lo > im_hi {
                return Err(Error::Validation(format!("root box of `{}` is inverted", g.name)));
            }
            let root = ComplexBox::from_bounds(re_lo, re_hi, im_lo, im_hi);
            gens.push(GeneratorSpec::new(&g.name, min_poly, root, parse_conj(&g.conj)?));
        }
        let field = NumberField::new(gens, true)?;
        let entry = |s: &String| parse_expression(&field, s).map_err(|e| locate(text, s, e));
        let matrix = |rows: &[Vec<String>], r: usize, c: usize, what: &str| -> Result<FMatrix> {
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(Error::Validation(format!("{what} must be {r}x{c}")));
            }
            let parsed = rows.iter().map(|row| row.iter().map(entry).collect()).collect::<Result<Vec<_>>>()?;
            Ok(FMatrix::from_rows(parsed))
        };
        let period = PeriodMatrix::new(matrix(&raw.period, 2, 4, "period")?)?;
        let multiplications = raw
            .multiplications
            .iter()
            .map(|m| Ok((matrix(&m.d_matrix, 2, 2, "D")?, m.d)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusDocument { field, period, multiplications })
    }

    /// Document for a torus and its multiplications (analytic matrices are
    /// expressed in the torus field).
    pub fn from_torus(t: &Torus, mults: &[MultiplicationDatum]) -> Result<Self> {
        let field = t.field().clone();
        let multiplications = mults
            .iter()
            .map(|m| Ok((m.d_analytic.lift_to(&field)?, m.d)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusDocument { field, period: PeriodMatrix::new(t.period().clone())?, multiplications })
    }

    pub fn torus(&self) -> Result<Torus> {
        build_torus(self.period.clone())
    }

    pub fn attach_all(&self, t: &Torus) -> Result<Vec<MultiplicationDatum>> {
        self.multiplications.iter().map(|(dm, d)| attach_multiplication(t, dm, *d)).collect()
    }

    fn to_raw(&self) -> RawDocument {
        let q = |x: &Rational| x.to_string();
        let generators = self
            .field
            .generators()
            .iter()
            .filter(|g| g.name != "i")
            .map(|g| RawGenerator {
                name: g.name.clone(),
                min_poly: g.min_poly.iter().map(q).collect(),
                root: RawBox {
                    re: [q(&g.root_box.re.lo), q(&g.root_box.re.hi)],
                    im: [q(&g.root_box.im.lo), q(&g.root_box.im.hi)],
                },
                conj: conj_name(g.conj).into(),
            })
            .collect();
        RawDocument {
            generators,
            period: self.period.matrix().render(),
            multiplications: self
                .multiplications
                .iter()
                .map(|(dm, d)| RawMultiplication { d_matrix: dm.render(), d: *d })
                .collect(),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// Recursive-descent parser for expressions over a field: numbers, generator
/// names, + - * /, integer powers and parentheses.
pub fn parse_expression(field: &Arc<NumberField>, s: &str) -> Result<FieldElement> {
    let mut p = Parser { field, src: s.as_bytes(), pos: 0 };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    field: &'a Arc<NumberField>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { line: 1, column: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.unary()?;
                acc = acc.div(&rhs).map_err(|_| Error::Parse {
                    line: 1,
                    column: at + 1,
                    message: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits = self.digits();
        let n: u32 = digits.parse().map_err(|_| self.error("expected an integer exponent"))?;
        let p = base.pow(n);
        if negative {
            FieldElement::one(self.field).div(&p).map_err(|_| self.error("negative power of zero"))
        } else {
            Ok(p)
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
                    return Err(Error::Validation(format!(
                        "float literal at column {} is not allowed; use p/q",
                        self.pos + 1
                    )));
                }
                let n = Rational::from_str(&digits).map_err(|_| self.error("bad integer"))?;
                Ok(FieldElement::from_rational(self.field, n))
            }
            Some(b'.') => Err(Error::Validation(format!("float literal at column {} is not allowed", self.pos + 1))),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                FieldElement::generator(self.field, name).map_err(|_| Error::Parse {
                    line: 1,
                    column: start + 1,
                    message: format!("unknown generator `{name}`"),
                })
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::papercheck::example1;
    use crate::rational::{frac, rat};

    #[test]
    fn rational_coefficients_are_exact() {
        let f = NumberField::gaussian();
        let x = parse_expression(&f, "1/3 + 2*i").unwrap();
        assert_eq!(x.coeffs(), &[frac(1, 3), rat(2)]);
        let y = parse_expression(&f, "(1 + i)^2 - 2*i + i^-1").unwrap();
        assert_eq!(y.coeffs(), &[rat(0), rat(-1)]);
    }

    #[test]
    fn float_literals_are_rejected() {
        let f = NumberField::gaussian();
        assert!(matches!(parse_expression(&f, "0.5"), Err(Error::Validation(_))));
        assert!(matches!(parse_rational("1e3"), Err(Error::Validation(_))));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let f = NumberField::gaussian();
        match parse_expression(&f, "1 + * i") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expression(&f, "q"), Err(Error::Parse { column: 1, .. })));
    }

    #[test]
    fn document_round_trip() {
        let (t, m) = example1(1, None).unwrap();
        let doc = TorusDocument::from_torus(&t, &[m]).unwrap();
        let text = doc.to_json();
        let back = TorusDocument::parse(&text).unwrap();
        assert!(back.field.same_as(&doc.field));
        assert_eq!(back.period.matrix().render(), doc.period.matrix().render());
        assert_eq!(back.to_json(), text);
        let t2 = back.torus().unwrap();
        assert_eq!(back.attach_all(&t2).unwrap().len(), 1);
    }

    #[test]
    fn json_errors_have_positions() {
        match TorusDocument::parse("{\n  \"generators\": [,]\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let text = "{\"generators\": [], \"period\": [[\"1\",\"i\",\"0\",\"0\"],[\"0\",\"0\",\"1\",\"0.5\"]]}";
        assert!(matches!(TorusDocument::parse(text), Err(Error::Validation(_))));
    }
}
