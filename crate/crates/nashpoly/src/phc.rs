//! PHCpack-compatible polynomial system and solution-list files.
//!
//! A system file starts with the equation count, optionally followed by
//! the variable count, and then lists the equations, each ending in `;`.
//! Variables are numbered in order of first appearance. Coefficients are
//! read exactly: decimals become rationals and `i` (or `I`) is the
//! imaginary unit.

use std::fmt::Write as _;

use nashpoly_core::{Monomial, PolySystem, Polynomial};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{parse_error, Error, Result};

pub type ExactComplex = Complex<BigRational>;
pub type ExactSystem = PolySystem<ExactComplex>;

/// Longest variable name the format allows.
pub const MAX_NAME_LEN: usize = 5;

// ---------------------------------------------------------------------------
// numbers

/// Exact value of a decimal literal such as `-4.5e-02`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(p) => (&body[..p], body[p + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let shift = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10u8);
    let mut value = BigRational::from_integer(digits);
    if shift >= 0 {
        value *= BigRational::from_integer(Pow::pow(&ten, shift.unsigned_abs()));
    } else {
        value /= BigRational::from_integer(Pow::pow(&ten, shift.unsigned_abs()));
    }
    Some(if negative { -value } else { value })
}

/// `x` in scientific notation with `digits` fractional digits, an
/// uppercase `E` and a signed exponent of at least two digits.
pub fn sci(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let raw = format!("{:.*E}", digits, x);
    let (mantissa, exp) = raw.split_once('E').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.unsigned_abs())
}

/// Like [`sci`], with a leading space standing in for a plus sign.
fn signed_sci(x: f64, digits: usize) -> String {
    let s = sci(x, digits);
    if s.starts_with('-') {
        s
    } else {
        format!(" {s}")
    }
}

/// The exact rational a solution file holds for `x`: its 15 significant
/// digit rendering.
pub fn written_value(x: f64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    parse_decimal(&sci(x, 14)).expect("rendered decimal parses")
}

pub fn to_exact(z: Complex64) -> ExactComplex {
    Complex::new(
        BigRational::from_float(z.re).unwrap_or_default(),
        BigRational::from_float(z.im).unwrap_or_default(),
    )
}

pub fn to_complex(z: &ExactComplex) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

pub fn exact_system(system: &PolySystem<Complex64>) -> ExactSystem {
    system.map_coefficients(|&c| to_exact(c))
}

pub fn real_system(system: &PolySystem<BigRational>) -> ExactSystem {
    system.map_coefficients(|c| Complex::new(c.clone(), BigRational::zero()))
}

pub fn float_system(system: &ExactSystem) -> PolySystem<Complex64> {
    system.map_coefficients(to_complex)
}

// ---------------------------------------------------------------------------
// reading systems

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
    Semicolon,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self {
            bytes: text.as_bytes(),
            text,
            pos: 0,
            line,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize)>> {
        let mut out = Vec::new();
        while let Some(tok) = self.next_token()? {
            out.push((tok, self.line));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<Token>> {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'\n' {
                self.line += 1;
            }
            if !b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        let Some(&b) = self.bytes.get(self.pos) else {
            return Ok(None);
        };
        let single = match b {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::Open),
            b')' => Some(Token::Close),
            b';' => Some(Token::Semicolon),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok(Some(t));
        }
        let start = self.pos;
        if b.is_ascii_digit() || b == b'.' {
            self.eat_while(|c| c.is_ascii_digit() || c == b'.');
            if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                    self.pos += 1;
                }
                if self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.eat_while(|c| c.is_ascii_digit());
                } else {
                    self.pos = save;
                }
            }
            let lit = &self.text[start..self.pos];
            return parse_decimal(lit)
                .map(|q| Some(Token::Number(q)))
                .ok_or_else(|| parse_error(self.line, format!("bad number {lit:?}")));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            self.eat_while(|c| c.is_ascii_alphanumeric() || c == b'_');
            return Ok(Some(Token::Ident(self.text[start..self.pos].to_string())));
        }
        Err(parse_error(self.line, format!("unexpected character {:?}", b as char)))
    }

    fn eat_while(&mut self, f: impl Fn(u8) -> bool) {
        while self.bytes.get(self.pos).is_some_and(|&c| f(c)) {
            self.pos += 1;
        }
    }
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    names: &'a mut Vec<String>,
    last_line: usize,
}

type ExactPoly = Polynomial<ExactComplex>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.last_line, |&(_, l)| l)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<()> {
        let line = self.line();
        match self.bump() {
            Some(ref t) if t == want => Ok(()),
            Some(t) => Err(parse_error(line, format!("expected {what}, found {t:?}"))),
            None => Err(parse_error(line, format!("expected {what}, found end of input"))),
        }
    }

    fn expression(&mut self) -> Result<ExactPoly> {
        let mut acc = ExactPoly::zero();
        let mut negate = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                true
            }
            Some(Token::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let term = self.term()?;
            acc = if negate { &acc - &term } else { &acc + &term };
            match self.peek() {
                Some(Token::Plus) => negate = false,
                Some(Token::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<ExactPoly> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<ExactPoly> {
        let base = self.factor()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let line = self.line();
        match self.bump() {
            Some(Token::Number(q)) if q.is_integer() && !q.is_negative() => {
                let e = q.to_integer().to_u32().ok_or_else(|| parse_error(line, "exponent too large"))?;
                Ok(base.pow(e))
            }
            _ => Err(parse_error(line, "exponent must be a nonnegative integer")),
        }
    }

    fn factor(&mut self) -> Result<ExactPoly> {
        let line = self.line();
        match self.bump() {
            Some(Token::Number(q)) => Ok(ExactPoly::constant(Complex::new(q, BigRational::zero()))),
            Some(Token::Ident(name)) if name == "i" || name == "I" => {
                Ok(ExactPoly::constant(Complex::new(BigRational::zero(), BigRational::one())))
            }
            Some(Token::Ident(name)) => {
                let index = match self.names.iter().position(|n| *n == name) {
                    Some(i) => i,
                    None => {
                        self.names.push(name);
                        self.names.len() - 1
                    }
                };
                Ok(ExactPoly::var(index))
            }
            Some(Token::Open) => {
                let inner = self.expression()?;
                self.expect(&Token::Close, "')'")?;
                Ok(inner)
            }
            Some(t) => Err(parse_error(line, format!("unexpected {t:?}"))),
            None => Err(parse_error(line, "unexpected end of input")),
        }
    }
}

fn header_numbers(line: &str, lineno: usize, what: &str) -> Result<Vec<usize>> {
    let nums = line
        .split_whitespace()
        .map(|w| w.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| parse_error(lineno, format!("malformed {what} header {line:?}")))?;
    if nums.is_empty() || nums.len() > 2 {
        return Err(parse_error(lineno, format!("malformed {what} header {line:?}")));
    }
    Ok(nums)
}

/// First non-blank line and its 1-based number, plus the remaining text.
fn split_header(text: &str) -> Result<(usize, &str, &str)> {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if !line.trim().is_empty() {
            let rest = &text[offset + line.len()..];
            return Ok((i + 1, line.trim(), rest));
        }
        offset += line.len();
    }
    Err(parse_error(1, "empty file"))
}

/// Parses a system file. Variables are numbered by first appearance.
pub fn read_system(text: &str) -> Result<ExactSystem> {
    let (header_line, header, body) = split_header(text)?;
    let counts = header_numbers(header, header_line, "system")?;
    let tokens = Lexer::new(body, header_line + 1).tokens()?;
    let mut names = Vec::new();
    let mut equations = Vec::new();
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        names: &mut names,
        last_line: tokens.last().map_or(header_line, |&(_, l)| l),
    };
    while equations.len() < counts[0] {
        if parser.peek().is_none() {
            return Err(parse_error(
                parser.line(),
                format!("expected {} equations, found {}", counts[0], equations.len()),
            ));
        }
        equations.push(parser.expression()?);
        parser.expect(&Token::Semicolon, "';'")?;
    }
    if parser.peek().is_some() {
        return Err(parse_error(parser.line(), "text after the last equation"));
    }
    let declared = counts.get(1).copied().unwrap_or(names.len());
    if declared != names.len() {
        return Err(parse_error(
            header_line,
            format!("header declares {declared} variables, equations use {}", names.len()),
        ));
    }
    Ok(PolySystem::new(names, equations)?)
}

// ---------------------------------------------------------------------------
// writing systems

fn check_names(names: &[String]) -> Result<()> {
    match names.iter().find(|n| n.chars().count() > MAX_NAME_LEN) {
        Some(n) => Err(Error::NameTooLong(n.clone())),
        None => Ok(()),
    }
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        sci(q.to_f64().unwrap_or(f64::NAN), 14)
    }
}

/// A coefficient as `(sign, magnitude)`; an empty magnitude stands for 1.
fn coefficient_text(c: &ExactComplex, bare_monomial: bool) -> (bool, String) {
    if c.im.is_zero() {
        let negative = c.re.is_negative();
        let magnitude = c.re.abs();
        if magnitude.is_one() && !bare_monomial {
            return (negative, String::new());
        }
        return (negative, rational_text(&magnitude));
    }
    let re = rational_text(&c.re);
    let (op, im) = if c.im.is_negative() {
        ('-', rational_text(&-c.im.clone()))
    } else {
        ('+', rational_text(&c.im))
    };
    (false, format!("({re} {op} {im}*i)"))
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    m.exponents()
        .iter()
        .map(|&(v, e)| if e == 1 { names[v].clone() } else { format!("{}^{}", names[v], e) })
        .collect::<Vec<_>>()
        .join("*")
}

fn polynomial_text(p: &ExactPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut group = None;
    for (c, m) in p.terms() {
        let degree = m.degree();
        let new_line = !out.is_empty() && degree >= 2 && group != Some(degree);
        group = Some(degree);
        let (negative, magnitude) = coefficient_text(c, m.is_one());
        let body = match (magnitude.is_empty(), m.is_one()) {
            (_, true) => magnitude,
            (true, false) => monomial_text(m, names),
            (false, false) => format!("{}*{}", magnitude, monomial_text(m, names)),
        };
        let sign = if negative { "-" } else { "+" };
        if out.is_empty() {
            if negative {
                out.push_str("- ");
            }
        } else if new_line {
            let _ = write!(out, "\n{sign} ");
        } else {
            let _ = write!(out, " {sign} ");
        }
        out.push_str(&body);
    }
    out
}

/// Renders a system. The header carries only the equation count when it
/// equals the number of variables in use and both counts otherwise; a
/// variable no equation mentions cannot be represented. Terms of degree
/// two and higher start a new line per degree.
pub fn write_system(system: &ExactSystem) -> Result<String> {
    check_names(system.names())?;
    let mut used = vec![false; system.nvars()];
    for p in system.equations() {
        for v in p.variables() {
            used[v] = true;
        }
    }
    let nvars = used.iter().filter(|&&u| u).count();
    let mut out = if system.len() == nvars {
        format!("{}\n", system.len())
    } else {
        format!("{} {}\n", system.len(), nvars)
    };
    for p in system.equations() {
        out.push_str(&polynomial_text(p, system.names()));
        out.push_str(";\n");
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// solution lists

const RULE: &str = "===========================================================";

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub index: usize,
    pub t: Complex64,
    pub m: u32,
    pub coordinates: Vec<(String, Complex64)>,
    pub err: f64,
    pub rco: f64,
    pub res: f64,
}

impl SolutionRecord {
    pub fn values(&self) -> Vec<Complex64> {
        self.coordinates.iter().map(|(_, z)| *z).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.coordinates.iter().map(|(n, _)| n.clone()).collect()
    }
}

fn field<'a>(line: &'a str, label: &str, lineno: usize) -> Result<&'a str> {
    let trimmed = line.trim();
    trimmed
        .strip_prefix(label)
        .and_then(|r| r.trim_start().strip_prefix(':'))
        .map(str::trim)
        .ok_or_else(|| parse_error(lineno, format!("expected {label:?}, found {trimmed:?}")))
}

fn float(text: &str, lineno: usize) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| parse_error(lineno, format!("bad number {text:?}")))
}

fn complex_pair(text: &str, lineno: usize) -> Result<Complex64> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(float(re, lineno)?, float(im, lineno)?)),
        _ => Err(parse_error(lineno, format!("expected real and imaginary parts, found {text:?}"))),
    }
}

/// Parses `== err : a = rco : b = res : c ==`.
fn diagnostics(line: &str, lineno: usize) -> Result<(f64, f64, f64)> {
    let inner = line
        .trim()
        .strip_prefix("==")
        .and_then(|r| r.strip_suffix("=="))
        .ok_or_else(|| parse_error(lineno, "expected the err/rco/res line"))?;
    let mut values = [0.0; 3];
    let parts: Vec<&str> = inner.split('=').collect();
    if parts.len() != 3 {
        return Err(parse_error(lineno, "expected err, rco and res fields"));
    }
    for ((slot, part), label) in values.iter_mut().zip(&parts).zip(["err", "rco", "res"]) {
        *slot = float(field(part, label, lineno)?, lineno)?;
    }
    Ok((values[0], values[1], values[2]))
}

/// Parses a solution list. The header is `count` or `count nvars`; every
/// record must carry `nvars` coordinates.
pub fn read_solutions(text: &str) -> Result<Vec<SolutionRecord>> {
    let (header_line, header, _) = split_header(text)?;
    let counts = header_numbers(header, header_line, "solution list")?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .skip(header_line)
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_error(0, format!("unexpected end of file, expected {what}")))
    };
    let mut records = Vec::with_capacity(counts[0]);
    let mut arity = counts.get(1).copied();
    if counts[0] > 0 {
        let (n, l) = next("separator")?;
        if !l.trim().chars().all(|c| c == '=') {
            return Err(parse_error(n, "expected a line of '='"));
        }
    }
    for _ in 0..counts[0] {
        let (n, l) = next("solution")?;
        let index = l
            .trim()
            .strip_prefix("solution")
            .and_then(|r| r.strip_suffix(':'))
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| parse_error(n, format!("expected \"solution k :\", found {:?}", l.trim())))?;
        let (n, l) = next("t")?;
        let t = complex_pair(field(l, "t", n)?, n)?;
        let (n, l) = next("m")?;
        let m_text = field(l, "m", n)?;
        let m: u32 = m_text
            .parse()
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| parse_error(n, format!("bad multiplicity {m_text:?}")))?;
        let (n, l) = next("the solution for t")?;
        if l.trim() != "the solution for t :" {
            return Err(parse_error(n, "expected \"the solution for t :\""));
        }
        let mut coordinates = Vec::new();
        let (err, rco, res) = loop {
            let (n, l) = next("coordinates")?;
            if l.trim_start().starts_with("==") {
                break diagnostics(l, n)?;
            }
            let (name, value) = l
                .split_once(':')
                .ok_or_else(|| parse_error(n, format!("expected a coordinate, found {:?}", l.trim())))?;
            coordinates.push((name.trim().to_string(), complex_pair(value, n)?));
        };
        let expected = *arity.get_or_insert(coordinates.len());
        if coordinates.len() != expected {
            return Err(Error::Arity {
                index,
                expected,
                got: coordinates.len(),
            });
        }
        records.push(SolutionRecord {
            index,
            t,
            m,
            coordinates,
            err,
            rco,
            res,
        });
    }
    Ok(records)
}

/// Renders a solution list; `nvars` fills the header of an empty list.
pub fn write_solutions(records: &[SolutionRecord], nvars: usize) -> Result<String> {
    let nvars = records.first().map_or(nvars, |r| r.coordinates.len());
    let mut out = format!("{} {}\n{RULE}\n", records.len(), nvars);
    for r in records {
        if r.coordinates.len() != nvars {
            return Err(Error::Arity {
                index: r.index,
                expected: nvars,
                got: r.coordinates.len(),
            });
        }
        check_names(&r.names())?;
        let _ = writeln!(out, "solution {} :", r.index);
        let _ = writeln!(out, "t : {}  {}", signed_sci(r.t.re, 14), signed_sci(r.t.im, 14));
        let _ = writeln!(out, "m : {}", r.m);
        out.push_str("the solution for t :\n");
        for (name, z) in &r.coordinates {
            let _ = writeln!(out, " {name} : {}  {}", signed_sci(z.re, 14), signed_sci(z.im, 14));
        }
        let _ = writeln!(
            out,
            "== err : {} = rco : {} = res : {} ==",
            signed_sci(r.err, 3),
            signed_sci(r.rco, 3),
            signed_sci(r.res, 3)
        );
    }
    Ok(out)
}
