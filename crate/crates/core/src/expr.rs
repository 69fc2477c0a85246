//! NC rational expressions over `z1 … zd`: parsing and lowering to FM
//! realizations.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (['*'] unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^-1')*
//! atom   := number ['i'] | 'i' | 'z' index | '(' expr ')' | 'inv' '(' expr ')'
//! ```
//!
//! Adjacent factors multiply in the order written. Binary `a - b` becomes
//! `Add(a, Neg(b))`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, ONE, ZERO};
use crate::realization::FmRealization;
use crate::tuple::MatrixTuple;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// 1-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Scale(Complex64, Box<Expr>),
    Inv(Box<Expr>),
}

impl Expr {
    pub fn sum(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn product(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn negation(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn scale(s: Complex64, a: Expr) -> Expr {
        Expr::Scale(s, Box::new(a))
    }

    pub fn inv(a: Expr) -> Expr {
        Expr::Inv(Box::new(a))
    }

    pub fn constant(re: f64) -> Expr {
        Expr::Const(Complex64::new(re, 0.0))
    }

    /// Largest variable index used, 0 for constants.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(j) => *j,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Scale(_, a) | Expr::Inv(a) => a.max_var(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Mul(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Neg(a) | Expr::Scale(_, a) | Expr::Inv(a) => 1 + a.depth(),
        }
    }

    /// Value at the origin, when every inverse along the way is regular.
    pub fn value_at_zero(&self) -> Option<Complex64> {
        Some(match self {
            Expr::Const(v) => *v,
            Expr::Var(_) => ZERO,
            Expr::Add(a, b) => a.value_at_zero()? + b.value_at_zero()?,
            Expr::Mul(a, b) => a.value_at_zero()? * b.value_at_zero()?,
            Expr::Neg(a) => -a.value_at_zero()?,
            Expr::Scale(s, a) => s * a.value_at_zero()?,
            Expr::Inv(a) => {
                let v = a.value_at_zero()?;
                if is_zero_constant(v) {
                    return None;
                }
                ONE / v
            }
        })
    }
}

fn fmt_complex(v: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.im == 0.0 {
        write!(f, "{:?}", v.re)
    } else if v.re == 0.0 {
        write!(f, "{:?}i", v.im)
    } else {
        write!(f, "({:?}{}{:?}i)", v.re, if v.im < 0.0 { "-" } else { "+" }, v.im.abs())
    }
}

/// Fully parenthesized; re-parses to an equal tree except that `Scale`
/// prints as a product with a constant.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => {
                if v.re < 0.0 || (v.re == 0.0 && v.im < 0.0) {
                    write!(f, "(-")?;
                    fmt_complex(-v, f)?;
                    write!(f, ")")
                } else {
                    fmt_complex(*v, f)
                }
            }
            Expr::Var(j) => write!(f, "z{j}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Scale(s, a) => {
                write!(f, "(")?;
                Expr::Const(*s).fmt(f)?;
                write!(f, " * {a})")
            }
            Expr::Inv(a) => write!(f, "inv({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Inv,
    PowNegOne,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'^' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                    j += 1;
                }
                if bytes.get(j) == Some(&b'-') {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                        j += 1;
                    }
                    if bytes.get(j) == Some(&b'1')
                        && !bytes.get(j + 1).is_some_and(|b| b.is_ascii_digit() || *b == b'.')
                    {
                        out.push((start, Tok::PowNegOne));
                        i = j + 1;
                        continue;
                    }
                }
                return Err(Error::Syntax { pos: start, msg: "only the exponent ^-1 is supported".into() });
            }
            b'z' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(Error::Syntax { pos: start, msg: "expected a variable index after `z`".into() });
                }
                let index = text[i + 1..j]
                    .parse::<usize>()
                    .map_err(|_| Error::Syntax { pos: start, msg: "variable index too large".into() })?;
                out.push((start, Tok::Var(index)));
                i = j;
                continue;
            }
            b'i' => {
                if text[i..].starts_with("inv") {
                    out.push((start, Tok::Inv));
                    i += 3;
                } else {
                    out.push((start, Tok::Imag(1.0)));
                    i += 1;
                }
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let value = text[i..j]
                    .parse::<f64>()
                    .map_err(|_| Error::Syntax { pos: start, msg: format!("bad number `{}`", &text[i..j]) })?;
                if j < bytes.len() && bytes[j] == b'i' && !text[j..].starts_with("inv") {
                    out.push((start, Tok::Imag(value)));
                    j += 1;
                } else {
                    out.push((start, Tok::Num(value)));
                }
                i = j;
                continue;
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{c}`") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    d: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.offset(), msg: format!("expected {what}") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::sum(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::sum(lhs, Expr::negation(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Num(_) | Tok::Imag(_) | Tok::Var(_) | Tok::LParen | Tok::Inv)
        )
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                lhs = Expr::product(lhs, self.unary()?);
            } else if self.starts_factor() {
                lhs = Expr::product(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::negation(self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::PowNegOne) {
            self.pos += 1;
            e = Expr::inv(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Syntax { pos: at, msg: "unexpected end of input".into() })?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Const(Complex64::new(0.0, v))),
            Tok::Var(j) => {
                if j == 0 || j > self.d {
                    return Err(Error::VarOutOfRange { index: j, d: self.d, pos: at });
                }
                Ok(Expr::Var(j))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Inv => {
                self.expect(Tok::LParen, "`(` after `inv`")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::inv(e))
            }
            other => Err(Error::Syntax { pos: at, msg: format!("unexpected token {other:?}") }),
        }
    }
}

pub fn parse(text: &str, d: usize) -> Result<Expr> {
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, end: text.len(), d };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Syntax { pos: p.offset(), msg: "unexpected trailing input".into() });
    }
    Ok(e)
}

fn is_zero_constant(v: Complex64) -> bool {
    v.norm() <= 1e-14
}

fn check_alphabet(a: &FmRealization, b: &FmRealization) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(format!("d = {} and d = {}", a.d(), b.d())));
    }
    Ok(())
}

fn concat(a: &CVec, b: &CVec) -> CVec {
    CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Block direct sum; feedthroughs add.
pub fn fm_add(r1: &FmRealization, r2: &FmRealization) -> Result<FmRealization> {
    check_alphabet(r1, r2)?;
    let a = r1.a().direct_sum(r2.a())?;
    let b = r1.b().iter().zip(r2.b()).map(|(x, y)| concat(x, y)).collect();
    FmRealization::new(a, b, concat(r1.c(), r2.c()), r1.feedthrough() + r2.feedthrough())
}

/// Cascade `A_j = [[A₁_j, B₁_j C₂], [0, A₂_j]]`, `B_j = [B₁_j D₂; B₂_j]`,
/// `C = [C₁, D₁ C₂]`, `D = D₁ D₂`.
pub fn fm_mul(r1: &FmRealization, r2: &FmRealization) -> Result<FmRealization> {
    check_alphabet(r1, r2)?;
    let (m1, m2) = (r1.size(), r2.size());
    let m = m1 + m2;
    let c2 = r2.c_row();
    let mats = (0..r1.d())
        .map(|j| {
            let mut big = CMat::zeros(m, m);
            big.view_mut((0, 0), (m1, m1)).copy_from(&r1.a()[j]);
            let b1 = CMat::from_column_slice(m1, 1, r1.b()[j].as_slice());
            big.view_mut((0, m1), (m1, m2)).copy_from(&(b1 * &c2));
            big.view_mut((m1, m1), (m2, m2)).copy_from(&r2.a()[j]);
            big
        })
        .collect();
    let a = if m == 0 { MatrixTuple::zeros(r1.d(), 0) } else { MatrixTuple::new(mats)? };
    let b = (0..r1.d())
        .map(|j| concat(&(&r1.b()[j] * r2.feedthrough()), &r2.b()[j]))
        .collect();
    let c = concat(r1.c(), &(r2.c() * r1.feedthrough()));
    FmRealization::new(a, b, c, r1.feedthrough() * r2.feedthrough())
}

pub fn fm_scale(r: &FmRealization, s: Complex64) -> FmRealization {
    FmRealization::new(r.a().clone(), r.b().to_vec(), r.c() * s, r.feedthrough() * s)
        .expect("sizes unchanged")
}

/// Closed-form inverse `(A_j − B_j D⁻¹ C, B_j D⁻¹, −D⁻¹ C, D⁻¹)`.
pub fn fm_inv(r: &FmRealization) -> Result<FmRealization> {
    let d0 = r.feedthrough();
    if is_zero_constant(d0) {
        return Err(Error::NotRegularAtZero);
    }
    let dinv = ONE / d0;
    let c = r.c_row();
    let mats: Vec<CMat> = (0..r.d())
        .map(|j| {
            let bj = CMat::from_column_slice(r.size(), 1, r.b()[j].as_slice());
            &r.a()[j] - bj * &c * dinv
        })
        .collect();
    let a = if r.size() == 0 { MatrixTuple::zeros(r.d(), 0) } else { MatrixTuple::new(mats)? };
    let b = r.b().iter().map(|bj| bj * dinv).collect();
    FmRealization::new(a, b, r.c() * (-dinv), dinv)
}

/// Lowers without minimization; state sizes add up along the tree.
pub fn lower(ast: &Expr, d: usize) -> Result<FmRealization> {
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    match ast {
        Expr::Const(v) => Ok(FmRealization::constant(d, *v)),
        Expr::Var(j) => {
            if *j == 0 || *j > d {
                return Err(Error::VarOutOfRange { index: *j, d, pos: 0 });
            }
            Ok(FmRealization::variable(d, *j))
        }
        Expr::Add(a, b) => fm_add(&lower(a, d)?, &lower(b, d)?),
        Expr::Mul(a, b) => fm_mul(&lower(a, d)?, &lower(b, d)?),
        Expr::Neg(a) => Ok(fm_scale(&lower(a, d)?, -ONE)),
        Expr::Scale(s, a) => Ok(fm_scale(&lower(a, d)?, *s)),
        Expr::Inv(a) => fm_inv(&lower(a, d)?),
    }
}

pub fn compile(text: &str, d: usize) -> Result<FmRealization> {
    lower(&parse(text, d)?, d)
}

/// Minimizes through the descriptor form; the series is preserved.
pub fn simplify_state(r: &FmRealization, rank_factor: f64) -> FmRealization {
    r.simplify_state(rank_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::words::Word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parses_product_of_sum_and_variable() {
        let e = parse("(1+z1)*z2", 2).unwrap();
        assert_eq!(e, Expr::product(Expr::sum(Expr::constant(1.0), Expr::Var(1)), Expr::Var(2)));
    }

    #[test]
    fn parses_inverse_with_binary_minus() {
        let e = parse("inv(1 - z1*z2)", 2).unwrap();
        let inner = Expr::sum(Expr::constant(1.0), Expr::negation(Expr::product(Expr::Var(1), Expr::Var(2))));
        assert_eq!(e, Expr::inv(inner.clone()));
        assert_eq!(parse("(1 - z1 z2)^-1", 2).unwrap(), Expr::inv(inner));
    }

    #[test]
    fn variable_out_of_range() {
        assert!(matches!(parse("z3", 2), Err(Error::VarOutOfRange { index: 3, d: 2, pos: 0 })));
        assert!(matches!(parse("1 + z0", 2), Err(Error::VarOutOfRange { index: 0, pos: 4, .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse("(1 + z1", 2), Err(Error::Syntax { pos: 7, .. })));
        assert!(matches!(parse("1 + # z1", 2), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("z1^2", 2), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("", 2), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("z1 )", 2), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse("2.5i", 1).unwrap(), Expr::Const(c(0.0, 2.5)));
        assert_eq!(parse("i", 1).unwrap(), Expr::Const(c(0.0, 1.0)));
        let e = parse("1+2i", 1).unwrap();
        assert_eq!(e.value_at_zero().unwrap(), c(1.0, 2.0));
        assert_eq!(parse("1e-3", 1).unwrap(), Expr::constant(1e-3));
        let r = compile("(2-3i) z1", 1).unwrap();
        assert!((r.taylor(2).get(&w("1")) - c(2.0, -3.0)).norm() < 1e-15);
    }

    #[test]
    fn display_reparses() {
        let e = parse("inv(1 - (0.5-0.25i) z1 z2) * -z1 + 3", 2).unwrap();
        let again = parse(&e.to_string(), 2).unwrap();
        assert!(lower(&e, 2).unwrap().taylor(5).max_abs_diff(&lower(&again, 2).unwrap().taylor(5)) < 1e-15);
    }

    #[test]
    fn constants_lower_to_empty_state() {
        let r = compile("2", 3).unwrap();
        assert_eq!(r.size(), 0);
        assert_eq!(r.feedthrough(), c(2.0, 0.0));
    }

    #[test]
    fn product_keeps_order() {
        let r = compile("(1+z1)*z2", 2).unwrap();
        let t = r.taylor(4);
        assert_eq!(t.len(), 2);
        assert!((t.get(&w("2")) - ONE).norm() < 1e-15);
        assert!((t.get(&w("12")) - ONE).norm() < 1e-15);
        let rt = compile("z2*(1+z1)", 2).unwrap().taylor(4);
        assert!((rt.get(&w("21")) - ONE).norm() < 1e-15);
        assert_eq!(rt.get(&w("12")), ZERO);
    }

    #[test]
    fn inverse_of_zero_constant_is_rejected() {
        assert!(matches!(compile("inv(z1)", 1), Err(Error::NotRegularAtZero)));
        assert!(matches!(compile("(1 - 1)^-1", 1), Err(Error::NotRegularAtZero)));
    }

    #[test]
    fn expression_times_its_inverse_is_one() {
        let r = compile("(2 + z1 - z2 z1) * inv(2 + z1 - z2 z1)", 2).unwrap();
        let t = r.taylor(6);
        assert!((t.get(&Word::empty()) - ONE).norm() < 1e-14);
        assert!(t.iter().filter(|(w, _)| !w.is_empty()).all(|(_, v)| v.norm() < 1e-12));
    }

    #[test]
    fn sum_of_equal_variables_simplifies_to_one_state() {
        let r = compile("z1 + z1", 2).unwrap();
        assert_eq!(r.size(), 2);
        let s = simplify_state(&r, 1e-9);
        assert_eq!(s.size(), 1);
        assert!(s.taylor(4).max_abs_diff(&r.taylor(4)) < 1e-14);
    }
}
