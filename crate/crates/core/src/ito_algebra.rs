//! Nonlinear stochastic differentials `dB^(m,n) = b⁺ᵐ bⁿ dt` and their
//! non-associative product
//!
//! ```text
//! dB^(m,n) · dB^(k,l) = n k · dB^(m+k−1, n+l−1)
//! ```
//!
//! The product comes from contracting one annihilator of the left factor with
//! one creator of the right factor (`δ(0) dt = 1`). On the linear span
//! `{dt, dB, dB⁺, dΛ}` it reduces to the usual quantum Itô table.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients at or below this modulus are dropped.
const ZERO_THRESHOLD: f64 = 1e-12;

/// `(m, n)`: `m` creators, `n` annihilators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItoIndex {
    pub m: u32,
    pub n: u32,
}

impl ItoIndex {
    pub const DT: ItoIndex = ItoIndex { m: 0, n: 0 };
    pub const DB: ItoIndex = ItoIndex { m: 0, n: 1 };
    pub const DB_DAG: ItoIndex = ItoIndex { m: 1, n: 0 };
    pub const DLAMBDA: ItoIndex = ItoIndex { m: 1, n: 1 };

    pub const fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }
}

/// Finite linear combination of basis differentials, kept in canonical form
/// (no stored zero coefficients).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ItoElement {
    terms: BTreeMap<ItoIndex, Complex64>,
}

impl ItoElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(index: ItoIndex) -> Self {
        Self::term(Complex64::new(1.0, 0.0), index)
    }

    pub fn term(coeff: Complex64, index: ItoIndex) -> Self {
        let mut e = Self::zero();
        e.accumulate(index, coeff);
        e
    }

    pub fn dt() -> Self {
        Self::basis(ItoIndex::DT)
    }

    pub fn db() -> Self {
        Self::basis(ItoIndex::DB)
    }

    pub fn db_dag() -> Self {
        Self::basis(ItoIndex::DB_DAG)
    }

    pub fn dlambda() -> Self {
        Self::basis(ItoIndex::DLAMBDA)
    }

    pub fn from_terms<I: IntoIterator<Item = (ItoIndex, Complex64)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (idx, c) in terms {
            e.accumulate(idx, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, index: ItoIndex) -> Complex64 {
        self.terms.get(&index).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (ItoIndex, Complex64)> + '_ {
        self.terms.iter().map(|(i, c)| (*i, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(i, c)| (i, c * s)))
    }

    fn accumulate(&mut self, index: ItoIndex, c: Complex64) {
        let entry = self.terms.entry(index).or_default();
        *entry += c;
        if entry.norm() <= ZERO_THRESHOLD {
            self.terms.remove(&index);
        }
    }
}

pub fn basis_product(x: ItoIndex, y: ItoIndex) -> ItoElement {
    let weight = x.n * y.m;
    if weight == 0 {
        return ItoElement::zero();
    }
    // n ≥ 1 and k ≥ 1 here, so both components stay nonnegative
    let index = ItoIndex::new(x.m + y.m - 1, x.n + y.n - 1);
    ItoElement::term(Complex64::new(weight as f64, 0.0), index)
}

pub fn product(x: &ItoElement, y: &ItoElement) -> ItoElement {
    let mut out = ItoElement::zero();
    for (i, a) in x.terms() {
        for (j, b) in y.terms() {
            for (k, w) in basis_product(i, j).terms() {
                out.accumulate(k, a * b * w);
            }
        }
    }
    out
}

/// `(x·y)·z − x·(y·z)`.
pub fn associator(x: &ItoElement, y: &ItoElement, z: &ItoElement) -> ItoElement {
    &product(&product(x, y), z) - &product(x, &product(y, z))
}

/// `dt·x = x·dt = 0`.
pub fn annihilator_check(x: &ItoElement) -> bool {
    let dt = ItoElement::dt();
    product(&dt, x).is_zero() && product(x, &dt).is_zero()
}

impl Add for &ItoElement {
    type Output = ItoElement;
    fn add(self, rhs: &ItoElement) -> ItoElement {
        let mut out = self.clone();
        for (i, c) in rhs.terms() {
            out.accumulate(i, c);
        }
        out
    }
}

impl Neg for &ItoElement {
    type Output = ItoElement;
    fn neg(self) -> ItoElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &ItoElement {
    type Output = ItoElement;
    fn sub(self, rhs: &ItoElement) -> ItoElement {
        self + &(-rhs)
    }
}

impl Mul for &ItoElement {
    type Output = ItoElement;
    fn mul(self, rhs: &ItoElement) -> ItoElement {
        product(self, rhs)
    }
}

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!(
            "({}{}{}i)",
            c.re,
            if c.im.is_sign_negative() { "-" } else { "+" },
            c.im.abs()
        )
    }
}

/// Renders as `a·dB(m,n) + b·dB(k,l)`; the zero element renders as `0`.
impl fmt::Display for ItoElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = self
            .terms()
            .map(|(i, c)| format!("{}·dB({},{})", fmt_coeff(c), i.m, i.n))
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

fn parse_err(s: &str) -> Error {
    Error::InvalidParameter(format!("cannot parse Itô element term `{s}`"))
}

fn parse_coeff(s: &str) -> Result<Complex64> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix("i)")) {
        // split at the sign separating the parts, skipping exponent signs
        let bytes = inner.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'))
            .ok_or_else(|| parse_err(s))?;
        let re: f64 = inner[..split].parse().map_err(|_| parse_err(s))?;
        let im: f64 = inner[split..]
            .trim_start_matches('+')
            .parse()
            .map_err(|_| parse_err(s))?;
        return Ok(Complex64::new(re, im));
    }
    s.parse::<f64>()
        .map(|re| Complex64::new(re, 0.0))
        .map_err(|_| parse_err(s))
}

impl FromStr for ItoElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in s.split(" + ") {
            let term = term.trim();
            let (coeff, rest) = match term.split_once("·dB(") {
                Some((c, r)) => (parse_coeff(c)?, r),
                None => match term.strip_prefix("dB(") {
                    Some(r) => (Complex64::new(1.0, 0.0), r),
                    None => return Err(parse_err(term)),
                },
            };
            let (m, n) = rest
                .strip_suffix(')')
                .and_then(|r| r.split_once(','))
                .ok_or_else(|| parse_err(term))?;
            let m = m.trim().parse().map_err(|_| parse_err(term))?;
            let n = n.trim().parse().map_err(|_| parse_err(term))?;
            out.accumulate(ItoIndex::new(m, n), coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_product_examples() {
        assert_eq!(
            basis_product(ItoIndex::DB, ItoIndex::DB_DAG),
            ItoElement::dt()
        );
        assert_eq!(
            basis_product(ItoIndex::DLAMBDA, ItoIndex::DLAMBDA),
            ItoElement::dlambda()
        );
        assert!(basis_product(ItoIndex::DB_DAG, ItoIndex::DB).is_zero());
        assert_eq!(
            basis_product(ItoIndex::new(0, 2), ItoIndex::new(2, 0)),
            ItoElement::term(c(4.0), ItoIndex::DLAMBDA)
        );
    }

    #[test]
    fn product_examples() {
        let x = ItoElement::db().scale(c(2.0));
        let y = ItoElement::db_dag().scale(c(3.0));
        assert_eq!(&x * &y, ItoElement::dt().scale(c(6.0)));
        assert!((&x * &ItoElement::zero()).is_zero());
        let s = &ItoElement::db() + &ItoElement::dlambda();
        assert_eq!(&s * &ItoElement::dlambda(), s);
    }

    #[test]
    fn associator_examples() {
        let dt = ItoElement::dt();
        assert!(associator(&dt, &dt, &dt).is_zero());
        let x = ItoElement::basis(ItoIndex::new(0, 2));
        let y = ItoElement::basis(ItoIndex::new(2, 0));
        assert_eq!(
            associator(&x, &y, &ItoElement::dlambda()),
            ItoElement::dlambda().scale(c(4.0))
        );
        assert!(associator(&ItoElement::db(), &ItoElement::db_dag(), &ItoElement::db()).is_zero());
    }

    #[test]
    fn annihilator_examples() {
        assert!(annihilator_check(&ItoElement::dlambda()));
        assert!(annihilator_check(&ItoElement::dt()));
        assert!(annihilator_check(
            &ItoElement::basis(ItoIndex::new(3, 2)).scale(c(5.0))
        ));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let e = &ItoElement::db() - &ItoElement::db();
        assert!(e.is_zero());
        assert_eq!(e.len(), 0);
        let tiny = ItoElement::term(c(1e-13), ItoIndex::DB);
        assert!(tiny.is_zero());
    }

    #[test]
    fn render_and_parse() {
        let e = ItoElement::dlambda().scale(c(4.0));
        assert_eq!(e.to_string(), "4·dB(1,1)");
        assert_eq!(ItoElement::zero().to_string(), "0");
        let mixed = ItoElement::from_terms([
            (ItoIndex::DB, Complex64::new(-1.5, 2.25)),
            (ItoIndex::new(3, 2), Complex64::new(0.1, -1e-7)),
            (ItoIndex::DT, c(-2.0)),
        ]);
        let text = mixed.to_string();
        assert_eq!(text.parse::<ItoElement>().unwrap(), mixed);
        assert_eq!("dB(0,1)".parse::<ItoElement>().unwrap(), ItoElement::db());
        assert!("4·dX(1,1)".parse::<ItoElement>().is_err());
        assert!("x·dB(1,1)".parse::<ItoElement>().is_err());
        assert!("1·dB(1)".parse::<ItoElement>().is_err());
    }
}
