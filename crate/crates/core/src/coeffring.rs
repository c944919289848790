//! Exact truncated multivariate power series over the rationals.
//!
//! A [`TruncSeries`] is a finite map from exponent multi-indices to
//! [`Rational`] coefficients together with a [`Precision`]: the series is
//! only claimed correct for monomials the precision admits. Precision
//! shrinks deterministically: products take the meet of their inputs and
//! every derivative lowers the total-degree cap by one.
//!
//! Besides the total-degree cap, a series may carry a [`TimeOrder`], a
//! second truncation by the joint degree in a designated subset of
//! variables (the flow times). Both truncations are ideals, so products
//! of truncated series are exact on every admitted monomial.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Monomial = Vec<u32>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Generalized binomial coefficient `a(a-1)...(a-k+1)/k!`, valid for negative `a`.
pub fn binomial(a: i64, k: u32) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(a - i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

/// Total-degree truncation bound; `Exact` means no truncation at all.
///
/// The derived order puts every finite cap below `Exact`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cap {
    Degree(i64),
    Exact,
}

impl Cap {
    pub fn lowered(self, by: i64) -> Cap {
        match self {
            Cap::Degree(c) => Cap::Degree(c - by),
            Cap::Exact => Cap::Exact,
        }
    }

    pub fn admits(self, degree: i64) -> bool {
        match self {
            Cap::Degree(c) => degree <= c,
            Cap::Exact => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Cap::Degree(c) => Some(c),
            Cap::Exact => None,
        }
    }
}

impl fmt::Display for Cap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cap::Degree(c) => write!(f, "{c}"),
            Cap::Exact => write!(f, "exact"),
        }
    }
}

/// Truncation by joint degree in a subset of variables (bitmask).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TimeOrder {
    pub vars: u64,
    pub order: i64,
}

impl TimeOrder {
    pub fn degree(&self, m: &[u32]) -> i64 {
        m.iter()
            .enumerate()
            .filter(|(i, _)| self.vars >> i & 1 == 1)
            .map(|(_, &e)| e as i64)
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    pub cap: Cap,
    pub time: Option<TimeOrder>,
}

impl Precision {
    pub fn cap(cap: Cap) -> Self {
        Precision { cap, time: None }
    }

    pub fn exact() -> Self {
        Precision::cap(Cap::Exact)
    }

    /// Greatest lower bound of two precisions.
    pub fn meet(self, other: Precision) -> Precision {
        let time = match (self.time, other.time) {
            (None, t) | (t, None) => t,
            (Some(a), Some(b)) => {
                assert_eq!(a.vars, b.vars, "time truncations over different variables");
                Some(TimeOrder { vars: a.vars, order: a.order.min(b.order) })
            }
        };
        Precision { cap: self.cap.min(other.cap), time }
    }

    pub fn admits(&self, m: &[u32]) -> bool {
        let deg: i64 = m.iter().map(|&e| e as i64).sum();
        self.cap.admits(deg) && self.time.is_none_or(|t| t.degree(m) <= t.order)
    }

    /// Precision left after differentiating with multi-index `by`.
    pub fn after_derivative(self, by: &[u32]) -> Precision {
        let total: i64 = by.iter().map(|&e| e as i64).sum();
        Precision {
            cap: self.cap.lowered(total),
            time: self.time.map(|t| TimeOrder { vars: t.vars, order: t.order - t.degree(by) }),
        }
    }

    pub fn lowered(self, by: i64) -> Precision {
        Precision { cap: self.cap.lowered(by), time: self.time }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.cap, Cap::Degree(c) if c < 0) || self.time.is_some_and(|t| t.order < 0)
    }
}

/// Truncated multivariate power series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    nvars: usize,
    prec: Precision,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncSeries {
    pub fn zero(nvars: usize, cap: Cap) -> Self {
        Self::zero_with(nvars, Precision::cap(cap))
    }

    pub fn zero_with(nvars: usize, prec: Precision) -> Self {
        TruncSeries { nvars, prec, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, cap: Cap, c: Rational) -> Self {
        Self::from_terms_with(nvars, Precision::cap(cap), [(vec![0; nvars], c)])
    }

    pub fn one(nvars: usize, cap: Cap) -> Self {
        Self::constant(nvars, cap, Rational::one())
    }

    /// The coordinate `t_i`, with `i` zero-based.
    pub fn var(nvars: usize, cap: Cap, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::from_terms_with(nvars, Precision::cap(cap), [(m, Rational::one())])
    }

    pub fn from_terms<I>(nvars: usize, cap: Cap, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        Self::from_terms_with(nvars, Precision::cap(cap), terms)
    }

    /// Builds a series, summing repeated monomials and dropping zeros and
    /// monomials the precision does not admit.
    pub fn from_terms_with<I>(nvars: usize, prec: Precision, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length must equal nvars");
            if !prec.admits(&m) {
                continue;
            }
            *out.entry(m).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        TruncSeries { nvars, prec, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> Cap {
        self.prec.cap
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn coeff(&self, m: &[u32]) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Lowest total degree of a stored term.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as i64).sum()).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as i64).sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// Restricts to a (possibly) lower precision.
    pub fn with_precision(&self, prec: Precision) -> TruncSeries {
        let prec = self.prec.meet(prec);
        Self::from_terms_with(self.nvars, prec, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn truncate(&self, cap: Cap) -> TruncSeries {
        self.with_precision(Precision::cap(cap))
    }

    /// Imposes (or tightens) a joint-degree truncation on the variables in `vars`.
    pub fn with_time_order(&self, vars: u64, order: i64) -> TruncSeries {
        self.with_precision(Precision { cap: Cap::Exact, time: Some(TimeOrder { vars, order }) })
    }

    /// Equality on the monomials both operands admit.
    pub fn agrees_with(&self, other: &TruncSeries) -> bool {
        let p = self.prec.meet(other.prec);
        self.with_precision(p).terms == other.with_precision(p).terms
    }

    fn check_vars(&self, other: &TruncSeries) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_vars(other)?;
        let prec = self.prec.meet(other.prec);
        let terms = self.terms.iter().chain(other.terms.iter()).map(|(m, c)| (m.clone(), c.clone()));
        Ok(Self::from_terms_with(self.nvars, prec, terms))
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        Self::from_terms_with(self.nvars, self.prec, self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    /// Product; the result precision is the meet of the operands'.
    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_vars(other)?;
        let prec = self.prec.meet(other.prec);
        let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
        let mut m = vec![0u32; self.nvars];
        for (ma, ca) in &self.terms {
            if !prec.admits(ma) {
                continue;
            }
            for (mb, cb) in &other.terms {
                for k in 0..self.nvars {
                    m[k] = ma[k] + mb[k];
                }
                if !prec.admits(&m) {
                    continue;
                }
                let p = ca * cb;
                match out.get_mut(&m) {
                    Some(v) => *v += p,
                    None => {
                        out.insert(m.clone(), p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(TruncSeries { nvars: self.nvars, prec, terms: out })
    }

    /// Partial derivative in `t_i` (zero-based); lowers the cap by one.
    pub fn derive(&self, i: usize) -> Result<TruncSeries> {
        self.check_index(i)?;
        let mut by = vec![0; self.nvars];
        by[i] = 1;
        Ok(self.derive_multi(&by))
    }

    /// Mixed partial derivative with multi-index `by`.
    pub fn derive_multi(&self, by: &[u32]) -> TruncSeries {
        assert_eq!(by.len(), self.nvars);
        let prec = self.prec.after_derivative(by);
        let terms = self.terms.iter().filter_map(|(m, c)| {
            if m.iter().zip(by).any(|(e, d)| e < d) {
                return None;
            }
            let mut factor = BigInt::one();
            let mut nm = m.clone();
            for (k, &d) in by.iter().enumerate() {
                for j in 0..d {
                    factor *= BigInt::from(m[k] - j);
                }
                nm[k] -= d;
            }
            Some((nm, c * Rational::from_integer(factor)))
        });
        Self::from_terms_with(self.nvars, prec, terms)
    }

    /// Antiderivative in `t_i` vanishing at `t_i = 0`. Raises the total cap
    /// and the time order (when `t_i` is a time variable) by one.
    pub fn integrate(&self, i: usize) -> Result<TruncSeries> {
        self.check_index(i)?;
        let mut prec = self.prec;
        prec.cap = prec.cap.lowered(-1);
        if let Some(t) = prec.time.as_mut() {
            if t.vars >> i & 1 == 1 {
                t.order += 1;
            }
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut nm = m.clone();
            nm[i] += 1;
            let e = nm[i] as i64;
            (nm, c / int(e))
        });
        Ok(Self::from_terms_with(self.nvars, prec, terms))
    }

    /// Multiplicative inverse, for series with nonzero constant term.
    ///
    /// Exact non-constant series have no finite inverse; use
    /// [`TruncSeries::invert_to`] to pick a cap for them.
    pub fn invert(&self) -> Result<TruncSeries> {
        if self.cap() == Cap::Exact && self.time_order().is_none() && !self.is_constant() {
            return Err(Error::UnboundedInverse);
        }
        self.invert_to(self.cap())
    }

    pub fn invert_to(&self, cap: Cap) -> Result<TruncSeries> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(Error::NonUnit);
        }
        let inv0 = a0.recip();
        let prec = self.prec.meet(Precision::cap(cap));
        if self.is_constant() {
            return Ok(Self::from_terms_with(self.nvars, prec, [(vec![0; self.nvars], inv0)]));
        }
        // a = a0 (1 + e) with e(0) = 0, so a^{-1} = a0^{-1} sum (-e)^k.
        let e = self.with_precision(prec).scale(&inv0).try_add(&Self::constant(self.nvars, Cap::Exact, -Rational::one()))?;
        let steps = match (prec.cap, prec.time) {
            (Cap::Degree(c), _) => c.max(0),
            (Cap::Exact, Some(t)) => t.order.max(0),
            (Cap::Exact, None) => return Err(Error::UnboundedInverse),
        };
        let neg_e = -&e;
        let mut acc = Self::one(self.nvars, Cap::Exact).with_precision(prec);
        let mut power = acc.clone();
        for _ in 0..steps {
            power = power.mul(&neg_e)?;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&inv0))
    }

    pub fn time_order(&self) -> Option<TimeOrder> {
        self.prec.time
    }

    /// Multiplies by the monomial `m`; admissible degrees shift accordingly.
    pub fn shift(&self, m: &[u32]) -> TruncSeries {
        let deg: i64 = m.iter().map(|&e| e as i64).sum();
        let mut prec = self.prec.lowered(-deg);
        if let Some(t) = prec.time.as_mut() {
            t.order += t.degree(m);
        }
        let terms = self.terms.iter().map(|(k, c)| {
            let nk: Monomial = k.iter().zip(m).map(|(a, b)| a + b).collect();
            (nk, c.clone())
        });
        Self::from_terms_with(self.nvars, prec, terms)
    }

    /// Evaluates the variables selected by `vars` at zero.
    pub fn at_zero(&self, vars: &[usize]) -> TruncSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| vars.iter().all(|&v| m[v] == 0))
            .map(|(m, c)| (m.clone(), c.clone()));
        Self::from_terms_with(self.nvars, self.prec, terms)
    }

    /// Appends `extra` fresh variables; existing terms get exponent zero there.
    pub fn extend_vars(&self, extra: usize) -> TruncSeries {
        let nvars = self.nvars + extra;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut nm = m.clone();
            nm.resize(nvars, 0);
            (nm, c.clone())
        });
        Self::from_terms_with(nvars, self.prec, terms)
    }

    /// Canonical text: `[(e1,e2):p/q; ...]` sorted by multi-index.
    pub fn canonical(&self) -> String {
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let idx: Vec<String> = m.iter().map(|e| e.to_string()).collect();
                format!("({}):{}", idx.join(","), fmt_rational(c))
            })
            .collect();
        format!("[{}]", body.join("; "))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl std::ops::Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_add(rhs).expect("series addition")
    }
}

impl std::ops::Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_add(&-rhs).expect("series subtraction")
    }
}

impl std::ops::Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            nvars: self.nvars,
            prec: self.prec,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        TruncSeries::mul(self, rhs).expect("series multiplication")
    }
}

/// Free functions mirroring the operation names used in reports.
pub fn s_mul(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
    a.mul(b)
}

pub fn s_derive(a: &TruncSeries, i: usize) -> Result<TruncSeries> {
    a.derive(i)
}

pub fn s_invert(a: &TruncSeries) -> Result<TruncSeries> {
    a.invert()
}
