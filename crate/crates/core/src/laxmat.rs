//! Square matrices of [`MicroOp`] filtered by a degree vector.
//!
//! Entry `(a, b)` of a matrix of filtered order `k` has operator order at
//! most `k + c_a - c_b`. Products respect the filtration, and inverses are
//! computed after weighting rows and columns by powers of ξ so that every
//! entry is measured against the same ξ-exponent.

use std::fmt;

use num_traits::One;

use crate::coeffring::{Cap, Precision, Rational, TruncSeries};
use crate::error::{Error, Result};
use crate::microp::{MicroOp, OpOrder};

/// Nondecreasing generator degrees `c_1 <= ... <= c_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeVector(Vec<i64>);

impl DegreeVector {
    pub fn new(c: Vec<i64>) -> Result<Self> {
        if c.is_empty() || c.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadDegrees(c));
        }
        Ok(DegreeVector(c))
    }

    pub fn zeros(d: usize) -> Self {
        DegreeVector(vec![0; d.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// `c_d - c_1`.
    pub fn spread(&self) -> i64 {
        self.0[self.0.len() - 1] - self.0[0]
    }

    /// Number of entries equal to `c_1`.
    pub fn leading_multiplicity(&self) -> usize {
        self.0.iter().filter(|&&c| c == self.0[0]).count()
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Square matrix of plain series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    rows: Vec<Vec<TruncSeries>>,
}

impl SeriesMatrix {
    pub fn new(rows: Vec<Vec<TruncSeries>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch("series matrix must be square and nonempty".into()));
        }
        Ok(SeriesMatrix { rows })
    }

    pub fn identity(d: usize, nvars: usize, cap: Cap) -> Self {
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { TruncSeries::one(nvars, cap) } else { TruncSeries::zero(nvars, cap) })
                    .collect()
            })
            .collect();
        SeriesMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nvars(&self) -> usize {
        self.rows[0][0].nvars()
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<TruncSeries>] {
        &self.rows
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::ShapeMismatch(format!("{d}x{d} times {0}x{0}", other.dim())));
        }
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut acc = self.rows[i][0].mul(&other.rows[0][j])?;
                for k in 1..d {
                    acc = &acc + &self.rows[i][k].mul(&other.rows[k][j])?;
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(SeriesMatrix { rows })
    }

    /// Values at the origin.
    pub fn constant_part(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.iter().map(|f| f.constant_term()).collect()).collect()
    }

    /// Inverse over the local ring: Gauss-Jordan with unit pivots.
    pub fn invert(&self) -> Result<SeriesMatrix> {
        let d = self.dim();
        let mut a = self.rows.clone();
        let first = &self.rows[0][0];
        let mut inv = SeriesMatrix::identity(d, first.nvars(), Cap::Exact).rows;
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| a[r][col].is_unit())
                .ok_or_else(|| Error::NotInvertible(format!("no unit pivot in column {col}")))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p_inv = a[col][col].invert()?;
            for k in 0..d {
                a[col][k] = p_inv.mul(&a[col][k])?;
                inv[col][k] = p_inv.mul(&inv[col][k])?;
            }
            for r in 0..d {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for k in 0..d {
                    a[r][k] = &a[r][k] - &f.mul(&a[col][k])?;
                    inv[r][k] = &inv[r][k] - &f.mul(&inv[col][k])?;
                }
            }
        }
        Ok(SeriesMatrix { rows: inv })
    }

    pub fn agrees_with(&self, other: &SeriesMatrix) -> bool {
        self.dim() == other.dim()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.agrees_with(y)))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.rows[i][j].is_zero()))
    }
}

/// Diagonal modification matrix of plain series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    pub diagonal: Vec<TruncSeries>,
}

impl ModMatrix {
    pub fn to_lax(&self, degrees: &DegreeVector, neta: usize) -> Result<LaxMatrix> {
        let d = self.diagonal.len();
        if d != degrees.dim() {
            return Err(Error::ShapeMismatch(format!("{d} diagonal entries for degree vector {degrees}")));
        }
        let nvars = self.diagonal[0].nvars();
        let mut m = LaxMatrix::zero(degrees.clone(), nvars, neta, Precision::exact());
        for (i, f) in self.diagonal.iter().enumerate() {
            m.entries[i][i] = MicroOp::from_series(neta, f.clone());
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaxMatrix {
    degrees: DegreeVector,
    entries: Vec<Vec<MicroOp>>,
}

impl LaxMatrix {
    pub fn new(degrees: DegreeVector, entries: Vec<Vec<MicroOp>>) -> Result<Self> {
        let d = degrees.dim();
        if entries.len() != d || entries.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch(format!("entries do not form a {d}x{d} matrix")));
        }
        let (nv, ne) = (entries[0][0].nvars(), entries[0][0].neta());
        for e in entries.iter().flatten() {
            if e.nvars() != nv {
                return Err(Error::VariableMismatch(nv, e.nvars()));
            }
            if e.neta() != ne {
                return Err(Error::GeneratorMismatch(ne, e.neta()));
            }
        }
        Ok(LaxMatrix { degrees, entries })
    }

    pub fn scalar(op: MicroOp) -> Self {
        LaxMatrix { degrees: DegreeVector::zeros(1), entries: vec![vec![op]] }
    }

    pub fn zero(degrees: DegreeVector, nvars: usize, neta: usize, prec: Precision) -> Self {
        let d = degrees.dim();
        let entries = vec![vec![MicroOp::zero_with(nvars, neta, prec); d]; d];
        LaxMatrix { degrees, entries }
    }

    pub fn identity(degrees: DegreeVector, nvars: usize, neta: usize, cap: Cap) -> Self {
        let mut m = Self::zero(degrees, nvars, neta, Precision::cap(cap));
        for i in 0..m.dim() {
            m.entries[i][i] = MicroOp::one(nvars, neta, cap);
        }
        m
    }

    pub fn diagonal(degrees: DegreeVector, diag: Vec<MicroOp>) -> Result<Self> {
        let d = degrees.dim();
        if diag.len() != d {
            return Err(Error::ShapeMismatch(format!("{} diagonal entries for dimension {d}", diag.len())));
        }
        let (nv, ne) = (diag[0].nvars(), diag[0].neta());
        let mut m = Self::zero(degrees, nv, ne, Precision::exact());
        for (i, op) in diag.into_iter().enumerate() {
            m.entries[i][i] = op;
        }
        Self::new(m.degrees, m.entries)
    }

    pub fn dim(&self) -> usize {
        self.degrees.dim()
    }

    pub fn degrees(&self) -> &DegreeVector {
        &self.degrees
    }

    pub fn nvars(&self) -> usize {
        self.entries[0][0].nvars()
    }

    pub fn neta(&self) -> usize {
        self.entries[0][0].neta()
    }

    pub fn get(&self, i: usize, j: usize) -> &MicroOp {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, op: MicroOp) {
        assert_eq!(op.nvars(), self.nvars());
        self.entries[i][j] = op;
    }

    pub fn entries(&self) -> &[Vec<MicroOp>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    /// Lowest ξ-floor over all entries; `None` if every entry is exact.
    pub fn floor(&self) -> Option<i64> {
        self.entries.iter().flatten().filter_map(|e| e.floor()).max()
    }

    fn check_shape(&self, other: &LaxMatrix) -> Result<()> {
        if self.degrees != other.degrees {
            return Err(Error::ShapeMismatch(format!("degree vectors {} and {}", self.degrees, other.degrees)));
        }
        Ok(())
    }

    fn map<F>(&self, mut f: F) -> Result<LaxMatrix>
    where
        F: FnMut(usize, usize, &MicroOp) -> Result<MicroOp>,
    {
        let mut entries = Vec::with_capacity(self.dim());
        for (i, row) in self.entries.iter().enumerate() {
            entries.push(row.iter().enumerate().map(|(j, e)| f(i, j, e)).collect::<Result<Vec<_>>>()?);
        }
        Ok(LaxMatrix { degrees: self.degrees.clone(), entries })
    }

    pub fn try_add(&self, other: &LaxMatrix) -> Result<LaxMatrix> {
        self.check_shape(other)?;
        self.map(|i, j, e| e.try_add(&other.entries[i][j]))
    }

    pub fn try_sub(&self, other: &LaxMatrix) -> Result<LaxMatrix> {
        self.check_shape(other)?;
        self.map(|i, j, e| e.try_add(&-&other.entries[i][j]))
    }

    pub fn scale(&self, c: &Rational) -> LaxMatrix {
        self.map(|_, _, e| Ok(e.scale(c))).expect("scaling cannot fail")
    }

    pub fn truncate(&self, floor: Option<i64>, prec: Precision) -> LaxMatrix {
        self.map(|_, _, e| Ok(e.truncate(floor, prec))).expect("truncation cannot fail")
    }

    pub fn agrees_with(&self, other: &LaxMatrix) -> bool {
        self.degrees == other.degrees
            && self.entries.iter().flatten().zip(other.entries.iter().flatten()).all(|(a, b)| a.agrees_with(b))
    }

    pub fn mul(&self, rhs: &LaxMatrix) -> Result<LaxMatrix> {
        self.mul_to(rhs, None)
    }

    /// Product with every entry computed down to ξ-exponent `floor`.
    pub fn mul_to(&self, rhs: &LaxMatrix, floor: Option<i64>) -> Result<LaxMatrix> {
        self.check_shape(rhs)?;
        let d = self.dim();
        self.map(|i, j, _| {
            let mut acc = self.entries[i][0].mul_to(&rhs.entries[0][j], floor)?;
            for k in 1..d {
                acc = acc.try_add(&self.entries[i][k].mul_to(&rhs.entries[k][j], floor)?)?;
            }
            Ok(acc)
        })
    }

    pub fn commutator(&self, rhs: &LaxMatrix, floor: Option<i64>) -> Result<LaxMatrix> {
        self.mul_to(rhs, floor)?.try_sub(&rhs.mul_to(self, floor)?)
    }

    /// True iff `ord(A_ab) <= k + c_a - c_b` for every entry.
    pub fn filtered_order_at_most(&self, k: i64) -> bool {
        let c = &self.degrees;
        self.entries
            .iter()
            .enumerate()
            .all(|(a, row)| row.iter().enumerate().all(|(b, e)| e.order().at_most(k + c.get(a) - c.get(b))))
    }

    /// Least `k` with [`filtered_order_at_most`](Self::filtered_order_at_most).
    pub fn filtered_order(&self) -> OpOrder {
        let c = &self.degrees;
        let mut best = OpOrder::NEG_INFINITY;
        for (a, row) in self.entries.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                if let Some(o) = e.order().value() {
                    best = best.max(OpOrder(Some(o - c.get(a) + c.get(b))));
                }
            }
        }
        best
    }

    pub fn split(&self) -> (LaxMatrix, LaxMatrix) {
        let plus = self.map(|_, _, e| Ok(e.plus())).expect("split cannot fail");
        let minus = self.map(|_, _, e| Ok(e.minus())).expect("split cannot fail");
        (plus, minus)
    }

    pub fn plus(&self) -> LaxMatrix {
        self.split().0
    }

    pub fn minus(&self) -> LaxMatrix {
        self.split().1
    }

    pub fn derive(&self, i: usize) -> Result<LaxMatrix> {
        self.map(|_, _, e| e.derive(i))
    }

    pub fn map_series<F>(&self, mut f: F) -> Result<LaxMatrix>
    where
        F: FnMut(&TruncSeries) -> Result<TruncSeries>,
    {
        self.map(|_, _, e| e.map_series(&mut f))
    }

    /// Entrywise map.
    pub fn map_entries<F>(&self, f: F) -> Result<LaxMatrix>
    where
        F: FnMut(usize, usize, &MicroOp) -> Result<MicroOp>,
    {
        self.map(f)
    }

    pub fn extend_vars(&self, extra: usize) -> LaxMatrix {
        self.map(|_, _, e| Ok(e.extend_vars(extra))).expect("cannot fail")
    }

    /// The matrix ξ-symbol: entry `(a,b)` is the η-free ξ-exponent
    /// `N + c_a - c_b` coefficient, or zero when the entry has lower order.
    pub fn sigma(&self, n: i64) -> LaxMatrix {
        let c = self.degrees.clone();
        self.map(|a, b, e| {
            let k = n + c.get(a) - c.get(b);
            if e.order().at_most(k - 1) {
                return Ok(MicroOp::zero_with(e.nvars(), e.neta(), e.precision()));
            }
            Ok(MicroOp::monomial(e.xi_coeff(k), vec![0; e.neta()], k))
        })
        .expect("symbol extraction cannot fail")
    }

    /// `xi^-N Xi^-1 A Xi` on symbols: strips the expected ξ-power from
    /// every entry, failing if an entry is not a pure ξ-monomial of that power.
    pub fn xi_conjugate(&self, n: i64) -> Result<SeriesMatrix> {
        let c = &self.degrees;
        let mut rows = Vec::with_capacity(self.dim());
        for (a, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (b, e) in row.iter().enumerate() {
                let k = n + c.get(a) - c.get(b);
                let symbolic = e.terms().iter().all(|(&i, p)| i == k && p.degree() == Some(0));
                if !symbolic {
                    return Err(Error::NotSymbolic { row: a, col: b, exponent: k });
                }
                out.push(e.xi_coeff(k));
            }
            rows.push(out);
        }
        SeriesMatrix::new(rows)
    }

    /// Inverse of [`xi_conjugate`](Self::xi_conjugate).
    pub fn xi_unconjugate(s: &SeriesMatrix, degrees: &DegreeVector, neta: usize, n: i64) -> Result<LaxMatrix> {
        if s.dim() != degrees.dim() {
            return Err(Error::ShapeMismatch(format!("{}x{} symbol for degree vector {degrees}", s.dim(), s.dim())));
        }
        let entries = s
            .rows()
            .iter()
            .enumerate()
            .map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .map(|(b, f)| MicroOp::monomial(f.clone(), vec![0; neta], n + degrees.get(a) - degrees.get(b)))
                    .collect()
            })
            .collect();
        LaxMatrix::new(degrees.clone(), entries)
    }

    /// `diag(xi^(w_a))` with weights `w_a = f(c_a)`.
    fn xi_weights(&self, f: impl Fn(i64) -> i64) -> LaxMatrix {
        let (nv, ne) = (self.nvars(), self.neta());
        let diag = self.degrees.as_slice().iter().map(|&c| MicroOp::xi_pow(nv, ne, Cap::Exact, f(c))).collect();
        LaxMatrix::diagonal(self.degrees.clone(), diag).expect("weights match the degree vector")
    }

    /// Inverse with every entry known down to ξ-exponent `floor`.
    ///
    /// With `P = diag(xi^(c_d - c_a))` and `Q = diag(xi^(c_b - c_1))` every
    /// entry of `PAQ` is measured against one top exponent `N`. The η-free
    /// leading block `S` is inverted over the series ring and the remainder
    /// `R` handled by the Neumann series of `-(xi^-N S^-1) R`. Only
    /// nonnegative powers of ξ are used for the conjugation, so it costs
    /// no extra precision.
    pub fn invert(&self, floor: i64) -> Result<LaxMatrix> {
        let (first, last) = (self.degrees.get(0), self.degrees.get(self.dim() - 1));
        let work = floor - 2 * self.degrees.spread();
        let p = self.xi_weights(|c| last - c);
        let q = self.xi_weights(|c| c - first);
        let conj = p.mul(self)?.mul(&q)?;
        let n = conj
            .entries
            .iter()
            .flatten()
            .filter_map(|e| e.top())
            .max()
            .ok_or_else(|| Error::NotInvertible("zero matrix".into()))?;
        let neta = self.neta();
        let mut lead_rows = Vec::new();
        for (a, row) in conj.entries.iter().enumerate() {
            let mut out = Vec::new();
            for (b, e) in row.iter().enumerate() {
                if e.coeff(n).degree().is_some_and(|d| d > 0) {
                    return Err(Error::NotInvertible(format!("leading block entry ({a},{b}) involves eta")));
                }
                out.push(e.xi_coeff(n));
            }
            lead_rows.push(out);
        }
        let lead_inv = SeriesMatrix::new(lead_rows)?.invert().map_err(|e| match e {
            Error::NotInvertible(m) => Error::NotInvertible(format!("leading xi^{n} block: {m}")),
            other => other,
        })?;
        let lead_op = conj.map(|_, _, e| Ok(MicroOp::monomial(e.xi_coeff(n), vec![0; neta], n)))?;
        let rest = conj.try_sub(&lead_op)?;
        let xi_neg = LaxMatrix::scalar_matrix(&self.degrees, MicroOp::xi_pow(self.nvars(), neta, Cap::Exact, -n));
        let s_inv = conj.map(|a, b, _| Ok(MicroOp::from_series(neta, lead_inv.get(a, b).clone())))?;
        let x = xi_neg.mul_to(&s_inv, Some(work))?;
        let t = x.mul_to(&rest, Some(work))?.scale(&-Rational::one());
        let mut acc = x.clone();
        let mut term = x;
        for _ in 0..(-n - work).max(0) {
            term = t.mul_to(&term, Some(work))?;
            if term.is_zero() {
                break;
            }
            acc = acc.try_add(&term)?;
        }
        let back = q.mul_to(&acc, Some(floor))?.mul_to(&p, Some(floor))?;
        Ok(back.truncate(Some(floor), Precision::exact()))
    }

    /// Every diagonal entry equal to `op`.
    pub fn scalar_matrix(degrees: &DegreeVector, op: MicroOp) -> LaxMatrix {
        LaxMatrix::diagonal(degrees.clone(), vec![op; degrees.dim()]).expect("one entry per degree")
    }

    pub fn canonical(&self) -> String {
        let rows: Vec<String> =
            self.entries.iter().map(|r| r.iter().map(|e| e.canonical()).collect::<Vec<_>>().join(" | ")).collect();
        format!("[{}]", rows.join(" ; "))
    }
}

impl fmt::Display for LaxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

pub fn mat_mul(a: &LaxMatrix, b: &LaxMatrix) -> Result<LaxMatrix> {
    a.mul(b)
}

pub fn mat_filtered_order(a: &LaxMatrix, k: i64) -> bool {
    a.filtered_order_at_most(k)
}

pub fn mat_invert(a: &LaxMatrix, floor: i64) -> Result<LaxMatrix> {
    a.invert(floor)
}

pub fn mat_split(a: &LaxMatrix) -> (LaxMatrix, LaxMatrix) {
    a.split()
}

pub fn mat_sigma(a: &LaxMatrix, n: i64) -> LaxMatrix {
    a.sigma(n)
}

pub fn mat_xi_conjugate(a: &LaxMatrix, n: i64) -> Result<SeriesMatrix> {
    a.xi_conjugate(n)
}

pub fn mat_commutator(a: &LaxMatrix, b: &LaxMatrix, floor: Option<i64>) -> Result<LaxMatrix> {
    a.commutator(b, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::int;

    const NV: usize = 2;

    fn series(terms: &[(&[u32], i64)]) -> TruncSeries {
        TruncSeries::from_terms(NV, Cap::Exact, terms.iter().map(|(m, c)| (m.to_vec(), int(*c))))
    }

    fn xi(i: i64) -> MicroOp {
        MicroOp::xi_pow(NV, 0, Cap::Exact, i)
    }

    fn f(s: &TruncSeries) -> MicroOp {
        MicroOp::from_series(0, s.clone())
    }

    fn zero() -> MicroOp {
        MicroOp::zero(NV, 0, Cap::Exact)
    }

    fn deg(c: &[i64]) -> DegreeVector {
        DegreeVector::new(c.to_vec()).unwrap()
    }

    fn ops_of_order(orders: [[Option<i64>; 2]; 2]) -> LaxMatrix {
        let e = |o: Option<i64>| o.map_or_else(zero, xi);
        let entries = orders.iter().map(|r| r.iter().map(|&o| e(o)).collect()).collect();
        LaxMatrix::new(deg(&[2, 3]), entries).unwrap()
    }

    #[test]
    fn degree_vector_must_be_nondecreasing() {
        assert!(DegreeVector::new(vec![2, 3, 3]).is_ok());
        assert_eq!(DegreeVector::new(vec![3, 2]), Err(Error::BadDegrees(vec![3, 2])));
        assert!(DegreeVector::new(vec![]).is_err());
    }

    #[test]
    fn diag_xi_times_functions() {
        let u = series(&[(&[2, 0], 1)]);
        let v = series(&[(&[1, 1], 1)]);
        let a = LaxMatrix::diagonal(deg(&[0, 0]), vec![xi(1), xi(1)]).unwrap();
        let b = LaxMatrix::diagonal(deg(&[0, 0]), vec![f(&u), f(&v)]).unwrap();
        let p = a.mul(&b).unwrap();
        let expect = |s: &TruncSeries| &MicroOp::monomial(s.clone(), vec![], 1) + &f(&s.derive(0).unwrap());
        assert_eq!(p.get(0, 0), &expect(&u));
        assert_eq!(p.get(1, 1), &expect(&v));
        assert!(p.get(0, 1).is_zero());
    }

    #[test]
    fn filtered_order_examples() {
        let z = LaxMatrix::zero(deg(&[2, 3]), NV, 0, Precision::exact());
        assert!(z.filtered_order_at_most(-100));
        let ok = ops_of_order([[Some(0), Some(-1)], [Some(0), Some(0)]]);
        assert!(ok.filtered_order_at_most(0));
        let bad = ops_of_order([[Some(0), Some(0)], [Some(0), Some(0)]]);
        assert!(!bad.filtered_order_at_most(0));
        assert_eq!(bad.filtered_order(), OpOrder(Some(1)));
    }

    #[test]
    fn sigma_index_arithmetic() {
        let u = series(&[(&[1, 0], 1)]);
        let full = |k: i64| &(&xi(k) + &MicroOp::monomial(u.clone(), vec![], k - 1)) + &xi(k - 2);
        let a = LaxMatrix::new(deg(&[2, 3]), vec![vec![full(0), full(-1)], vec![full(1), full(0)]]).unwrap();
        let s = a.sigma(0);
        assert_eq!(s.get(0, 0), &xi(0));
        assert_eq!(s.get(0, 1), &xi(-1));
        assert_eq!(s.get(1, 0), &xi(1));
        let id = LaxMatrix::identity(deg(&[2, 3]), NV, 0, Cap::Exact);
        assert_eq!(id.sigma(0), id);
        assert!(a.sigma(5).is_zero());
    }

    #[test]
    fn conjugation_round_trip() {
        let u = series(&[(&[1, 0], 1), (&[0, 0], 2)]);
        let c = deg(&[2, 3]);
        let s = SeriesMatrix::new(vec![
            vec![TruncSeries::one(NV, Cap::Exact), u.clone()],
            vec![TruncSeries::zero(NV, Cap::Exact), u.clone()],
        ])
        .unwrap();
        let a = LaxMatrix::xi_unconjugate(&s, &c, 0, 4).unwrap();
        assert_eq!(a.get(0, 1), &MicroOp::monomial(u.clone(), vec![], 3));
        assert_eq!(a.xi_conjugate(4).unwrap(), s);
        let id = LaxMatrix::identity(c.clone(), NV, 0, Cap::Exact);
        assert_eq!(id.xi_conjugate(0).unwrap(), SeriesMatrix::identity(2, NV, Cap::Exact));
        assert!(matches!(a.xi_conjugate(3), Err(Error::NotSymbolic { .. })));
    }

    #[test]
    fn invert_diagonal_xi() {
        let a = LaxMatrix::diagonal(deg(&[0, 0]), vec![xi(1), xi(1)]).unwrap();
        let inv = a.invert(-6).unwrap();
        assert!(inv.agrees_with(&LaxMatrix::diagonal(deg(&[0, 0]), vec![xi(-1), xi(-1)]).unwrap()));
    }

    #[test]
    fn invert_upper_triangular() {
        let u = series(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = LaxMatrix::new(deg(&[0, 0]), vec![vec![xi(1), f(&u)], vec![zero(), xi(1)]]).unwrap();
        let inv = a.invert(-6).unwrap();
        let corner = xi(-1).mul_to(&f(&u), Some(-6)).unwrap().mul_to(&xi(-1), Some(-6)).unwrap();
        assert!(inv.get(0, 1).agrees_with(&-&corner));
        assert!(inv.get(0, 0).agrees_with(&xi(-1)));
        assert!(inv.get(1, 0).is_zero());
        let id = LaxMatrix::identity(deg(&[0, 0]), NV, 0, Cap::Exact).truncate(Some(-5), Precision::exact());
        assert!(a.mul_to(&inv, Some(-5)).unwrap().agrees_with(&id));
    }

    #[test]
    fn invert_with_spread_degrees() {
        // c = (2,3): entries (1,2) of order -1, (2,1) of order 1.
        let u = series(&[(&[1, 0], 1)]).truncate(Cap::Degree(6));
        let c = deg(&[2, 3]);
        let a = LaxMatrix::new(
            c.clone(),
            vec![
                vec![&xi(2) + &f(&u), MicroOp::monomial(u.clone(), vec![], 1)],
                vec![xi(3), &xi(2) + &xi(0)],
            ],
        );
        // leading block [[1,u],[1,1]] has determinant 1-u, a unit
        let a = a.unwrap();
        let inv = a.invert(-8).unwrap();
        let id = LaxMatrix::identity(c, NV, 0, Cap::Exact);
        let prod = a.mul_to(&inv, Some(-4)).unwrap();
        assert!(!prod.get(0, 0).precision().is_empty());
        assert!(prod.agrees_with(&id.truncate(Some(-4), Precision::exact())));
        let prod = inv.mul_to(&a, Some(-4)).unwrap();
        assert!(prod.agrees_with(&id.truncate(Some(-4), Precision::exact())));
    }

    #[test]
    fn singular_leading_block_rejected() {
        let a = LaxMatrix::new(deg(&[0, 0]), vec![vec![xi(1), xi(1)], vec![xi(1), xi(1)]]).unwrap();
        assert!(matches!(a.invert(-3), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn commutator_basics() {
        let u = series(&[(&[2, 0], 1)]);
        let a = LaxMatrix::new(deg(&[0, 0]), vec![vec![xi(2), f(&u)], vec![xi(1), zero()]]).unwrap();
        assert!(a.commutator(&a, None).unwrap().is_zero());
        let id = LaxMatrix::identity(deg(&[0, 0]), NV, 0, Cap::Exact);
        assert!(id.commutator(&a, None).unwrap().is_zero());
    }

    #[test]
    fn series_matrix_inverse() {
        let u = series(&[(&[1, 0], 1)]).truncate(Cap::Degree(4));
        let one = TruncSeries::one(NV, Cap::Degree(4));
        let m = SeriesMatrix::new(vec![vec![u.clone(), one.clone()], vec![one.clone(), u.clone()]]).unwrap();
        let inv = m.invert().unwrap();
        assert!(m.mul(&inv).unwrap().agrees_with(&SeriesMatrix::identity(2, NV, Cap::Degree(4))));
    }
}
