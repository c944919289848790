//! Truncated Laurent expansions at marked points and their elimination.
//!
//! A [`LocalSection`] stands for `z^(-shift) * body`, where the body is a
//! series in the local coordinates `z, w_1..w_(n-1)` at a marked point and
//! the base coordinates `t_1..t_n`. Variables are laid out as
//! `[z, w_1, .., w_(n-1), t_1, .., t_n]`. The generators act by
//!
//! ```text
//! xi    . s = d_(t_1) s + s / z
//! eta_i . s = d_(t_(i+1)) s + (w_i / z) s
//! ```
//!
//! Bodies carry a total-degree cap and a separate bound on the joint
//! `t`-degree; each generator action spends one unit of the latter.

use std::fmt;

use num_traits::{One, Zero};

use crate::coeffring::{Cap, Monomial, Precision, Rational, TimeOrder, TruncSeries};
use crate::error::{Error, Result};
use crate::laxmat::{DegreeVector, LaxMatrix, SeriesMatrix};
use crate::microp::MicroOp;

/// Default truncation depths: `(z,w)`-degree and `t`-degree.
pub const DEFAULT_ZW_DEPTH: i64 = 6;
pub const DEFAULT_T_DEPTH: i64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Depths {
    pub zw: i64,
    pub t: i64,
}

impl Default for Depths {
    fn default() -> Self {
        Depths { zw: DEFAULT_ZW_DEPTH, t: DEFAULT_T_DEPTH }
    }
}

/// Generator tags; `Eta(i)` is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    Xi,
    Eta(usize),
}

fn t_mask(n: usize) -> u64 {
    ((1u64 << n) - 1) << n
}

/// Body precision for dimension `n` at the given depths.
pub fn body_precision(n: usize, depths: Depths) -> Precision {
    Precision {
        cap: Cap::Degree(depths.zw + depths.t),
        time: Some(TimeOrder { vars: t_mask(n), order: depths.t }),
    }
}

fn zw_degree(m: &[u32], n: usize) -> i64 {
    m[..n].iter().map(|&e| e as i64).sum()
}

/// Lifts a series in `t_1..t_n` to a body series.
pub fn embed_base(f: &TruncSeries) -> TruncSeries {
    let n = f.nvars();
    let prec = match f.cap() {
        Cap::Exact => Precision::exact(),
        Cap::Degree(c) => Precision { cap: Cap::Exact, time: Some(TimeOrder { vars: t_mask(n), order: c }) },
    };
    let terms = f.terms().iter().map(|(m, c)| {
        let mut nm = vec![0; n];
        nm.extend_from_slice(m);
        (nm, c.clone())
    });
    TruncSeries::from_terms_with(2 * n, prec, terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalSection {
    point: usize,
    zshift: i64,
    body: TruncSeries,
}

impl LocalSection {
    pub fn new(point: usize, zshift: i64, body: TruncSeries) -> Self {
        assert!(body.nvars().is_multiple_of(2) && body.nvars() > 0, "body needs (z,w) and t variables");
        LocalSection { point, zshift, body }
    }

    pub fn zero(point: usize, n: usize, depths: Depths) -> Self {
        LocalSection::new(point, 0, TruncSeries::zero_with(2 * n, body_precision(n, depths)))
    }

    /// The constant section `c` at `point`.
    pub fn constant(point: usize, n: usize, depths: Depths, c: Rational) -> Self {
        let body = TruncSeries::from_terms_with(2 * n, body_precision(n, depths), [(vec![0; 2 * n], c)]);
        LocalSection::new(point, 0, body)
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn zshift(&self) -> i64 {
        self.zshift
    }

    pub fn body(&self) -> &TruncSeries {
        &self.body
    }

    /// Dimension `n` of the base.
    pub fn dim(&self) -> usize {
        self.body.nvars() / 2
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    fn z_power(&self, k: i64) -> Monomial {
        let mut m = vec![0; self.body.nvars()];
        m[0] = k as u32;
        m
    }

    /// Same section with shift at least `s`.
    pub fn with_shift(&self, s: i64) -> LocalSection {
        if s <= self.zshift {
            return self.clone();
        }
        let body = self.body.shift(&self.z_power(s - self.zshift));
        LocalSection { body, zshift: s, ..self.clone() }
    }

    /// Absorbs a negative shift into the body.
    fn normalized(&self) -> LocalSection {
        if self.zshift < 0 {
            self.with_shift(0)
        } else {
            self.clone()
        }
    }

    /// Multiplies by `z^k`.
    pub fn times_z(&self, k: i64) -> LocalSection {
        LocalSection { zshift: self.zshift - k, ..self.clone() }.normalized()
    }

    pub fn try_add(&self, other: &LocalSection) -> Result<LocalSection> {
        let s = self.zshift.max(other.zshift);
        let body = self.with_shift(s).body.try_add(&other.with_shift(s).body)?;
        Ok(LocalSection { point: self.point, zshift: s, body }.normalized())
    }

    pub fn scale(&self, c: &Rational) -> LocalSection {
        LocalSection { body: self.body.scale(c), ..self.clone() }
    }

    /// Multiplication by a function of the base coordinates.
    pub fn mul_base(&self, f: &TruncSeries) -> Result<LocalSection> {
        Ok(LocalSection { body: embed_base(f).mul(&self.body)?, ..self.clone() })
    }

    pub fn agrees_with(&self, other: &LocalSection) -> bool {
        let s = self.zshift.max(other.zshift);
        self.with_shift(s).body.agrees_with(&other.with_shift(s).body)
    }

    /// Precision of values: the `t`-degree bound.
    fn base_cap(&self) -> Cap {
        let p = self.body.precision();
        p.time.map_or(Cap::Exact, |t| Cap::Degree(t.order)).min(p.cap)
    }

    /// Vanishing order in `(z,w)`, `None` for zero. Negative means a pole.
    pub fn order(&self) -> Option<i64> {
        let n = self.dim();
        self.body.terms().keys().map(|m| zw_degree(m, n)).min().map(|d| d - self.zshift)
    }

    /// No pole: `z^shift` divides the body.
    pub fn is_regular(&self) -> bool {
        self.body.terms().keys().all(|m| m[0] as i64 >= self.zshift)
    }

    /// Value at the point as a series in `t`; requires a regular section.
    pub fn evaluate(&self) -> Result<TruncSeries> {
        let n = self.dim();
        if !self.is_regular() {
            return Err(Error::PoleRemaining { row: 0, col: self.point });
        }
        let cap = self.base_cap();
        let terms = self
            .body
            .terms()
            .iter()
            .filter(|(m, _)| zw_degree(m, n) == self.zshift && m[0] as i64 == self.zshift)
            .map(|(m, c)| (m[n..].to_vec(), c.clone()));
        Ok(TruncSeries::from_terms(n, cap, terms))
    }

    /// Homogeneous `(z,w)`-degree `d` part of the regular section
    /// `z^(-shift) body`, as `(z-exponent, w-exponents) -> t-series`.
    pub fn jet(&self, d: i64) -> Vec<(u32, Monomial, TruncSeries)> {
        let n = self.dim();
        let cap = self.base_cap().min(self.body.cap().lowered(d + self.zshift));
        let mut groups: std::collections::BTreeMap<Monomial, Vec<(Monomial, Rational)>> = Default::default();
        for (m, c) in self.body.terms() {
            if zw_degree(m, n) - self.zshift != d {
                continue;
            }
            groups.entry(m[..n].to_vec()).or_default().push((m[n..].to_vec(), c.clone()));
        }
        groups
            .into_iter()
            .filter_map(|(zw, ts)| {
                let z = zw[0] as i64 - self.zshift;
                (z >= 0).then(|| (z as u32, zw[1..].to_vec(), TruncSeries::from_terms(n, cap, ts)))
            })
            .collect()
    }
}

impl fmt::Display for LocalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{} z^-{} {}", self.point, self.zshift, self.body.canonical())
    }
}

/// Action of a generator on a section.
pub fn lm_act(g: Gen, s: &LocalSection) -> Result<LocalSection> {
    let n = s.dim();
    let dvar = match g {
        Gen::Xi => n,
        Gen::Eta(i) if i + 1 < n => n + i + 1,
        Gen::Eta(i) => return Err(Error::IndexOutOfRange { index: i, nvars: n - 1 }),
    };
    let mut by = vec![0; 2 * n];
    by[dvar] = 1;
    let mut zm = vec![0; 2 * n];
    zm[0] = 1;
    let d = s.body.derive_multi(&by).shift(&zm);
    let mult = match g {
        Gen::Xi => s.body.clone(),
        Gen::Eta(i) => {
            let mut wm = vec![0; 2 * n];
            wm[1 + i] = 1;
            s.body.shift(&wm)
        }
    };
    let body = mult.try_add(&d)?;
    if body.precision().is_empty() {
        return Err(Error::TruncationExhausted(format!("acting by {g:?} on a section at Q{}", s.point)));
    }
    Ok(LocalSection { point: s.point, zshift: s.zshift + 1, body })
}

/// Applies a differential operator (xi-exponents >= 0) to a section.
pub fn lm_apply(op: &MicroOp, s: &LocalSection) -> Result<LocalSection> {
    let n = s.dim();
    if op.nvars() != n {
        return Err(Error::VariableMismatch(n, op.nvars()));
    }
    if let Some(b) = op.bottom().filter(|&b| b < 0) {
        return Err(Error::NotDifferential(b));
    }
    let mut acc = LocalSection::new(s.point, 0, TruncSeries::zero_with(2 * n, Precision::exact()));
    let mut xi_pows = vec![s.clone()];
    for (&i, poly) in op.terms() {
        while xi_pows.len() <= i as usize {
            let next = lm_act(Gen::Xi, xi_pows.last().expect("nonempty"))?;
            xi_pows.push(next);
        }
        for (alpha, f) in poly.terms() {
            let mut v = xi_pows[i as usize].clone();
            for (j, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    v = lm_act(Gen::Eta(j), &v)?;
                }
            }
            acc = acc.try_add(&v.mul_base(f)?)?;
        }
    }
    Ok(acc)
}

/// Matrix ideal pattern: entry `(a,b)` must vanish to order
/// `r_a - r_b + level - [a == b]` at its point; nonpositive means no condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealPattern {
    pub rowdeg: Vec<i64>,
    pub level: i64,
}

impl IdealPattern {
    pub fn new(rowdeg: Vec<i64>, level: i64) -> Self {
        IdealPattern { rowdeg, level }
    }

    pub fn exponent(&self, a: usize, b: usize) -> i64 {
        self.rowdeg[a] - self.rowdeg[b] + self.level - i64::from(a == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalMatrix {
    rowdeg: Vec<i64>,
    entries: Vec<Vec<LocalSection>>,
}

impl LocalMatrix {
    pub fn new(rowdeg: Vec<i64>, entries: Vec<Vec<LocalSection>>) -> Result<Self> {
        let j = rowdeg.len();
        if j == 0 || entries.len() != j || entries.iter().any(|r| r.len() != j) {
            return Err(Error::ShapeMismatch(format!("local matrix must be {j}x{j}")));
        }
        DegreeVector::new(rowdeg.clone())?;
        let n = entries[0][0].dim();
        if entries.iter().flatten().any(|e| e.dim() != n) {
            return Err(Error::ShapeMismatch("sections over different bases".into()));
        }
        Ok(LocalMatrix { rowdeg, entries })
    }

    pub fn dim(&self) -> usize {
        self.rowdeg.len()
    }

    /// Dimension of the base.
    pub fn base_dim(&self) -> usize {
        self.entries[0][0].dim()
    }

    pub fn rowdeg(&self) -> &[i64] {
        &self.rowdeg
    }

    pub fn get(&self, a: usize, b: usize) -> &LocalSection {
        &self.entries[a][b]
    }

    pub fn entries(&self) -> &[Vec<LocalSection>] {
        &self.entries
    }

    /// Row `a` multiplied by `z^(r_a)`.
    pub fn tilde(&self) -> LocalMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&self.rowdeg)
            .map(|(row, &r)| row.iter().map(|e| e.times_z(r)).collect())
            .collect();
        LocalMatrix { rowdeg: self.rowdeg.clone(), entries }
    }

    /// Inverse of [`tilde`](Self::tilde).
    pub fn untilde(&self) -> LocalMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&self.rowdeg)
            .map(|(row, &r)| row.iter().map(|e| e.times_z(-r)).collect())
            .collect();
        LocalMatrix { rowdeg: self.rowdeg.clone(), entries }
    }

    /// Values at the marked points; every entry must be regular.
    pub fn evaluate(&self) -> Result<SeriesMatrix> {
        let mut rows = Vec::with_capacity(self.dim());
        for (a, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (b, e) in row.iter().enumerate() {
                out.push(e.evaluate().map_err(|_| Error::PoleRemaining { row: a, col: b })?);
            }
            rows.push(out);
        }
        SeriesMatrix::new(rows)
    }

    pub fn ideal_member(&self, p: &IdealPattern) -> bool {
        self.entries.iter().enumerate().all(|(a, row)| {
            row.iter().enumerate().all(|(b, e)| {
                let need = p.exponent(a, b);
                need <= 0 || e.order().is_none_or(|o| o >= need)
            })
        })
    }

    /// Good basis test: after tilde, units on the diagonal plus regular
    /// off-diagonal entries in the level-1 pattern.
    pub fn is_good(&self) -> bool {
        let t = self.tilde();
        let pattern = IdealPattern::new(self.rowdeg.clone(), 1);
        let regular = t.entries.iter().flatten().all(|e| e.is_regular());
        let units = (0..self.dim()).all(|a| t.entries[a][a].evaluate().is_ok_and(|v| v.is_unit()));
        regular && units && t.ideal_member(&pattern)
    }

    pub fn permute_columns(&self, sigma: &[usize]) -> LocalMatrix {
        let entries = self.entries.iter().map(|row| sigma.iter().map(|&s| row[s].clone()).collect()).collect();
        LocalMatrix { rowdeg: self.rowdeg.clone(), entries }
    }

    /// Left multiplication by a matrix of differential operators.
    pub fn apply(&self, l: &LaxMatrix) -> Result<LocalMatrix> {
        let d = self.dim();
        if l.dim() != d {
            return Err(Error::ShapeMismatch(format!("{0}x{0} operator matrix on {d}x{d} sections", l.dim())));
        }
        let mut entries = Vec::with_capacity(d);
        for a in 0..d {
            let mut row = Vec::with_capacity(d);
            for b in 0..d {
                let point = self.entries[a][b].point;
                let mut acc = LocalSection::new(point, 0, TruncSeries::zero_with(2 * self.base_dim(), Precision::exact()));
                for k in 0..d {
                    let op = l.get(a, k);
                    if op.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&lm_apply(op, &self.entries[k][b])?)?;
                }
                row.push(acc);
            }
            entries.push(row);
        }
        Ok(LocalMatrix { rowdeg: self.rowdeg.clone(), entries })
    }

    pub fn agrees_with(&self, other: &LocalMatrix) -> bool {
        self.rowdeg == other.rowdeg
            && self.entries.iter().flatten().zip(other.entries.iter().flatten()).all(|(a, b)| a.agrees_with(b))
    }
}

/// A type-2 move: row `target` gains `op` applied to row `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowMove {
    pub target: usize,
    pub source: usize,
    pub op: MicroOp,
}

#[derive(Clone, Debug)]
pub struct Elimination {
    /// Accumulated row operations, of filtered order 0.
    pub l: LaxMatrix,
    /// Column order: result column `b` is input column `sigma[b]`.
    pub sigma: Vec<usize>,
    pub result: LocalMatrix,
    pub moves: Vec<RowMove>,
    pub sweeps: usize,
}

impl Elimination {
    /// `L` rebuilt as the inverse product of the recorded moves.
    pub fn l_inverse(&self) -> Result<LaxMatrix> {
        let mut x = LaxMatrix::identity(self.l.degrees().clone(), self.l.nvars(), self.l.neta(), Cap::Exact);
        for mv in self.moves.iter().rev() {
            x = row_update(&x, mv.target, mv.source, &-&mv.op)?;
        }
        Ok(x)
    }
}

/// Row `target` += `op` * row `source`.
fn row_update(m: &LaxMatrix, target: usize, source: usize, op: &MicroOp) -> Result<LaxMatrix> {
    let mut out = m.clone();
    for b in 0..m.dim() {
        let add = op.mul(m.get(source, b))?;
        out.set(target, b, m.get(target, b).try_add(&add)?);
    }
    Ok(out)
}

/// Maximum number of cleaning sweeps before giving up.
pub const MAX_SWEEPS: usize = 16;

/// Brings `chi` into good form with column permutations and type-2 moves
/// `row_a2 += L0 row_a1`, `ord(L0) <= r_a2 - r_a1`.
///
/// Pivots are chosen row by row in increasing degree: the first remaining
/// column whose value at the point is a unit. Afterwards every entry
/// below its required vanishing order is cleared degree by degree, and
/// the sweep repeats until nothing changes.
pub fn lm_gauss_normalize(chi: &LocalMatrix) -> Result<Elimination> {
    let d = chi.dim();
    let n = chi.base_dim();
    let neta = n - 1;
    let r = chi.rowdeg.clone();
    let degrees = DegreeVector::new(r.clone())?;
    let mut w = chi.tilde();
    if w.entries.iter().flatten().any(|e| !e.is_regular()) {
        return Err(Error::NotEliminable(0));
    }
    let mut sigma: Vec<usize> = (0..d).collect();
    let mut l = LaxMatrix::identity(degrees, n, neta, Cap::Exact);
    let mut moves = Vec::new();

    let clear = |w: &mut LocalMatrix, l: &mut LaxMatrix, moves: &mut Vec<RowMove>, a2: usize, a1: usize| -> Result<bool> {
        let delta = r[a2] - r[a1];
        let mut changed = false;
        for deg in 0..=delta {
            let jet = w.entries[a2][a1].jet(deg);
            if jet.iter().all(|(_, _, c)| c.is_zero()) {
                continue;
            }
            let u0 = w.entries[a1][a1].evaluate()?;
            let u0_inv = u0.invert().map_err(|_| Error::NotEliminable(a1))?;
            let mut op = MicroOp::zero(n, neta, Cap::Exact);
            for (_, alpha, c) in jet {
                let coeff = c.mul(&u0_inv)?.scale(&-Rational::one());
                let coeff = TruncSeries::from_terms(n, Cap::Exact, coeff.terms().clone());
                op = &op + &MicroOp::monomial(coeff, alpha, delta - deg);
            }
            let row: Vec<LocalSection> = w.entries[a1]
                .iter()
                .map(|e| lm_apply(&op, &e.times_z(-r[a1])).map(|s| s.times_z(r[a2])))
                .collect::<Result<_>>()?;
            for (b, add) in row.into_iter().enumerate() {
                w.entries[a2][b] = w.entries[a2][b].try_add(&add)?;
            }
            *l = row_update(l, a2, a1, &op)?;
            moves.push(RowMove { target: a2, source: a1, op });
            changed = true;
        }
        Ok(changed)
    };

    for a1 in 0..d {
        let pivot = (a1..d)
            .find(|&c| w.entries[a1][c].evaluate().is_ok_and(|v| !v.constant_term().is_zero()))
            .ok_or(Error::NotEliminable(a1))?;
        if pivot != a1 {
            for row in w.entries.iter_mut() {
                row.swap(a1, pivot);
            }
            sigma.swap(a1, pivot);
        }
        for a2 in 0..d {
            if a2 != a1 && r[a2] >= r[a1] {
                clear(&mut w, &mut l, &mut moves, a2, a1)?;
            }
        }
    }
    let mut sweeps = 1;
    loop {
        let mut changed = false;
        for a1 in 0..d {
            for a2 in 0..d {
                if a2 != a1 && r[a2] >= r[a1] {
                    changed |= clear(&mut w, &mut l, &mut moves, a2, a1)?;
                }
            }
        }
        if !changed {
            break;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(Error::EliminationStalled(MAX_SWEEPS));
        }
    }
    let result = w.untilde();
    Ok(Elimination { l, sigma, result, moves, sweeps })
}

/// Checks `L chi sigma = result` by direct application.
pub fn verify_elimination(chi: &LocalMatrix, e: &Elimination) -> Result<bool> {
    let lhs = chi.apply(&e.l)?.permute_columns(&e.sigma);
    Ok(lhs.agrees_with(&e.result))
}

pub fn lm_tilde(chi: &LocalMatrix) -> LocalMatrix {
    chi.tilde()
}

pub fn lm_evaluate(chi: &LocalMatrix) -> Result<SeriesMatrix> {
    chi.evaluate()
}

pub fn lm_ideal_member(chi: &LocalMatrix, p: &IdealPattern) -> bool {
    chi.ideal_member(p)
}

pub fn lm_is_good(psi: &LocalMatrix) -> bool {
    psi.is_good()
}

/// Evaluation shape of a good matrix: upper triangular, and diagonal
/// within each block of equal row degree.
pub fn has_block_shape(values: &SeriesMatrix, rowdeg: &[i64]) -> bool {
    let d = values.dim();
    (0..d).all(|a| {
        (0..d).all(|b| {
            let must_vanish = a > b || (a != b && rowdeg[a] == rowdeg[b]);
            !must_vanish || values.get(a, b).is_zero()
        })
    })
}
