//! Microdifferential operators `sum_i L_i(eta) xi^i` over [`TruncSeries`].
//!
//! Operators are kept in normal order: coefficient series on the left,
//! then an eta-monomial, then a power of xi. The generator xi acts on
//! coefficients as the derivation in `t_1` and `eta_j` as the derivation in
//! `t_{j+1}`; the generators commute among themselves.
//!
//! Every operator carries two precision contracts:
//!
//! * a xi-floor: terms with xi-exponent below the floor are unknown and
//!   dropped. `None` means no xi-exponent is missing.
//! * a weight bound. Giving `t` weight 1 and `xi`, `eta` weight -1 makes
//!   the commutation rules homogeneous, so a term `t^m eta^a xi^i` is
//!   known when its weight `|m| - |a| - i` is within the bound. The
//!   coefficient at `xi^i eta^a` therefore carries total-degree cap
//!   `bound + i + |a|`; time truncations are shared by all coefficients.
//!
//! Products compute both contracts from their operands, so no term is
//! ever reported that the inputs do not determine.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::coeffring::{binomial, int, Cap, Monomial, Precision, Rational, TruncSeries};
use crate::error::{Error, Result};

/// Polynomial in `eta_1..eta_{n-1}` with series coefficients on the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaPoly {
    neta: usize,
    terms: BTreeMap<Monomial, TruncSeries>,
}

impl EtaPoly {
    pub fn zero(neta: usize) -> Self {
        EtaPoly { neta, terms: BTreeMap::new() }
    }

    pub fn from_series(neta: usize, f: TruncSeries) -> Self {
        let mut p = Self::zero(neta);
        p.add_term(vec![0; neta], f);
        p
    }

    pub fn neta(&self) -> usize {
        self.neta
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, TruncSeries> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total eta-degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().map(|a| a.iter().map(|&e| e as i64).sum()).max()
    }

    /// The eta-degree-zero coefficient.
    pub fn constant_part(&self) -> Option<&TruncSeries> {
        self.terms.get(&vec![0; self.neta])
    }

    fn add_term(&mut self, alpha: Monomial, f: TruncSeries) {
        if f.is_zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            Some(g) => {
                let s = &g + &f;
                if !s.is_zero() {
                    self.terms.insert(alpha, s);
                }
            }
            None => {
                self.terms.insert(alpha, f);
            }
        }
    }
}

/// Order of an operator; `None` stands for minus infinity (the zero operator).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpOrder(pub Option<i64>);

impl OpOrder {
    pub const NEG_INFINITY: OpOrder = OpOrder(None);

    pub fn value(self) -> Option<i64> {
        self.0
    }

    pub fn plus(self, other: OpOrder) -> OpOrder {
        match (self.0, other.0) {
            (Some(a), Some(b)) => OpOrder(Some(a + b)),
            _ => OpOrder(None),
        }
    }

    pub fn at_most(self, k: i64) -> bool {
        self.0.is_none_or(|v| v <= k)
    }
}

impl fmt::Display for OpOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "-inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MicroOp {
    nvars: usize,
    neta: usize,
    floor: Option<i64>,
    prec: Precision,
    terms: BTreeMap<i64, EtaPoly>,
}

/// All multi-indices `g <= a` componentwise.
fn sub_indices(a: &[u32]) -> Vec<Monomial> {
    let mut out = vec![vec![]];
    for &e in a {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for prefix in &out {
            for k in 0..=e {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn degree_of(m: &[u32]) -> i64 {
    m.iter().map(|&e| e as i64).sum()
}

/// Weight bound `w` seen from a coefficient at ξ-exponent `i` and η-degree `a`.
fn at_slot(w: Precision, i: i64, a: i64) -> Precision {
    w.lowered(-(i + a))
}

/// Weight bound implied by a coefficient precision at `(i, a)`.
fn from_slot(p: Precision, i: i64, a: i64) -> Precision {
    p.lowered(i + a)
}

impl MicroOp {
    pub fn zero(nvars: usize, neta: usize, cap: Cap) -> Self {
        Self::zero_with(nvars, neta, Precision::cap(cap))
    }

    /// Zero operator known up to weight bound `prec`.
    pub fn zero_with(nvars: usize, neta: usize, prec: Precision) -> Self {
        assert!(nvars > neta, "need a coordinate for xi and for each eta");
        MicroOp { nvars, neta, floor: None, prec, terms: BTreeMap::new() }
    }

    /// Builds an operator from `(xi-exponent, eta-index, coefficient)` terms.
    /// The weight bound is the meet of `prec` and what every coefficient's
    /// precision supports at its slot.
    pub fn from_terms<I>(nvars: usize, neta: usize, floor: Option<i64>, prec: Precision, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Monomial, TruncSeries)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let prec = terms.iter().fold(prec, |p, (i, a, f)| p.meet(from_slot(f.precision(), *i, degree_of(a))));
        let mut op = MicroOp::zero_with(nvars, neta, prec);
        op.floor = floor;
        for (i, alpha, f) in terms {
            assert_eq!(f.nvars(), nvars);
            assert_eq!(alpha.len(), neta);
            op.add_term(i, alpha, f);
        }
        op
    }

    pub fn one(nvars: usize, neta: usize, cap: Cap) -> Self {
        Self::monomial(TruncSeries::one(nvars, cap), vec![0; neta], 0)
    }

    /// `f eta^alpha xi^i`, exact as an expression.
    pub fn monomial(f: TruncSeries, alpha: Monomial, i: i64) -> Self {
        let nvars = f.nvars();
        let neta = alpha.len();
        Self::from_terms(nvars, neta, None, Precision::exact(), [(i, alpha, f)])
    }

    pub fn xi_pow(nvars: usize, neta: usize, cap: Cap, i: i64) -> Self {
        Self::monomial(TruncSeries::one(nvars, cap), vec![0; neta], i)
    }

    /// The generator `eta_j`, zero-based.
    pub fn eta(nvars: usize, neta: usize, cap: Cap, j: usize) -> Self {
        let mut alpha = vec![0; neta];
        alpha[j] = 1;
        Self::monomial(TruncSeries::one(nvars, cap), alpha, 0)
    }

    pub fn from_series(neta: usize, f: TruncSeries) -> Self {
        Self::monomial(f, vec![0; neta], 0)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn neta(&self) -> usize {
        self.neta
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    /// Weight bound: a coefficient monomial of degree `m` at `xi^i eta^a` is
    /// known when `m - i - |a|` is admitted. Commutation preserves weight.
    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn cap(&self) -> Cap {
        self.prec.cap
    }

    /// Precision of the coefficient at `xi^i eta^a` with `|a| = eta_degree`.
    pub fn slot_precision(&self, i: i64, eta_degree: i64) -> Precision {
        at_slot(self.prec, i, eta_degree)
    }

    /// Highest xi-exponent present, `None` for zero.
    pub fn top(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<i64, EtaPoly> {
        &self.terms
    }

    /// The eta-polynomial coefficient of `xi^i`.
    pub fn coeff(&self, i: i64) -> EtaPoly {
        self.terms.get(&i).cloned().unwrap_or_else(|| EtaPoly::zero(self.neta))
    }

    /// The eta-degree-zero series coefficient of `xi^i`.
    pub fn xi_coeff(&self, i: i64) -> TruncSeries {
        self.terms
            .get(&i)
            .and_then(|p| p.constant_part().cloned())
            .unwrap_or_else(|| TruncSeries::zero_with(self.nvars, self.slot_precision(i, 0)))
    }

    fn add_term(&mut self, i: i64, alpha: Monomial, f: TruncSeries) {
        if self.floor.is_some_and(|fl| i < fl) {
            return;
        }
        let p = at_slot(self.prec, i, degree_of(&alpha));
        if p.is_empty() {
            return;
        }
        let f = f.with_precision(p);
        if f.is_zero() {
            return;
        }
        let entry = self.terms.entry(i).or_insert_with(|| EtaPoly::zero(self.neta));
        entry.add_term(alpha, f);
        if entry.is_zero() {
            self.terms.remove(&i);
        }
    }

    fn rebuilt(&self, floor: Option<i64>, prec: Precision) -> MicroOp {
        let mut out = MicroOp { floor, prec, terms: BTreeMap::new(), ..*self };
        for (&i, p) in &self.terms {
            for (a, f) in &p.terms {
                out.add_term(i, a.clone(), f.clone());
            }
        }
        out
    }

    /// Lowers the precision contract: raises the floor and/or lowers the
    /// weight bound, dropping what is no longer guaranteed.
    pub fn truncate(&self, floor: Option<i64>, prec: Precision) -> MicroOp {
        self.rebuilt(self.floor.max(floor), self.prec.meet(prec))
    }

    pub fn with_floor(&self, floor: i64) -> MicroOp {
        self.truncate(Some(floor), Precision::exact())
    }

    /// Equality on the range both operands guarantee.
    pub fn agrees_with(&self, other: &MicroOp) -> bool {
        let floor = self.floor.max(other.floor);
        let prec = self.prec.meet(other.prec);
        self.truncate(floor, prec).terms == other.truncate(floor, prec).terms
    }

    fn check_compatible(&self, other: &MicroOp) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch(self.nvars, other.nvars));
        }
        if self.neta != other.neta {
            return Err(Error::GeneratorMismatch(self.neta, other.neta));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MicroOp) -> Result<MicroOp> {
        self.check_compatible(other)?;
        let mut out = MicroOp::zero_with(self.nvars, self.neta, self.prec.meet(other.prec));
        out.floor = self.floor.max(other.floor);
        for op in [self, other] {
            for (&i, p) in &op.terms {
                for (a, f) in &p.terms {
                    out.add_term(i, a.clone(), f.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MicroOp {
        let mut out = MicroOp { terms: BTreeMap::new(), ..*self };
        for (&i, p) in &self.terms {
            for (a, f) in &p.terms {
                out.add_term(i, a.clone(), f.scale(c));
            }
        }
        out
    }

    /// Weight bound of a product, from the operand bounds and orders.
    fn product_precision(&self, rhs: &MicroOp) -> Precision {
        let mut p = Precision { cap: Cap::Exact, ..self.prec.meet(rhs.prec) };
        if let Some(o) = rhs.order().value() {
            p = p.meet(self.prec.lowered(o));
        } else {
            p = p.meet(self.prec);
        }
        if let Some(o) = self.order().value() {
            p = p.meet(rhs.prec.lowered(o));
        } else {
            p = p.meet(rhs.prec);
        }
        p
    }

    /// Left multiplication by a coefficient series (no commutation needed).
    pub fn left_mul_series(&self, g: &TruncSeries) -> Result<MicroOp> {
        self.check_compatible(&MicroOp::zero_with(g.nvars(), self.neta, Precision::exact()))?;
        let prec = self.product_precision(&MicroOp::from_series(self.neta, g.clone()));
        let mut out = MicroOp { terms: BTreeMap::new(), prec, ..*self };
        for (&i, p) in &self.terms {
            for (a, f) in &p.terms {
                out.add_term(i, a.clone(), g.mul(f)?);
            }
        }
        Ok(out)
    }

    /// Floor guaranteed by the operand contracts for `self * rhs`.
    fn contract_floor(&self, rhs: &MicroOp) -> Option<i64> {
        let a = match (self.floor, rhs.top()) {
            (Some(f), Some(t)) => Some(f + t),
            _ => None,
        };
        let b = match (self.top(), rhs.floor) {
            (Some(t), Some(f)) => Some(t + f),
            _ => None,
        };
        a.max(b)
    }

    /// Product using the operands' own precision contracts.
    pub fn mul(&self, rhs: &MicroOp) -> Result<MicroOp> {
        self.mul_to(rhs, None)
    }

    /// Normal-ordered product, computing only xi-exponents at or above
    /// `floor` (and at or above what the operands guarantee).
    ///
    /// Uses `xi^a f = sum_k binom(a,k) (d_1^k f) xi^(a-k)` with generalized
    /// binomials for negative `a`, and the same rule for each `eta_j` with
    /// `d_(j+1)`. Coefficients are polynomials, so the sum is finite.
    pub fn mul_to(&self, rhs: &MicroOp, floor: Option<i64>) -> Result<MicroOp> {
        self.check_compatible(rhs)?;
        let out_floor = self.contract_floor(rhs).max(floor);
        let (nvars, neta) = (self.nvars, self.neta);
        let prec = self.product_precision(rhs);
        let mut out = MicroOp::zero_with(nvars, neta, prec);
        out.floor = out_floor;

        let mut acc: BTreeMap<(i64, Monomial), TruncSeries> = BTreeMap::new();
        for (&j, pb) in &rhs.terms {
            for (beta, g) in &pb.terms {
                let Some(gdeg) = g.max_degree() else { continue };
                let mut derivs: BTreeMap<Monomial, TruncSeries> = BTreeMap::new();
                for (&i, pa) in &self.terms {
                    let mut kmax = gdeg;
                    if i >= 0 {
                        kmax = kmax.min(i);
                    }
                    if let Some(fl) = out_floor {
                        kmax = kmax.min(i + j - fl);
                    }
                    for (alpha, f) in &pa.terms {
                        for k in 0..=kmax {
                            let bk = binomial(i, k as u32);
                            if bk.is_zero() {
                                continue;
                            }
                            for gamma in sub_indices(alpha) {
                                let eta: Monomial = (0..neta).map(|l| alpha[l] - gamma[l] + beta[l]).collect();
                                let e = i + j - k;
                                let target = at_slot(prec, e, degree_of(&eta));
                                if target.is_empty() {
                                    continue;
                                }
                                let mut by = vec![0u32; nvars];
                                by[0] = k as u32;
                                for (l, &gl) in gamma.iter().enumerate() {
                                    by[l + 1] = gl;
                                }
                                let d = derivs.entry(by.clone()).or_insert_with(|| g.derive_multi(&by));
                                if d.is_zero() {
                                    continue;
                                }
                                let mut c = bk.clone();
                                for (l, &gl) in gamma.iter().enumerate() {
                                    c *= binomial(alpha[l] as i64, gl);
                                }
                                let coeff = f.with_precision(target).mul(&d.with_precision(target))?.scale(&c);
                                if coeff.is_zero() {
                                    continue;
                                }
                                match acc.get_mut(&(e, eta.clone())) {
                                    Some(v) => *v = &*v + &coeff,
                                    None => {
                                        acc.insert((e, eta), coeff);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for ((e, eta), f) in acc {
            out.add_term(e, eta, f);
        }
        Ok(out)
    }

    pub fn commutator(&self, rhs: &MicroOp, floor: Option<i64>) -> Result<MicroOp> {
        let ab = self.mul_to(rhs, floor)?;
        let ba = rhs.mul_to(self, floor)?;
        Ok(&ab - &ba)
    }

    /// `ord(sum L_i xi^i) = max(eta-degree(L_i) + i)` over retained terms.
    pub fn order(&self) -> OpOrder {
        OpOrder(self.terms.iter().filter_map(|(&i, p)| p.degree().map(|d| d + i)).max())
    }

    /// Differential-operator part (xi-exponents >= 0) and negative part.
    pub fn split(&self) -> (MicroOp, MicroOp) {
        let mut plus = MicroOp { terms: BTreeMap::new(), floor: self.floor.filter(|&f| f > 0), ..*self };
        let mut minus = MicroOp { terms: BTreeMap::new(), ..*self };
        for (&i, p) in &self.terms {
            if i >= 0 {
                plus.terms.insert(i, p.clone());
            } else {
                minus.terms.insert(i, p.clone());
            }
        }
        (plus, minus)
    }

    pub fn plus(&self) -> MicroOp {
        self.split().0
    }

    pub fn minus(&self) -> MicroOp {
        self.split().1
    }

    /// Coefficientwise derivative in `t_i` (zero-based); generators are constants.
    pub fn derive(&self, i: usize) -> Result<MicroOp> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let mut by = vec![0; self.nvars];
        by[i] = 1;
        let mut out = MicroOp { terms: BTreeMap::new(), prec: self.prec.after_derivative(&by), ..*self };
        for (&e, p) in &self.terms {
            for (a, f) in &p.terms {
                out.add_term(e, a.clone(), f.derive_multi(&by));
            }
        }
        Ok(out)
    }

    /// Appends `extra` fresh coefficient variables that no generator
    /// differentiates.
    pub fn extend_vars(&self, extra: usize) -> MicroOp {
        let mut out = MicroOp { nvars: self.nvars + extra, terms: BTreeMap::new(), ..*self };
        for (&e, p) in &self.terms {
            for (a, f) in &p.terms {
                out.add_term(e, a.clone(), f.extend_vars(extra));
            }
        }
        out
    }

    /// Applies a degree-non-increasing map to every coefficient series.
    pub fn map_series<F>(&self, mut f: F) -> Result<MicroOp>
    where
        F: FnMut(&TruncSeries) -> Result<TruncSeries>,
    {
        let mut items = Vec::new();
        let mut prec = self.prec;
        for (&e, p) in &self.terms {
            for (a, g) in &p.terms {
                let h = f(g)?;
                prec = prec.meet(from_slot(h.precision(), e, degree_of(a)));
                items.push((e, a.clone(), h));
            }
        }
        let mut out = MicroOp { terms: BTreeMap::new(), prec, ..*self };
        for (e, a, h) in items {
            out.add_term(e, a, h);
        }
        Ok(out)
    }

    fn leading_unit(&self) -> Result<(i64, TruncSeries)> {
        let top = self.top().ok_or_else(|| Error::NotInvertible("zero operator".into()))?;
        let lead = &self.terms[&top];
        if lead.degree() != Some(0) {
            return Err(Error::NotInvertible(format!("leading xi^{top} coefficient has eta-degree > 0")));
        }
        let a = lead.constant_part().cloned().expect("degree 0");
        if !a.is_unit() {
            return Err(Error::NotInvertible(format!("leading xi^{top} coefficient is not a unit")));
        }
        Ok((top, a))
    }

    /// Inverse down to xi-exponent `floor`, by a Neumann series around the
    /// leading monomial `a xi^N`.
    pub fn invert(&self, floor: i64) -> Result<MicroOp> {
        let (n, a) = self.leading_unit()?;
        let (nvars, neta) = (self.nvars, self.neta);
        let xi_neg = MicroOp::xi_pow(nvars, neta, Cap::Exact, -n);
        let x_inv = xi_neg.mul_to(&MicroOp::from_series(neta, a.invert()?), Some(floor))?;
        let lead = MicroOp::monomial(a, vec![0; neta], n);
        let rest = self - &lead;
        let t = x_inv.mul_to(&rest, Some(floor))?.scale(&-Rational::one());
        let mut acc = x_inv.clone();
        let mut term = x_inv;
        for _ in 0..(-n - floor).max(0) {
            term = t.mul_to(&term, Some(floor))?;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.with_floor(floor))
    }

    /// r-th root of a monic operator `xi^r + (lower)` with eta-free
    /// coefficients, down to xi-exponent `floor`. The root has the form
    /// `xi + q_0 + q_1 xi^-1 + ...`; no conjugation normalizes `q_0`.
    pub fn root(&self, r: u32, floor: i64) -> Result<MicroOp> {
        if r == 0 {
            return Err(Error::WrongOrder { expected: 1, found: 0 });
        }
        let r_i = r as i64;
        let top = self.top().ok_or_else(|| Error::NotMonic("zero operator".into()))?;
        if top != r_i {
            return Err(Error::WrongOrder { expected: r_i, found: top });
        }
        if self.terms.values().any(|p| p.degree() != Some(0)) {
            return Err(Error::NotMonic("coefficients must have eta-degree 0".into()));
        }
        let lead = self.xi_coeff(top);
        if lead.terms().len() != 1 || lead.constant_term() != Rational::one() {
            return Err(Error::NotMonic("leading coefficient must be 1".into()));
        }
        let (nvars, neta) = (self.nvars, self.neta);
        let floor = self.floor.map_or(floor, |f| floor.max(f - r_i + 1));
        let mut q = MicroOp::xi_pow(nvars, neta, Cap::Exact, 1);
        let r_inv = int(r_i).recip();
        let mut m = 1i64;
        while 1 - m >= floor {
            // With q_m still zero, the xi^(r-m) coefficient of Q^r falls
            // short of the target by exactly r q_m.
            let partial = q.with_floor(1 - m);
            let mut power = partial.clone();
            for have in 2..=r_i {
                power = power.mul_to(&partial, Some(r_i - m - (r_i - have)))?;
            }
            let diff = &self.xi_coeff(r_i - m) - &power.xi_coeff(r_i - m);
            let qm = diff.scale(&r_inv);
            q = &q + &MicroOp::monomial(qm, vec![0; neta], 1 - m);
            m += 1;
        }
        Ok(q.with_floor(floor))
    }

    /// Integer power with a requested floor. Partial products keep the
    /// extra depth the remaining factors will consume.
    pub fn pow(&self, k: u32, floor: Option<i64>) -> Result<MicroOp> {
        let top = self.top().unwrap_or(0);
        let mut acc = MicroOp::one(self.nvars, self.neta, Cap::Exact);
        for have in 1..=k as i64 {
            acc = acc.mul_to(self, floor.map(|f| f - (k as i64 - have) * top))?;
        }
        Ok(acc)
    }

    /// Canonical text: `coeff · η^(..) · ξ^i` terms by descending `i`, then `η` index.
    pub fn canonical(&self) -> String {
        let mut parts = Vec::new();
        for (&i, p) in self.terms.iter().rev() {
            for (a, f) in &p.terms {
                let mut s = f.canonical();
                if self.neta > 0 {
                    let idx: Vec<String> = a.iter().map(|e| e.to_string()).collect();
                    s.push_str(&format!(" · η^({})", idx.join(",")));
                }
                s.push_str(&format!(" · ξ^{i}"));
                parts.push(s);
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub fn describe(&self) -> String {
        let floor = self.floor.map_or("exact".to_string(), |f| f.to_string());
        format!("floor={floor} cap={} {}", self.cap(), self.canonical())
    }
}

impl fmt::Display for MicroOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl std::ops::Add for &MicroOp {
    type Output = MicroOp;
    fn add(self, rhs: &MicroOp) -> MicroOp {
        self.try_add(rhs).expect("operator addition")
    }
}

impl std::ops::Neg for &MicroOp {
    type Output = MicroOp;
    fn neg(self) -> MicroOp {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Sub for &MicroOp {
    type Output = MicroOp;
    fn sub(self, rhs: &MicroOp) -> MicroOp {
        self.try_add(&-rhs).expect("operator subtraction")
    }
}

pub fn mo_mul(a: &MicroOp, b: &MicroOp) -> Result<MicroOp> {
    a.mul(b)
}

pub fn mo_order(a: &MicroOp) -> OpOrder {
    a.order()
}

pub fn mo_split(a: &MicroOp) -> (MicroOp, MicroOp) {
    a.split()
}

pub fn mo_invert(a: &MicroOp, floor: i64) -> Result<MicroOp> {
    a.invert(floor)
}

pub fn mo_root(a: &MicroOp, r: u32, floor: i64) -> Result<MicroOp> {
    a.root(r, floor)
}

pub fn mo_derive(a: &MicroOp, i: usize) -> Result<MicroOp> {
    a.derive(i)
}
