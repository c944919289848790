//! Diagonal normalization of the values matrix and the resulting
//! modification of the flow generator.
//!
//! Row `p` of the upper triangular values matrix `psi` has its diagonal
//! fixed one row at a time. Either the row's point is adjoined to the set
//! `S` and the diagonal is `1`, or the diagonal is a constant combination
//! `x = c . v` of the entries above it, where `c` is a constant left
//! eigenvector of the leading block of `R = psi' psi^(-1)`. Each such
//! choice makes `R_pp` a combination of the column above it plus one
//! earlier diagonal entry, and that combination is the diagonal
//! correction `D` subtracted from `(L)_+`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeffring::{fmt_rational, int, Cap, Monomial, Precision, Rational, TruncSeries};
use crate::error::{Error, Result};
use crate::laxmat::{DegreeVector, SeriesMatrix};
use crate::linalg::{nullspace, rref, RatMatrix};

/// How the diagonal of row `p` is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    /// `x = 1`; the row's point joins `S`.
    Unit,
    /// `x = c . v_1`, coefficients over the rows `0..j`.
    Combo(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChoiceTree {
    pub rows: Vec<Choice>,
}

impl ChoiceTree {
    pub fn new(rows: Vec<Choice>) -> Result<Self> {
        if rows.first() != Some(&Choice::Unit) {
            return Err(Error::InvalidChoice { row: 0, reason: "the first row is always normalized to 1".into() });
        }
        for (p, ch) in rows.iter().enumerate() {
            if let Choice::Combo(c) = ch {
                if c.len() > p || c.iter().all(Zero::is_zero) {
                    return Err(Error::InvalidChoice { row: p, reason: "needs a nonzero combination of earlier rows".into() });
                }
            }
        }
        Ok(ChoiceTree { rows })
    }

    /// Indices of the adjoined points.
    pub fn adjoined(&self) -> BTreeSet<usize> {
        self.rows.iter().enumerate().filter(|(_, c)| **c == Choice::Unit).map(|(p, _)| p).collect()
    }
}

impl fmt::Display for ChoiceTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, ch) in self.rows.iter().enumerate() {
            if p > 0 {
                write!(f, "; ")?;
            }
            match ch {
                Choice::Unit => write!(f, "x{} = 1", p + 1)?,
                Choice::Combo(c) => {
                    let parts: Vec<String> = c.iter().map(fmt_rational).collect();
                    write!(f, "x{} = ({})", p + 1, parts.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// Coefficient `coeff` times `L_{row,col,k}`: the `xi^k` coefficient of
/// entry `(row, col)` of `L = L_g^(-1) L_f`. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LTerm {
    pub row: usize,
    pub col: usize,
    pub k: i64,
    pub coeff: Rational,
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coeff.is_negative() { "-" } else { "+" };
        let mag = self.coeff.abs();
        if mag.is_one() {
            write!(f, "{sign}L({},{},{})", self.row + 1, self.col + 1, self.k)
        } else {
            write!(f, "{sign}{} L({},{},{})", fmt_rational(&mag), self.row + 1, self.col + 1, self.k)
        }
    }
}

/// One diagonal slot of `D`: direct terms plus a reference to an
/// earlier slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiagSlot {
    pub direct: Vec<LTerm>,
    pub earlier: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModRecipe {
    pub slots: Vec<DiagSlot>,
}

impl ModRecipe {
    /// Recipe given directly by its expanded slots.
    pub fn from_expanded(slots: Vec<Vec<LTerm>>) -> Self {
        ModRecipe { slots: slots.into_iter().map(|direct| DiagSlot { direct, earlier: None }).collect() }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    /// Slot `p` with earlier references substituted, like terms merged.
    pub fn expanded(&self, p: usize) -> Vec<LTerm> {
        let mut acc: BTreeMap<(usize, usize, i64), Rational> = BTreeMap::new();
        let mut cur = Some(p);
        let mut seen = BTreeSet::new();
        while let Some(q) = cur {
            if !seen.insert(q) {
                break;
            }
            for t in &self.slots[q].direct {
                *acc.entry((t.row, t.col, t.k)).or_insert_with(Rational::zero) += &t.coeff;
            }
            cur = self.slots[q].earlier;
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((row, col, k), coeff)| LTerm { row, col, k, coeff })
            .collect()
    }

    /// Equality of the expanded diagonals.
    pub fn same_as(&self, other: &ModRecipe) -> bool {
        self.dim() == other.dim() && (0..self.dim()).all(|p| self.expanded(p) == other.expanded(p))
    }

    /// One line per slot: `D<p> = <signed terms>` or `D<p> = 0`.
    pub fn canonical(&self) -> String {
        (0..self.dim())
            .map(|p| {
                let terms = self.expanded(p);
                if terms.is_empty() {
                    format!("D{} = 0", p + 1)
                } else {
                    let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                    format!("D{} = {}", p + 1, parts.join(" "))
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for ModRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Shorthand for `coeff * L_{i,j,k}` with one-based indices.
pub fn lterm(coeff: i64, i: usize, j: usize, k: i64) -> LTerm {
    LTerm { row: i - 1, col: j - 1, k, coeff: int(coeff) }
}

/// Strategy for proposing the combination in each row.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Policy {
    /// `x` is the last nonzero entry above the diagonal.
    #[default]
    PreviousEntry,
    /// `x` is the top entry minus all the others.
    AlternatingSum,
    /// Combinations per zero-based row; other rows use the previous entry.
    Explicit(BTreeMap<usize, Vec<Rational>>),
    /// The preferred constant eigenvector.
    Search,
}

impl Policy {
    pub fn parse(s: &str) -> Result<Policy> {
        match s {
            "previous-entry" => Ok(Policy::PreviousEntry),
            "alternating-sum" => Ok(Policy::AlternatingSum),
            "search" => Ok(Policy::Search),
            _ => Err(Error::Scenario(format!("unknown policy {s:?}"))),
        }
    }

    fn propose(&self, p: usize, j: usize) -> Option<Vec<Rational>> {
        let last = || {
            let mut c = vec![Rational::zero(); j];
            c[j - 1] = Rational::one();
            c
        };
        match self {
            Policy::PreviousEntry => Some(last()),
            Policy::AlternatingSum => {
                Some((0..j).map(|m| if m == 0 { Rational::one() } else { -Rational::one() }).collect())
            }
            Policy::Explicit(map) => Some(map.get(&p).cloned().unwrap_or_else(last)),
            Policy::Search => None,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::PreviousEntry => f.write_str("previous-entry"),
            Policy::AlternatingSum => f.write_str("alternating-sum"),
            Policy::Search => f.write_str("search"),
            Policy::Explicit(map) => {
                let parts: Vec<String> = map
                    .iter()
                    .map(|(p, c)| format!("{}=({})", p + 1, c.iter().map(fmt_rational).collect::<Vec<_>>().join(",")))
                    .collect();
                write!(f, "explicit[{}]", parts.join(" "))
            }
        }
    }
}

/// Result of the procedure.
#[derive(Clone, Debug)]
pub struct NormState {
    /// Values matrix with its diagonal fixed.
    pub psi: SeriesMatrix,
    /// `psi' psi^(-1)`, derivative in the first base coordinate.
    pub r: SeriesMatrix,
    /// Adjoined points, zero-based.
    pub s: BTreeSet<usize>,
    /// Eigenvalue `k` for every combination row.
    pub k: Vec<Option<TruncSeries>>,
}

fn block(rows: &[Vec<TruncSeries>], j: usize) -> Result<SeriesMatrix> {
    SeriesMatrix::new(rows[..j].iter().map(|r| r[..j].to_vec()).collect())
}

/// `m' m^(-1)` with `'` the derivative in the first coordinate.
pub fn log_derivative(m: &SeriesMatrix) -> Result<SeriesMatrix> {
    let prime = m.rows().iter().map(|r| r.iter().map(|f| f.derive(0)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    SeriesMatrix::new(prime)?.mul(&m.invert()?)
}

fn row_times(c: &[Rational], r: &SeriesMatrix) -> Vec<TruncSeries> {
    let j = c.len();
    (0..j)
        .map(|col| {
            let mut acc = TruncSeries::zero_with(r.nvars(), Precision::exact());
            for (m, cm) in c.iter().enumerate() {
                if !cm.is_zero() {
                    acc = &acc + &r.get(m, col).scale(cm);
                }
            }
            acc
        })
        .collect()
}

/// The `k` with `c R = k c`, if `c` is a constant left eigenvector.
pub fn eigenvalue_for(r: &SeriesMatrix, c: &[Rational]) -> Option<TruncSeries> {
    let i = c.iter().position(|x| !x.is_zero())?;
    let cr = row_times(c, r);
    let k = cr[i].scale(&c[i].recip());
    let ok = cr.iter().zip(c).all(|(lhs, cm)| {
        let diff = lhs - &k.scale(cm);
        diff.agrees_with(&TruncSeries::zero_with(diff.nvars(), Precision::exact()))
    });
    ok.then_some(k)
}

/// Characteristic polynomial `det(x I - a)`, low degree first.
fn char_poly(a: &RatMatrix) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m: RatMatrix = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / int(k as i64);
    }
    coeffs
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Positive divisors; a cofactor left after trial division up to
/// `TRIAL_LIMIT` is treated as prime.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        factors.push((n, 1));
    }
    let mut out = vec![BigInt::one()];
    for (f, e) in factors {
        let mut next = Vec::new();
        for d in &out {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= &f;
            }
        }
        out = next;
    }
    out
}

fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Distinct rational roots.
fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut roots = Vec::new();
    let lead = coeffs.iter().rposition(|c| !c.is_zero());
    let Some(top) = lead else { return roots };
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.push(Rational::zero());
    }
    let lcm = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs[low..=top].iter().map(|c| (c * Rational::from(lcm.clone())).to_integer()).collect();
    let (a0, an) = (&ints[0], &ints[ints.len() - 1]);
    for p in divisors(a0) {
        for q in divisors(an) {
            for sign in [1, -1] {
                let x = Rational::new(BigInt::from(sign) * &p, q.clone());
                if !roots.contains(&x) && eval_poly(&coeffs[low..=top], &x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots
}

fn eigenvalue_candidates(a: &RatMatrix) -> Vec<Rational> {
    let n = a.len();
    let triangular = (0..n).all(|i| (0..i).all(|j| a[i][j].is_zero()));
    let mut out: Vec<Rational> = if triangular {
        (0..n).map(|i| a[i][i].clone()).collect()
    } else {
        rational_roots(&char_poly(a))
    };
    out.sort();
    out.dedup();
    out
}

/// All constant left eigenvectors of the leading `j x j` block, one per
/// basis direction of each common eigenspace, in preference order: `k`
/// with fewest nonzero coefficients, then earliest leading entry of `c`,
/// then lexicographically smallest `c` scaled to a leading `1`.
pub fn constant_eigenvectors(r: &SeriesMatrix, j: usize) -> Vec<(Vec<Rational>, TruncSeries)> {
    let rows: Vec<Vec<TruncSeries>> = r.rows()[..j].iter().map(|row| row[..j].to_vec()).collect();
    let prec = rows.iter().flatten().fold(Precision::exact(), |p, f| p.meet(f.precision()));
    let nvars = r.nvars();
    let monomials: BTreeSet<Monomial> = rows.iter().flatten().flat_map(|f| f.terms().keys().cloned()).collect();

    let identity: RatMatrix =
        (0..j).map(|a| (0..j).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect()).collect();
    let mut spaces: Vec<(RatMatrix, BTreeMap<Monomial, Rational>)> = vec![(identity, BTreeMap::new())];
    for mono in &monomials {
        let a: RatMatrix =
            rows.iter().map(|row| row.iter().map(|f| f.coeff(mono)).collect()).collect();
        let lambdas = eigenvalue_candidates(&a);
        let mut next = Vec::new();
        for (basis, ks) in &spaces {
            for lambda in &lambdas {
                // y B (A - lambda I) = 0
                let shifted: RatMatrix = basis
                    .iter()
                    .map(|b| {
                        (0..j)
                            .map(|col| {
                                let mut s = -(lambda * &b[col]);
                                for (m, bm) in b.iter().enumerate() {
                                    s += bm * &a[m][col];
                                }
                                s
                            })
                            .collect()
                    })
                    .collect();
                let transposed: RatMatrix = (0..j).map(|col| shifted.iter().map(|row| row[col].clone()).collect()).collect();
                let ys = nullspace(&transposed, basis.len());
                if ys.is_empty() {
                    continue;
                }
                let new_basis: RatMatrix = ys
                    .iter()
                    .map(|y| {
                        (0..j)
                            .map(|col| y.iter().zip(basis).fold(Rational::zero(), |s, (ym, b)| s + ym * &b[col]))
                            .collect()
                    })
                    .collect();
                let mut ks = ks.clone();
                if !lambda.is_zero() {
                    ks.insert(mono.clone(), lambda.clone());
                }
                next.push((new_basis, ks));
            }
        }
        spaces = next;
    }

    let mut out = Vec::new();
    for (mut basis, ks) in spaces {
        let pivots = rref(&mut basis);
        let k = TruncSeries::from_terms_with(nvars, prec, ks);
        for row in basis.into_iter().take(pivots.len()) {
            out.push((row, k.clone()));
        }
    }
    let lead = |c: &[Rational]| c.iter().position(|x| !x.is_zero());
    out.sort_by(|(c1, k1), (c2, k2)| {
        k1.terms().len().cmp(&k2.terms().len()).then_with(|| lead(c1).cmp(&lead(c2))).then_with(|| c1.cmp(c2))
    });
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// Preferred constant left eigenvector `c R^(j) = k c`, or `None`.
pub fn nz_constant_eigenvector(r: &SeriesMatrix, j: usize) -> Option<(Vec<Rational>, TruncSeries)> {
    constant_eigenvectors(r, j).into_iter().next()
}

/// Upper triangular, and zero between distinct rows of equal degree.
fn check_shape(psi: &SeriesMatrix, degrees: &DegreeVector) -> Result<()> {
    let d = psi.dim();
    if degrees.dim() != d {
        return Err(Error::ShapeMismatch(format!("{d}x{d} values for degree vector {degrees}")));
    }
    for a in 0..d {
        for b in 0..d {
            let vanish = a > b || (a != b && degrees.get(a) == degrees.get(b));
            if vanish && !psi.get(a, b).is_zero() {
                return Err(Error::ShapeMismatch(format!("entry ({},{}) must vanish", a + 1, b + 1)));
            }
        }
    }
    Ok(())
}

fn dot(c: &[Rational], v: &[TruncSeries]) -> TruncSeries {
    let mut acc = TruncSeries::zero_with(v[0].nvars(), Precision::exact());
    for (cm, vm) in c.iter().zip(v) {
        if !cm.is_zero() {
            acc = &acc + &vm.scale(cm);
        }
    }
    acc
}

/// Runs the normalization on `psi`, whose diagonal entries are
/// placeholders and get overwritten.
pub fn nz_procedure75(psi: &SeriesMatrix, degrees: &DegreeVector, policy: &Policy) -> Result<(ChoiceTree, NormState)> {
    check_shape(psi, degrees)?;
    let d = psi.dim();
    let nvars = psi.nvars();
    let cap = psi.rows().iter().flatten().map(|f| f.cap()).min().unwrap_or(Cap::Exact);
    let mut rows: Vec<Vec<TruncSeries>> = psi.rows().to_vec();
    rows[0][0] = TruncSeries::one(nvars, cap);
    let mut choices = vec![Choice::Unit];
    let mut ks = vec![None];

    for p in 1..d {
        let v: Vec<TruncSeries> = (0..p).map(|m| rows[m][p].clone()).collect();
        let j = v.iter().rposition(|f| !f.is_zero()).map_or(0, |m| m + 1);
        let mut picked = None;
        if j > 0 {
            let r = log_derivative(&block(&rows, j)?)?;
            let proposed = policy.propose(p, j).and_then(|c| {
                if c.len() != j {
                    return None;
                }
                eigenvalue_for(&r, &c).map(|k| (c, k))
            });
            picked = proposed.or_else(|| nz_constant_eigenvector(&r, j));
        }
        match picked {
            Some((c, k)) if !dot(&c, &v[..j]).is_zero() => {
                let x = dot(&c, &v[..j]);
                if !x.is_unit() {
                    return Err(Error::NonUnitPivot { row: p });
                }
                rows[p][p] = x;
                choices.push(Choice::Combo(c));
                ks.push(Some(k));
            }
            _ => {
                rows[p][p] = TruncSeries::one(nvars, cap);
                choices.push(Choice::Unit);
                ks.push(None);
            }
        }
    }
    let tree = ChoiceTree::new(choices)?;
    let psi = SeriesMatrix::new(rows)?;
    let r = log_derivative(&psi)?;
    let s = tree.adjoined();
    Ok((tree, NormState { psi, r, s, k: ks }))
}

/// Checks `R_pp = sum_m c_m R_mp + R_ii` for every combination row, with
/// `i` the first nonzero index of `c`, and `R_pp = 0` on adjoined rows.
pub fn check_recursion(tree: &ChoiceTree, state: &NormState) -> bool {
    let r = &state.r;
    let zero = |f: &TruncSeries| f.agrees_with(&TruncSeries::zero_with(f.nvars(), Precision::exact()));
    tree.rows.iter().enumerate().all(|(p, ch)| match ch {
        Choice::Unit => zero(r.get(p, p)),
        Choice::Combo(c) => {
            let i = c.iter().position(|x| !x.is_zero()).expect("nonzero combination");
            let col: Vec<TruncSeries> = (0..c.len()).map(|m| r.get(m, p).clone()).collect();
            let rhs = &dot(c, &col) + r.get(i, i);
            zero(&(r.get(p, p) - &rhs))
        }
    })
}

/// The diagonal correction dictated by the choices.
pub fn nz_emit_recipe(tree: &ChoiceTree, degrees: &DegreeVector) -> ModRecipe {
    let slots = tree
        .rows
        .iter()
        .enumerate()
        .map(|(p, ch)| match ch {
            Choice::Unit => DiagSlot::default(),
            Choice::Combo(c) => {
                let direct = c
                    .iter()
                    .enumerate()
                    .filter(|(_, cm)| !cm.is_zero())
                    .map(|(m, cm)| LTerm { row: m, col: p, k: degrees.get(m) - degrees.get(p), coeff: cm.clone() })
                    .collect();
                DiagSlot { direct, earlier: c.iter().position(|x| !x.is_zero()) }
            }
        })
        .collect();
    ModRecipe { slots }
}

/// A documented normalization together with the recipe it must produce.
#[derive(Clone, Debug)]
pub struct WorkedScenario {
    pub name: &'static str,
    pub degrees: DegreeVector,
    pub policy: Policy,
    pub tree: ChoiceTree,
    pub expected: ModRecipe,
}

fn combo(c: &[i64]) -> Choice {
    Choice::Combo(c.iter().map(|&x| int(x)).collect())
}

fn degrees(c: &[i64]) -> DegreeVector {
    DegreeVector::new(c.to_vec()).expect("nondecreasing")
}

/// The six worked normalizations.
pub fn nz_paper_scenarios() -> Vec<WorkedScenario> {
    let tree = |rows: Vec<Choice>| ChoiceTree::new(rows).expect("valid tree");
    let fano = degrees(&[2, 3, 3, 3, 4]);
    vec![
        WorkedScenario {
            name: "two-points",
            degrees: degrees(&[0, 1]),
            policy: Policy::PreviousEntry,
            tree: tree(vec![Choice::Unit, combo(&[1])]),
            expected: ModRecipe::from_expanded(vec![vec![], vec![lterm(1, 1, 2, -1)]]),
        },
        WorkedScenario {
            name: "three-points-chain",
            degrees: degrees(&[0, 1, 2]),
            policy: Policy::PreviousEntry,
            tree: tree(vec![Choice::Unit, combo(&[1]), combo(&[0, 1])]),
            expected: ModRecipe::from_expanded(vec![
                vec![],
                vec![lterm(1, 1, 2, -1)],
                vec![lterm(1, 2, 3, -1), lterm(1, 1, 2, -1)],
            ]),
        },
        WorkedScenario {
            name: "three-points-difference",
            degrees: degrees(&[0, 1, 2]),
            policy: Policy::Explicit(BTreeMap::from([(2, vec![int(-1), int(1)])])),
            tree: tree(vec![Choice::Unit, combo(&[1]), combo(&[-1, 1])]),
            expected: ModRecipe::from_expanded(vec![
                vec![],
                vec![lterm(1, 1, 2, -1)],
                vec![lterm(1, 2, 3, -1), lterm(-1, 1, 3, -2)],
            ]),
        },
        WorkedScenario {
            name: "fano-previous",
            degrees: fano.clone(),
            policy: Policy::PreviousEntry,
            tree: tree(vec![Choice::Unit, combo(&[1]), combo(&[1]), combo(&[1]), combo(&[0, 0, 0, 1])]),
            expected: ModRecipe::from_expanded(vec![
                vec![],
                vec![lterm(1, 1, 2, -1)],
                vec![lterm(1, 1, 3, -1)],
                vec![lterm(1, 1, 4, -1)],
                vec![lterm(1, 4, 5, -1), lterm(1, 1, 4, -1)],
            ]),
        },
        WorkedScenario {
            name: "fano-alternating",
            degrees: fano,
            policy: Policy::AlternatingSum,
            tree: tree(vec![Choice::Unit, combo(&[1]), combo(&[1]), combo(&[1]), combo(&[1, -1, -1, -1])]),
            expected: ModRecipe::from_expanded(vec![
                vec![],
                vec![lterm(1, 1, 2, -1)],
                vec![lterm(1, 1, 3, -1)],
                vec![lterm(1, 1, 4, -1)],
                vec![lterm(1, 1, 5, -2), lterm(-1, 2, 5, -1), lterm(-1, 3, 5, -1), lterm(-1, 4, 5, -1)],
            ]),
        },
        WorkedScenario {
            name: "ruled-surface",
            degrees: degrees(&[0, 1]),
            policy: Policy::PreviousEntry,
            tree: tree(vec![Choice::Unit, combo(&[1])]),
            expected: ModRecipe::from_expanded(vec![vec![], vec![lterm(1, 1, 2, -1)]]),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::rat;
    use crate::random::{normalization_values, rng};

    fn series(terms: &[(&[u32], i64)]) -> TruncSeries {
        TruncSeries::from_terms(1, Cap::Degree(6), terms.iter().map(|(m, c)| (m.to_vec(), int(*c))))
    }

    #[test]
    fn zero_block_gives_first_unit_vector() {
        let z = TruncSeries::zero(1, Cap::Degree(4));
        let r = SeriesMatrix::new(vec![vec![z.clone(), z.clone()], vec![z.clone(), z]]).unwrap();
        let (c, k) = nz_constant_eigenvector(&r, 2).unwrap();
        assert_eq!(c, vec![int(1), int(0)]);
        assert!(k.is_zero());
    }

    #[test]
    fn repeated_log_derivative_block_has_two_eigenvectors() {
        // [[0, a'/a], [0, a'/a]] with a = 1 + t
        let a = series(&[(&[0], 1), (&[1], 1)]);
        let q = a.derive(0).unwrap().mul(&a.invert().unwrap()).unwrap();
        let z = TruncSeries::zero(1, Cap::Degree(6));
        let r = SeriesMatrix::new(vec![vec![z.clone(), q.clone()], vec![z, q.clone()]]).unwrap();
        let all = constant_eigenvectors(&r, 2);
        assert_eq!(all[0].0, vec![int(1), int(-1)]);
        assert!(all[0].1.is_zero());
        assert!(all.iter().any(|(c, k)| *c == vec![int(0), int(1)] && k.agrees_with(&q)));
        assert!(eigenvalue_for(&r, &[int(0), int(1)]).is_some());
    }

    #[test]
    fn generic_block_has_no_constant_eigenvector() {
        let r = SeriesMatrix::new(vec![
            vec![series(&[(&[0], 1)]), series(&[(&[1], 1)])],
            vec![series(&[(&[0], 2)]), series(&[(&[0], 3), (&[1], 1)])],
        ])
        .unwrap();
        assert!(nz_constant_eigenvector(&r, 2).is_none());
    }

    #[test]
    fn rational_roots_of_quadratic() {
        // (2x - 1)(x + 3) = 2x^2 + 5x - 3
        let mut roots = rational_roots(&[int(-3), int(5), int(2)]);
        roots.sort();
        assert_eq!(roots, vec![int(-3), rat(1, 2)]);
        assert!(rational_roots(&[int(-2), int(0), int(1)]).is_empty());
    }

    #[test]
    fn worked_scenarios_reproduce_recipes() {
        for sc in nz_paper_scenarios() {
            let psi = normalization_values(&mut rng(11), &sc.degrees, 1, Cap::Degree(6));
            let (tree, state) = nz_procedure75(&psi, &sc.degrees, &sc.policy).unwrap();
            assert_eq!(tree, sc.tree, "{}", sc.name);
            assert!(check_recursion(&tree, &state), "{}", sc.name);
            assert!(nz_emit_recipe(&tree, &sc.degrees).same_as(&sc.expected), "{}", sc.name);
            assert_eq!(state.s.len(), 1);
        }
    }

    #[test]
    fn recipe_prints_signed_triples() {
        let sc = &nz_paper_scenarios()[4];
        let text = sc.expected.canonical();
        assert_eq!(text.lines().last(), Some("D5 = +L(1,5,-2) -L(2,5,-1) -L(3,5,-1) -L(4,5,-1)"));
        assert_eq!(text.lines().next(), Some("D1 = 0"));
    }

    #[test]
    fn zero_pivot_raises() {
        let deg = degrees(&[0, 1]);
        let one = series(&[(&[0], 1)]);
        let t = series(&[(&[1], 1)]);
        let z = TruncSeries::zero(1, Cap::Degree(6));
        let psi = SeriesMatrix::new(vec![vec![one.clone(), t], vec![z, one]]).unwrap();
        assert_eq!(nz_procedure75(&psi, &deg, &Policy::PreviousEntry).unwrap_err(), Error::NonUnitPivot { row: 1 });
    }

    #[test]
    fn both_four_point_chains_are_reachable() {
        let deg = degrees(&[0, 1, 2, 3]);
        let psi = normalization_values(&mut rng(5), &deg, 1, Cap::Degree(6));
        let first = Policy::Explicit(BTreeMap::from([(3, vec![int(0), int(1), int(-1)])]));
        let second = Policy::Explicit(BTreeMap::from([(2, vec![int(1), int(-1)])]));
        let (t1, s1) = nz_procedure75(&psi, &deg, &first).unwrap();
        let (t2, s2) = nz_procedure75(&psi, &deg, &second).unwrap();
        assert_eq!(t1.rows[3], combo(&[0, 1, -1]));
        assert_eq!(t2.rows[2], combo(&[1, -1]));
        assert_eq!(t2.rows[3], combo(&[0, 0, 1]));
        assert!(check_recursion(&t1, &s1) && check_recursion(&t2, &s2));
    }
}
