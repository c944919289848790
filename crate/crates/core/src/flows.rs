//! Lax flows `d/ds L_h = [M, L_h]` integrated exactly in formal flow times.
//!
//! A flow time is an extra coefficient variable that no generator
//! differentiates, truncated by a time order. Picard iteration
//! `X(s) = X(0) + int_0^s [M(X), X]` gains one correct order in `s` per
//! pass, with `M` recomputed from the current iterate each time.

use crate::coeffring::{Cap, Precision, TimeOrder, TruncSeries};
use crate::error::{Error, Result};
use crate::laxmat::{DegreeVector, LaxMatrix};
use crate::microp::MicroOp;
use crate::normalize::ModRecipe;

/// Flow time `s`: coefficient variable `var`, truncated jointly with the
/// variables in `mask` at total degree `torder`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlowTime {
    pub var: usize,
    pub mask: u64,
    pub torder: i64,
}

impl FlowTime {
    pub fn new(var: usize, torder: i64) -> Self {
        FlowTime { var, mask: 1 << var, torder }
    }

    pub fn joint(var: usize, mask: u64, torder: i64) -> Self {
        FlowTime { var, mask: mask | 1 << var, torder }
    }

    pub fn precision(&self) -> Precision {
        Precision { cap: Cap::Exact, time: Some(TimeOrder { vars: self.mask, order: self.torder }) }
    }
}

/// Coefficient of `s^k` in `f`, with `s` removed.
pub fn s_coefficient(f: &TruncSeries, var: usize, k: u32) -> TruncSeries {
    let nvars = f.nvars() - 1;
    let terms = f.terms().iter().filter(|(m, _)| m[var] == k).map(|(m, c)| {
        let mut nm = m.clone();
        nm.remove(var);
        (nm, c.clone())
    });
    let cap = f.cap().lowered(k as i64);
    TruncSeries::from_terms(nvars, cap, terms)
}

/// Evolves a family along `time`: `d/ds X_i = [M(X), X_i]`.
pub fn fl_evolve<G>(family: &[LaxMatrix], time: FlowTime, mut generator: G) -> Result<Vec<LaxMatrix>>
where
    G: FnMut(&[LaxMatrix]) -> Result<LaxMatrix>,
{
    if time.torder < 1 {
        return Err(Error::TruncationExhausted(format!("flow time order {} < 1", time.torder)));
    }
    let prec = time.precision();
    let x0: Vec<LaxMatrix> = family.iter().map(|x| x.truncate(None, prec)).collect();
    let mut x = x0.clone();
    for _ in 0..time.torder {
        let m = generator(&x)?;
        let mut next = Vec::with_capacity(x.len());
        for (xi, x0i) in x.iter().zip(&x0) {
            let rate = m.commutator(xi, None)?;
            let integral = rate.map_series(|f| f.integrate(time.var))?;
            next.push(x0i.try_add(&integral)?.truncate(None, prec));
        }
        x = next;
    }
    Ok(x)
}

/// `L_f`, `L_g` and an optional diagonal correction.
#[derive(Clone, Debug)]
pub struct HierarchyPair {
    pub l_f: LaxMatrix,
    pub l_g: LaxMatrix,
    pub recipe: Option<ModRecipe>,
    /// Lowest ξ-exponent of `L_g^(-1) L_f` that gets computed.
    pub floor: i64,
}

impl HierarchyPair {
    pub fn new(l_f: LaxMatrix, l_g: LaxMatrix) -> Self {
        let floor = -l_f.degrees().spread() - 1;
        HierarchyPair { l_f, l_g, recipe: None, floor }
    }

    pub fn with_recipe(mut self, recipe: ModRecipe) -> Self {
        self.recipe = Some(recipe);
        self
    }

    /// `L = L_g^(-1) L_f` down to the floor.
    pub fn quotient(&self) -> Result<LaxMatrix> {
        let top_f = self.l_f.entries().iter().flatten().filter_map(|e| e.top()).max().unwrap_or(0);
        let inv = self.l_g.invert(self.floor - top_f)?;
        inv.mul_to(&self.l_f, Some(self.floor))
    }
}

/// The η-free `xi^k` coefficient of entry `(i, j)`.
fn l_ijk(l: &LaxMatrix, i: usize, j: usize, k: i64) -> Result<TruncSeries> {
    let e = l.get(i, j);
    if e.floor().is_some_and(|f| f > k) {
        return Err(Error::FloorExhausted(format!("L({},{}) known only down to xi^{:?}, need xi^{k}", i + 1, j + 1, e.floor())));
    }
    Ok(e.xi_coeff(k))
}

/// Diagonal correction `D` instantiated from the entries of `L`.
pub fn instantiate_recipe(recipe: &ModRecipe, l: &LaxMatrix) -> Result<LaxMatrix> {
    if recipe.dim() != l.dim() {
        return Err(Error::ShapeMismatch(format!("recipe of size {} for {}x{} matrix", recipe.dim(), l.dim(), l.dim())));
    }
    let (nvars, neta) = (l.nvars(), l.neta());
    let mut diag = Vec::with_capacity(l.dim());
    for p in 0..l.dim() {
        let mut acc = TruncSeries::zero_with(nvars, Precision::exact());
        for t in recipe.expanded(p) {
            acc = &acc + &l_ijk(l, t.row, t.col, t.k)?.scale(&t.coeff);
        }
        diag.push(MicroOp::from_series(neta, acc));
    }
    LaxMatrix::diagonal(l.degrees().clone(), diag)
}

/// `M = (L_g^(-1) L_f)_+ - D`.
pub fn fl_generator(p: &HierarchyPair) -> Result<LaxMatrix> {
    let l = p.quotient()?;
    let plus = l.plus();
    match &p.recipe {
        None => Ok(plus),
        Some(r) => plus.try_sub(&instantiate_recipe(r, &l)?),
    }
}

/// Evolves `(L_f, L_g)` with the generator recomputed along the flow.
pub fn fl_picard(p: &HierarchyPair, time: FlowTime) -> Result<HierarchyPair> {
    let family = [p.l_f.clone(), p.l_g.clone()];
    let out = fl_evolve(&family, time, |x| {
        fl_generator(&HierarchyPair { l_f: x[0].clone(), l_g: x[1].clone(), recipe: p.recipe.clone(), floor: p.floor })
    })?;
    let [l_f, l_g]: [LaxMatrix; 2] = out.try_into().expect("two members");
    Ok(HierarchyPair { l_f, l_g, recipe: p.recipe.clone(), floor: p.floor })
}

/// `xi^r + sum_i u_i xi^i`, `u` listed from `u_0`.
pub fn kdv_operator(nvars: usize, r: u32, u: &[TruncSeries]) -> MicroOp {
    let mut l = MicroOp::xi_pow(nvars, 0, Cap::Exact, r as i64);
    for (i, ui) in u.iter().enumerate() {
        l = &l + &MicroOp::monomial(ui.clone(), vec![], i as i64);
    }
    l
}

/// `(L^(j/r))_+` for monic scalar `L` of order `r`.
pub fn kdv_generator(l: &MicroOp, r: u32, j: u32) -> Result<MicroOp> {
    let q = l.root(r, 1 - j as i64)?;
    Ok(q.pow(j, Some(0))?.plus())
}

fn scalar(op: MicroOp) -> LaxMatrix {
    LaxMatrix::scalar_matrix(&DegreeVector::zeros(1), op)
}

fn kdv_flow(r: u32, j: u32) -> impl FnMut(&[LaxMatrix]) -> Result<LaxMatrix> {
    move |x| Ok(scalar(kdv_generator(x[0].get(0, 0), r, j)?))
}

#[derive(Clone, Debug)]
pub struct KdvReport {
    pub r: u32,
    pub j: u32,
    pub torder: i64,
    /// Generator at `s = 0`, in the space variable only.
    pub generator: MicroOp,
    /// Top ξ-exponent of `[B_j, L]` at `s = 0`.
    pub bracket_top: Option<i64>,
    /// `d/ds u_i` at `s = 0`, from the bracket.
    pub rhs: Vec<TruncSeries>,
    /// `u_i(s)` as its `s^k` coefficients, `k = 0..=torder`.
    pub u: Vec<Vec<TruncSeries>>,
    /// Top ξ-exponent of `L(s) - xi^r`, at most `r - 2` for a good flow.
    pub evolved_top: Option<i64>,
}

/// Scalar flow `d/ds L = [(L^(j/r))_+, L]` for `L = xi^r + sum u_i xi^i`
/// with `u_i` series in one space variable.
pub fn fl_kdv(r: u32, j: u32, torder: i64, u: &[TruncSeries]) -> Result<KdvReport> {
    if r < 2 || j.is_multiple_of(r) {
        return Err(Error::Scenario(format!("need r >= 2 and j not a multiple of r; got r={r} j={j}")));
    }
    if u.iter().any(|f| f.nvars() != 1) || u.len() + 1 > r as usize {
        return Err(Error::Scenario("u needs at most r-1 series in one variable".into()));
    }
    let l0 = kdv_operator(1, r, u);
    let b = kdv_generator(&l0, r, j)?;
    let bracket = b.commutator(&l0, None)?;
    let rhs = (0..r as i64 - 1).map(|i| bracket.xi_coeff(i)).collect();

    let time = FlowTime::new(1, torder);
    let l = scalar(l0.extend_vars(1));
    let out = fl_evolve(&[l], time, kdv_flow(r, j))?;
    let evolved = out[0].get(0, 0).clone();
    let u = (0..r as i64 - 1)
        .map(|i| (0..=torder as u32).map(|k| s_coefficient(&evolved.xi_coeff(i), 1, k)).collect())
        .collect();
    let rest = &evolved - &MicroOp::xi_pow(2, 0, Cap::Exact, r as i64);
    Ok(KdvReport { r, j, torder, generator: b, bracket_top: bracket.top(), rhs, u, evolved_top: rest.top() })
}

/// Outcome of a two-time compatibility check.
#[derive(Clone, Debug)]
pub struct ZsReport {
    /// `d_1 M_2 - d_2 M_1 - [M_1, M_2]` on the retained range.
    pub residual: LaxMatrix,
    /// `d_1 X = [M_1, X]` still holds after flowing along the second time.
    pub flows_commute: bool,
}

impl ZsReport {
    pub fn residual_vanishes(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Flows `family` along `t1` then `t2` and tests the zero-curvature
/// identity for the two generators at every point of the joint range.
pub fn fl_zs_check<G1, G2>(family: &[LaxMatrix], t1: FlowTime, t2: FlowTime, mut gen1: G1, mut gen2: G2) -> Result<ZsReport>
where
    G1: FnMut(&[LaxMatrix]) -> Result<LaxMatrix>,
    G2: FnMut(&[LaxMatrix]) -> Result<LaxMatrix>,
{
    let mask = t1.mask | t2.mask;
    let t1 = FlowTime { mask, ..t1 };
    let t2 = FlowTime { mask, ..t2 };
    let x1 = fl_evolve(family, t1, &mut gen1)?;
    let x = fl_evolve(&x1, t2, &mut gen2)?;
    let m1 = gen1(&x)?;
    let m2 = gen2(&x)?;
    let residual = m2.derive(t1.var)?.try_sub(&m1.derive(t2.var)?)?.try_sub(&m1.commutator(&m2, None)?)?;
    let mut flows_commute = true;
    for xi in &x {
        let lhs = xi.derive(t1.var)?;
        flows_commute &= lhs.try_sub(&m1.commutator(xi, None)?)?.is_zero();
    }
    Ok(ZsReport { residual, flows_commute })
}

/// Two scalar flows of the same `L`, in times `s1`, `s2` appended after
/// the space variable.
pub fn fl_kdv_pair(r: u32, j1: u32, j2: u32, torder: i64, u: &[TruncSeries]) -> Result<ZsReport> {
    let l = scalar(kdv_operator(1, r, u).extend_vars(2));
    let mask = 0b110;
    fl_zs_check(
        &[l],
        FlowTime::joint(1, mask, torder),
        FlowTime::joint(2, mask, torder),
        kdv_flow(r, j1),
        kdv_flow(r, j2),
    )
}

/// `[L_f, L_g]` vanishes on every retained term.
pub fn commute(a: &LaxMatrix, b: &LaxMatrix) -> Result<bool> {
    Ok(a.commutator(b, None)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{int, rat};
    use crate::random::{monic_matrix, rng};

    fn poly(terms: &[(u32, i64)]) -> TruncSeries {
        TruncSeries::from_terms(1, Cap::Exact, terms.iter().map(|&(e, c)| (vec![e], int(c))))
    }

    #[test]
    fn translation_flow() {
        let u = poly(&[(0, 1), (2, 3), (3, -1)]);
        let rep = fl_kdv(2, 1, 2, std::slice::from_ref(&u)).unwrap();
        assert!(rep.generator.agrees_with(&MicroOp::xi_pow(1, 0, Cap::Exact, 1)));
        assert_eq!(rep.rhs[0], u.derive(0).unwrap());
        // u(t + s) to second order
        assert_eq!(rep.u[0][1], u.derive(0).unwrap());
        assert_eq!(rep.u[0][2], u.derive(0).unwrap().derive(0).unwrap().scale(&rat(1, 2)));
    }

    #[test]
    fn kdv_right_hand_side() {
        let u = poly(&[(1, 2), (2, 1), (4, -3)]);
        let rep = fl_kdv(2, 3, 1, std::slice::from_ref(&u)).unwrap();
        let u1 = u.derive(0).unwrap();
        let u3 = u1.derive(0).unwrap().derive(0).unwrap();
        let expected = &u3.scale(&rat(1, 4)) + &u.mul(&u1).unwrap().scale(&rat(3, 2));
        assert_eq!(rep.rhs[0], expected);
        assert_eq!(rep.u[0][1], expected);
        assert!(rep.bracket_top.is_none_or(|t| t <= 0));
        assert!(rep.evolved_top.is_none_or(|t| t <= 0));
    }

    #[test]
    fn picard_reaches_its_fixed_point() {
        let u = poly(&[(0, 1), (3, 2)]);
        let l = scalar(kdv_operator(1, 2, &[u]).extend_vars(1));
        let time = FlowTime::new(1, 3);
        let once = fl_evolve(std::slice::from_ref(&l), time, kdv_flow(2, 3)).unwrap();
        let m = scalar(kdv_generator(once[0].get(0, 0), 2, 3).unwrap());
        let again = l.try_add(&m.commutator(&once[0], None).unwrap().map_series(|f| f.integrate(1)).unwrap()).unwrap();
        assert!(again.truncate(None, time.precision()).agrees_with(&once[0]));
    }

    #[test]
    fn central_generator_freezes_the_flow() {
        let mut g = rng(3);
        let a = monic_matrix(&mut g, 2, 1, 0, 0).extend_vars(1);
        let c = LaxMatrix::scalar_matrix(a.degrees(), MicroOp::from_series(0, TruncSeries::constant(2, Cap::Exact, int(5))));
        let out = fl_evolve(std::slice::from_ref(&a), FlowTime::new(1, 3), |_| Ok(c.clone())).unwrap();
        assert!(out[0].agrees_with(&a));
    }

    #[test]
    fn kdv_flows_commute() {
        let u = poly(&[(0, 1), (1, -1), (2, 2)]);
        let rep = fl_kdv_pair(2, 3, 5, 2, &[u]).unwrap();
        assert!(rep.residual_vanishes());
        assert!(rep.flows_commute);
    }

    #[test]
    fn corrupted_generator_is_detected() {
        let u = poly(&[(0, 1), (2, 1)]);
        let l = scalar(kdv_operator(1, 2, &[u]).extend_vars(2));
        let t = TruncSeries::from_terms(3, Cap::Exact, [(vec![1, 0, 0], int(1))]);
        // a bare function would act as a gauge and keep the identity;
        // t xi^-1 keeps L monic of order 2
        let bump = scalar(MicroOp::monomial(t, vec![], -1));
        let rep = fl_zs_check(
            &[l],
            FlowTime::joint(1, 0b110, 2),
            FlowTime::joint(2, 0b110, 2),
            kdv_flow(2, 3),
            |x| kdv_flow(2, 5)(x)?.try_add(&bump),
        )
        .unwrap();
        assert!(!rep.residual_vanishes());
    }

    #[test]
    fn polynomial_pair_keeps_commuting() {
        let mut g = rng(9);
        let a = monic_matrix(&mut g, 2, 1, 0, -1).extend_vars(1);
        let a2 = a.mul(&a).unwrap();
        let l_f = a2.mul(&a).unwrap().try_add(&a).unwrap();
        let pair = HierarchyPair::new(l_f, a.clone());
        let m = fl_generator(&pair).unwrap();
        assert!(!m.is_zero());
        let out = fl_picard(&pair, FlowTime::new(1, 2)).unwrap();
        assert!(commute(&out.l_f, &out.l_g).unwrap());
        assert!(out.l_g.filtered_order_at_most(1));
    }

    #[test]
    fn recipe_subtracts_the_named_coefficient() {
        use crate::normalize::{lterm, ModRecipe};
        let deg = DegreeVector::new(vec![0, 1]).unwrap();
        let mut g = rng(4);
        let a = monic_matrix(&mut g, 2, 1, 0, 0);
        let a = LaxMatrix::new(deg.clone(), a.entries().to_vec()).unwrap();
        let recipe = ModRecipe::from_expanded(vec![vec![], vec![lterm(1, 1, 2, -1)]]);
        let pair = HierarchyPair::new(a.mul(&a).unwrap(), a.clone());
        let plain = fl_generator(&pair).unwrap();
        let modified = fl_generator(&pair.clone().with_recipe(recipe)).unwrap();
        let l = pair.quotient().unwrap();
        let d = plain.try_sub(&modified).unwrap();
        assert_eq!(d.get(1, 1).xi_coeff(0), l.get(0, 1).xi_coeff(-1));
        assert!(d.get(0, 0).is_zero() && d.get(0, 1).is_zero() && d.get(1, 0).is_zero());
    }
}
