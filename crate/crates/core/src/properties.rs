//! Randomized ring and matrix identities, one seeded case per call.
//!
//! Each check draws its data from the generator and returns whether the
//! identity held on the range the operands guarantee.

use rand::Rng;

use crate::coeffring::{int, Cap, TruncSeries};
use crate::error::Result;
use crate::laxmat::{DegreeVector, LaxMatrix};
use crate::microp::MicroOp;
use crate::random::{self, Gen};

const NV: usize = 2;
const NE: usize = 1;

pub type Check = fn(&mut Gen) -> Result<bool>;

/// Named checks, in report order.
pub const CHECKS: &[(&str, Check)] = &[
    ("associativity", associativity),
    ("commutation-rules", commutation_rules),
    ("order-subadditive", order_subadditive),
    ("filtration-bound", filtration_bound),
    ("split-identities", split_identities),
    ("inverse-round-trip", inverse_round_trip),
    ("root-round-trip", root_round_trip),
    ("leibniz", leibniz),
    ("signed-linear-inverse", signed_linear_inverse),
];

fn op(g: &mut Gen, lo: i64, hi: i64) -> MicroOp {
    random::operator(g, NV, NE, lo, hi, 1, Cap::Exact)
}

fn one() -> MicroOp {
    MicroOp::one(NV, NE, Cap::Exact)
}

/// `(AB)C = A(BC)`, exactly and again under random xi-floors.
pub fn associativity(g: &mut Gen) -> Result<bool> {
    let (a, b, c) = (op(g, -2, 1), op(g, -1, 2), op(g, -2, 1));
    let exact = a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?;
    let fa = a.with_floor(g.gen_range(-4..=-1));
    let fc = c.with_floor(g.gen_range(-4..=-1));
    let floored = fa.mul(&b)?.mul(&fc)?.agrees_with(&fa.mul(&b.mul(&fc)?)?);
    Ok(exact && floored)
}

/// `[m, f] = d_m f` for `m` in `xi, eta`, and the generators commute.
pub fn commutation_rules(g: &mut Gen) -> Result<bool> {
    let f = random::series(g, NV, 3, 4, Cap::Exact);
    let fop = MicroOp::from_series(NE, f.clone());
    let xi = MicroOp::xi_pow(NV, NE, Cap::Exact, 1);
    let eta = MicroOp::eta(NV, NE, Cap::Exact, 0);
    let rule_xi = xi.commutator(&fop, None)? == MicroOp::from_series(NE, f.derive(0)?);
    let rule_eta = eta.commutator(&fop, None)? == MicroOp::from_series(NE, f.derive(1)?);
    let k = g.gen_range(-3..=3);
    let generators = MicroOp::xi_pow(NV, NE, Cap::Exact, k).commutator(&eta, None)?.is_zero();
    Ok(rule_xi && rule_eta && generators)
}

/// `ord(AB) <= ord(A) + ord(B)`, with equality for eta-free constant leads.
pub fn order_subadditive(g: &mut Gen) -> Result<bool> {
    let (a, b) = (op(g, -2, 2), op(g, -2, 2));
    let bound = a.mul(&b)?.order() <= a.order().plus(b.order());
    let ka = g.gen_range(0..=3);
    let kb = g.gen_range(-2..=3);
    let ma = random::monic(g, NV, NE, ka, ka - 3, Cap::Exact);
    let mb = random::monic(g, NV, NE, kb, kb - 3, Cap::Exact);
    let exact = ma.mul(&mb)?.order() == ma.order().plus(mb.order());
    Ok(bound && exact)
}

fn filtered_matrix(g: &mut Gen, degrees: &DegreeVector, k: i64) -> Result<LaxMatrix> {
    let d = degrees.dim();
    let entries = (0..d)
        .map(|a| (0..d).map(|b| {
            let o = k + degrees.get(a) - degrees.get(b);
            op(g, o - 3, o - 1)
        }).collect())
        .collect();
    LaxMatrix::new(degrees.clone(), entries)
}

/// Products of matrices of filtered orders `k1`, `k2` have order `<= k1 + k2`.
pub fn filtration_bound(g: &mut Gen) -> Result<bool> {
    let d = g.gen_range(1..=3);
    let degrees = DegreeVector::new(random::degree_vector(g, d, 3))?;
    let (k1, k2) = (g.gen_range(-1..=2), g.gen_range(-1..=2));
    let a = filtered_matrix(g, &degrees, k1)?;
    let b = filtered_matrix(g, &degrees, k2)?;
    Ok(a.filtered_order_at_most(k1) && b.filtered_order_at_most(k2) && a.mul(&b)?.filtered_order_at_most(k1 + k2))
}

/// `A = A+ + A-`, `(A+ B+)- = 0` and `(A- B-)+ = 0`.
pub fn split_identities(g: &mut Gen) -> Result<bool> {
    let (a, b) = (op(g, -3, 2), op(g, -3, 2));
    let (ap, am) = a.split();
    let (bp, bm) = b.split();
    let sum = &ap + &am == a;
    let pp = ap.mul(&bp)?.minus().is_zero();
    let mm = am.mul(&bm)?.plus().is_zero();
    Ok(sum && pp && mm)
}

/// `A A^-1 = A^-1 A = 1` down to the floor.
pub fn inverse_round_trip(g: &mut Gen) -> Result<bool> {
    let k = g.gen_range(-1..=3);
    let mut a = random::monic(g, NV, NE, k, k - 3, Cap::Exact);
    let lead = random::small_rational(g);
    a = &a + &MicroOp::monomial(TruncSeries::constant(NV, Cap::Exact, lead - int(1)), vec![0], k);
    let floor = g.gen_range(-6..=-2);
    let inv = a.invert(floor)?;
    let expect = one().with_floor(floor + k);
    Ok(a.mul_to(&inv, Some(floor + k))?.agrees_with(&expect) && inv.mul_to(&a, Some(floor + k))?.agrees_with(&expect))
}

/// `(L^(1/r))^r = L` down to the floor the root supports.
pub fn root_round_trip(g: &mut Gen) -> Result<bool> {
    let r = g.gen_range(1..=3u32);
    let ri = r as i64;
    let l = random::monic(g, NV, 0, ri, ri - 3, Cap::Exact);
    let floor = g.gen_range(-5..=-2);
    let q = l.root(r, floor)?;
    let target = floor + ri - 1;
    Ok(q.pow(r, Some(target))?.agrees_with(&l.with_floor(target)))
}

/// `d(AB) = d(A) B + A d(B)` for the coefficient derivations.
pub fn leibniz(g: &mut Gen) -> Result<bool> {
    let (a, b) = (op(g, -2, 2), op(g, -2, 2));
    let i = g.gen_range(0..NV);
    let lhs = a.mul(&b)?.derive(i)?;
    let rhs = &a.derive(i)?.mul(&b)? + &a.mul(&b.derive(i)?)?;
    Ok(lhs == rhs)
}

/// `(a xi + eta)^-1` matches its signed expansion and multiplies back to 1.
pub fn signed_linear_inverse(g: &mut Gen) -> Result<bool> {
    let a = random::small_rational(g);
    let floor = g.gen_range(-7..=-2);
    let lin = &MicroOp::monomial(TruncSeries::constant(NV, Cap::Exact, a.clone()), vec![0], 1)
        + &MicroOp::eta(NV, NE, Cap::Exact, 0);
    let inv = lin.invert(floor)?;
    let mut expected = MicroOp::zero(NV, NE, Cap::Exact);
    let mut c = a.recip();
    for k in 0..(-floor) as u32 {
        expected = &expected + &MicroOp::monomial(TruncSeries::constant(NV, Cap::Exact, c.clone()), vec![k], -(k as i64) - 1);
        c = -c / &a;
    }
    let back = lin.mul_to(&inv, Some(floor + 1))?.agrees_with(&one().with_floor(floor + 1));
    Ok(inv.agrees_with(&expected.with_floor(floor)) && back)
}

/// Runs `cases` seeded cases of one check; returns the first failing seed.
pub fn run_check(check: Check, seed: u64, cases: u64) -> Result<Option<u64>> {
    for case in 0..cases {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(case);
        if !check(&mut random::rng(s))? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes_a_few_seeds() {
        for (name, check) in CHECKS {
            assert_eq!(run_check(*check, 3, 5).unwrap(), None, "{name}");
        }
    }
}
