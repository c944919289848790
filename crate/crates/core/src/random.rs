//! Seeded generators for property checks and scenario data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffring::{rat, Cap, Monomial, Rational, TruncSeries};
use crate::laxmat::{DegreeVector, LaxMatrix, SeriesMatrix};
use crate::linalg::is_invertible;
use crate::localmodel::{body_precision, Depths, LocalMatrix, LocalSection};
use crate::microp::MicroOp;

pub type Gen = ChaCha8Rng;

pub fn rng(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational `p/q` with `|p| <= 4`, `q <= 3`.
pub fn small_rational(g: &mut Gen) -> Rational {
    loop {
        let p: i64 = g.gen_range(-4..=4);
        if p != 0 {
            return rat(p, g.gen_range(1..=3));
        }
    }
}

fn monomial(g: &mut Gen, nvars: usize, max_deg: u32) -> Monomial {
    let mut m = vec![0; nvars];
    let deg = g.gen_range(0..=max_deg);
    for _ in 0..deg {
        m[g.gen_range(0..nvars)] += 1;
    }
    m
}

/// Polynomial with up to `nterms` terms of degree at most `max_deg`.
pub fn series(g: &mut Gen, nvars: usize, max_deg: u32, nterms: usize, cap: Cap) -> TruncSeries {
    let terms: Vec<_> = (0..nterms).map(|_| (monomial(g, nvars, max_deg), small_rational(g))).collect();
    TruncSeries::from_terms(nvars, cap, terms)
}

/// Series with a nonzero constant term.
pub fn unit_series(g: &mut Gen, nvars: usize, max_deg: u32, nterms: usize, cap: Cap) -> TruncSeries {
    let s = series(g, nvars, max_deg, nterms, cap);
    let c = s.constant_term();
    let one = TruncSeries::constant(nvars, cap, small_rational(g) - c);
    &s + &one
}

/// Operator with xi-exponents in `[lo, hi]`, eta-degree at most `eta_deg`.
pub fn operator(g: &mut Gen, nvars: usize, neta: usize, lo: i64, hi: i64, eta_deg: u32, cap: Cap) -> MicroOp {
    let mut op = MicroOp::zero(nvars, neta, cap);
    for i in lo..=hi {
        let alpha = if neta == 0 { vec![] } else { monomial(g, neta, eta_deg) };
        let f = series(g, nvars, 2, 2, cap);
        op = &op + &MicroOp::monomial(f, alpha, i);
    }
    op
}

/// `xi^k + (random lower xi-exponents down to lo)`, eta-free.
pub fn monic(g: &mut Gen, nvars: usize, neta: usize, k: i64, lo: i64, cap: Cap) -> MicroOp {
    let rest = operator(g, nvars, neta, lo, k - 1, 0, cap);
    &MicroOp::xi_pow(nvars, neta, cap, k) + &rest
}

/// Matrix `xi I + C` with `C` random of ξ-exponents in `[lo, 0]`.
pub fn monic_matrix(g: &mut Gen, d: usize, nvars: usize, neta: usize, lo: i64) -> LaxMatrix {
    let degrees = DegreeVector::zeros(d);
    let mut entries = Vec::with_capacity(d);
    for a in 0..d {
        let mut row = Vec::with_capacity(d);
        for b in 0..d {
            let mut e = operator(g, nvars, neta, lo, 0, 0, Cap::Exact);
            if a == b {
                e = &e + &MicroOp::xi_pow(nvars, neta, Cap::Exact, 1);
            }
            row.push(e);
        }
        entries.push(row);
    }
    LaxMatrix::new(degrees, entries).expect("square")
}

/// Random nondecreasing degree vector with entries in `[0, max]`.
pub fn degree_vector(g: &mut Gen, d: usize, max: i64) -> Vec<i64> {
    let mut c: Vec<i64> = (0..d).map(|_| g.gen_range(0..=max)).collect();
    c.sort_unstable();
    c
}

/// Random local matrix over an `n`-dimensional base whose evaluation at
/// the points is invertible. Row `a` is `z^(-r_a)` times a regular body.
pub fn local_matrix(g: &mut Gen, d: usize, n: usize, rowdeg: &[i64], depths: Depths) -> LocalMatrix {
    let nv = 2 * n;
    loop {
        let mut entries = Vec::with_capacity(d);
        for &r in rowdeg {
            let mut row = Vec::with_capacity(d);
            for b in 0..d {
                let nterms = g.gen_range(1..=4);
                let terms: Vec<_> = (0..nterms).map(|_| (monomial(g, nv, 2), small_rational(g))).collect();
                let mut body = TruncSeries::from_terms_with(nv, body_precision(n, depths), terms);
                if g.gen_bool(0.7) {
                    let c = TruncSeries::from_terms_with(nv, body_precision(n, depths), [(vec![0; nv], small_rational(g))]);
                    body = &body + &c;
                }
                row.push(LocalSection::new(b, r, body));
            }
            entries.push(row);
        }
        let chi = LocalMatrix::new(rowdeg.to_vec(), entries).expect("square");
        let values = match chi.tilde().evaluate() {
            Ok(v) => v,
            Err(_) => continue,
        };
        if is_invertible(&values.constant_part()) {
            return chi;
        }
    }
}

/// Values matrix for normalization: `1` on the diagonal as placeholder,
/// random units above it, zeros below and between distinct rows of equal
/// degree. Constant terms are drawn wide so that signed sums of them
/// vanish only by accident.
pub fn normalization_values(g: &mut Gen, degrees: &DegreeVector, nvars: usize, cap: Cap) -> SeriesMatrix {
    let d = degrees.dim();
    let rows = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    if a == b {
                        TruncSeries::one(nvars, cap)
                    } else if a > b || degrees.get(a) == degrees.get(b) {
                        TruncSeries::zero(nvars, cap)
                    } else {
                        let s = series(g, nvars, 2, 3, cap);
                        let c = rat(g.gen_range(1..=997), g.gen_range(1..=13)) - s.constant_term();
                        &s + &TruncSeries::constant(nvars, cap, c)
                    }
                })
                .collect()
        })
        .collect();
    SeriesMatrix::new(rows).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmodel::{lm_gauss_normalize, verify_elimination};

    #[test]
    fn same_seed_same_data() {
        let a = series(&mut rng(7), 2, 3, 4, Cap::Degree(5));
        let b = series(&mut rng(7), 2, 3, 4, Cap::Degree(5));
        assert_eq!(a, b);
    }

    #[test]
    fn random_local_matrices_eliminate() {
        let depths = Depths { zw: 4, t: 2 };
        for seed in 0..6 {
            let mut g = rng(seed);
            let d = g.gen_range(2..=3);
            let n = g.gen_range(1..=2);
            let rowdeg = degree_vector(&mut g, d, 2);
            let chi = local_matrix(&mut g, d, n, &rowdeg, depths);
            let e = lm_gauss_normalize(&chi).unwrap();
            assert!(e.result.is_good(), "seed {seed}");
            assert!(verify_elimination(&chi, &e).unwrap(), "seed {seed}");
        }
    }
}
