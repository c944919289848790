//! Scenario files, suite runner and line-oriented reports.
//!
//! A scenario is a small TOML document naming a suite plus its parameters.
//! Running it yields a [`Report`]: one record per line, rationals as `p/q`,
//! identical for identical input.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeffring::{rat, Cap, TruncSeries};
use crate::error::{Error, Result};
use crate::flows::{commute, fl_kdv, fl_kdv_pair, fl_picard, FlowTime, HierarchyPair};
use crate::laxmat::{DegreeVector, LaxMatrix};
use crate::localmodel::{has_block_shape, lm_gauss_normalize, verify_elimination, Depths};
use crate::normalize::{check_recursion, nz_emit_recipe, nz_paper_scenarios, nz_procedure75, Policy};
use crate::properties::{run_check, CHECKS};
use crate::random::{self, rng};

/// `chi(b) = kappa + (kappa + 1) b + b^2`.
pub fn chi_formula(kappa: i64, b: i64) -> i64 {
    kappa + (kappa + 1) * b + b * b
}

fn choose(a: i64, k: i64) -> i64 {
    if a < k || k < 0 {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (a - i) / (i + 1))
}

/// Dimension of the degree-`m` part of a polynomial ring in `n` variables.
fn graded_dim(m: i64, n: usize) -> i64 {
    if m < 0 {
        0
    } else {
        choose(m + n as i64 - 1, n as i64 - 1)
    }
}

/// Generator degrees of a free graded module over a polynomial ring in `n`
/// variables. `h` lists `(twist, count)` for consecutive twists, where the
/// count is cumulative: sections of pole order at most the twist. Counts
/// below the first twist are taken to be zero.
pub fn degrees_from_hilbert(h: &[(i64, i64)], n: usize) -> Result<DegreeVector> {
    if n == 0 || h.is_empty() {
        return Err(Error::Scenario("need n >= 1 and at least one count".into()));
    }
    if h.windows(2).any(|w| w[1].0 != w[0].0 + 1 || w[1].1 < w[0].1) {
        return Err(Error::Scenario("counts must be nondecreasing over consecutive twists".into()));
    }
    let mut gens: Vec<i64> = Vec::new();
    let mut prev = 0;
    for &(k, count) in h {
        let graded = count - prev;
        let known: i64 = gens.iter().map(|&c| graded_dim(k - c, n)).sum();
        let new = graded - known;
        if new < 0 {
            return Err(Error::NotFree { twist: k, deficit: -new });
        }
        gens.extend(std::iter::repeat_n(k, new as usize));
        prev = count;
    }
    DegreeVector::new(gens)
}

/// Cumulative counts of the free module with the given generator degrees.
pub fn hilbert_from_degrees(degrees: &DegreeVector, n: usize, twists: std::ops::RangeInclusive<i64>) -> Vec<(i64, i64)> {
    twists
        .map(|k| (k, degrees.as_slice().iter().map(|&c| choose(k - c + n as i64, n as i64)).sum()))
        .collect()
}

/// Section counts at twists 2, 3, 4 of the Fano example.
pub const FANO_COUNTS: [(i64, i64); 3] = [(2, 1), (3, 6), (4, 16)];

/// Generator orders of the ruled-surface module for `kappa`, from
/// `chi(b)` at `b = 0..=4`.
pub fn ruled_orders(kappa: i64) -> Result<DegreeVector> {
    let h: Vec<(i64, i64)> = (0..=4).map(|b| (b, chi_formula(kappa, b))).collect();
    degrees_from_hilbert(&h, 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Degree cap of generic series data.
    pub series: i64,
    /// Lowest xi-exponent kept.
    pub floor: i64,
    /// Order in the flow times.
    pub torder: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { series: 8, floor: -4, torder: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    /// Base dimension.
    pub n: usize,
    /// Matrix size.
    pub d: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Dims { n: 2, d: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Suite to run: kdv, fano, ruled, normalize, recipes, elimination,
    /// pairs or property-suite.
    pub name: String,
    #[serde(default)]
    pub degrees: Vec<i64>,
    #[serde(default)]
    pub dims: Dims,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default = "default_policy")]
    pub policy: String,
    #[serde(default)]
    pub seed: u64,
    /// Number of randomized cases where the suite takes several.
    #[serde(default)]
    pub cases: Option<u64>,
    #[serde(default)]
    pub kdv: Option<KdvParams>,
    #[serde(default)]
    pub kappa: Option<i64>,
}

fn default_policy() -> String {
    "previous-entry".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdvParams {
    pub r: u32,
    pub j: u32,
    /// Second flow for the compatibility check.
    #[serde(default)]
    pub j2: Option<u32>,
}

impl Scenario {
    pub fn new(name: &str) -> Self {
        Scenario {
            name: name.into(),
            degrees: Vec::new(),
            dims: Dims::default(),
            caps: Caps::default(),
            policy: default_policy(),
            seed: 0,
            cases: None,
            kdv: None,
            kappa: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.caps;
        if c.series <= 0 || c.torder <= 0 || c.floor >= 0 {
            return Err(Error::Scenario(format!("caps need series > 0, torder > 0, floor < 0; got {c:?}")));
        }
        if self.degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadDegrees(self.degrees.clone()));
        }
        if self.dims.n == 0 || self.dims.d == 0 {
            return Err(Error::Scenario("dims must be positive".into()));
        }
        Policy::parse(&self.policy)?;
        Ok(())
    }
}

/// Line-oriented run record.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.lines.push(format!("check {name} {}", if ok { "PASS" } else { "FAIL" }));
        if !ok {
            self.failures += 1;
        }
    }

    /// One value record; multi-line text becomes one record per line.
    pub fn value(&mut self, key: &str, text: impl fmt::Display) {
        for line in text.to_string().lines() {
            self.lines.push(format!("value {key} {line}"));
        }
    }

    fn error(&mut self, suite: &str, e: &Error) {
        self.lines.push(format!("error {suite} {e}"));
        self.failures += 1;
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn list(v: &[i64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// Runs the suite named by the scenario. Suite errors become `error`
/// records and count as failures.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    s.validate()?;
    let mut rep = Report::default();
    rep.lines.push(format!(
        "scenario name={} seed={} n={} d={} degrees={} series={} floor={} torder={} policy={}",
        s.name,
        s.seed,
        s.dims.n,
        s.dims.d,
        list(&s.degrees),
        s.caps.series,
        s.caps.floor,
        s.caps.torder,
        s.policy
    ));
    let outcome = match s.name.as_str() {
        "kdv" => kdv_suite(s, &mut rep),
        "fano" => fano_suite(&mut rep),
        "ruled" => ruled_suite(s, &mut rep),
        "normalize" => normalize_suite(s, &mut rep),
        "recipes" => recipes_suite(&mut rep),
        "elimination" => elimination_suite(s, &mut rep),
        "pairs" => pairs_suite(s, &mut rep),
        "property-suite" => property_suite(s, &mut rep),
        other => return Err(Error::Scenario(format!("unknown suite {other:?}"))),
    };
    if let Err(e) = outcome {
        rep.error(&s.name, &e);
    }
    rep.lines.push(format!("verdict {}", if rep.passed() { "PASS" } else { "FAIL" }));
    Ok(rep)
}

/// Seeded potential of degree at most `cap` in one variable.
pub fn kdv_potential(seed: u64, r: u32, cap: i64) -> Vec<TruncSeries> {
    let mut g = rng(seed);
    (0..r.saturating_sub(1)).map(|_| random::series(&mut g, 1, cap as u32, 4, Cap::Exact)).collect()
}

fn kdv_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    let p = s.kdv.unwrap_or(KdvParams { r: 2, j: 3, j2: None });
    let u = kdv_potential(s.seed, p.r, s.caps.series);
    for (i, ui) in u.iter().enumerate() {
        rep.value(&format!("u{i}"), ui);
    }
    let out = fl_kdv(p.r, p.j, s.caps.torder, &u)?;
    let low = p.r as i64 - 2;
    rep.value("generator", out.generator.canonical());
    for (i, f) in out.rhs.iter().enumerate() {
        rep.value(&format!("rhs.u{i}"), f);
    }
    for (i, coeffs) in out.u.iter().enumerate() {
        for (k, f) in coeffs.iter().enumerate() {
            rep.value(&format!("u{i}.s{k}"), f);
        }
    }
    rep.check("bracket-order", out.bracket_top.is_none_or(|t| t <= low));
    rep.check("evolved-order", out.evolved_top.is_none_or(|t| t <= low));
    rep.check("first-order-matches-rhs", out.u.iter().zip(&out.rhs).all(|(c, f)| c[1] == *f));
    if p.r == 2 && p.j == 3 {
        let u0 = &u[0];
        let u1 = u0.derive(0)?;
        let u3 = u1.derive(0)?.derive(0)?;
        let expected = &u3.scale(&rat(1, 4)) + &u0.mul(&u1)?.scale(&rat(3, 2));
        rep.check("kdv-equation", out.rhs[0] == expected);
    }
    if let Some(j2) = p.j2 {
        let zs = fl_kdv_pair(p.r, p.j, j2, s.caps.torder, &u)?;
        rep.check("zero-curvature", zs.residual_vanishes());
        rep.check("flows-commute", zs.flows_commute);
    }
    Ok(())
}

fn recipe_runs(rep: &mut Report, names: &[&str]) -> Result<()> {
    for sc in nz_paper_scenarios().into_iter().filter(|sc| names.is_empty() || names.contains(&sc.name)) {
        let psi = random::normalization_values(&mut rng(11), &sc.degrees, 1, Cap::Degree(6));
        let (tree, state) = nz_procedure75(&psi, &sc.degrees, &sc.policy)?;
        let recipe = nz_emit_recipe(&tree, &sc.degrees);
        rep.value(&format!("tree.{}", sc.name), &tree);
        rep.value(&format!("recipe.{}", sc.name), &recipe);
        rep.check(&format!("{}.tree", sc.name), tree == sc.tree);
        rep.check(&format!("{}.recursion", sc.name), check_recursion(&tree, &state));
        rep.check(&format!("{}.recipe", sc.name), recipe.same_as(&sc.expected));
        rep.check(&format!("{}.singleton", sc.name), state.s.len() == 1);
    }
    Ok(())
}

fn recipes_suite(rep: &mut Report) -> Result<()> {
    recipe_runs(rep, &[])
}

fn fano_suite(rep: &mut Report) -> Result<()> {
    let degrees = degrees_from_hilbert(&FANO_COUNTS, 2)?;
    rep.value("degrees", &degrees);
    rep.check("degrees", degrees.as_slice() == [2, 3, 3, 3, 4]);
    rep.check("rank", degrees.dim() == 5);
    rep.check("counts-round-trip", hilbert_from_degrees(&degrees, 2, 2..=4) == FANO_COUNTS);
    recipe_runs(rep, &["fano-previous", "fano-alternating"])
}

fn ruled_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    let kappas = s.kappa.map_or(vec![0, 1, 2], |k| vec![k]);
    for k in kappas {
        let chi: Vec<i64> = (-3..=3).map(|b| chi_formula(k, b)).collect();
        rep.value(&format!("chi.kappa{k}"), list(&chi));
        let orders = ruled_orders(k)?;
        rep.value(&format!("orders.kappa{k}"), &orders);
        let expected: Option<&[i64]> = match k {
            0 => Some(&[1, 1]),
            1 => Some(&[0, 1]),
            2 => Some(&[0, 0]),
            _ => None,
        };
        if let Some(e) = expected {
            rep.check(&format!("orders.kappa{k}"), orders.as_slice() == e);
        }
    }
    recipe_runs(rep, &["ruled-surface"])
}

fn normalize_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    let degrees = DegreeVector::new(s.degrees.clone())?;
    let policy = Policy::parse(&s.policy)?;
    let psi = random::normalization_values(&mut rng(s.seed), &degrees, 1, Cap::Degree(s.caps.series));
    let (tree, state) = nz_procedure75(&psi, &degrees, &policy)?;
    let recipe = nz_emit_recipe(&tree, &degrees);
    rep.value("tree", &tree);
    rep.value("recipe", &recipe);
    let adjoined: Vec<i64> = state.s.iter().map(|&p| p as i64 + 1).collect();
    rep.value("adjoined", list(&adjoined));
    rep.check("recursion", check_recursion(&tree, &state));
    rep.check("adjoined-count", state.s.len() == degrees.leading_multiplicity());
    Ok(())
}

/// Depths used for random local matrices.
pub const ELIMINATION_DEPTHS: Depths = Depths { zw: 4, t: 3 };

/// Outcome of one random elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EliminationVerdict {
    pub good: bool,
    pub block_shape: bool,
    pub order_zero: bool,
    pub verified: bool,
}

impl EliminationVerdict {
    pub fn all(&self) -> bool {
        self.good && self.block_shape && self.order_zero && self.verified
    }
}

/// Eliminates one random `d x d` local matrix over an `n`-dimensional base.
pub fn elimination_case(seed: u64, d: usize, n: usize) -> Result<EliminationVerdict> {
    let mut g = rng(seed);
    let rowdeg = random::degree_vector(&mut g, d, 2);
    let chi = random::local_matrix(&mut g, d, n, &rowdeg, ELIMINATION_DEPTHS);
    let e = lm_gauss_normalize(&chi)?;
    let values = e.result.tilde().evaluate()?;
    Ok(EliminationVerdict {
        good: e.result.is_good(),
        block_shape: has_block_shape(&values, &rowdeg),
        order_zero: e.l.filtered_order_at_most(0),
        verified: verify_elimination(&chi, &e)?,
    })
}

fn elimination_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    for case in 0..s.cases.unwrap_or(1) {
        let seed = s.seed + case;
        let v = elimination_case(seed, s.dims.d, s.dims.n)?;
        rep.check(&format!("seed{seed}.good"), v.good);
        rep.check(&format!("seed{seed}.block-shape"), v.block_shape);
        rep.check(&format!("seed{seed}.order-zero"), v.order_zero);
        rep.check(&format!("seed{seed}.verified"), v.verified);
    }
    Ok(())
}

/// Flows a commuting polynomial pair in `A`, a random `xi I + C` of size
/// `d` with `C` down to `xi^lo`, and tests commutation afterwards.
/// `shape` picks `(A^2 + A, A^3)` or `(A^3 + A, A)`.
pub fn pair_case(seed: u64, d: usize, lo: i64, cubic_first: bool, torder: i64) -> Result<bool> {
    let mut g = rng(seed);
    let a = random::monic_matrix(&mut g, d, 1, 0, lo).extend_vars(1);
    let a2 = a.mul(&a)?;
    let a3 = a2.mul(&a)?;
    let (l_f, l_g): (LaxMatrix, LaxMatrix) = if cubic_first { (a3.try_add(&a)?, a) } else { (a2.try_add(&a)?, a3) };
    let pair = HierarchyPair::new(l_f, l_g);
    let out = fl_picard(&pair, FlowTime::new(1, torder))?;
    commute(&out.l_f, &out.l_g)
}

fn pairs_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    for case in 0..s.cases.unwrap_or(4) {
        let seed = s.seed + case;
        let d = rng(seed).gen_range(1..=3);
        rep.check(&format!("seed{seed}.d{d}.square-plus-cube"), pair_case(seed, d, 0, false, s.caps.torder)?);
        rep.check(&format!("seed{seed}.d{d}.cube-plus-linear"), pair_case(seed, d, -1, true, s.caps.torder)?);
    }
    Ok(())
}

fn property_suite(s: &Scenario, rep: &mut Report) -> Result<()> {
    let cases = s.cases.unwrap_or(20);
    for (name, check) in CHECKS {
        match run_check(*check, s.seed, cases)? {
            None => rep.check(name, true),
            Some(bad) => {
                rep.value(&format!("{name}.failing-seed"), bad);
                rep.check(name, false);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_examples() {
        assert_eq!(chi_formula(1, 0), 1);
        assert_eq!(chi_formula(0, 0), 0);
        assert_eq!(chi_formula(2, -1), 0);
    }

    #[test]
    fn fano_degrees() {
        let c = degrees_from_hilbert(&FANO_COUNTS, 2).unwrap();
        assert_eq!(c.as_slice(), &[2, 3, 3, 3, 4]);
        assert_eq!(hilbert_from_degrees(&c, 2, 2..=4), FANO_COUNTS);
    }

    #[test]
    fn single_generator() {
        let c = degrees_from_hilbert(&[(0, 1), (1, 3), (2, 6)], 2).unwrap();
        assert_eq!(c.as_slice(), &[0]);
    }

    #[test]
    fn not_free() {
        let e = degrees_from_hilbert(&[(0, 1), (1, 2), (2, 3)], 2).unwrap_err();
        assert_eq!(e, Error::NotFree { twist: 1, deficit: 1 });
    }

    #[test]
    fn ruled_orders_by_kappa() {
        assert_eq!(ruled_orders(0).unwrap().as_slice(), &[1, 1]);
        assert_eq!(ruled_orders(1).unwrap().as_slice(), &[0, 1]);
        assert_eq!(ruled_orders(2).unwrap().as_slice(), &[0, 0]);
    }

    #[test]
    fn scenario_toml_round_trip() {
        let text = "name = \"kdv\"\nseed = 4\n[caps]\nseries = 6\nfloor = -3\ntorder = 2\n[kdv]\nr = 2\nj = 3\n";
        let s = Scenario::from_toml(text).unwrap();
        assert_eq!(s.kdv, Some(KdvParams { r: 2, j: 3, j2: None }));
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
        assert!(Scenario::from_toml("name = \"kdv\"\ndegrees = [2, 1]\n").is_err());
        assert!(Scenario::from_toml("name = \"kdv\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn kdv_report_is_green_and_stable() {
        let mut s = Scenario::new("kdv");
        s.caps.torder = 2;
        s.seed = 5;
        let a = run_scenario(&s).unwrap();
        assert!(a.passed(), "{a}");
        assert!(a.lines().iter().any(|l| l.starts_with("value rhs.u0 ")));
        assert_eq!(a, run_scenario(&s).unwrap());
    }

    #[test]
    fn fano_and_ruled_suites() {
        for name in ["fano", "ruled", "recipes"] {
            let rep = run_scenario(&Scenario::new(name)).unwrap();
            assert!(rep.passed(), "{rep}");
        }
        let rep = run_scenario(&Scenario::new("fano")).unwrap();
        assert!(rep.lines().contains(&"value recipe.fano-previous D5 = +L(1,4,-1) +L(4,5,-1)".to_string()), "{rep}");
    }

    #[test]
    fn property_suite_seed_one() {
        let mut s = Scenario::new("property-suite");
        s.seed = 1;
        s.cases = Some(5);
        assert!(run_scenario(&s).unwrap().passed());
    }

    #[test]
    fn normalize_adjoins_leading_block() {
        let mut s = Scenario::new("normalize");
        for degrees in [vec![0, 0, 1], vec![0, 1, 1], vec![1, 2, 4, 5]] {
            s.degrees = degrees;
            let rep = run_scenario(&s).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn suite_errors_are_recorded() {
        let mut s = Scenario::new("normalize");
        s.degrees = vec![];
        let rep = run_scenario(&s).unwrap();
        assert!(!rep.passed());
        assert!(rep.lines().iter().any(|l| l.starts_with("error normalize")));
    }

    #[test]
    fn pairs_and_elimination_suites() {
        let mut s = Scenario::new("pairs");
        s.cases = Some(1);
        s.caps.torder = 2;
        assert!(run_scenario(&s).unwrap().passed());
        s.name = "elimination".into();
        s.dims = Dims { n: 2, d: 3 };
        assert!(run_scenario(&s).unwrap().passed());
    }
}
