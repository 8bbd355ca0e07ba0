//! Comparing `2π log det` against volume upper bounds.
//!
//! A report `holds` when the smallest applicable upper bound is strictly below
//! `2π log det`. When no bound is small enough the verdict is
//! `bound_inconclusive`: the bounds fail to certify the instance, which says
//! nothing about the true volume.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{v_function, Family, FamilySpec};
use crate::hypvol::{
    adams_bound_exact_best, adams_bound_log, constants, lackenby_bound, montesinos_bound,
    two_pi_log, FaceVector, Real,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicStatus {
    KnownNonhyperbolic,
    AssumedHyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    BoundInconclusive,
    Vacuous,
}

impl HyperbolicStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            HyperbolicStatus::KnownNonhyperbolic => "known_nonhyperbolic",
            HyperbolicStatus::AssumedHyperbolic => "assumed_hyperbolic",
        }
    }
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::BoundInconclusive => "bound_inconclusive",
            Verdict::Vacuous => "vacuous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    AdamsExact,
    AdamsLog,
    Lackenby,
    Montesinos,
    FamilySpecific,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::AdamsExact => "adams_exact",
            BoundKind::AdamsLog => "adams_log",
            BoundKind::Lackenby => "lackenby",
            BoundKind::Montesinos => "montesinos",
            BoundKind::FamilySpecific => "family_specific",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest crossing number for which the closed-form determinant is
    /// compared against a matrix-tree count.
    pub oracle_cap: u64,
    /// Worker threads for sweeps; 0 means the rayon default.
    pub workers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            oracle_cap: 40,
            workers: 0,
        }
    }
}

impl VerifyConfig {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        if self.workers == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::domain("workers", e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub spec: FamilySpec,
    /// Twist regions detected in the diagram.
    pub t: u32,
    pub c: u64,
    pub det: BigUint,
    pub two_pi_log_det: Real,
    pub faces: FaceVector,
    pub bounds: Vec<(BoundKind, Real)>,
    pub best_bound: Real,
    pub best_kind: BoundKind,
    pub margin: Real,
    pub hyperbolic_status: HyperbolicStatus,
    pub verdict: Verdict,
    /// Whether the determinant was confirmed by a matrix-tree count.
    pub oracle_checked: bool,
}

impl BoundReport {
    pub fn bound(&self, kind: BoundKind) -> Option<Real> {
        self.bounds.iter().find(|(k, _)| *k == kind).map(|&(_, v)| v)
    }

    pub fn row(&self) -> ReportRow {
        let b = |k| self.bound(k).map(|r: Real| r.value);
        ReportRow {
            spec: self.spec.to_string(),
            family: self.spec.family().name(),
            t: self.t,
            c: self.c,
            det: self.det.to_string(),
            two_pi_log_det: self.two_pi_log_det.value,
            adams_exact: b(BoundKind::AdamsExact),
            adams_log: b(BoundKind::AdamsLog),
            lackenby: b(BoundKind::Lackenby),
            montesinos: b(BoundKind::Montesinos),
            best_bound: self.best_bound.value,
            margin: self.margin.value,
            hyperbolic_status: self.hyperbolic_status.as_str(),
            verdict: self.verdict.as_str(),
        }
    }
}

/// Flat form of a report, shared by CSV and JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub spec: String,
    pub family: &'static str,
    pub t: u32,
    pub c: u64,
    pub det: String,
    pub two_pi_log_det: f64,
    pub adams_exact: Option<f64>,
    pub adams_log: Option<f64>,
    pub lackenby: Option<f64>,
    pub montesinos: Option<f64>,
    pub best_bound: f64,
    pub margin: f64,
    pub hyperbolic_status: &'static str,
    pub verdict: &'static str,
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row().serialize(s)
    }
}

pub fn write_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r.row())
            .map_err(|e| Error::domain("write_csv", e.to_string()))?;
    }
    w.flush().map_err(|e| Error::domain("write_csv", e.to_string()))?;
    Ok(())
}

pub fn check(spec: &FamilySpec) -> Result<BoundReport> {
    check_with(spec, &VerifyConfig::default())
}

pub fn check_with(spec: &FamilySpec, cfg: &VerifyConfig) -> Result<BoundReport> {
    spec.validate()?;
    let det = spec.det()?;
    let diagram = spec.to_diagram()?;
    let c = diagram.crossing_count as u64;
    let oracle_checked = c <= cfg.oracle_cap;
    if oracle_checked {
        let tau = diagram.smaller_tait_graph().spanning_tree_count();
        if tau != det {
            return Err(Error::Inconsistent(format!(
                "{spec}: closed form gives {det}, matrix-tree gives {tau}"
            )));
        }
    }
    let t = diagram.twist_count as u32;

    let mut bounds = Vec::new();
    if let Ok((v, _, _)) = adams_bound_exact_best(&diagram.faces) {
        bounds.push((BoundKind::AdamsExact, v));
    }
    if let Ok(v) = adams_bound_log(&diagram.faces) {
        bounds.push((BoundKind::AdamsLog, v));
    }
    bounds.push((BoundKind::Lackenby, lackenby_bound(t)?));
    if let FamilySpec::Pretzel(_) = spec {
        bounds.push((BoundKind::Montesinos, montesinos_bound(t)?));
    }
    if let Some(v) = family_specific_bound(spec)? {
        bounds.push((BoundKind::FamilySpecific, v));
    }
    let (best_kind, best_bound) = bounds
        .iter()
        .copied()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("lackenby bound always applies");

    let two_pi_log_det = two_pi_log(&det);
    let margin = two_pi_log_det - best_bound;
    let hyperbolic_status = if spec.is_known_nonhyperbolic() {
        HyperbolicStatus::KnownNonhyperbolic
    } else {
        HyperbolicStatus::AssumedHyperbolic
    };
    let verdict = match hyperbolic_status {
        HyperbolicStatus::KnownNonhyperbolic => Verdict::Vacuous,
        _ if margin.value > 0.0 => Verdict::Holds,
        _ => Verdict::BoundInconclusive,
    };
    Ok(BoundReport {
        spec: spec.clone(),
        t,
        c,
        det,
        two_pi_log_det,
        faces: diagram.faces,
        bounds,
        best_bound,
        best_kind,
        margin,
        hyperbolic_status,
        verdict,
        oracle_checked,
    })
}

/// Upper bounds written directly in the family parameters.
fn family_specific_bound(spec: &FamilySpec) -> Result<Option<Real>> {
    match spec {
        FamilySpec::TwoBridge(a) if a.len() >= 2 => {
            Ok(Some(crate::families::twobridge_vol_upper(a)?))
        }
        FamilySpec::ThreeBraid(_) => {
            let v = v_function(&spec.params())?;
            let ln = ratio_ln(v.numer().magnitude(), v.denom().magnitude());
            let value = std::f64::consts::TAU * ln;
            Ok(Some(Real::new(value, 8.0 * f64::EPSILON * value.abs().max(1.0))))
        }
        _ => Ok(None),
    }
}

fn ratio_ln(num: &BigUint, den: &BigUint) -> f64 {
    crate::hypvol::ln_biguint(num) - crate::hypvol::ln_biguint(den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `10 v4 (t − 1)`, any alternating hyperbolic link.
    General,
    /// `2 v8 t`, hyperbolic Montesinos links.
    Montesinos,
}

impl ThresholdRule {
    pub fn volume_bound(self, t: u32) -> Result<Real> {
        match self {
            ThresholdRule::General => lackenby_bound(t),
            ThresholdRule::Montesinos => montesinos_bound(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub t: u32,
    pub c_threshold: Real,
    pub rule: ThresholdRule,
}

/// Crossing number beyond which every alternating link with `t` twist
/// regions satisfies the inequality:
/// `t + ξ^{t−1} − 2γ^{t−1}` (general) or `t + ζ^t − 2γ^{t−1}` (Montesinos).
pub fn high_twist_threshold(t: u32, rule: ThresholdRule) -> Result<ThresholdResult> {
    if t < 1 {
        return Err(Error::domain("high_twist_threshold", "t must be at least 1"));
    }
    let k = constants();
    let growth = match rule {
        ThresholdRule::General => k.xi.powi(t as i32 - 1),
        ThresholdRule::Montesinos => k.zeta.powi(t as i32),
    };
    let c_threshold = growth - k.gamma.powi(t as i32 - 1) * 2.0 + Real::new(t as f64, 0.0);
    Ok(ThresholdResult {
        t,
        c_threshold,
        rule,
    })
}

/// True when the rule's volume bound is below `2π log(2γ^{t−1} + c − t)`,
/// the logarithm of a determinant lower bound for twist-reduced diagrams.
pub fn stoimenow_certificate(t: u32, c: u64, rule: ThresholdRule) -> Result<bool> {
    if t < 1 {
        return Err(Error::domain("stoimenow_certificate", "t must be at least 1"));
    }
    if c < u64::from(t) {
        return Err(Error::domain("stoimenow_certificate", "need c >= t"));
    }
    let det_lower = 2.0 * constants().gamma.value.powi(t as i32 - 1) + (c - u64::from(t)) as f64;
    let rhs = std::f64::consts::TAU * det_lower.ln();
    Ok(rule.volume_bound(t)?.value < rhs)
}

fn pretzel_passes(a: &[u32], bound: f64) -> bool {
    let det = crate::families::pretzel_det(a).expect("positive entries");
    two_pi_log(&det).value > bound
}

/// The monotone split of sorted pretzel tuples of length `t` by the
/// Montesinos bound.
#[derive(Debug, Clone)]
pub struct PretzelTier {
    pub t: u32,
    /// Sorted tuples whose determinant does not beat the bound.
    pub downset: Vec<Vec<u32>>,
    /// Minimal sorted tuples that beat it; everything above them does too.
    pub frontier: Vec<Vec<u32>>,
}

pub fn pretzel_tier(t: u32) -> Result<PretzelTier> {
    if t < 1 {
        return Err(Error::domain("pretzel_tier", "t must be at least 1"));
    }
    let bound = montesinos_bound(t)?.value;
    let len = t as usize;
    let mut downset = Vec::new();
    let mut prefix = Vec::with_capacity(len);
    fn dfs(prefix: &mut Vec<u32>, lo: u32, len: usize, bound: f64, out: &mut Vec<Vec<u32>>) {
        let mut x = lo;
        loop {
            let mut completion = prefix.clone();
            completion.resize(len, x);
            if pretzel_passes(&completion, bound) {
                return;
            }
            prefix.push(x);
            if prefix.len() == len {
                out.push(prefix.clone());
            } else {
                dfs(prefix, x, len, bound, out);
            }
            prefix.pop();
            x += 1;
        }
    }
    dfs(&mut prefix, 1, len, bound, &mut downset);

    let fails: HashSet<&Vec<u32>> = downset.iter().collect();
    let mut candidates: HashSet<Vec<u32>> = HashSet::new();
    if downset.is_empty() {
        candidates.insert(vec![1; len]);
    }
    for d in &downset {
        for i in 0..len {
            if i + 1 < len && d[i] == d[i + 1] {
                continue;
            }
            let mut up = d.clone();
            up[i] += 1;
            up.sort_unstable();
            if !fails.contains(&up) {
                candidates.insert(up);
            }
        }
    }
    let mut frontier: Vec<Vec<u32>> = candidates
        .into_iter()
        .filter(|a| {
            (0..len).all(|i| {
                if a[i] == 1 {
                    return true;
                }
                let mut down = a.clone();
                down[i] -= 1;
                down.sort_unstable();
                fails.contains(&down)
            })
        })
        .collect();
    frontier.sort();
    Ok(PretzelTier {
        t,
        downset,
        frontier,
    })
}

/// Distinct cyclic arrangements of a multiset up to rotation and reflection,
/// each given by its lexicographically least representative.
pub fn dihedral_arrangements(multiset: &[u32]) -> Vec<Vec<u32>> {
    let mut perm = multiset.to_vec();
    perm.sort_unstable();
    let mut out = Vec::new();
    loop {
        if is_dihedral_minimal(&perm) {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn is_dihedral_minimal(a: &[u32]) -> bool {
    let n = a.len();
    let mut rev = a.to_vec();
    rev.reverse();
    (0..n).all(|s| {
        let rot = a.iter().cycle().skip(s).take(n);
        let rrot = rev.iter().cycle().skip(s).take(n);
        a.iter().le(rot) && a.iter().le(rrot)
    })
}

fn next_permutation(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct TierSummary {
    pub t: u32,
    /// Sorted tuples below the Montesinos frontier.
    pub downset_tuples: usize,
    /// Arrangements of those tuples passed through `check`.
    pub checked: usize,
    /// Minimal tuples certifying everything above them.
    pub frontier_tuples: usize,
    /// Crossing threshold from the Montesinos rule for this `t`.
    pub c_threshold: f64,
    /// Explicitly checked arrangements whose crossing number already reaches
    /// `c_threshold`; their twist-reduced form has fewer regions.
    pub beyond_threshold: usize,
    pub oracle_checked: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub t_max: u32,
    pub tiers: Vec<TierSummary>,
    pub checked: usize,
    pub certified: usize,
    pub violations: Vec<BoundReport>,
    pub vacuous: usize,
    pub wall_time_secs: f64,
}

/// Checks every pretzel with `3 ≤ t ≤ t_max` strands: tuples above the
/// Montesinos frontier are certified by monotonicity of the determinant, every
/// arrangement of a tuple below it goes through [`check_with`].
pub fn enumerate_pretzels(t_max: u32, cfg: &VerifyConfig) -> Result<EnumerationReport> {
    if t_max < 3 {
        return Err(Error::domain("enumerate_pretzels", "t_max must be at least 3"));
    }
    if t_max > 8 {
        log::warn!("enumerating pretzels with t up to {t_max}: this can take hours");
    }
    let start = Instant::now();
    let mut tiers = Vec::new();
    let mut violations = Vec::new();
    let mut vacuous = 0;
    for t in 3..=t_max {
        let tier = pretzel_tier(t)?;
        let arrangements: Vec<Vec<u32>> = tier
            .downset
            .iter()
            .flat_map(|d| dihedral_arrangements(d))
            .collect();
        let reports: Vec<BoundReport> = cfg.run(|| {
            arrangements
                .par_iter()
                .map(|a| check_with(&FamilySpec::Pretzel(a.clone()), cfg))
                .collect::<Result<Vec<_>>>()
        })??;
        let threshold = high_twist_threshold(t, ThresholdRule::Montesinos)?.c_threshold.value;
        let beyond_threshold = reports
            .iter()
            .filter(|r| r.c as f64 >= threshold.ceil())
            .count();
        let oracle_checked = reports.iter().filter(|r| r.oracle_checked).count();
        for r in reports {
            match r.verdict {
                Verdict::BoundInconclusive => violations.push(r),
                Verdict::Vacuous => vacuous += 1,
                Verdict::Holds => {}
            }
        }
        log::info!(
            "t={t}: {} tuples below the frontier, {} arrangements checked, {} frontier tuples",
            tier.downset.len(),
            arrangements.len(),
            tier.frontier.len()
        );
        tiers.push(TierSummary {
            t,
            downset_tuples: tier.downset.len(),
            checked: arrangements.len(),
            frontier_tuples: tier.frontier.len(),
            c_threshold: threshold,
            beyond_threshold,
            oracle_checked,
        });
    }
    Ok(EnumerationReport {
        t_max,
        checked: tiers.iter().map(|s| s.checked).sum(),
        certified: tiers.iter().map(|s| s.frontier_tuples).sum(),
        tiers,
        violations,
        vacuous,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Default)]
pub struct SweepPattern {
    pub families: Vec<Family>,
    /// Largest total crossing number generated.
    pub sum_max: u32,
    /// Generated specs with more crossings than this are skipped.
    pub max_crossings: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub reports: Vec<BoundReport>,
    pub skipped: Vec<(FamilySpec, String)>,
}

fn compositions(sum_max: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, left: u32, out: &mut Vec<Vec<u32>>) {
        for x in 1..=left {
            prefix.push(x);
            out.push(prefix.clone());
            go(prefix, left - x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), sum_max, &mut out);
    out
}

/// All specs of the pattern, in spec order.
pub fn sweep_specs(pattern: &SweepPattern) -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    for &family in &pattern.families {
        match family {
            Family::TwoBridge => specs.extend(compositions(pattern.sum_max).into_iter().map(FamilySpec::TwoBridge)),
            Family::Pretzel => specs.extend(compositions(pattern.sum_max).into_iter().map(FamilySpec::Pretzel)),
            Family::ThreeBraid => specs.extend(
                compositions(pattern.sum_max)
                    .into_iter()
                    .filter(|c| c.len() % 2 == 0)
                    .map(|c| FamilySpec::ThreeBraid(c.chunks(2).map(|p| (p[0], p[1])).collect())),
            ),
            Family::Weaving => specs.extend((1..=pattern.sum_max / 3).map(FamilySpec::Weaving)),
        }
    }
    specs.sort();
    specs.dedup();
    specs
}

pub fn sweep(pattern: &SweepPattern, cfg: &VerifyConfig) -> Result<SweepOutcome> {
    let mut outcome = SweepOutcome::default();
    let mut todo = Vec::new();
    for spec in sweep_specs(pattern) {
        match pattern.max_crossings {
            Some(cap) if spec.crossing_count() > cap => {
                let reason = format!("{} crossings exceed the cap of {cap}", spec.crossing_count());
                log::info!("skipping {spec}: {reason}");
                outcome.skipped.push((spec, reason));
            }
            _ => todo.push(spec),
        }
    }
    outcome.reports = cfg.run(|| {
        todo.par_iter()
            .map(|s| check_with(s, cfg))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(outcome)
}
