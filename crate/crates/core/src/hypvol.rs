//! Lobachevsky function, regular ideal bipyramid volumes and the volume
//! bounds built from them.
//!
//! Everything here is `f64` arithmetic carrying an explicit absolute error
//! claim ([`Real::abs_err`]). The Lobachevsky function is evaluated as
//!
//! ```text
//! Λ(θ) = θ (1 − ln 2θ) − ∫₀^θ ln(sin t / t) dt,      0 < θ ≤ π/2,
//! ```
//!
//! i.e. the logarithmic endpoint singularity of `−ln(2 sin t)` is integrated
//! in closed form and only the analytic remainder is handed to Gauss–Legendre
//! quadrature. Other arguments are folded into `[0, π/2]` using oddness and
//! π-periodicity.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigUint;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute error claimed for one evaluation of [`lobachevsky`].
pub const LOBACHEVSKY_ABS_ERR: f64 = 1e-14;

/// A real value together with a claimed bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Real {
    pub value: f64,
    pub abs_err: f64,
}

impl Real {
    pub const ZERO: Real = Real {
        value: 0.0,
        abs_err: 0.0,
    };

    pub fn new(value: f64, abs_err: f64) -> Self {
        Real { value, abs_err }
    }

    /// A value whose only error is the rounding of `value` itself.
    pub fn rounded(value: f64) -> Self {
        Real {
            value,
            abs_err: value.abs() * f64::EPSILON,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Real {
            value: self.value * k,
            abs_err: self.abs_err * k.abs() + (self.value * k).abs() * f64::EPSILON,
        }
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        Real {
            value: v,
            abs_err: v * (self.abs_err.exp_m1() + f64::EPSILON),
        }
    }

    pub fn powi(self, k: i32) -> Self {
        let v = self.value.powi(k);
        let rel = if self.value != 0.0 {
            self.abs_err / self.value.abs()
        } else {
            0.0
        };
        Real {
            value: v,
            abs_err: v.abs() * (k.unsigned_abs() as f64 * (rel + f64::EPSILON)),
        }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, o: Real) -> Real {
        let v = self.value + o.value;
        Real {
            value: v,
            abs_err: self.abs_err + o.abs_err + v.abs() * f64::EPSILON,
        }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, o: Real) -> Real {
        let v = self.value - o.value;
        Real {
            value: v,
            abs_err: self.abs_err + o.abs_err + v.abs() * f64::EPSILON,
        }
    }
}

impl Mul<f64> for Real {
    type Output = Real;
    fn mul(self, k: f64) -> Real {
        self.scale(k)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*}", p, self.value),
            None => write!(f, "{}", self.value),
        }
    }
}

// 20-point Gauss-Legendre rule on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence.
const GL_ORDER: usize = 20;

static GAUSS_LEGENDRE: Lazy<Vec<(f64, f64)>> = Lazy::new(|| gauss_legendre(GL_ORDER));

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// `ln(sin t / t)`, analytic on `|t| < π`.
fn log_sinc(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (t.sin() / t).ln()
    }
}

/// Λ on the fundamental interval `0 < θ ≤ π/2`.
fn lobachevsky_reduced(theta: f64) -> f64 {
    let half = 0.5 * theta;
    let remainder: f64 = GAUSS_LEGENDRE
        .iter()
        .map(|&(x, w)| w * log_sinc(half * (x + 1.0)))
        .sum::<f64>()
        * half;
    theta * (1.0 - (2.0 * theta).ln()) - remainder
}

/// The Lobachevsky function `Λ(θ) = −∫₀^θ ln|2 sin t| dt`.
pub fn lobachevsky(theta: f64) -> Real {
    assert!(theta.is_finite(), "lobachevsky: argument must be finite");
    // Fold into (-π/2, π/2].
    let mut r = theta - PI * (theta / PI).round();
    if r <= -FRAC_PI_2 {
        r += PI;
    }
    let value = if r == 0.0 {
        0.0
    } else if r > 0.0 {
        lobachevsky_reduced(r)
    } else {
        -lobachevsky_reduced(-r)
    };
    Real::new(value, LOBACHEVSKY_ABS_ERR)
}

/// Volume of the regular ideal `n`-bipyramid.
pub fn bipyramid_volume(n: u32) -> Result<Real> {
    if n < 2 {
        return Err(Error::domain(
            "bipyramid_volume",
            format!("n must be at least 2, got {n}"),
        ));
    }
    if n == 2 {
        return Ok(Real::ZERO);
    }
    let nf = n as f64;
    let apex = lobachevsky(TAU / nf);
    let side = lobachevsky(PI * (nf - 2.0) / (2.0 * nf));
    Ok((apex + side * 2.0) * nf)
}

/// Bipyramid volumes are looked up often during sweeps; small `n` are cached.
static BIPYRAMID_TABLE: Lazy<Vec<Real>> = Lazy::new(|| {
    (0..512u32)
        .map(|n| bipyramid_volume(n.max(2)).expect("n >= 2"))
        .collect()
});

fn bipyramid_cached(n: u32) -> Result<Real> {
    match BIPYRAMID_TABLE.get(n as usize) {
        Some(v) if n >= 2 => Ok(*v),
        _ => bipyramid_volume(n),
    }
}

/// Physical constants of the subject, computed once.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    /// Volume of the regular ideal tetrahedron.
    pub v4: Real,
    /// Volume of the regular ideal octahedron.
    pub v8: Real,
    /// Unique positive root of `x⁻⁵ + 2x⁻⁴ + x⁻³ − 1`.
    pub gamma: Real,
    /// `exp(5 v4 / π)`.
    pub xi: Real,
    /// `exp(v8 / π)`.
    pub zeta: Real,
}

/// `x⁻⁵ + 2x⁻⁴ + x⁻³ − 1`; strictly decreasing for `x > 0`.
pub fn gamma_polynomial(x: f64) -> f64 {
    let y = 1.0 / x;
    y * y * y * (y * y + 2.0 * y + 1.0) - 1.0
}

fn solve_gamma() -> f64 {
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if gamma_polynomial(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

static CONSTANTS: Lazy<Constants> = Lazy::new(|| {
    let v4 = lobachevsky(PI / 3.0) * 3.0;
    let v8 = lobachevsky(PI / 4.0) * 8.0;
    let gamma = Real::new(solve_gamma(), 1e-15);
    let xi = (v4 * (5.0 / PI)).exp();
    let zeta = (v8 * (1.0 / PI)).exp();
    Constants {
        v4,
        v8,
        gamma,
        xi,
        zeta,
    }
});

pub fn constants() -> &'static Constants {
    &CONSTANTS
}

/// Multiset of face sizes of a link diagram: size `n` ↦ count `b_n`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceVector {
    counts: BTreeMap<u32, u64>,
}

impl FaceVector {
    /// Builds a face vector from `(size, count)` pairs. Zero counts are dropped;
    /// repeated sizes accumulate.
    pub fn new(pairs: impl IntoIterator<Item = (u32, u64)>) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (size, count) in pairs {
            if size == 0 {
                return Err(Error::domain("FaceVector", "face size 0"));
            }
            if count > 0 {
                *counts.entry(size).or_insert(0) += count;
            }
        }
        Ok(FaceVector { counts })
    }

    pub fn from_sizes(sizes: impl IntoIterator<Item = u32>) -> Result<Self> {
        Self::new(sizes.into_iter().map(|s| (s, 1)))
    }

    pub fn count(&self, size: u32) -> u64 {
        self.counts.get(&size).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&n, &b)| (n, b))
    }

    /// `m = Σ b_n`.
    pub fn total_faces(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `Σ n·b_n`; equals `4c` for a connected diagram with `c` crossings.
    pub fn weighted_sum(&self) -> u64 {
        self.iter().map(|(n, b)| n as u64 * b).sum()
    }

    pub fn max_size(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// The two largest face sizes, counting multiplicity.
    pub fn two_largest(&self) -> Option<(u32, u32)> {
        let mut it = self.counts.iter().rev();
        let (&r, &br) = it.next()?;
        if br >= 2 {
            return Some((r, r));
        }
        let (&s, _) = it.next()?;
        Some((r, s))
    }

    fn check_bipyramids(&self, op: &'static str) -> Result<()> {
        if self.total_faces() < 2 {
            return Err(Error::domain(op, "need at least two faces"));
        }
        if let Some((&n, _)) = self.counts.iter().next() {
            if n < 2 {
                return Err(Error::domain(
                    op,
                    format!("face of size {n}: diagram is not reduced"),
                ));
            }
        }
        Ok(())
    }

    fn check_removable(&self, op: &'static str, r: u32, s: u32) -> Result<()> {
        let ok = if r == s {
            self.count(r) >= 2
        } else {
            self.count(r) >= 1 && self.count(s) >= 1
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                op,
                format!("sizes {r} and {s} are not two distinct faces of {self}"),
            ))
        }
    }
}

impl fmt::Display for FaceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, b)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{b}")?;
        }
        write!(f, "}}")
    }
}

/// Sum of bipyramid volumes over all faces, less the faces of sizes `r` and `s`.
pub fn adams_bound_exact(faces: &FaceVector, r: u32, s: u32) -> Result<Real> {
    const OP: &str = "adams_bound_exact";
    faces.check_bipyramids(OP)?;
    faces.check_removable(OP, r, s)?;
    let mut total = Real::ZERO;
    for (n, b) in faces.iter() {
        total = total + bipyramid_cached(n)? * b as f64;
    }
    total = total - bipyramid_cached(r)? - bipyramid_cached(s)?;
    // Removing two faces never drives the sum below zero; clamp the rounding.
    total.value = total.value.max(0.0);
    Ok(total)
}

/// [`adams_bound_exact`] with the two largest faces removed, which gives the
/// smallest value since bipyramid volume increases with `n`.
pub fn adams_bound_exact_best(faces: &FaceVector) -> Result<(Real, u32, u32)> {
    let (r, s) = faces
        .two_largest()
        .ok_or_else(|| Error::domain("adams_bound_exact", "need at least two faces"))?;
    Ok((adams_bound_exact(faces, r, s)?, r, s))
}

/// `2π log(Π n^{b_n} / 2^m · 4/(rs))` for an explicit choice of `r`, `s`.
pub fn adams_bound_log_with(faces: &FaceVector, r: u32, s: u32) -> Result<Real> {
    const OP: &str = "adams_bound_log";
    faces.check_bipyramids(OP)?;
    faces.check_removable(OP, r, s)?;
    let log_sum: f64 = faces
        .iter()
        .map(|(n, b)| b as f64 * (n as f64 / 2.0).ln())
        .sum::<f64>()
        - (r as f64 / 2.0).ln()
        - (s as f64 / 2.0).ln();
    let terms = faces.counts.len() as f64 + 2.0;
    Ok(Real::new(TAU * log_sum, TAU * terms * 4.0 * f64::EPSILON * log_sum.abs().max(1.0)))
}

/// [`adams_bound_log_with`] using the two largest faces.
pub fn adams_bound_log(faces: &FaceVector) -> Result<Real> {
    let (r, s) = faces
        .two_largest()
        .ok_or_else(|| Error::domain("adams_bound_log", "need at least two faces"))?;
    adams_bound_log_with(faces, r, s)
}

/// `2π log(Π n^{b_n} / 2^m)` without the `4/(rs)` correction. Always at least
/// as large as [`adams_bound_log`].
pub fn adams_bound_log_uncorrected(faces: &FaceVector) -> Result<Real> {
    faces.check_bipyramids("adams_bound_log_uncorrected")?;
    let log_sum: f64 = faces
        .iter()
        .map(|(n, b)| b as f64 * (n as f64 / 2.0).ln())
        .sum();
    Ok(Real::rounded(TAU * log_sum))
}

fn require_twists(op: &'static str, t: u32) -> Result<()> {
    if t < 1 {
        Err(Error::domain(op, "twist number must be at least 1"))
    } else {
        Ok(())
    }
}

/// `10 v4 (t − 1)`, valid for alternating hyperbolic links.
pub fn lackenby_bound(t: u32) -> Result<Real> {
    require_twists("lackenby_bound", t)?;
    Ok(constants().v4 * (10.0 * (t - 1) as f64))
}

/// `2 v8 t`, valid for hyperbolic Montesinos links.
pub fn montesinos_bound(t: u32) -> Result<Real> {
    require_twists("montesinos_bound", t)?;
    Ok(constants().v8 * (2.0 * t as f64))
}

/// Lower bound `2 γ^{t−1}` on the determinant of a twist-reduced alternating
/// diagram with `t` twist regions.
pub fn stoimenow_lower_bound(t: u32) -> Result<Real> {
    require_twists("stoimenow_lower_bound", t)?;
    Ok(constants().gamma.powi(t as i32 - 1) * 2.0)
}

/// Natural log of an arbitrary-size positive integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        // Exact to f64 rounding for anything below ~1e301.
        let f: f64 = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY);
        return f.ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let f: f64 = num_traits::ToPrimitive::to_f64(&top).expect("64-bit value");
    f.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `2π ln x`.
pub fn two_pi_log(x: &BigUint) -> Real {
    let v = TAU * ln_biguint(x);
    Real::new(v, 4.0 * f64::EPSILON * v.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tanh-sinh quadrature of `−ln(2 sin t)` over `[0, θ]`. The double
    /// exponential transform absorbs the endpoint log singularity directly,
    /// so this shares nothing with the split-singularity route above.
    fn lobachevsky_oracle(theta: f64) -> f64 {
        let h = 1.0 / 128.0;
        let mut sum = 0.0;
        let mut k = -(6.0 / h) as i64;
        while (k as f64) * h <= 6.0 {
            let u = k as f64 * h;
            let z = FRAC_PI_2 * u.sinh();
            // 1 + tanh(z), computed without cancellation.
            let one_plus_x = 2.0 / (1.0 + (-2.0 * z).exp());
            let w = FRAC_PI_2 * u.cosh() / z.cosh().powi(2);
            let t = 0.5 * theta * one_plus_x;
            if t > 0.0 && t < theta && w > 0.0 && w.is_finite() {
                sum += w * -(2.0 * t.sin()).ln();
            }
            k += 1;
        }
        0.5 * theta * h * sum
    }

    #[test]
    fn lobachevsky_matches_tanh_sinh_oracle() {
        for i in 1..=64 {
            let theta = FRAC_PI_2 * i as f64 / 64.0;
            let got = lobachevsky(theta).value;
            let want = lobachevsky_oracle(theta);
            assert!(
                (got - want).abs() < 1e-13,
                "theta={theta}: {got} vs oracle {want}"
            );
        }
    }

    #[test]
    fn lobachevsky_trivial_points() {
        assert_eq!(lobachevsky(0.0).value, 0.0);
        assert!(lobachevsky(PI).value.abs() < 1e-14);
        assert!(lobachevsky(FRAC_PI_2).value.abs() < 1e-14);
    }

    #[test]
    fn octahedron_from_lobachevsky() {
        let l = lobachevsky(PI / 4.0).value;
        assert!((l - lobachevsky_oracle(PI / 4.0)).abs() < 1e-13);
        assert!((8.0 * l - 3.66386237).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let s: f64 = GAUSS_LEGENDRE.iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        // Exact for x^38.
        let m: f64 = GAUSS_LEGENDRE.iter().map(|&(x, w)| w * x.powi(38)).sum();
        assert!((m - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn bipyramid_values() {
        assert_eq!(bipyramid_volume(2).unwrap().value, 0.0);
        let c = constants();
        assert!((bipyramid_volume(3).unwrap().value - 2.0 * c.v4.value).abs() < 1e-13);
        assert!((bipyramid_volume(4).unwrap().value - c.v8.value).abs() < 1e-13);
        assert!(bipyramid_volume(1).is_err());
        assert!(bipyramid_volume(0).is_err());
    }

    #[test]
    fn weaving_growth_constant() {
        let b3 = bipyramid_volume(3).unwrap().value;
        let b4 = bipyramid_volume(4).unwrap().value;
        let got = ((2.0 * b3 + b4) / TAU).exp();
        let want = 3.418_677_233_748_62_f64;
        assert!(((got - want) / want).abs() < 1e-12, "{got}");
    }

    #[test]
    fn constants_against_quoted_values() {
        let c = constants();
        assert!((c.v4.value - 1.01494).abs() < 1e-5);
        assert!((c.v8.value - 3.66386237).abs() < 1e-8);
        assert!((c.gamma.value - 1.4253).abs() < 1e-4);
        assert!(gamma_polynomial(c.gamma.value).abs() < 1e-12);
        assert!((c.xi.value - 5.0296).abs() < 1e-4);
        assert!((c.zeta.value - 3.2099).abs() < 1e-4);
        for r in [c.v4, c.v8, c.gamma, c.xi, c.zeta] {
            assert!(r.abs_err <= 1e-12);
        }
    }

    #[test]
    fn adams_exact_examples() {
        let fig8 = FaceVector::new([(2, 2), (3, 4)]).unwrap();
        let v = adams_bound_exact(&fig8, 3, 3).unwrap().value;
        let b3 = bipyramid_volume(3).unwrap().value;
        assert!((v - 2.0 * b3).abs() < 1e-12);
        assert!((v - 4.059766).abs() < 1e-6);

        let pair = FaceVector::new([(5, 1), (7, 1)]).unwrap();
        assert_eq!(adams_bound_exact(&pair, 5, 7).unwrap().value, 0.0);

        let w1 = FaceVector::new([(3, 2), (4, 1)]).unwrap();
        let v = adams_bound_exact(&w1, 3, 4).unwrap().value;
        assert!((v - b3).abs() < 1e-12);
        assert!((v - 2.0299).abs() < 1e-4);
    }

    #[test]
    fn adams_exact_rejects_missing_faces() {
        let fig8 = FaceVector::new([(2, 2), (3, 4)]).unwrap();
        assert!(adams_bound_exact(&fig8, 5, 3).is_err());
        let one3 = FaceVector::new([(2, 2), (3, 1)]).unwrap();
        assert!(adams_bound_exact(&one3, 3, 3).is_err());
        assert!(adams_bound_exact(&one3, 2, 3).is_ok());
        let single = FaceVector::new([(4, 1)]).unwrap();
        assert!(adams_bound_exact(&single, 4, 4).is_err());
        let monogon = FaceVector::new([(1, 2), (2, 1)]).unwrap();
        assert!(adams_bound_exact(&monogon, 1, 1).is_err());
    }

    #[test]
    fn adams_log_examples() {
        let fig8 = FaceVector::new([(2, 2), (3, 4)]).unwrap();
        let v = adams_bound_log(&fig8).unwrap().value;
        assert!((v - TAU * (9.0_f64 / 4.0).ln()).abs() < 1e-12);

        for k in 0..6 {
            let fv = FaceVector::new([(2, k), (3, 2)]).unwrap();
            assert!(adams_bound_log(&fv).unwrap().value.abs() < 1e-12);
        }
        assert!(adams_bound_log(&FaceVector::new([(3, 1)]).unwrap()).is_err());
    }

    #[test]
    fn adams_log_uncorrected_weaving() {
        // 2n triangles and n squares: (9/2)^n before the 4/(rs) correction.
        for n in 1..10u64 {
            let fv = FaceVector::new([(3, 2 * n), (4, n)]).unwrap();
            let v = adams_bound_log_uncorrected(&fv).unwrap().value;
            assert!((v - TAU * n as f64 * 4.5_f64.ln()).abs() < 1e-10);
            assert!(adams_bound_log(&fv).unwrap().value < v);
        }
    }

    #[test]
    fn twist_bounds() {
        let c = constants();
        assert_eq!(lackenby_bound(1).unwrap().value, 0.0);
        assert!((lackenby_bound(2).unwrap().value - 10.1494).abs() < 1e-3);
        assert!((lackenby_bound(13).unwrap().value - 120.0 * c.v4.value).abs() < 1e-11);
        assert!((lackenby_bound(13).unwrap().value - 121.79).abs() < 1e-2);
        assert!(lackenby_bound(0).is_err());

        assert!((montesinos_bound(1).unwrap().value - 7.32772).abs() < 1e-5);
        assert!((montesinos_bound(3).unwrap().value - 21.983).abs() < 1e-3);
        assert!(montesinos_bound(0).is_err());

        assert_eq!(stoimenow_lower_bound(1).unwrap().value, 2.0);
        assert!((stoimenow_lower_bound(2).unwrap().value - 2.8506).abs() < 1e-3);
        let g5 = 2.0 * c.gamma.value.powi(5);
        assert!((stoimenow_lower_bound(6).unwrap().value - g5).abs() < 1e-12);
        assert!((g5 - 11.77).abs() < 0.02);
        assert!(stoimenow_lower_bound(0).is_err());
    }

    #[test]
    fn ln_of_huge_integers() {
        let x = BigUint::from(10u32).pow(400);
        assert!((ln_biguint(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
    }
}
