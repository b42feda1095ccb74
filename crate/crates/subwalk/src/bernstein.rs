//! Complete Bernstein functions `phi` driving the subordination machinery.
//!
//! A spec selects one member of a small catalog (fractional power, mixture of
//! two fractional powers, power with a logarithmic factor, log-cosh power, or
//! a user-supplied monotone table) and is always *normalized* so that
//! `phi(1) = 1`.  The normalized function is written `phi~` in doc comments.
//! On top of evaluation the module provides:
//!
//! * the jump (Lévy) density `mu(t)` for the kinds that admit a closed form,
//! * the inverse `phi~^{-1}` on `(0, 1]`,
//! * a two-sided power-law scaling profile
//!   `c_* (R/r)^{a_*} <= phi~(R)/phi~(r) <= c^* (R/r)^{a^*}` fitted on a
//!   dyadic grid in `(0, 1]`, together with the window constants derived
//!   from it,
//! * structural checks (finite-difference sign pattern, subadditivity,
//!   extended scaling up to a horizon `L >= 1`).

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Catalog of supported complete Bernstein functions (pre-normalization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhiKind {
    /// `lambda^alpha`, `alpha` in (0,1).
    Stable { alpha: f64 },
    /// `(lambda^alpha + lambda^beta) / 2` after normalization; both exponents in (0,1).
    StableMixture { alpha: f64, beta: f64 },
    /// `lambda^alpha * log(1+lambda)^beta`, `alpha` in (0,1), `beta` in (0, 1-alpha).
    StableLog { alpha: f64, beta: f64 },
    /// `(log cosh sqrt(lambda))^alpha`, `alpha` in (0,1).
    LogCosh { alpha: f64 },
    /// Monotone table of `(lambda, phi(lambda))` samples, interpolated
    /// piecewise-linearly in log-log coordinates and extrapolated with the
    /// boundary slopes.  No jump density is available for this kind.
    UserTable { points: Vec<(f64, f64)> },
}

impl PhiKind {
    /// Short stable name used in reports and CSV metadata.
    pub fn label(&self) -> String {
        match self {
            PhiKind::Stable { alpha } => format!("stable:{alpha}"),
            PhiKind::StableMixture { alpha, beta } => format!("mix:{alpha},{beta}"),
            PhiKind::StableLog { alpha, beta } => format!("stable-log:{alpha},{beta}"),
            PhiKind::LogCosh { alpha } => format!("log-cosh:{alpha}"),
            PhiKind::UserTable { points } => format!("table[{}]", points.len()),
        }
    }
}

/// A validated, normalized complete Bernstein function.
///
/// Invariants established at construction: all parameters in range, drift
/// identically zero, `norm = phi_raw(1) > 0` finite, and for tables the
/// abscissae strictly increasing and values positive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiSpec {
    kind: PhiKind,
    /// Drift coefficient of the subordinator; this crate only supports
    /// driftless subordination, so the field is always `0.0`.
    drift: f64,
    /// Raw value `phi_raw(1)` used to normalize to `phi~(1) = 1`.
    norm: f64,
    /// For tables: cached log-log nodes; empty for closed-form kinds.
    #[serde(skip)]
    log_table: Vec<(f64, f64)>,
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && v < 1.0) {
        return Err(Error::Config(format!("{name} out of (0,1): got {v}")));
    }
    Ok(())
}

impl PhiSpec {
    /// Build a spec with zero drift.
    pub fn new(kind: PhiKind) -> Result<Self> {
        Self::with_drift(kind, 0.0)
    }

    /// Build a spec with an explicit drift coefficient.  Only `drift = 0`
    /// is accepted: a positive drift would add a lazy identity component to
    /// the step distribution, which the kernels here do not model.
    pub fn with_drift(kind: PhiKind, drift: f64) -> Result<Self> {
        if drift != 0.0 {
            return Err(Error::Config(format!(
                "drift must be 0 (driftless subordination); got {drift}"
            )));
        }
        match &kind {
            PhiKind::Stable { alpha } => check_unit_interval("alpha", *alpha)?,
            PhiKind::StableMixture { alpha, beta } => {
                check_unit_interval("alpha", *alpha)?;
                check_unit_interval("beta", *beta)?;
            }
            PhiKind::StableLog { alpha, beta } => {
                check_unit_interval("alpha", *alpha)?;
                if !(beta.is_finite() && *beta > 0.0 && *beta < 1.0 - *alpha) {
                    return Err(Error::Config(format!(
                        "beta out of (0, 1-alpha) = (0, {}): got {beta}",
                        1.0 - *alpha
                    )));
                }
            }
            PhiKind::LogCosh { alpha } => check_unit_interval("alpha", *alpha)?,
            PhiKind::UserTable { points } => {
                if points.len() < 2 {
                    return Err(Error::Config(
                        "user table needs at least 2 sample points".into(),
                    ));
                }
                for w in points.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return Err(Error::Config(format!(
                            "user table abscissae must be strictly increasing: {} !< {}",
                            w[0].0, w[1].0
                        )));
                    }
                }
                for &(l, v) in points {
                    if !(l > 0.0 && l.is_finite() && v > 0.0 && v.is_finite()) {
                        return Err(Error::Config(format!(
                            "user table entries must be finite and positive: ({l}, {v})"
                        )));
                    }
                }
            }
        }
        let log_table = match &kind {
            PhiKind::UserTable { points } => {
                points.iter().map(|&(l, v)| (l.ln(), v.ln())).collect()
            }
            _ => Vec::new(),
        };
        let mut spec = PhiSpec {
            kind,
            drift,
            norm: 1.0,
            log_table,
        };
        let raw1 = spec.eval_raw(1.0);
        if !(raw1.is_finite() && raw1 > 0.0) {
            return Err(Error::Config(format!(
                "phi(1) must be positive and finite for normalization; got {raw1}"
            )));
        }
        spec.norm = raw1;
        Ok(spec)
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Raw (un-normalized) catalog value at `lambda >= 0`.
    fn eval_raw(&self, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        match &self.kind {
            PhiKind::Stable { alpha } => lambda.powf(*alpha),
            PhiKind::StableMixture { alpha, beta } => lambda.powf(*alpha) + lambda.powf(*beta),
            PhiKind::StableLog { alpha, beta } => {
                lambda.powf(*alpha) * lambda.ln_1p().powf(*beta)
            }
            PhiKind::LogCosh { alpha } => {
                // log cosh w without cancellation: log1p(2 sinh^2(w/2)) for
                // moderate w, switching to w - log 2 + log1p(e^{-2w}) before
                // sinh(w/2)^2 can overflow.
                let w = lambda.sqrt();
                let lc = if w <= 20.0 {
                    (2.0 * (0.5 * w).sinh().powi(2)).ln_1p()
                } else {
                    w - std::f64::consts::LN_2 + (-2.0 * w).exp().ln_1p()
                };
                lc.powf(*alpha)
            }
            PhiKind::UserTable { .. } => {
                let t = &self.log_table;
                let x = lambda.ln();
                let n = t.len();
                // Locate segment; extrapolate with boundary slopes.
                let (i0, i1) = if x <= t[0].0 {
                    (0, 1)
                } else if x >= t[n - 1].0 {
                    (n - 2, n - 1)
                } else {
                    let mut i = t.partition_point(|&(lx, _)| lx <= x);
                    i = i.clamp(1, n - 1);
                    (i - 1, i)
                };
                let (x0, y0) = t[i0];
                let (x1, y1) = t[i1];
                let s = (y1 - y0) / (x1 - x0);
                (y0 + s * (x - x0)).exp()
            }
        }
    }

    /// Normalized value `phi~(lambda) = phi_raw(lambda) / phi_raw(1)`.
    ///
    /// Domain: `lambda >= 0`, finite.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Domain(format!(
                "phi evaluation needs finite lambda >= 0; got {lambda}"
            )));
        }
        Ok(self.eval_raw(lambda) / self.norm)
    }

    /// Normalized value extended to complex arguments with positive real
    /// part, used to extract step-weight Taylor coefficients on a circle.
    /// Tables cannot be continued off the real axis.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if z.re <= 0.0 {
            return Err(Error::Domain(format!(
                "complex phi evaluation needs Re(z) > 0; got {z}"
            )));
        }
        let v = match &self.kind {
            PhiKind::Stable { alpha } => z.powf(*alpha),
            PhiKind::StableMixture { alpha, beta } => z.powf(*alpha) + z.powf(*beta),
            PhiKind::StableLog { alpha, beta } => {
                z.powf(*alpha) * (Complex64::new(1.0, 0.0) + z).ln().powf(*beta)
            }
            PhiKind::LogCosh { alpha } => z.sqrt().cosh().ln().powf(*alpha),
            PhiKind::UserTable { .. } => {
                return Err(Error::Capability(
                    "user tables have no analytic continuation; \
                     use the quadrature route or a catalog kind"
                        .into(),
                ))
            }
        };
        Ok(v / self.norm)
    }

    /// Normalized jump density `mu~(t)` of the subordinator at `t > 0`,
    /// available in closed form for the pure and mixed fractional powers:
    /// `lambda^a` has density `a / Gamma(1-a) * t^{-1-a}`.
    pub fn levy_density(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!(
                "jump density needs finite t > 0; got {t}"
            )));
        }
        let stable_density = |a: f64, t: f64| -> f64 {
            a / ln_gamma(1.0 - a).exp() * t.powf(-1.0 - a)
        };
        match &self.kind {
            PhiKind::Stable { alpha } => Ok(stable_density(*alpha, t) / self.norm),
            PhiKind::StableMixture { alpha, beta } => {
                Ok((stable_density(*alpha, t) + stable_density(*beta, t)) / self.norm)
            }
            _ => Err(Error::Capability(format!(
                "no closed-form jump density for {}; \
                 only stable and mix kinds support it",
                self.kind.label()
            ))),
        }
    }

    /// True when [`levy_density`](Self::levy_density) is available.
    pub fn has_levy_density(&self) -> bool {
        matches!(
            self.kind,
            PhiKind::Stable { .. } | PhiKind::StableMixture { .. }
        )
    }

    /// Inverse of the normalized function on `(0, 1]`: returns `lambda`
    /// with `phi~(lambda) = y` to relative accuracy `1e-12`.
    ///
    /// Bisection runs on `log(lambda)` after an initial halving search for a
    /// bracket, so targets like `y = 2^{-20}` with small exponents (where
    /// `lambda` is far below machine-representable *linear* bisection
    /// resolution) still resolve.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if !(y.is_finite() && y > 0.0 && y <= 1.0) {
            return Err(Error::Domain(format!(
                "phi inverse defined on (0, 1]; got {y}"
            )));
        }
        if let PhiKind::UserTable { .. } = self.kind {
            // Bisection needs monotone data.
            let mut prev = f64::NEG_INFINITY;
            for &(_, lv) in &self.log_table {
                if lv <= prev {
                    return Err(Error::Domain(
                        "user table is not strictly increasing; inverse undefined".into(),
                    ));
                }
                prev = lv;
            }
        }
        if y == 1.0 {
            return Ok(1.0);
        }
        // Bracket [lo, hi] with phi~(lo) < y <= phi~(hi), hi = 1.
        let mut lo = 1.0f64;
        let mut steps = 0;
        while self.eval(lo)? >= y {
            lo *= 0.5;
            steps += 1;
            if steps > 4200 {
                return Err(Error::Numeric(format!(
                    "no bracket for phi inverse at y = {y}; phi may not vanish at 0"
                )));
            }
        }
        let mut llo = lo.ln();
        let mut lhi = (lo * 2.0).ln();
        for _ in 0..200 {
            let lmid = 0.5 * (llo + lhi);
            if self.eval(lmid.exp())? < y {
                llo = lmid;
            } else {
                lhi = lmid;
            }
            if lhi - llo < 1e-15 {
                break;
            }
        }
        let lambda = (0.5 * (llo + lhi)).exp();
        let achieved = self.eval(lambda)?;
        if (achieved - y).abs() > 1e-12 * y {
            return Err(Error::Numeric(format!(
                "phi inverse did not converge at y = {y}: residual {:e}",
                (achieved - y).abs() / y
            )));
        }
        Ok(lambda)
    }
}

/// Two-sided power-law scaling profile of `phi~` fitted on the dyadic grid
/// `{2^0, 2^-1, ..., 2^{-(levels-1)}}` in `(0, 1]`:
///
/// `c_* (R/r)^{a_*} <= phi~(R)/phi~(r) <= c^* (R/r)^{a^*}` for all grid pairs
/// `r <= R`, with `a_*`/`a^*` the extremal pairwise log-log slopes and
/// `c_*`/`c^*` the extremal prefactors at those exponents (so the bound is
/// tight on the grid by construction).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingProfile {
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    /// Number of dyadic levels the profile was fitted on.
    pub levels: u32,
}

impl ScalingProfile {
    /// Space-scale divisor `B = 3 v (2/c_*)^{1/(2 a_*)}` used by the
    /// parabolic oscillation windows: balls shrink by `1/B` per step.
    pub fn window_big_b(&self) -> f64 {
        (2.0 / self.c_lower).powf(1.0 / (2.0 * self.alpha_lower)).max(3.0)
    }

    /// Integer window count `b = 3 v (floor((3/c_*)^{1/a_*}) + 1)`.
    pub fn window_little_b(&self) -> u64 {
        let v = (3.0 / self.c_lower).powf(1.0 / self.alpha_lower).floor() as u64 + 1;
        v.max(3)
    }
}

impl PhiSpec {
    /// Fit the [`ScalingProfile`] on `levels >= 4` dyadic points.
    ///
    /// Fails with a validation error naming the offending grid pair when the
    /// fitted exponents escape `(0, 1)` (such a `phi` is outside the regime
    /// the kernel estimates assume).
    pub fn scaling_profile(&self, levels: u32) -> Result<ScalingProfile> {
        if levels < 4 {
            return Err(Error::Domain(format!(
                "scaling profile needs at least 4 dyadic levels; got {levels}"
            )));
        }
        let grid: Vec<f64> = (0..levels).map(|k| 0.5f64.powi(k as i32)).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&l| self.eval(l))
            .collect::<Result<_>>()?;
        let mut a_lo = f64::INFINITY;
        let mut a_hi = f64::NEG_INFINITY;
        let mut pair_lo = (0usize, 0usize);
        let mut pair_hi = (0usize, 0usize);
        // grid[i] > grid[j] for i < j: R = grid[i], r = grid[j].
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let slope =
                    (vals[i] / vals[j]).ln() / (grid[i] / grid[j]).ln();
                if slope < a_lo {
                    a_lo = slope;
                    pair_lo = (i, j);
                }
                if slope > a_hi {
                    a_hi = slope;
                    pair_hi = (i, j);
                }
            }
        }
        if !(a_lo > 0.0) {
            return Err(Error::Validation(format!(
                "fitted lower scaling exponent {a_lo:.6} <= 0 on pair (R, r) = ({}, {})",
                grid[pair_lo.0], grid[pair_lo.1]
            )));
        }
        if !(a_hi < 1.0) {
            return Err(Error::Validation(format!(
                "fitted upper scaling exponent {a_hi:.6} >= 1 on pair (R, r) = ({}, {})",
                grid[pair_hi.0], grid[pair_hi.1]
            )));
        }
        let mut c_lo = f64::INFINITY;
        let mut c_hi = f64::NEG_INFINITY;
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let ratio = vals[i] / vals[j];
                let scale = grid[i] / grid[j];
                c_lo = c_lo.min(ratio / scale.powf(a_lo));
                c_hi = c_hi.max(ratio / scale.powf(a_hi));
            }
        }
        Ok(ScalingProfile {
            alpha_lower: a_lo,
            alpha_upper: a_hi,
            c_lower: c_lo,
            c_upper: c_hi,
            levels,
        })
    }
}

/// Outcome of the structural checks on a spec.  All margins are normalized
/// (relative) quantities; negative margins quantify the worst violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    /// Sign pattern of finite differences of order 1..=4 (increasing,
    /// concave, alternating beyond) holds within tolerance.
    pub difference_signs_ok: bool,
    /// `phi~(k t) <= k phi~(t)` for integer `k >= 1` on the test grid.
    pub subadditive_ok: bool,
    /// Extended two-sided scaling up to horizons `L in {2, 4, 8}` holds:
    /// `c_* L^{-a_*} (R/r)^{a_*} <= phi~(R)/phi~(r) <= c^* phi~(L) (R/r)^{a^*}`
    /// for `0 < r <= 1`, `r <= R <= L` on the test grid.
    pub extended_scaling_ok: bool,
    /// Most negative normalized margin over all difference-sign checks.
    pub worst_difference_margin: f64,
    /// Most negative normalized margin over all subadditivity checks.
    pub worst_subadditivity_margin: f64,
    /// Most negative normalized margin over all extended-scaling checks.
    pub worst_extended_scaling_margin: f64,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.difference_signs_ok && self.subadditive_ok && self.extended_scaling_ok
    }
}

impl PhiSpec {
    /// Run the structural checks at relative tolerance `tol`.
    ///
    /// The checks are necessary conditions for a complete Bernstein function
    /// with both scaling exponents in `(0, 1)`; they catch malformed user
    /// tables and parameter typos rather than prove membership.
    pub fn verify_axioms(&self, tol: f64) -> Result<AxiomReport> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain(format!("tolerance must be positive; got {tol}")));
        }
        // --- finite-difference sign pattern, orders 1..=4 ---
        // Base points on a log grid;_steps small relative to the base point.
        let mut worst_diff = f64::INFINITY;
        for k in -20..=4i32 {
            let t = 2f64.powi(k);
            let h = t / 32.0;
            let f: Vec<f64> = (0..5)
                .map(|i| self.eval(t + i as f64 * h))
                .collect::<Result<_>>()?;
            let scale = f[4].abs().max(f64::MIN_POSITIVE);
            // (-1)^{m-1} * Delta^m f >= 0 for m = 1..4.
            let d1 = f[1] - f[0];
            let d2 = f[2] - 2.0 * f[1] + f[0];
            let d3 = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
            let d4 = f[4] - 4.0 * f[3] + 6.0 * f[2] - 4.0 * f[1] + f[0];
            for v in [d1, -d2, d3, -d4] {
                worst_diff = worst_diff.min(v / scale);
            }
        }
        let difference_signs_ok = worst_diff >= -tol;

        // --- subadditivity phi~(k t) <= k phi~(t) ---
        let mut worst_sub = f64::INFINITY;
        for k in [2.0, 3.0, 4.0, 8.0, 16.0, 64.0] {
            for e in -20..=2i32 {
                let t = 2f64.powi(e);
                let lhs = self.eval(k * t)?;
                let rhs = k * self.eval(t)?;
                worst_sub = worst_sub.min((rhs - lhs) / rhs.abs().max(f64::MIN_POSITIVE));
            }
        }
        let subadditive_ok = worst_sub >= -tol;

        // --- extended scaling up to L (skipped when no profile fits) ---
        let mut worst_ext = f64::NEG_INFINITY;
        let mut extended_scaling_ok = false;
        if let Ok(profile) = self.scaling_profile(16) {
            worst_ext = f64::INFINITY;
            for l in [2.0f64, 4.0, 8.0] {
                let phi_l = self.eval(l)?;
                for er in -12..=0i32 {
                    let r = 2f64.powi(er);
                    let phir = self.eval(r)?;
                    let mut big_r = r;
                    while big_r <= l {
                        let ratio = self.eval(big_r)? / phir;
                        let lower =
                            profile.c_lower / l.powf(profile.alpha_lower)
                                * (big_r / r).powf(profile.alpha_lower);
                        let upper =
                            profile.c_upper * phi_l * (big_r / r).powf(profile.alpha_upper);
                        worst_ext = worst_ext.min((ratio - lower) / lower);
                        worst_ext = worst_ext.min((upper - ratio) / upper);
                        big_r *= 2.0;
                    }
                }
            }
            extended_scaling_ok = worst_ext >= -tol;
        }

        Ok(AxiomReport {
            difference_signs_ok,
            subadditive_ok,
            extended_scaling_ok,
            worst_difference_margin: worst_diff,
            worst_subadditivity_margin: worst_sub,
            worst_extended_scaling_margin: worst_ext,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent log-Gamma oracle (classic 6-coefficient Lanczos fit),
    /// kept local to the tests so density values are checked against an
    /// implementation that shares no code with the library path.
    fn lanczos_ln_gamma(x: f64) -> f64 {
        assert!(x > 0.0);
        let coef = [
            76.180_091_729_471_46,
            -86.505_320_329_416_77,
            24.014_098_240_830_91,
            -1.231_739_572_450_155,
            0.120_865_097_386_617_5e-2,
            -0.539_523_938_495_3e-5,
        ];
        let mut y = x;
        let tmp = x + 5.5;
        let tmp = tmp - (x + 0.5) * tmp.ln();
        let mut ser = 1.000_000_000_190_015;
        for c in coef {
            y += 1.0;
            ser += c / y;
        }
        -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
    }

    fn stable(alpha: f64) -> PhiSpec {
        PhiSpec::new(PhiKind::Stable { alpha }).unwrap()
    }

    #[test]
    fn catalog_is_normalized_at_one() {
        let specs = [
            stable(0.5),
            PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 0.7 }).unwrap(),
            PhiSpec::new(PhiKind::StableLog { alpha: 0.5, beta: 0.2 }).unwrap(),
            PhiSpec::new(PhiKind::LogCosh { alpha: 0.5 }).unwrap(),
            PhiSpec::new(PhiKind::UserTable {
                points: vec![(0.0625, 0.25), (0.25, 0.5), (1.0, 1.0), (4.0, 2.0)],
            })
            .unwrap(),
        ];
        for s in &specs {
            assert!(
                (s.eval(1.0).unwrap() - 1.0).abs() <= 1e-14,
                "{} not normalized",
                s.kind().label()
            );
            assert_eq!(s.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn stable_half_closed_form_values() {
        let s = stable(0.5);
        assert!((s.eval(0.25).unwrap() - 0.5).abs() <= 1e-15);
        assert!((s.eval(4.0).unwrap() - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn parameter_validation_rejects_out_of_range() {
        let err = PhiSpec::new(PhiKind::Stable { alpha: 1.5 }).unwrap_err();
        assert!(err.to_string().contains("alpha out of (0,1)"), "{err}");
        assert!(PhiSpec::new(PhiKind::Stable { alpha: 0.0 }).is_err());
        assert!(PhiSpec::new(PhiKind::Stable { alpha: 1.0 }).is_err());
        assert!(
            PhiSpec::new(PhiKind::StableLog { alpha: 0.5, beta: 0.6 }).is_err(),
            "beta must stay below 1 - alpha"
        );
        assert!(PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 1.2 }).is_err());
    }

    #[test]
    fn drift_must_vanish() {
        let err =
            PhiSpec::with_drift(PhiKind::Stable { alpha: 0.5 }, 0.1).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("drift"));
    }

    #[test]
    fn levy_density_matches_independent_gamma_oracle() {
        // stable(alpha) density at t: alpha / Gamma(1-alpha) * t^{-1-alpha}.
        for &alpha in &[0.3, 0.5, 0.7] {
            let s = stable(alpha);
            for &t in &[0.25f64, 1.0, 7.5] {
                let oracle =
                    alpha / lanczos_ln_gamma(1.0 - alpha).exp() * t.powf(-1.0 - alpha);
                let got = s.levy_density(t).unwrap();
                assert!(
                    (got - oracle).abs() <= 1e-12 * oracle,
                    "alpha={alpha} t={t}: {got} vs {oracle}"
                );
            }
        }
        // Frozen literal: 0.5 / Gamma(0.5) = 1/(2 sqrt(pi)) at t = 1.
        let got = stable(0.5).levy_density(1.0).unwrap();
        assert!((got - 0.282_094_791_773_878_14).abs() <= 1e-15);
    }

    #[test]
    fn mixture_density_is_normalized_half_sum() {
        let mix =
            PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 0.7 }).unwrap();
        for &t in &[0.5f64, 1.0, 3.0] {
            let oracle = 0.5
                * (0.3 / lanczos_ln_gamma(0.7).exp() * t.powf(-1.3)
                    + 0.7 / lanczos_ln_gamma(0.3).exp() * t.powf(-1.7));
            let got = mix.levy_density(t).unwrap();
            assert!((got - oracle).abs() <= 1e-12 * oracle);
        }
    }

    #[test]
    fn levy_density_capability_errors() {
        let lc = PhiSpec::new(PhiKind::LogCosh { alpha: 0.5 }).unwrap();
        let sl = PhiSpec::new(PhiKind::StableLog { alpha: 0.5, beta: 0.2 }).unwrap();
        for s in [lc, sl] {
            let err = s.levy_density(1.0).unwrap_err();
            assert_eq!(err.exit_code(), 3, "{err}");
        }
    }

    #[test]
    fn inverse_round_trips_on_dyadic_targets() {
        let specs = [
            stable(0.3),
            stable(0.7),
            PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 0.7 }).unwrap(),
            PhiSpec::new(PhiKind::StableLog { alpha: 0.4, beta: 0.3 }).unwrap(),
            PhiSpec::new(PhiKind::LogCosh { alpha: 0.6 }).unwrap(),
        ];
        for s in &specs {
            for k in 0..=20 {
                let y = 0.5f64.powi(k);
                let lambda = s.invert(y).unwrap();
                let back = s.eval(lambda).unwrap();
                assert!(
                    (back - y).abs() <= 1e-12 * y,
                    "{}: y=2^-{k} -> lambda={lambda:e} -> {back:e}",
                    s.kind().label()
                );
            }
        }
    }

    #[test]
    fn inverse_rejects_out_of_range_targets() {
        let s = stable(0.5);
        assert!(s.invert(0.0).is_err());
        assert!(s.invert(1.5).is_err());
        assert_eq!(s.invert(-0.1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn pure_power_profile_is_exact() {
        let p = stable(0.5).scaling_profile(10).unwrap();
        assert!((p.alpha_lower - 0.5).abs() <= 1e-9);
        assert!((p.alpha_upper - 0.5).abs() <= 1e-9);
        assert!((p.c_lower - 1.0).abs() <= 1e-9);
        assert!((p.c_upper - 1.0).abs() <= 1e-9);
        // Window constants for the exact square root: B = max(3, 2) = 3,
        // b = max(3, floor(9) + 1) = 10.
        assert_eq!(p.window_big_b(), 3.0);
        assert_eq!(p.window_little_b(), 10);
    }

    /// Independent slope oracle: extremal pairwise log-log slopes of
    /// `ln phi` computed directly from function values on the same grid.
    fn slope_range_oracle(s: &PhiSpec, levels: u32) -> (f64, f64) {
        let grid: Vec<f64> = (0..levels).map(|k| 0.5f64.powi(k as i32)).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let s_ij = (s.eval(grid[i]).unwrap() / s.eval(grid[j]).unwrap()).ln()
                    / (grid[i] / grid[j]).ln();
                lo = lo.min(s_ij);
                hi = hi.max(s_ij);
            }
        }
        (lo, hi)
    }

    #[test]
    fn mixture_profile_matches_slope_oracle() {
        // For (l^a + l^b)/2 with a < b the small-lambda behaviour is l^a, so
        // on (0, 1] the pairwise slopes live in (a, (a+b)/2]: the lower
        // exponent approaches a as the grid deepens and the upper exponent
        // is capped by the local slope at lambda = 1, namely (a+b)/2.
        let mix =
            PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 0.7 }).unwrap();
        let p = mix.scaling_profile(16).unwrap();
        let (lo, hi) = slope_range_oracle(&mix, 16);
        assert!((p.alpha_lower - lo).abs() <= 1e-12);
        assert!((p.alpha_upper - hi).abs() <= 1e-12);
        assert!(p.alpha_lower <= 0.32, "alpha_* = {}", p.alpha_lower);
        assert!(p.alpha_lower > 0.29, "alpha_* = {}", p.alpha_lower);
        assert!(
            p.alpha_upper <= 0.5 && p.alpha_upper > 0.45,
            "alpha^* = {} should approach (a+b)/2 = 0.5 from below",
            p.alpha_upper
        );
        // The fitted envelope really is two-sided on the grid.
        let grid: Vec<f64> = (0..16).map(|k| 0.5f64.powi(k)).collect();
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let ratio = mix.eval(grid[i]).unwrap() / mix.eval(grid[j]).unwrap();
                let x = grid[i] / grid[j];
                assert!(p.c_lower * x.powf(p.alpha_lower) <= ratio * (1.0 + 1e-12));
                assert!(ratio <= p.c_upper * x.powf(p.alpha_upper) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn linear_table_profile_is_rejected() {
        // phi(lambda) = lambda has slope exactly 1: outside (0, 1).
        let ident = PhiSpec::new(PhiKind::UserTable {
            points: (0..12)
                .map(|k| {
                    let l = 0.5f64.powi(11 - k);
                    (l, l)
                })
                .collect(),
        })
        .unwrap();
        let err = ident.scaling_profile(8).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("upper scaling exponent"), "{err}");
    }

    #[test]
    fn axioms_pass_for_catalog() {
        for s in [
            stable(0.5),
            PhiSpec::new(PhiKind::StableMixture { alpha: 0.3, beta: 0.7 }).unwrap(),
            PhiSpec::new(PhiKind::StableLog { alpha: 0.5, beta: 0.2 }).unwrap(),
            PhiSpec::new(PhiKind::LogCosh { alpha: 0.5 }).unwrap(),
        ] {
            let rep = s.verify_axioms(1e-9).unwrap();
            assert!(rep.all_ok(), "{}: {rep:?}", s.kind().label());
        }
    }

    #[test]
    fn axioms_flag_decreasing_table() {
        let bad = PhiSpec::new(PhiKind::UserTable {
            points: vec![(0.25, 0.9), (0.5, 0.7), (1.0, 0.5), (2.0, 0.4)],
        })
        .unwrap();
        let rep = bad.verify_axioms(1e-9).unwrap();
        assert!(!rep.difference_signs_ok, "{rep:?}");
        assert!(rep.worst_difference_margin < 0.0);
    }

    #[test]
    fn table_of_square_root_samples_tracks_the_closed_form() {
        let pts: Vec<(f64, f64)> = (-24..=6)
            .map(|k| {
                let l = 2f64.powi(k);
                (l, l.sqrt())
            })
            .collect();
        let tab = PhiSpec::new(PhiKind::UserTable { points: pts }).unwrap();
        let exact = stable(0.5);
        for &l in &[0.001, 0.1, 0.37, 1.0, 9.0, 60.0] {
            let a = tab.eval(l).unwrap();
            let b = exact.eval(l).unwrap();
            // log-log linear interpolation is exact for pure powers,
            // including the extrapolated ranges.
            assert!((a - b).abs() <= 1e-12 * b, "lambda={l}: {a} vs {b}");
        }
        let p = tab.scaling_profile(8).unwrap();
        assert!((p.alpha_lower - 0.5).abs() <= 1e-9);
        assert!((p.alpha_upper - 0.5).abs() <= 1e-9);
    }
}
