//! Step-count weights of the subordinate walk and their sampler.
//!
//! Subordinating a lattice walk by a driftless subordinator with Bernstein
//! function `phi~` replaces each unit step by a random number `m >= 1` of
//! base-walk steps, drawn with probability
//!
//! `a_m = (1/m!) * Integral t^m e^{-t} mu~(dt)`,
//!
//! where `mu~` is the jump density of `phi~`.  The weights satisfy
//! `sum_m a_m = phi~(1) = 1` and the generating identity
//! `sum_m a_m s^m = 1 - phi~(1 - s)`.
//!
//! Two independent numerical routes produce the weights:
//!
//! * [`weights_quadrature`] integrates the defining formula term by term
//!   (needs a closed-form jump density, so stable and mix kinds only);
//! * [`weights_series`] extracts Taylor coefficients of `1 - phi~(1-s)`
//!   from evaluations of `phi~` alone.
//!
//! For pure fractional powers a third, closed-form route
//! ([`closed_form_weights`]) exists and serves as the cross-check oracle:
//! `a_m = alpha * Gamma(m - alpha) / (Gamma(1 - alpha) * m!)`.
//!
//! Truncation: the weights have the heavy tail `a_m ~ phi~(1/m)/m`, so the
//! mass beyond any storable truncation `M` decays only like `phi~(1/M)`.
//! The quadrature route targets `tail <= tol` by doubling `M`, but caps the
//! term count (default `2^17`); when the cap binds, the honest tail is
//! reported instead of pretending the target was met.  `tail_mass` is always
//! computed independently as `Integral P(M+1, t) mu~(dt)` (regularized lower
//! incomplete gamma = upper Poisson tail), evaluated in closed form by
//! integration by parts, which makes the conservation identity
//! `sum_{m<=M} a_m + tail_mass = 1` a genuine two-route check.

use crate::bernstein::{PhiKind, PhiSpec};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Default hard cap on stored weight terms for the quadrature route.
pub const DEFAULT_MAX_TERMS: usize = 1 << 17;

/// Cap on the series route's coefficient count; beyond this the circle
/// stencil's amplification `rho^{-m}` erodes the per-entry budget.
pub const SERIES_MAX_TERMS: usize = 64;

/// How a weights vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightsMethod {
    Quadrature,
    Series,
}

impl WeightsMethod {
    pub fn label(&self) -> &'static str {
        match self {
            WeightsMethod::Quadrature => "quadrature",
            WeightsMethod::Series => "series",
        }
    }
}

/// Finite, tail-tracked vector of step-count weights `a_1..a_M`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubordinationWeights {
    /// `weights[i]` is `a_{i+1}`; every entry is `>= 0`.
    pub weights: Vec<f64>,
    /// Mass beyond the truncation, `sum_{m > M} a_m`, computed
    /// independently of the stored entries.
    pub tail_mass: f64,
    /// Tail target requested from the quadrature route (`None` for the
    /// series route, whose truncation is the caller's term count).
    pub requested_tol: Option<f64>,
    /// True when the term cap stopped the tail search before the target.
    pub cap_hit: bool,
    pub method: WeightsMethod,
    /// Label of the generating spec, for reports.
    pub spec_label: String,
}

impl SubordinationWeights {
    /// Number of stored terms `M`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Compensated sum of the stored weights.
    pub fn stored_mass(&self) -> f64 {
        kahan_sum(self.weights.iter().copied())
    }
}

/// Compensated (Kahan) summation: keeps the conservation checks at the
/// 1e-12 level even for hundreds of thousands of terms.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Closed-form weights for the catalog kinds built from pure fractional
/// powers: `stable(alpha)` has `a_m = alpha Gamma(m-alpha) / (Gamma(1-alpha) m!)`
/// and `mix` is the normalized half-sum.  Serves as the third,
/// quadrature-free and series-free route in cross-checks.
pub fn closed_form_weights(spec: &PhiSpec, m_max: usize) -> Result<Vec<f64>> {
    if m_max == 0 {
        return Err(Error::Domain("need at least one weight term".into()));
    }
    match spec.kind() {
        PhiKind::Stable { alpha } => Ok(stable_weights(*alpha, m_max)),
        PhiKind::StableMixture { alpha, beta } => {
            let a = stable_weights(*alpha, m_max);
            let b = stable_weights(*beta, m_max);
            Ok(a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect())
        }
        _ => Err(Error::Capability(format!(
            "no closed-form weights for {}",
            spec.kind().label()
        ))),
    }
}

/// `a_m` for the pure power `lambda^alpha` via the ratio recurrence
/// `a_{m+1} = a_m (m - alpha)/(m + 1)`, seeded with `a_1 = alpha`.
fn stable_weights(alpha: f64, m_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(m_max);
    let mut a = alpha;
    w.push(a);
    for m in 1..m_max {
        a *= (m as f64 - alpha) / (m as f64 + 1.0);
        w.push(a);
    }
    w
}

/// Exact tail of the pure-power weights: `sum_{m>M} a_m =
/// Gamma(M+1-alpha) / (Gamma(1-alpha) M!)`, used as a test oracle.
pub fn stable_tail(alpha: f64, m: usize) -> f64 {
    (ln_gamma(m as f64 + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(m as f64 + 1.0))
        .exp()
}

// ---------------------------------------------------------------------------
// Quadrature route
// ---------------------------------------------------------------------------

/// Decomposition of the normalized jump density into pure-power components
/// `coef * t^{-1-alpha}`; available exactly for the kinds with a closed-form
/// density.
fn density_components(spec: &PhiSpec) -> Result<Vec<(f64, f64)>> {
    let gamma_coef = |a: f64| a / ln_gamma(1.0 - a).exp();
    match spec.kind() {
        PhiKind::Stable { alpha } => Ok(vec![(gamma_coef(*alpha), *alpha)]),
        PhiKind::StableMixture { alpha, beta } => Ok(vec![
            (0.5 * gamma_coef(*alpha), *alpha),
            (0.5 * gamma_coef(*beta), *beta),
        ]),
        _ => Err(Error::Capability(format!(
            "quadrature weights need a closed-form jump density; {} has none \
             (use the series route)",
            spec.kind().label()
        ))),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed once by Newton
/// iteration on the three-term recurrence (initial guesses from the
/// Chebyshev asymptotic) and cached.  Order 16 per panel keeps the panel
/// rule exact to machine precision for integrands whose log varies by a few
/// nats across the panel.
fn gl_nodes() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16usize;
        let nf = n as f64;
        let mut xs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for k in 0..n {
            let mut x =
                (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n and P_{n-1} by the recurrence.
                let mut p0 = 1.0f64;
                let mut p1 = x;
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    // One extra polish pass, then stop.
                    let mut q0 = 1.0f64;
                    let mut q1 = x;
                    for j in 2..=n {
                        let jf = j as f64;
                        let q2 = ((2.0 * jf - 1.0) * x * q1 - (jf - 1.0) * q0) / jf;
                        q0 = q1;
                        q1 = q2;
                    }
                    dp = nf * (x * q1 - q0) / (x * x - 1.0);
                    x -= q1 / dp;
                    break;
                }
            }
            xs.push(x);
            ws.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (xs, ws)
    })
}

/// Integrate `f` over `[lo, hi]` with composite Gauss–Legendre panels of
/// width at most `panel_width`.
fn gl_integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panel_width: f64) -> f64 {
    let (xs, ws) = gl_nodes();
    let n_panels = (((hi - lo) / panel_width).ceil() as usize).max(1);
    let h = (hi - lo) / n_panels as f64;
    let mut total = 0.0;
    for p in 0..n_panels {
        let a = lo + p as f64 * h;
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(ws.iter()) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Stirling-series remainder `delta(x) = ln Gamma(x) - (x - 1/2) ln x + x -
/// ln(2 pi)/2`, accurate below 1e-15 for `x >= 17`.
fn stirling_delta(x: f64) -> f64 {
    let x2 = x * x;
    (((((691.0 / 360_360.0) / x2 - 1.0 / 1188.0) / x2 + 1.0 / 1680.0) / x2
        - 1.0 / 1260.0)
        / x2
        + 1.0 / 360.0)
        .mul_add(-1.0 / x2, 1.0 / 12.0)
        / x
}

/// One weight entry `a_m = (1/m!) Integral t^m e^{-t} mu~(t) dt`.
///
/// Each pure-power component contributes `c Gamma(m - alpha)/m!`, computed
/// as honest quadrature (never a gamma-function call): substitute
/// `t = lam e^s` with `lam = m - alpha`, so that
///
/// `(1/m!) Integral t^{m-alpha-1} e^{-t} dt = e^{K} Integral e^{-lam (expm1(s) - s)} ds`,
///
/// with the all-in-one scale `K = lam ln lam - lam - ln m!`.  The centered
/// exponent `lam (expm1(s) - s)` is evaluated without cancellation, and `K`
/// is assembled from Stirling's series so that no two large terms are ever
/// subtracted; both keep the relative error near 1e-13 even at `m ~ 10^5`,
/// which the conservation identity then genuinely certifies.
fn quadrature_entry(components: &[(f64, f64)], m: usize) -> f64 {
    let mf = m as f64;
    let mut total = 0.0;
    for &(c, alpha) in components {
        let lam = mf - alpha;
        // K = lam ln lam - lam - ln Gamma(m+1), assembled cancellation-free
        // for large m via lnG(m+1) = (m + 1/2) ln(m+1) - (m+1) +
        // ln(2 pi)/2 + delta(m+1).
        let k = if m >= 17 {
            let x = mf + 1.0;
            -(alpha + 0.5) * x.ln() + lam * (-(1.0 + alpha) / x).ln_1p()
                + (1.0 + alpha)
                - 0.5 * (2.0 * std::f64::consts::PI).ln()
                - stirling_delta(x)
        } else {
            lam * lam.ln() - lam - ln_gamma(mf + 1.0)
        };
        // Bracket 45 nats around the peak: expm1(s) - s = 45/lam.
        let tau = 45.0 / lam;
        let step = 3.0 / lam.sqrt();
        let probe = |s: f64| s.exp_m1() - s;
        let mut lo = -step;
        while probe(lo) < tau {
            lo -= step;
        }
        let mut hi = step;
        while probe(hi) < tau {
            hi += step;
        }
        // Panel width: 3 sigma of the peak's Gaussian scale, but never wider
        // than 0.5 — for lam < 1 the right flank steepens on an O(1) scale
        // in s (curvature lam e^s), which wide panels cannot resolve.
        let f = |s: f64| (-lam * (s.exp_m1() - s)).exp();
        total += c * k.exp() * gl_integrate(&f, lo, hi, step.min(0.5));
    }
    total
}

/// Tail mass `sum_{m > M} a_m = Integral P(M+1, t) mu~(t) dt`, where `P` is
/// the regularized lower incomplete gamma (the upper tail of a Poisson(t)
/// count at `M`).  For pure-power components `c t^{-1-alpha}` integration
/// by parts turns this into the exact value `(c/alpha) Gamma(M+1-alpha)/M!`,
/// so the tail never shares round-off with the stored entries and the
/// conservation identity checks the entry quadratures alone.
fn analytic_tail(components: &[(f64, f64)], m: usize) -> f64 {
    let mf = m as f64;
    components
        .iter()
        .map(|&(c, alpha)| {
            c / alpha * (ln_gamma(mf + 1.0 - alpha) - ln_gamma(mf + 1.0)).exp()
        })
        .sum()
}

/// Quadrature route with the default term cap.  See [`weights_quadrature_capped`].
pub fn weights_quadrature(spec: &PhiSpec, tol: f64) -> Result<SubordinationWeights> {
    weights_quadrature_capped(spec, tol, DEFAULT_MAX_TERMS)
}

/// Compute `a_1..a_M` by adaptive log-time quadrature of the defining
/// integral, choosing `M` by doubling until the independently integrated
/// tail drops to `tol` or the term cap binds (`cap_hit` records which).
///
/// Preconditions: the kind has a closed-form jump density and
/// `tol in (0, 1e-3]`.
pub fn weights_quadrature_capped(
    spec: &PhiSpec,
    tol: f64,
    max_terms: usize,
) -> Result<SubordinationWeights> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Domain(format!(
            "weights tolerance must lie in (0, 1e-3]; got {tol}"
        )));
    }
    if max_terms < 8 {
        return Err(Error::Domain("term cap must be at least 8".into()));
    }
    let components = density_components(spec)?;

    // Doubling search for the truncation point on the analytic tail.
    let mut m = 64usize.min(max_terms);
    let mut tail = analytic_tail(&components, m);
    while tail > tol && m < max_terms {
        m = (m * 2).min(max_terms);
        tail = analytic_tail(&components, m);
    }
    let cap_hit = tail > tol;

    let mut weights = Vec::with_capacity(m);
    for i in 1..=m {
        let v = quadrature_entry(&components, i);
        weights.push(clip_weight(v, i)?);
    }

    let stored = kahan_sum(weights.iter().copied());
    let conservation = stored + tail;
    if (conservation - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "weight conservation violated: sum + tail = {conservation:.15} (M = {m})"
        )));
    }

    Ok(SubordinationWeights {
        weights,
        tail_mass: tail,
        requested_tol: Some(tol),
        cap_hit,
        method: WeightsMethod::Quadrature,
        spec_label: spec.kind().label(),
    })
}

/// Quadrature weights with a caller-fixed term count (no tail-target
/// search): exactly `a_1..a_{m_terms}` plus the analytic tail.  Used by the
/// kernel builders, which derive the truncation depth from torus mixing
/// rather than from a mass target.
pub fn weights_exact_terms(spec: &PhiSpec, m_terms: usize) -> Result<SubordinationWeights> {
    if m_terms == 0 {
        return Err(Error::Domain("need at least one weight term".into()));
    }
    let components = density_components(spec)?;
    let tail = analytic_tail(&components, m_terms);
    let mut weights = Vec::with_capacity(m_terms);
    for i in 1..=m_terms {
        let v = quadrature_entry(&components, i);
        weights.push(clip_weight(v, i)?);
    }
    let stored = kahan_sum(weights.iter().copied());
    let conservation = stored + tail;
    if (conservation - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "weight conservation violated: sum + tail = {conservation:.15} (M = {m_terms})"
        )));
    }
    Ok(SubordinationWeights {
        weights,
        tail_mass: tail,
        requested_tol: None,
        cap_hit: false,
        method: WeightsMethod::Quadrature,
        spec_label: spec.kind().label(),
    })
}

/// Smallest truncation `M` whose analytic tail satisfies
/// `tail(M) * rho^(M+1) <= target`, searched by doubling then bisection.
/// `rho` is the relevant torus mixing factor.  Errors if the cap cannot
/// meet the target.
pub fn terms_for_fold_residual(
    spec: &PhiSpec,
    rho: f64,
    target: f64,
    cap: usize,
) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!(
            "mixing factor must lie in (0, 1); got {rho}"
        )));
    }
    if !(target > 0.0) {
        return Err(Error::Domain("fold residual target must be positive".into()));
    }
    let components = density_components(spec)?;
    let residual = |m: usize| analytic_tail(&components, m) * rho.powi(m as i32 + 1);
    let mut hi = 1024usize.min(cap);
    while residual(hi) > target && hi < cap {
        hi = (hi * 2).min(cap);
    }
    if residual(hi) > target {
        return Err(Error::Capability(format!(
            "fold residual target {target:.1e} needs more than {cap} weight terms \
             (residual at cap: {:.1e}); use a coarser grid or a looser target",
            residual(hi)
        )));
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if residual(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Exact alternating tail `A = sum_{m > M} (-1)^m a_m`, from the generating
/// identity at `s = -1`: the full alternating sum equals `1 - phi~(2)`.
pub fn alternating_tail(spec: &PhiSpec, w: &SubordinationWeights) -> Result<f64> {
    let full = 1.0 - spec.eval(2.0)?;
    let partial = kahan_sum(
        w.weights
            .iter()
            .enumerate()
            .map(|(i, &a)| if i % 2 == 0 { -a } else { a }),
    );
    Ok(full - partial)
}

/// Negative round-off floor: tiny negatives are clipped to zero, anything
/// materially negative is a numeric failure.
fn clip_weight(v: f64, m: usize) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-12 {
        Ok(0.0)
    } else {
        Err(Error::Numeric(format!(
            "weight a_{m} = {v:e} is negative beyond round-off"
        )))
    }
}

// ---------------------------------------------------------------------------
// Series route
// ---------------------------------------------------------------------------

/// Taylor coefficients `a_m` of `g(s) = 1 - phi~(1 - s)` for `m = 1..=m_max`,
/// extracted from evaluations of `phi~` on circles around `s = 0` — a
/// quadrature-free route that never touches the jump density.
///
/// The derivative stencil is trigonometric: `N` equispaced nodes on a circle
/// of radius `rho < 1` (so the argument of `phi~` keeps positive real part),
/// combined by a discrete Fourier sum; the run is repeated on a second
/// radius and node count, and the worst cross-stencil deviation is the
/// accuracy control.  Degrades with a capability error beyond
/// [`SERIES_MAX_TERMS`] terms (the `rho^{-m}` amplification otherwise eats
/// the budget) and for kinds without an analytic continuation (tables).
pub fn weights_series(spec: &PhiSpec, m_max: usize) -> Result<SubordinationWeights> {
    if m_max == 0 {
        return Err(Error::Domain("need at least one series term".into()));
    }
    if m_max > SERIES_MAX_TERMS {
        return Err(Error::Capability(format!(
            "series extraction supports at most {SERIES_MAX_TERMS} terms \
             (requested {m_max}); use the quadrature route for deep truncations"
        )));
    }
    let run = |rho: f64, n: usize| -> Result<Vec<f64>> {
        use rustfft::num_complex::Complex64;
        // g(rho e^{i th}) on the stencil; g(conj) = conj(g) halves the work.
        let mut gv: Vec<Complex64> = Vec::with_capacity(n / 2 + 1);
        for j in 0..=(n / 2) {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let s = Complex64::from_polar(rho, th);
            let z = Complex64::new(1.0, 0.0) - s;
            let g = Complex64::new(1.0, 0.0) - spec.eval_complex(z)?;
            gv.push(g);
        }
        let mut out = Vec::with_capacity(m_max);
        for m in 1..=m_max {
            // (1/N) sum_j g_j e^{-i m th_j} / rho^m, using conjugate symmetry.
            let mut acc = gv[0].re;
            for (j, g) in gv.iter().enumerate().skip(1) {
                let th = 2.0 * std::f64::consts::PI * (j * m) as f64 / n as f64;
                let w = Complex64::from_polar(1.0, -th);
                let term = g * w;
                if j == n / 2 && n % 2 == 0 {
                    acc += term.re;
                } else {
                    acc += 2.0 * term.re;
                }
            }
            out.push(acc / (n as f64 * rho.powi(m as i32)));
        }
        Ok(out)
    };

    let a1 = run(0.9, 512)?;
    let a2 = run(0.8, 768)?;
    let mut weights = Vec::with_capacity(m_max);
    let mut worst = 0.0f64;
    for m in 0..m_max {
        let dev = (a1[m] - a2[m]).abs();
        worst = worst.max(dev);
        if dev > 1e-9 {
            return Err(Error::Numeric(format!(
                "series stencils disagree at term {}: {:e} vs {:e} (dev {dev:e})",
                m + 1,
                a1[m],
                a2[m]
            )));
        }
        weights.push(clip_weight(a1[m], m + 1)?);
    }
    let stored = kahan_sum(weights.iter().copied());
    Ok(SubordinationWeights {
        weights,
        tail_mass: (1.0 - stored).max(0.0),
        requested_tol: None,
        cap_hit: false,
        method: WeightsMethod::Series,
        spec_label: spec.kind().label(),
    })
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

/// Alias-table sampler over the truncated weights, renormalized by
/// `1/(1 - tail_mass)`.  Refuses weight vectors whose tail is no longer
/// negligible for path laws (`tail_mass >= 0.01`).
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl IncrementSampler {
    /// Build the Vose alias table.  Deterministic given the weights.
    pub fn new(w: &SubordinationWeights) -> Result<Self> {
        if w.tail_mass >= 0.01 {
            return Err(Error::Domain(format!(
                "truncated tail mass {:.4} >= 0.01: the sampler would \
                 misrepresent the step law; deepen the truncation",
                w.tail_mass
            )));
        }
        let n = w.len();
        if n == 0 {
            return Err(Error::Domain("empty weight vector".into()));
        }
        let total = kahan_sum(w.weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::Domain("weights sum to zero".into()));
        }
        let scale = n as f64 / total;
        let mut prob: Vec<f64> = w.weights.iter().map(|&x| x * scale).collect();
        let mut alias = vec![0u32; n];
        let mut small: Vec<u32> = Vec::new();
        let mut large: Vec<u32> = Vec::new();
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            let pl = prob[l as usize] - (1.0 - prob[s as usize]);
            alias[s as usize] = l;
            prob[l as usize] = pl;
            if pl < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for &i in small.iter().chain(large.iter()) {
            prob[i as usize] = 1.0;
        }
        Ok(IncrementSampler { prob, alias })
    }

    /// Draw one step count `m in 1..=M`.  Consumes exactly two uniforms in a
    /// fixed order, so streams are reproducible across platforms.
    pub fn sample(&self, rng: &mut ChaCha12Rng) -> u64 {
        let n = self.prob.len();
        let i = (rng.gen::<f64>() * n as f64) as usize;
        let i = i.min(n - 1);
        let coin: f64 = rng.gen();
        let idx = if coin < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        };
        (idx + 1) as u64
    }

    pub fn support_len(&self) -> usize {
        self.prob.len()
    }
}
