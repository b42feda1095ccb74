//! Transition kernels of base and subordinate walks on a discrete torus.
//!
//! All kernels here are probability vectors on the torus `(Z/GZ)^d` — the
//! periodization of the corresponding infinite-lattice kernel.  Working on
//! the torus makes every route mass-conserving by construction, so two
//! independent algorithms for the same kernel can be compared at the 1e-10
//! level; the presentation window `[-radius, radius]^d` is a view into the
//! torus.
//!
//! Three routes produce the subordinate kernel:
//!
//! * **convolution**: build the one-step kernel from the step-count weights
//!   (`sum_m a_m * srw_m`, truncated at depth `M` with the tail folded onto
//!   the parity-uniform distribution) and raise it to the n-th convolution
//!   power in real space;
//! * **spectral**: invert the discrete Fourier transform of the exact
//!   symbol `s(theta)^n`, `s = 1 - phi~(1 - Psi)`, which never touches the
//!   weights;
//! * **ctrw**: same with the continuous-time symbol `exp(-t phi~(1-Psi))`.
//!
//! Two kinds of error are tracked separately and must not be conflated:
//!
//! * `mass_defect` — mass the construction itself cannot account for
//!   (weight-tail fold residual, accumulated round-off).  Consumers refuse
//!   kernels whose defect exceeds their tolerance; the spectral and ctrw
//!   routes have defect 0 up to round-off.
//! * `alias_bound` — a heuristic order-of-magnitude envelope for how much
//!   the torus kernel can differ from the infinite-lattice kernel inside
//!   the window (periodization images).  It is reported as metadata, not
//!   certified, and it gates nothing: the torus kernel is the object all
//!   cross-method comparisons speak about.

use crate::bernstein::PhiSpec;
use crate::error::{Error, Result};
use crate::subordination::{
    alternating_tail, kahan_sum, terms_for_fold_residual, weights_exact_terms,
};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Hard cap on stored weight terms for kernel construction.
const KERNEL_TERM_CAP: usize = 1 << 22;

/// Default fold-residual target for the convolution route.
pub const DEFAULT_FOLD_TARGET: f64 = 1e-12;

/// Time parameter of a kernel: discrete step count or continuous time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelTime {
    Steps(u64),
    Continuous(f64),
}

impl KernelTime {
    pub fn label(&self) -> String {
        match self {
            KernelTime::Steps(n) => format!("n={n}"),
            KernelTime::Continuous(t) => format!("t={t}"),
        }
    }
}

/// Which algorithm produced a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    SrwExact,
    Convolution,
    Spectral,
    Ctrw,
}

impl KernelMethod {
    pub fn label(&self) -> &'static str {
        match self {
            KernelMethod::SrwExact => "srw-exact",
            KernelMethod::Convolution => "convolution",
            KernelMethod::Spectral => "spectral",
            KernelMethod::Ctrw => "ctrw",
        }
    }
}

/// A probability kernel on the torus `(Z/GZ)^d` with a presentation window.
#[derive(Debug, Clone)]
pub struct LatticeKernel {
    pub d: usize,
    /// Torus side length `G` (a power of two).
    pub grid: usize,
    /// Presentation window radius; strictly less than `G/2`.
    pub radius: i64,
    pub time: KernelTime,
    pub method: KernelMethod,
    /// Full torus values, row-major over coordinates `0..G` per axis
    /// (coordinate = displacement mod `G`).
    values: Vec<f64>,
    /// Mass the construction cannot account for (see module docs).
    pub mass_defect: f64,
    /// Heuristic periodization-contamination envelope (see module docs).
    pub alias_bound: f64,
    pub phi_label: String,
}

impl LatticeKernel {
    /// Kernel value at lattice displacement `x` (any representative; the
    /// torus coordinate is `x mod G`).
    pub fn value(&self, x: &[i64]) -> f64 {
        assert_eq!(x.len(), self.d, "dimension mismatch");
        let g = self.grid as i64;
        let mut idx = 0usize;
        for &c in x {
            idx = idx * self.grid + c.rem_euclid(g) as usize;
        }
        self.values[idx]
    }

    /// Compensated total mass over the torus.
    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.values.iter().copied())
    }

    /// Smallest value on the torus (negative values signal round-off).
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Window points `[-radius, radius]^d` in row-major order with values.
    pub fn window_points(&self) -> Vec<(Vec<i64>, f64)> {
        let r = self.radius;
        let side = (2 * r + 1) as usize;
        let count = side.pow(self.d as u32);
        let mut out = Vec::with_capacity(count);
        let mut x = vec![-r; self.d];
        for _ in 0..count {
            out.push((x.clone(), self.value(&x)));
            for axis in (0..self.d).rev() {
                if x[axis] < r {
                    x[axis] += 1;
                    break;
                }
                x[axis] = -r;
            }
        }
        out
    }

    pub fn steps(&self) -> Option<u64> {
        match self.time {
            KernelTime::Steps(n) => Some(n),
            KernelTime::Continuous(_) => None,
        }
    }

    /// Visit every torus site exactly once through its canonical
    /// representative in `[-G/2, G/2)^d`, in storage (row-major) order.
    pub fn for_each_canonical(&self, mut f: impl FnMut(&[i64], f64)) {
        let g = self.grid;
        let half = (g / 2) as i64;
        let mut coords = vec![0i64; self.d];
        for (idx, &v) in self.values.iter().enumerate() {
            let mut rem = idx;
            for axis in (0..self.d).rev() {
                let raw = (rem % g) as i64;
                coords[axis] = if raw < half { raw } else { raw - g as i64 };
                rem /= g;
            }
            f(&coords, v);
        }
    }

    /// Copy with transformed values (for ratio-homogeneity checks; the
    /// result need not be a probability kernel).
    #[cfg(test)]
    pub(crate) fn with_mapped_values(&self, f: impl Fn(f64) -> f64) -> LatticeKernel {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = f(*v);
        }
        out
    }

    /// Copy with an overridden mass defect (for filter tests).
    #[cfg(test)]
    pub(crate) fn with_mass_defect(&self, defect: f64) -> LatticeKernel {
        let mut out = self.clone();
        out.mass_defect = defect;
        out
    }
}

/// Default torus side for a window radius: at least four times the radius,
/// rounded up to a power of two, never below 16.
pub fn default_grid(radius: i64) -> usize {
    ((4 * radius.max(1)) as usize).next_power_of_two().max(16)
}

fn check_geometry(d: usize, radius: i64, grid: usize) -> Result<()> {
    if !(1..=2).contains(&d) {
        return Err(Error::Capability(format!(
            "lattice kernels support d in {{1, 2}}; got d = {d}"
        )));
    }
    if radius < 0 {
        return Err(Error::Domain(format!("window radius must be >= 0; got {radius}")));
    }
    if !grid.is_power_of_two() || grid < 16 {
        return Err(Error::Domain(format!(
            "grid must be a power of two >= 16; got {grid}"
        )));
    }
    if radius >= (grid / 2) as i64 {
        return Err(Error::Domain(format!(
            "window radius {radius} does not fit on a torus of side {grid} \
             (need radius < grid/2)"
        )));
    }
    Ok(())
}

/// One simple-random-walk step on the 1-d torus: nearest-neighbor average.
fn srw_step_1d(src: &[f64], dst: &mut [f64]) {
    let g = src.len();
    dst[0] = 0.5 * (src[g - 1] + src[1]);
    for i in 1..g - 1 {
        dst[i] = 0.5 * (src[i - 1] + src[i + 1]);
    }
    dst[g - 1] = 0.5 * (src[g - 2] + src[0]);
}

/// Assemble the 2-d walk kernel on `(Z/GZ)^2` from the 1-d kernel `q` of the
/// same step count on the double torus `Z/2GZ`, using the exact rotation
/// `u = x1 + x2`, `v = x1 - x2` under which the two components evolve as
/// independent 1-d walks:
///
/// `p2(x) = (P(u) P(v) + Pt(u) Pt(v)) / 2`,
///
/// where `P(u) = q(u) + q(u + G)` and `Pt(u) = q(u) - q(u + G)` fold the
/// double torus down (the signed fold tracks which periodization images
/// land on the sublattice `u = v mod 2`).
fn assemble_2d(q: &[f64], g: usize, out: &mut [f64]) {
    let g2 = 2 * g;
    debug_assert_eq!(q.len(), g2);
    debug_assert_eq!(out.len(), g * g);
    let mut p = vec![0.0f64; g2];
    let mut pt = vec![0.0f64; g2];
    for u in 0..g2 {
        let w = (u + g) % g2;
        p[u] = q[u] + q[w];
        pt[u] = q[u] - q[w];
    }
    for x1 in 0..g {
        for x2 in 0..g {
            let u = x1 + x2; // in 0..2G-1: direct index
            let v = (x1 + g2 - x2) % g2;
            out[x1 * g + x2] = 0.5 * (p[u] * p[v] + pt[u] * pt[v]);
        }
    }
}

/// Exact `m`-step simple-random-walk kernel on the torus.
pub fn srw_kernel(d: usize, m: u64, radius: i64, grid: Option<usize>) -> Result<LatticeKernel> {
    let g = grid.unwrap_or_else(|| default_grid(radius));
    check_geometry(d, radius, g)?;
    let values = match d {
        1 => {
            let mut q = vec![0.0f64; g];
            q[0] = 1.0;
            let mut tmp = vec![0.0f64; g];
            for _ in 0..m {
                srw_step_1d(&q, &mut tmp);
                std::mem::swap(&mut q, &mut tmp);
            }
            q
        }
        _ => {
            let g2 = 2 * g;
            let mut q = vec![0.0f64; g2];
            q[0] = 1.0;
            let mut tmp = vec![0.0f64; g2];
            for _ in 0..m {
                srw_step_1d(&q, &mut tmp);
                std::mem::swap(&mut q, &mut tmp);
            }
            let mut out = vec![0.0f64; g * g];
            assemble_2d(&q, g, &mut out);
            out
        }
    };
    // The walk moves one lattice site per step, so if the window sits more
    // than m sites away from every periodization image the torus kernel is
    // exactly the infinite-lattice kernel there.
    let alias = if (g as i64 - radius) > m as i64 {
        0.0
    } else {
        let a = (g as i64 - radius) as f64;
        (2.0 * d as f64) * (-a * a / (2.0 * m as f64)).exp().min(1.0)
    };
    Ok(LatticeKernel {
        d,
        grid: g,
        radius,
        time: KernelTime::Steps(m),
        method: KernelMethod::SrwExact,
        values,
        mass_defect: 0.0,
        alias_bound: alias,
        phi_label: "srw".into(),
    })
}

/// Heuristic envelope for periodization contamination inside the window:
/// the nearest image of a window point sits at distance at least `G - R`,
/// and the step law's mass beyond distance `r` scales like `phi~(r^-2)`.
/// Order-of-magnitude metadata only.
fn alias_envelope(spec: &PhiSpec, steps: f64, grid: usize, radius: i64) -> f64 {
    let dist = (grid as i64 - radius).max(1) as f64;
    match spec.eval(1.0 / (dist * dist)) {
        Ok(v) => (8.0 * steps * v).min(1.0),
        Err(_) => 1.0,
    }
}

/// One-step subordinate kernel on the torus, built from the step-count
/// weights: `p(1, x) = sum_{m<=M} a_m srw_m(x) + fold(tail)`.
///
/// The truncation depth `M` is chosen so that the tail fold's residual —
/// after the exact parity split of the tail mass onto the two parity-uniform
/// distributions — is at most `fold_target`: the residual is bounded by
/// `tail(M) * rho^(M+1)` with `rho` the torus spectral gap factor.  The
/// reported `mass_defect` is that bound plus a round-off allowance.
///
/// Requires a spec with a closed-form jump density (the weights route);
/// other kinds are served by the spectral route.
pub fn subordinate_step_kernel(
    spec: &PhiSpec,
    d: usize,
    radius: i64,
    grid: Option<usize>,
    fold_target: f64,
) -> Result<LatticeKernel> {
    let g = grid.unwrap_or_else(|| default_grid(radius));
    check_geometry(d, radius, g)?;
    if !(fold_target > 0.0 && fold_target <= 1e-3) {
        return Err(Error::Domain(format!(
            "fold residual target must lie in (0, 1e-3]; got {fold_target}"
        )));
    }
    let theta = 2.0 * std::f64::consts::PI / g as f64;
    // Second-largest eigenvalue modulus of the walk on the torus: for the
    // 1-d walk cos(2 pi / G); for the 2-d walk (1 + cos(2 pi / G)) / 2.
    let rho = match d {
        1 => theta.cos(),
        _ => 0.5 * (1.0 + theta.cos()),
    };
    let m_terms = terms_for_fold_residual(spec, rho, fold_target, KERNEL_TERM_CAP)?;
    let w = weights_exact_terms(spec, m_terms)?;
    let tail = w.tail_mass;
    // Exact parity split of the tail: T_e + T_o = tail and T_e - T_o = A,
    // the alternating tail from the generating identity at s = -1.
    let a_alt = alternating_tail(spec, &w)?;
    let t_even = 0.5 * (tail + a_alt);
    let t_odd = tail - t_even;
    if t_even < -1e-12 || t_odd < -1e-12 {
        return Err(Error::Numeric(format!(
            "tail parity split came out negative: even {t_even:e}, odd {t_odd:e}"
        )));
    }
    let (t_even, t_odd) = (t_even.max(0.0), t_odd.max(0.0));

    let values = match d {
        1 => {
            let mut q = vec![0.0f64; g];
            q[0] = 1.0;
            let mut tmp = vec![0.0f64; g];
            let mut acc = vec![0.0f64; g];
            for (i, &am) in w.weights.iter().enumerate() {
                srw_step_1d(&q, &mut tmp);
                std::mem::swap(&mut q, &mut tmp);
                // m = i+1 steps: the kernel lives on the parity class of m.
                let parity = (i + 1) % 2;
                let mut x = parity;
                while x < g {
                    acc[x] += am * q[x];
                    x += 2;
                }
            }
            let ue = 2.0 / g as f64;
            let mut x = 0;
            while x < g {
                acc[x] += t_even * ue;
                acc[x + 1] += t_odd * ue;
                x += 2;
            }
            acc
        }
        _ => {
            let g2 = 2 * g;
            let h = g / 2;
            let mut q = vec![0.0f64; g2];
            q[0] = 1.0;
            let mut tmp = vec![0.0f64; g2];
            let mut p = vec![0.0f64; g2];
            let mut pt = vec![0.0f64; g2];
            let mut ea = vec![0.0f64; g2];
            let mut eb = vec![0.0f64; g2];
            // Accumulate on the fundamental wedge 0 <= x2 <= x1 <= G/2 (the
            // kernel has full dihedral symmetry) and mirror out afterwards.
            let side = h + 1;
            let mut wedge = vec![0.0f64; side * side];
            for (i, &am) in w.weights.iter().enumerate() {
                srw_step_1d(&q, &mut tmp);
                std::mem::swap(&mut q, &mut tmp);
                let half_am = 0.5 * am;
                for u in 0..g2 {
                    let wrap = (u + g) % g2;
                    let s = q[u] + q[wrap];
                    let t = q[u] - q[wrap];
                    p[u] = s;
                    pt[u] = t;
                    ea[u] = half_am * s;
                    eb[u] = half_am * t;
                }
                let parity = (i + 1) % 2;
                for x1 in 0..=h {
                    let row = x1 * side;
                    let mut x2 = (x1 + parity) % 2;
                    while x2 <= x1 {
                        // u = x1 + x2 and v = x1 - x2 index the double torus
                        // directly (both lie in 0..2G).
                        let u = x1 + x2;
                        let v = x1 - x2;
                        wedge[row + x2] += ea[u] * p[v] + eb[u] * pt[v];
                        x2 += 2;
                    }
                }
            }
            let mut full = vec![0.0f64; g * g];
            let gi = g as i64;
            for x1 in 0..=h {
                for x2 in 0..=x1 {
                    let val = wedge[x1 * side + x2];
                    let c1 = x1 as i64;
                    let c2 = x2 as i64;
                    for &(a, b) in &[(c1, c2), (c2, c1)] {
                        for &sa in &[a, (gi - a) % gi] {
                            for &sb in &[b, (gi - b) % gi] {
                                full[sa as usize * g + sb as usize] = val;
                            }
                        }
                    }
                }
            }
            let ue = 2.0 / (g * g) as f64;
            for x1 in 0..g {
                for x2 in 0..g {
                    let t = if (x1 + x2) % 2 == 0 { t_even } else { t_odd };
                    full[x1 * g + x2] += t * ue;
                }
            }
            full
        }
    };

    let defect = tail * rho.powi(m_terms as i32 + 1) + 2e-13;
    let kernel = LatticeKernel {
        d,
        grid: g,
        radius,
        time: KernelTime::Steps(1),
        method: KernelMethod::Convolution,
        values,
        mass_defect: defect,
        alias_bound: alias_envelope(spec, 1.0, g, radius),
        phi_label: spec.kind().label(),
    };
    let mass = kernel.total_mass();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "one-step kernel mass {mass:.15} deviates from 1 beyond round-off"
        )));
    }
    Ok(kernel)
}

/// Circular convolution of two kernels on the same torus.  In one dimension
/// this is the direct real-space sum (no transforms anywhere — maximal
/// independence from the spectral route); in two dimensions the transform
/// is used as convolution arithmetic.
pub fn convolve(a: &LatticeKernel, b: &LatticeKernel) -> Result<LatticeKernel> {
    if a.d != b.d || a.grid != b.grid {
        return Err(Error::Domain(
            "convolution needs kernels on the same torus".into(),
        ));
    }
    let time = match (a.time, b.time) {
        (KernelTime::Steps(x), KernelTime::Steps(y)) => KernelTime::Steps(x + y),
        (KernelTime::Continuous(x), KernelTime::Continuous(y)) => {
            KernelTime::Continuous(x + y)
        }
        _ => {
            return Err(Error::Domain(
                "cannot convolve a discrete-time kernel with a continuous-time one"
                    .into(),
            ))
        }
    };
    let g = a.grid;
    let values = match a.d {
        1 => {
            let mut out = vec![0.0f64; g];
            for (z, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for y in 0..g {
                    let w = (z + g - y) % g;
                    acc += a.values[y] * b.values[w];
                }
                *o = acc;
            }
            out
        }
        _ => {
            let mut fa = to_complex(&a.values);
            let mut fb = to_complex(&b.values);
            fft_2d(&mut fa, g, false);
            fft_2d(&mut fb, g, false);
            for (x, y) in fa.iter_mut().zip(fb.iter()) {
                *x *= y;
            }
            fft_2d(&mut fa, g, true);
            from_complex(&fa, 1e-11)?
        }
    };
    Ok(LatticeKernel {
        d: a.d,
        grid: g,
        radius: a.radius.min(b.radius),
        time,
        method: a.method,
        values,
        mass_defect: a.mass_defect + b.mass_defect + 1e-14,
        alias_bound: (a.alias_bound + b.alias_bound).min(1.0),
        phi_label: a.phi_label.clone(),
    })
}

/// n-step subordinate kernel by convolution powering of the weights-built
/// one-step kernel (left-to-right binary powering, so about `2 log2 n`
/// convolutions).
pub fn nstep_kernel_convolve(
    spec: &PhiSpec,
    d: usize,
    n: u64,
    radius: i64,
    grid: Option<usize>,
    fold_target: f64,
) -> Result<LatticeKernel> {
    let one = subordinate_step_kernel(spec, d, radius, grid, fold_target)?;
    if n == 0 {
        return delta_kernel(spec, d, radius, one.grid, KernelTime::Steps(0));
    }
    if n == 1 {
        return Ok(one);
    }
    let mut acc: Option<LatticeKernel> = None;
    let bits = 64 - n.leading_zeros();
    for shift in (0..bits).rev() {
        if let Some(cur) = acc.take() {
            acc = Some(convolve(&cur, &cur)?);
        }
        if (n >> shift) & 1 == 1 {
            acc = Some(match acc.take() {
                Some(cur) => convolve(&cur, &one)?,
                None => one.clone(),
            });
        }
    }
    let mut kernel = acc.expect("n >= 1");
    kernel.mass_defect = n as f64 * one.mass_defect + 1e-13;
    kernel.alias_bound = alias_envelope(spec, n as f64, kernel.grid, radius);
    let mass = kernel.total_mass();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "{n}-step convolution kernel mass {mass:.15} deviates from 1"
        )));
    }
    Ok(kernel)
}

/// Point mass at the origin (the 0-step kernel).
fn delta_kernel(
    spec: &PhiSpec,
    d: usize,
    radius: i64,
    grid: usize,
    time: KernelTime,
) -> Result<LatticeKernel> {
    let mut values = vec![0.0f64; grid.pow(d as u32)];
    values[0] = 1.0;
    Ok(LatticeKernel {
        d,
        grid,
        radius,
        time,
        method: KernelMethod::Spectral,
        values,
        mass_defect: 0.0,
        alias_bound: 0.0,
        phi_label: spec.kind().label(),
    })
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn from_complex(v: &[Complex64], im_tol: f64) -> Result<Vec<f64>> {
    let worst_im = v.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if worst_im > im_tol {
        return Err(Error::Numeric(format!(
            "inverse transform left imaginary residue {worst_im:e}"
        )));
    }
    Ok(v.iter().map(|z| z.re).collect())
}

/// In-place 2-d FFT on a row-major `g x g` grid (row pass, transpose, row
/// pass, transpose).  `inverse` includes the `1/g^2` normalization.
fn fft_2d(data: &mut [Complex64], g: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(g)
    } else {
        planner.plan_fft_forward(g)
    };
    let transpose = |d: &mut [Complex64]| {
        for i in 0..g {
            for j in 0..i {
                d.swap(i * g + j, j * g + i);
            }
        }
    };
    for row in data.chunks_exact_mut(g) {
        fft.process(row);
    }
    transpose(data);
    for row in data.chunks_exact_mut(g) {
        fft.process(row);
    }
    transpose(data);
    if inverse {
        let scale = 1.0 / (g * g) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// Base-walk Fourier multiplier `Psi(theta) = (1/d) sum_i cos(theta_i)` and
/// the subordinate symbol `s(theta) = 1 - phi~(1 - Psi(theta))`, tabulated
/// for one axis.
fn symbol_axis_cos(g: usize) -> Vec<f64> {
    (0..g)
        .map(|k| (2.0 * std::f64::consts::PI * k as f64 / g as f64).cos())
        .collect()
}

fn subordinate_symbol(spec: &PhiSpec, psi: f64) -> Result<f64> {
    let s = 1.0 - spec.eval(1.0 - psi)?;
    if s.abs() > 1.0 + 1e-12 {
        return Err(Error::Numeric(format!(
            "symbol value {s} escapes [-1, 1]: this Bernstein function does \
             not generate a probability kernel on this lattice"
        )));
    }
    Ok(s)
}

/// n-step subordinate kernel by inverse transform of the exact symbol
/// `s(theta)^n` — no step-count weights anywhere.
pub fn nstep_kernel_spectral(
    spec: &PhiSpec,
    d: usize,
    n: u64,
    radius: i64,
    grid: Option<usize>,
) -> Result<LatticeKernel> {
    let g = grid.unwrap_or_else(|| default_grid(radius));
    check_geometry(d, radius, g)?;
    if n > i32::MAX as u64 {
        return Err(Error::Domain(format!("step count {n} too large")));
    }
    let cosv = symbol_axis_cos(g);
    let values = match d {
        1 => {
            let mut f: Vec<Complex64> = Vec::with_capacity(g);
            for k in 0..g {
                let s = subordinate_symbol(spec, cosv[k])?;
                f.push(Complex64::new(s.powi(n as i32), 0.0));
            }
            let mut planner = FftPlanner::<f64>::new();
            planner.plan_fft_inverse(g).process(&mut f);
            let scale = 1.0 / g as f64;
            for z in f.iter_mut() {
                *z *= scale;
            }
            from_complex(&f, 1e-11)?
        }
        _ => {
            let mut f = vec![Complex64::new(0.0, 0.0); g * g];
            for k1 in 0..g {
                for k2 in 0..=k1 {
                    let s = subordinate_symbol(spec, 0.5 * (cosv[k1] + cosv[k2]))?;
                    let v = Complex64::new(s.powi(n as i32), 0.0);
                    f[k1 * g + k2] = v;
                    f[k2 * g + k1] = v;
                }
            }
            fft_2d(&mut f, g, true);
            from_complex(&f, 1e-11)?
        }
    };
    let kernel = LatticeKernel {
        d,
        grid: g,
        radius,
        time: KernelTime::Steps(n),
        method: KernelMethod::Spectral,
        values,
        mass_defect: 0.0,
        alias_bound: alias_envelope(spec, n as f64, g, radius),
        phi_label: spec.kind().label(),
    };
    let mass = kernel.total_mass();
    if (mass - 1.0).abs() > 1e-11 {
        return Err(Error::Numeric(format!(
            "spectral kernel mass {mass:.15} deviates from 1"
        )));
    }
    Ok(kernel)
}

/// Continuous-time kernel at time `t`: inverse transform of
/// `exp(-t phi~(1 - Psi(theta)))`.
pub fn ctrw_kernel(
    spec: &PhiSpec,
    d: usize,
    t: f64,
    radius: i64,
    grid: Option<usize>,
) -> Result<LatticeKernel> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be finite and >= 0; got {t}")));
    }
    let g = grid.unwrap_or_else(|| default_grid(radius));
    check_geometry(d, radius, g)?;
    let cosv = symbol_axis_cos(g);
    let sym = |psi: f64| -> Result<f64> { Ok((-t * spec.eval(1.0 - psi)?).exp()) };
    let values = match d {
        1 => {
            let mut f: Vec<Complex64> = Vec::with_capacity(g);
            for k in 0..g {
                f.push(Complex64::new(sym(cosv[k])?, 0.0));
            }
            let mut planner = FftPlanner::<f64>::new();
            planner.plan_fft_inverse(g).process(&mut f);
            let scale = 1.0 / g as f64;
            for z in f.iter_mut() {
                *z *= scale;
            }
            from_complex(&f, 1e-11)?
        }
        _ => {
            let mut f = vec![Complex64::new(0.0, 0.0); g * g];
            for k1 in 0..g {
                for k2 in 0..=k1 {
                    let v = Complex64::new(sym(0.5 * (cosv[k1] + cosv[k2]))?, 0.0);
                    f[k1 * g + k2] = v;
                    f[k2 * g + k1] = v;
                }
            }
            fft_2d(&mut f, g, true);
            from_complex(&f, 1e-11)?
        }
    };
    let kernel = LatticeKernel {
        d,
        grid: g,
        radius,
        time: KernelTime::Continuous(t),
        method: KernelMethod::Ctrw,
        values,
        mass_defect: 0.0,
        alias_bound: alias_envelope(spec, t.max(1.0), g, radius),
        phi_label: spec.kind().label(),
    };
    let mass = kernel.total_mass();
    if (mass - 1.0).abs() > 1e-11 {
        return Err(Error::Numeric(format!(
            "continuous-time kernel mass {mass:.15} deviates from 1"
        )));
    }
    Ok(kernel)
}

/// Torus side for an accurate diagonal value at step count `n`: at least
/// eight characteristic radii `r_n = (phi~^-1(1/n))^(-1/2)`, so that
/// periodization images contribute at most a few percent.
pub fn diagonal_grid(spec: &PhiSpec, d: usize, n: u64) -> Result<usize> {
    if !(1..=2).contains(&d) {
        return Err(Error::Capability(format!(
            "lattice kernels support d in {{1, 2}}; got d = {d}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("diagonal grid needs n >= 1".into()));
    }
    let lam = spec.invert(1.0 / n as f64)?;
    let rn = lam.sqrt().recip();
    Ok((((8.0 * rn).ceil() as usize).next_power_of_two()).max(64))
}

/// Return probability `p(n, 0, 0)` by streaming the symbol sum
/// `G^-d sum_theta s(theta)^n` — no transform, no kernel storage, so the
/// grid can grow with `n` to keep periodization images negligible.
///
/// The scan prunes terms once `|s(theta)|^n` drops below ~1e-25, which is
/// sound whenever `|1 - phi~(2)|^n` is itself below the cutoff (then `|s|`
/// past the break point never rises back above it); the omitted mass is
/// below `G^d * 1e-25`.  When that guarantee is unavailable (small `n`) the
/// full sum is taken.
pub fn diagonal_value(spec: &PhiSpec, d: usize, n: u64, grid: usize) -> Result<f64> {
    check_geometry(d, 0, grid)?;
    if n > i32::MAX as u64 {
        return Err(Error::Domain(format!("step count {n} too large")));
    }
    let g = grid;
    let cosv = symbol_axis_cos(g);
    // cos(2 pi k / G) is symmetric about k = G/2: fold to k in 0..=G/2 with
    // multiplicity 2 in the interior.
    let h = g / 2;
    let mult = |k: usize| -> f64 {
        if k == 0 || k == h {
            1.0
        } else {
            2.0
        }
    };
    // Per-term cutoff ~e^-58; pruning is enabled only under the guarantee
    // described above.  |s| decreases along the scan while u = 1 - Psi < 1
    // and stays below |1 - phi~(2)| beyond, so no later term can re-cross.
    const CUT_LN: f64 = -58.0;
    let t2 = (1.0 - spec.eval(2.0)?).abs().max(1e-300);
    let prune = (n as f64) * t2.ln() < CUT_LN;
    let below_cut =
        |s: f64| -> bool { prune && (n as f64) * s.abs().max(1e-300).ln() < CUT_LN };
    let total = match d {
        1 => {
            let mut acc = 0.0;
            let mut c = 0.0;
            for k in 0..=h {
                let s = subordinate_symbol(spec, cosv[k])?;
                if below_cut(s) {
                    break;
                }
                let term = mult(k) * s.powi(n as i32);
                let y = term - c;
                let t = acc + y;
                c = (t - acc) - y;
                acc = t;
            }
            acc / g as f64
        }
        _ => {
            let mut acc = 0.0;
            let mut c = 0.0;
            'outer: for k1 in 0..=h {
                for k2 in 0..=k1 {
                    let s = subordinate_symbol(spec, 0.5 * (cosv[k1] + cosv[k2]))?;
                    if below_cut(s) {
                        if k2 == 0 {
                            // Row minima grow with k1: nothing left anywhere.
                            break 'outer;
                        }
                        break;
                    }
                    let swap_mult = if k1 == k2 { 1.0 } else { 2.0 };
                    let term = mult(k1) * mult(k2) * swap_mult * s.powi(n as i32);
                    let y = term - c;
                    let t = acc + y;
                    c = (t - acc) - y;
                    acc = t;
                }
            }
            acc / (g * g) as f64
        }
    };
    Ok(total)
}

/// Largest absolute difference between two kernels over the whole torus.
pub fn max_abs_diff(a: &LatticeKernel, b: &LatticeKernel) -> Result<f64> {
    if a.d != b.d || a.grid != b.grid {
        return Err(Error::Domain("kernels live on different tori".into()));
    }
    Ok(a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::PhiKind;

    fn stable(alpha: f64) -> PhiSpec {
        PhiSpec::new(PhiKind::Stable { alpha }).unwrap()
    }

    /// Binomial coefficient as exact f64 (small arguments only).
    fn binom(n: u64, k: u64) -> f64 {
        let mut v = 1.0f64;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    }

    /// Infinite-lattice 1-d SRW kernel: C(m, (m+x)/2) / 2^m on the parity
    /// class, else 0.
    fn srw_infinite_1d(m: u64, x: i64) -> f64 {
        if x.unsigned_abs() > m || (m as i64 + x) % 2 != 0 {
            return 0.0;
        }
        let k = ((m as i64 + x) / 2) as u64;
        binom(m, k) / (m as f64).exp2()
    }

    #[test]
    fn srw_1d_matches_binomial_exactly() {
        // Small dyadic probabilities are exact in f64, so equality is exact.
        let k = srw_kernel(1, 10, 12, Some(32)).unwrap();
        for x in -12i64..=12 {
            assert_eq!(k.value(&[x]), srw_infinite_1d(10, x), "x={x}");
        }
        assert_eq!(k.alias_bound, 0.0);
        assert!((k.total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn srw_1d_torus_fold_is_exact() {
        // On a tiny torus the kernel is the exact periodization.
        let g = 16i64;
        let k = srw_kernel(1, 12, 7, Some(16)).unwrap();
        for x in -7i64..=7 {
            let folded: f64 = (-3..=3)
                .map(|nu| srw_infinite_1d(12, x + nu * g))
                .sum();
            assert_eq!(k.value(&[x]), folded, "x={x}");
        }
    }

    /// Direct 2-d torus evolution, used only as an oracle.
    fn srw_direct_2d(m: u64, g: usize) -> Vec<f64> {
        let mut q = vec![0.0f64; g * g];
        q[0] = 1.0;
        let mut tmp = vec![0.0f64; g * g];
        for _ in 0..m {
            for x1 in 0..g {
                for x2 in 0..g {
                    let up = ((x1 + g - 1) % g) * g + x2;
                    let dn = ((x1 + 1) % g) * g + x2;
                    let lf = x1 * g + (x2 + g - 1) % g;
                    let rt = x1 * g + (x2 + 1) % g;
                    tmp[x1 * g + x2] = 0.25 * (q[up] + q[dn] + q[lf] + q[rt]);
                }
            }
            std::mem::swap(&mut q, &mut tmp);
        }
        q
    }

    #[test]
    fn srw_2d_rotation_factorization_matches_direct_evolution() {
        for m in [0u64, 1, 2, 3, 7, 12] {
            let k = srw_kernel(2, m, 7, Some(16)).unwrap();
            let direct = srw_direct_2d(m, 16);
            for x1 in 0..16usize {
                for x2 in 0..16usize {
                    let got = k.value(&[x1 as i64, x2 as i64]);
                    let want = direct[x1 * 16 + x2];
                    assert!(
                        (got - want).abs() <= 1e-15,
                        "m={m} x=({x1},{x2}): {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn subordinate_step_matches_spectral_one_step_1d() {
        let spec = stable(0.5);
        let conv = subordinate_step_kernel(&spec, 1, 31, Some(128), 1e-12).unwrap();
        let spec_k = nstep_kernel_spectral(&spec, 1, 1, 31, Some(128)).unwrap();
        let diff = max_abs_diff(&conv, &spec_k).unwrap();
        assert!(diff <= 1e-11, "diff = {diff:e}");
        assert!(conv.mass_defect <= 2e-12);
        assert!((conv.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn subordinate_step_matches_spectral_one_step_2d() {
        let spec = stable(0.5);
        let conv = subordinate_step_kernel(&spec, 2, 15, Some(64), 1e-12).unwrap();
        let spec_k = nstep_kernel_spectral(&spec, 2, 1, 15, Some(64)).unwrap();
        let diff = max_abs_diff(&conv, &spec_k).unwrap();
        assert!(diff <= 1e-11, "diff = {diff:e}");
        assert!((conv.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn subordinate_kernel_has_lattice_symmetries() {
        let spec = stable(0.5);
        let k = subordinate_step_kernel(&spec, 2, 15, Some(64), 1e-10).unwrap();
        for x1 in -10i64..=10 {
            for x2 in -10i64..=10 {
                let v = k.value(&[x1, x2]);
                assert_eq!(v, k.value(&[x2, x1]));
                assert_eq!(v, k.value(&[-x1, x2]));
                assert_eq!(v, k.value(&[x1, -x2]));
            }
        }
    }

    #[test]
    fn convolution_powers_match_spectral_many_steps() {
        let spec = stable(0.5);
        for n in [2u64, 4, 8, 16] {
            let conv = nstep_kernel_convolve(&spec, 1, n, 31, Some(128), 1e-12).unwrap();
            let sp = nstep_kernel_spectral(&spec, 1, n, 31, Some(128)).unwrap();
            let diff = max_abs_diff(&conv, &sp).unwrap();
            assert!(diff <= 1e-11, "n={n}: diff = {diff:e}");
        }
    }

    #[test]
    fn chapman_kolmogorov_closes_under_convolution() {
        let spec = stable(0.5);
        let p3 = nstep_kernel_spectral(&spec, 1, 3, 31, Some(128)).unwrap();
        let p5 = nstep_kernel_spectral(&spec, 1, 5, 31, Some(128)).unwrap();
        let p8 = nstep_kernel_spectral(&spec, 1, 8, 31, Some(128)).unwrap();
        let composed = convolve(&p3, &p5).unwrap();
        let diff = max_abs_diff(&composed, &p8).unwrap();
        assert!(diff <= 1e-12, "CK residual {diff:e}");
        assert_eq!(composed.steps(), Some(8));
    }

    #[test]
    fn spectral_zero_steps_is_a_point_mass() {
        let spec = stable(0.3);
        let k = nstep_kernel_spectral(&spec, 1, 0, 7, Some(32)).unwrap();
        assert!((k.value(&[0]) - 1.0).abs() <= 1e-12);
        for x in 1i64..=7 {
            assert!(k.value(&[x]).abs() <= 1e-12);
        }
    }

    #[test]
    fn ctrw_matches_poisson_mixture_oracle() {
        let spec = stable(0.5);
        let g = 64usize;
        let t = 1.5f64;
        let direct = ctrw_kernel(&spec, 1, t, 15, Some(g)).unwrap();
        // Independent oracle: exp(-t) sum_k t^k/k! p(k, .), with the k-step
        // kernels built by convolution powering of the weights route.
        let one = subordinate_step_kernel(&spec, 1, 15, Some(g), 1e-12).unwrap();
        let mut mix = vec![0.0f64; g];
        let mut pk = vec![0.0f64; g];
        pk[0] = 1.0; // k = 0
        let mut coef = (-t).exp();
        for x in 0..g {
            mix[x] += coef * pk[x];
        }
        let kmax = 40u64; // Poisson(1.5) tail beyond 40 is < 1e-30
        for k in 1..=kmax {
            let mut next = vec![0.0f64; g];
            for (z, nx) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for y in 0..g {
                    acc += pk[y] * one.values[(z + g - y) % g];
                }
                *nx = acc;
            }
            pk = next;
            coef *= t / k as f64;
            for x in 0..g {
                mix[x] += coef * pk[x];
            }
        }
        let worst = (0..g)
            .map(|x| (mix[x] - direct.values[x]).abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-11, "ctrw vs Poisson mixture: {worst:e}");
    }

    #[test]
    fn diagonal_streaming_agrees_with_spectral_kernel() {
        let spec = stable(0.5);
        for d in [1usize, 2] {
            for n in [1u64, 4, 16] {
                let k = nstep_kernel_spectral(&spec, d, n, 7, Some(64)).unwrap();
                let diag = diagonal_value(&spec, d, n, 64).unwrap();
                let at0 = k.value(&vec![0i64; d]);
                assert!(
                    (diag - at0).abs() <= 1e-13,
                    "d={d} n={n}: {diag} vs {at0}"
                );
            }
        }
    }

    #[test]
    fn steep_user_table_is_rejected_as_non_kernel() {
        // A log-log slope of 1.5 makes phi~(2) = 2^1.5 > 2, so the "symbol"
        // leaves [-1, 1]: not a transition kernel; must fail loudly.
        let table = PhiSpec::new(PhiKind::UserTable {
            points: vec![(0.0625, 0.015625), (0.25, 0.125), (1.0, 1.0), (4.0, 8.0)],
        })
        .unwrap();
        let err = nstep_kernel_spectral(&table, 1, 2, 7, Some(32)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("symbol"));
    }

    #[test]
    fn kinds_without_density_get_capability_error_on_weights_route() {
        let lc = PhiSpec::new(PhiKind::LogCosh { alpha: 0.5 }).unwrap();
        let err = subordinate_step_kernel(&lc, 1, 7, Some(64), 1e-10).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        // ... but the spectral route serves it fine.
        let k = nstep_kernel_spectral(&lc, 1, 4, 7, Some(64)).unwrap();
        assert!((k.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn geometry_violations_are_domain_errors() {
        let spec = stable(0.5);
        assert_eq!(
            nstep_kernel_spectral(&spec, 1, 1, 64, Some(64))
                .unwrap_err()
                .exit_code(),
            2,
            "radius >= G/2"
        );
        assert_eq!(
            nstep_kernel_spectral(&spec, 1, 1, 7, Some(48))
                .unwrap_err()
                .exit_code(),
            2,
            "grid not a power of two"
        );
        assert_eq!(
            nstep_kernel_spectral(&spec, 3, 1, 7, Some(32))
                .unwrap_err()
                .exit_code(),
            3,
            "d=3 unsupported"
        );
    }

    #[test]
    fn window_points_cover_the_window_in_order() {
        let spec = stable(0.5);
        let k = nstep_kernel_spectral(&spec, 2, 2, 3, Some(32)).unwrap();
        let pts = k.window_points();
        assert_eq!(pts.len(), 49);
        assert_eq!(pts[0].0, vec![-3, -3]);
        assert_eq!(pts[48].0, vec![3, 3]);
        assert_eq!(pts[24].0, vec![0, 0]);
        let sum: f64 = pts.iter().map(|(_, v)| v).sum();
        assert!(sum < 1.0 + 1e-12);
    }
}
