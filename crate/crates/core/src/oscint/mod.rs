//! Oscillatory integration and the analytic estimates built on it:
//! first/second derivative-test bounds, stationary-phase main terms, the
//! cube-root and logarithmic stationary analyses, and the paired-integral
//! dual-frequency transforms.
//!
//! Phases in `PhaseSpec` are in radians. The closed-form stationary helpers
//! (`v_stationary`, `y_stationary_series`) follow the e(x) = e^{2πix}
//! convention of the sums they serve; their docs say which.

pub mod hp;
pub mod psi;

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OscIntError {
    #[error("quadrature error estimate {err:.3e} exceeds tolerance {tol:.3e}")]
    QuadratureFailure { err: f64, tol: f64 },
    #[error("no stationary point inside the support")]
    NoStationaryPoint,
    #[error("second derivative vanishes at the stationary point")]
    DegenerateSecondDerivative,
    #[error("stationary point v0 = {0} outside the inert window [1/2, 5/2]")]
    OutOfWindow(f64),
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("contour abscissa {sigma} at or below the pole line {limit}")]
    ContourViolation { sigma: f64, limit: f64 },
    #[error("contour tail bound {tail:.3e} exceeds budget {budget:.3e}")]
    TailBoundExceeded { tail: f64, budget: f64 },
}

/// A smooth window with compact support and an evaluation handle.
pub struct Weight {
    pub support: (f64, f64),
    f: Box<dyn Fn(f64) -> f64 + Sync + Send>,
}

impl Weight {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.support.0 || x >= self.support.1 {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// C∞ bump on (a, b), peak value 1 at the midpoint.
    pub fn bump(a: f64, b: f64) -> Self {
        assert!(b > a);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        Weight {
            support: (a, b),
            f: Box::new(move |x| {
                let s = (x - c) / h;
                (1.0 - 1.0 / (1.0 - s * s)).exp()
            }),
        }
    }

    /// Truncated Gaussian; the support is wide enough that the cut is far
    /// below roundoff.
    pub fn gaussian(center: f64, sigma: f64) -> Self {
        let halfwidth = 8.5 * sigma;
        Weight {
            support: (center - halfwidth, center + halfwidth),
            f: Box::new(move |x| (-((x - center) / sigma).powi(2)).exp()),
        }
    }

    /// Smooth plateau: 1 on [a+edge, b−edge], C∞ down to 0 at a and b.
    /// Derivatives are O(1/edge)-controlled, the inert-weight stand-in.
    pub fn plateau(a: f64, b: f64, edge: f64) -> Self {
        assert!(b - a > 2.0 * edge);
        Weight {
            support: (a, b),
            f: Box::new(move |x| {
                smooth_step((x - a) / edge) * smooth_step((b - x) / edge)
            }),
        }
    }
}

/// C∞ monotone step: 0 at t ≤ 0, 1 at t ≥ 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Derivative-scale parameters in the convention of the two integral
/// lemmas: phase derivatives ≪ Y/Qˢᶜᵃˡᵉ^i, weight derivatives ≪ Z/U^j,
/// or the inert form H/Z^j on support of size Z.
#[derive(Debug, Clone, Copy, Default)]
pub struct DerivativeBounds {
    pub y_param: f64,
    pub q_scale: f64,
    pub h_param: f64,
    pub z_scale: f64,
}

/// A smooth real phase with analytic first and second derivatives.
pub struct PhaseSpec {
    pub phase: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub d1: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub d2: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub bounds: DerivativeBounds,
}

impl PhaseSpec {
    pub fn new(
        phase: impl Fn(f64) -> f64 + Sync + Send + 'static,
        d1: impl Fn(f64) -> f64 + Sync + Send + 'static,
        d2: impl Fn(f64) -> f64 + Sync + Send + 'static,
    ) -> Self {
        PhaseSpec {
            phase: Box::new(phase),
            d1: Box::new(d1),
            d2: Box::new(d2),
            bounds: DerivativeBounds::default(),
        }
    }

    pub fn with_bounds(mut self, bounds: DerivativeBounds) -> Self {
        self.bounds = bounds;
        self
    }

    /// Worst relative deviation of the derivative handles from central
    /// finite differences over `n` sample points of (a, b).
    pub fn validate(&self, a: f64, b: f64, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            let x = a + (b - a) * i as f64 / (n as f64 + 1.0);
            let h = (b - a) * 1e-5;
            let fd1 = ((self.phase)(x + h) - (self.phase)(x - h)) / (2.0 * h);
            let fd2 = ((self.d1)(x + h) - (self.d1)(x - h)) / (2.0 * h);
            let a1 = (self.d1)(x);
            let a2 = (self.d2)(x);
            let s1 = a1.abs().max(fd1.abs()).max(1e-12);
            let s2 = a2.abs().max(fd2.abs()).max(1e-12);
            worst = worst.max((a1 - fd1).abs() / s1).max((a2 - fd2).abs() / s2);
        }
        worst
    }
}

/// Outcome of an adaptive quadrature: value, error estimate, panel count.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub subdivisions: u32,
}

// 15-point Kronrod extension of 7-point Gauss, positive abscissae.
const K15_X: [f64; 8] = [
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
];
const K15_W: [f64; 8] = [
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.06309209262997855,
    0.02293532201052922,
];
// embedded 7-point Gauss weights, matching K15_X indices 0, 2, 4, 6
const G7_W: [f64; 4] = [
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
];

/// One Gauss-Kronrod pass over [a, b] for a complex integrand.
fn gk15<F: Fn(f64) -> Complex64>(a: f64, b: f64, f: &F) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = K15_W[0] * fc;
    let mut gauss = G7_W[0] * fc;
    for i in 1..8 {
        let dx = h * K15_X[i];
        let s = f(c - dx) + f(c + dx);
        kron += K15_W[i] * s;
        if i % 2 == 0 {
            gauss += G7_W[i / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).norm();
    (value, err)
}

struct PanelEntry {
    err: f64,
    seq: u64,
    a: f64,
    b: f64,
    value: Complex64,
}

impl PartialEq for PanelEntry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for PanelEntry {}
impl PartialOrd for PanelEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PanelEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap by error; ties broken by insertion order for determinism
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive oscillation-aware quadrature of ∫ w(y) e^{iϱ(y)} dy over
/// `interval` (intersected with the weight support). The initial partition
/// resolves the sampled phase speed; panels then split worst-first until
/// the summed error estimate is below `tol`.
pub fn integrate_osc(
    weight: &Weight,
    phase: &PhaseSpec,
    interval: (f64, f64),
    tol: f64,
) -> Result<QuadratureResult, OscIntError> {
    assert!(tol > 0.0);
    let a = interval.0.max(weight.support.0);
    let b = interval.1.min(weight.support.1);
    if !(b > a) {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let f = |y: f64| {
        let w = weight.eval(y);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        w * Complex64::from_polar(1.0, (phase.phase)(y))
    };
    // sample the phase speed to seed the partition at ≲ 3 cycles per panel
    let mut speed: f64 = 0.0;
    let probes = 33;
    for i in 0..=probes {
        let y = a + (b - a) * i as f64 / probes as f64;
        speed = speed.max((phase.d1)(y).abs());
    }
    let cycles = speed * (b - a) / TAU;
    let initial = ((cycles / 3.0).ceil() as usize).clamp(8, 1 << 16);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let push = |heap: &mut BinaryHeap<PanelEntry>,
                    seq: &mut u64,
                    total: &mut Complex64,
                    total_err: &mut f64,
                    lo: f64,
                    hi: f64| {
        let (v, e) = gk15(lo, hi, &f);
        *total += v;
        *total_err += e;
        heap.push(PanelEntry { err: e, seq: *seq, a: lo, b: hi, value: v });
        *seq += 1;
    };
    let h0 = (b - a) / initial as f64;
    for i in 0..initial {
        push(&mut heap, &mut seq, &mut total, &mut total_err, a + i as f64 * h0, a + (i + 1) as f64 * h0);
    }
    let max_panels: u64 = 1 << 21;
    while total_err > tol && seq < max_panels {
        let worst = heap.pop().expect("heap non-empty while error positive");
        if worst.err <= 0.0 {
            heap.push(worst);
            break;
        }
        total -= worst.value;
        total_err -= worst.err;
        let mid = 0.5 * (worst.a + worst.b);
        push(&mut heap, &mut seq, &mut total, &mut total_err, worst.a, mid);
        push(&mut heap, &mut seq, &mut total, &mut total_err, mid, worst.b);
    }
    // re-sum from panels in deterministic (interval) order to shed the
    // accumulation error of the add/remove loop
    let mut panels: Vec<PanelEntry> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    let err_estimate = panels.iter().map(|p| p.err).sum();
    if err_estimate > tol {
        return Err(OscIntError::QuadratureFailure { err: err_estimate, tol });
    }
    Ok(QuadratureResult { value, err_estimate, subdivisions: seq as u32 })
}

/// Parameters of the first-derivative-test bound.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeTestParams {
    pub a: f64,
    pub b: f64,
    pub z: f64,
    pub u: f64,
    pub y: f64,
    pub q_scale: f64,
    pub r: f64,
    pub a_exp: f64,
}

/// (b − a) · Z · (Y/(R²Q²) + 1/(RQ) + 1/(RU))^A.
pub fn derivative_test_bound(p: &DerivativeTestParams) -> f64 {
    let inner = p.y / (p.r * p.r * p.q_scale * p.q_scale)
        + 1.0 / (p.r * p.q_scale)
        + 1.0 / (p.r * p.u);
    (p.b - p.a) * p.z * inner.powf(p.a_exp)
}

/// Stationary point of a phase on [a, b] by safeguarded Newton: bisection
/// brackets a sign change of ϱ′, Newton refines, bisection catches strays.
pub fn find_stationary_point(phase: &PhaseSpec, a: f64, b: f64) -> Option<f64> {
    let n = 256;
    let d1 = |y: f64| (phase.d1)(y);
    let mut bracket = None;
    let mut prev = (a, d1(a));
    for i in 1..=n {
        let y = a + (b - a) * i as f64 / n as f64;
        let v = d1(y);
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0));
            break;
        }
        if prev.1.signum() != v.signum() {
            bracket = Some((prev.0, y));
            break;
        }
        prev = (y, v);
    }
    let (mut lo, mut hi) = bracket?;
    if lo == hi {
        return Some(lo);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let fx = d1(x);
        if fx == 0.0 {
            break;
        }
        let dfx = (phase.d2)(x);
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if d1(lo).signum() != d1(x).signum() {
            hi = x;
        } else {
            lo = x;
        }
        if (hi - lo).abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Some(x)
}

/// Leading stationary-phase term
/// √(2π/|ϱ″(y₀)|) · w(y₀) · e^{i(ϱ(y₀) + sgn(ϱ″(y₀))·π/4)}.
pub fn stationary_phase_main(weight: &Weight, phase: &PhaseSpec) -> Result<Complex64, OscIntError> {
    let (a, b) = weight.support;
    let y0 = find_stationary_point(phase, a, b).ok_or(OscIntError::NoStationaryPoint)?;
    let d2 = (phase.d2)(y0);
    if d2 == 0.0 {
        return Err(OscIntError::DegenerateSecondDerivative);
    }
    let amp = (TAU / d2.abs()).sqrt() * weight.eval(y0);
    let arg = (phase.phase)(y0) + d2.signum() * FRAC_PI_4;
    Ok(amp * Complex64::from_polar(1.0, arg))
}

/// Inputs of the cube-root stationary analysis, e(x)-convention phase
/// h(v) = η(NXy·v/(Q q p^λ) + 2(n₁²n₂Q)^{1/2}/((Xv)^{1/2} q p^λ)).
#[derive(Debug, Clone, Copy)]
pub struct VStationaryParams {
    pub n1: f64,
    pub n2: f64,
    pub n_scale: f64,
    pub y: f64,
    pub q_cutoff: f64,
    pub x_scale: f64,
    pub q: f64,
    pub p_lambda: f64,
    pub eta: f64,
}

/// Closed-form stationary data of the cube-root phase (cycles, not radians).
#[derive(Debug, Clone, Copy)]
pub struct VStationary {
    pub v0: f64,
    pub h_v0: f64,
    pub h2_v0: f64,
}

impl VStationaryParams {
    pub fn phase_at(&self, v: f64) -> f64 {
        self.eta
            * (self.n_scale * self.x_scale * self.y * v / (self.q_cutoff * self.q * self.p_lambda)
                + 2.0 * (self.n1 * self.n1 * self.n2 * self.q_cutoff).sqrt()
                    / ((self.x_scale * v).sqrt() * self.q * self.p_lambda))
    }

    pub fn dphase_at(&self, v: f64) -> f64 {
        self.eta
            * (self.n_scale * self.x_scale * self.y / (self.q_cutoff * self.q * self.p_lambda)
                - (self.n1 * self.n1 * self.n2 * self.q_cutoff).sqrt()
                    / (self.x_scale.sqrt() * self.q * self.p_lambda)
                    * v.powf(-1.5))
    }
}

/// v₀ = (n₁²n₂)^{1/3} Q / (X (Ny)^{2/3}), h(v₀) = η·3(n₁²n₂Ny)^{1/3}/(q p^λ),
/// h″(v₀) = (3η/2v₀²)·(n₁²n₂Ny)^{1/3}/(q p^λ). Errors when v₀ leaves the
/// 1-inert window [1/2, 5/2].
pub fn v_stationary(p: &VStationaryParams) -> Result<VStationary, OscIntError> {
    let n123 = (p.n1 * p.n1 * p.n2).cbrt();
    let v0 = n123 * p.q_cutoff / (p.x_scale * (p.n_scale * p.y).powf(2.0 / 3.0));
    if !(0.5..=2.5).contains(&v0) {
        return Err(OscIntError::OutOfWindow(v0));
    }
    let root3 = (p.n1 * p.n1 * p.n2 * p.n_scale * p.y).cbrt();
    let h_v0 = p.eta * 3.0 * root3 / (p.q * p.p_lambda);
    let h2_v0 = 1.5 * p.eta * root3 / (v0 * v0 * p.q * p.p_lambda);
    Ok(VStationary { v0, h_v0, h2_v0 })
}

/// Terms of the perturbed logarithmic stationary expansion for the phase
/// g(y) = −(t/2π) log y + |D| y + 3C(uy)^{1/3} (cycles). The sign of D is
/// folded: the dual-sum variable that produces D < 0 contributes through
/// |D|, which is the positive-form reading of the stationary point.
#[derive(Debug, Clone, Copy)]
pub struct YStationarySeries {
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Series data for g′(y) = 0: y₀ = t/(2π|D|), y₁ = −2πCu^{1/3}y₀^{4/3}/t,
/// y₂ = 4π²C²u^{2/3}y₀^{5/3}/(3t²), g₁ = 3y₀^{1/3}, g₂ = −π·y₀^{2/3}/t.
pub fn y_stationary_series(
    c: f64,
    d: f64,
    t: f64,
    u: f64,
) -> Result<YStationarySeries, OscIntError> {
    if d >= 0.0 {
        return Err(OscIntError::RegimeViolation(format!(
            "dual linear coefficient must be negative, got {d}"
        )));
    }
    if !(t > 0.0) {
        return Err(OscIntError::RegimeViolation("t must be positive".into()));
    }
    if c.abs() > t.powf(0.9) {
        return Err(OscIntError::RegimeViolation(format!(
            "|C| = {} above the perturbative window t^0.9 = {}",
            c.abs(),
            t.powf(0.9)
        )));
    }
    let y0 = t / (TAU * d.abs());
    if !(0.05..=20.0).contains(&y0) {
        return Err(OscIntError::RegimeViolation(format!(
            "y0 = {y0} far from the unit window; |D| must be comparable to t"
        )));
    }
    let u3 = u.cbrt();
    let y1 = -TAU * c * u3 * y0.powf(4.0 / 3.0) / t;
    let y2 = 4.0 * PI * PI * c * c * u3 * u3 * y0.powf(5.0 / 3.0) / (3.0 * t * t);
    Ok(YStationarySeries {
        y0,
        y1,
        y2,
        g1: 3.0 * y0.cbrt(),
        g2: -PI * y0.powf(2.0 / 3.0) / t,
    })
}

/// The perturbed logarithmic phase itself (cycles) and its derivatives.
pub fn y_phase(c: f64, d_abs: f64, t: f64, u: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let u3 = u.cbrt();
    (
        move |y: f64| -(t / TAU) * y.ln() + d_abs * y + 3.0 * c * u3 * y.cbrt(),
        move |y: f64| -(t / TAU) / y + d_abs + c * u3 * y.powf(-2.0 / 3.0),
        move |y: f64| (t / TAU) / (y * y) - (2.0 / 3.0) * c * u3 * y.powf(-5.0 / 3.0),
    )
}

/// Newton root of g′(y) = 0 seeded at the series value.
pub fn y_stationary_newton(c: f64, d: f64, t: f64, u: f64) -> Result<f64, OscIntError> {
    let series = y_stationary_series(c, d, t, u)?;
    let (_, g1, g2) = y_phase(c, d.abs(), t, u);
    let mut y = series.y0 + series.y1 + series.y2;
    for _ in 0..60 {
        let f = g1(y);
        let df = g2(y);
        if df == 0.0 {
            return Err(OscIntError::DegenerateSecondDerivative);
        }
        let next = y - f / df;
        if !next.is_finite() || next <= 0.0 {
            return Err(OscIntError::RegimeViolation("newton left the domain".into()));
        }
        if (next - y).abs() < 1e-16 * (1.0 + y.abs()) {
            return Ok(next);
        }
        y = next;
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// Filon-Legendre machinery for the dual-frequency u-integrals
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Spherical Bessel values j_0(x) .. j_kmax(x), stable in both regimes.
pub fn spherical_bessel(kmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = vec![0.0; kmax + 1];
    if ax < 1e-10 {
        // series heads: j_k(x) ≈ x^k / (2k+1)!!
        let mut dfact = 1.0;
        let mut xp = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            dfact *= (2 * k + 1) as f64;
            *slot = xp / dfact;
            xp *= x;
        }
        return out;
    }
    let j0 = x.sin() / x;
    if kmax == 0 {
        out[0] = j0;
        return out;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if ax > 1.2 * kmax as f64 + 12.0 {
        // upward recurrence is stable above the turning point
        out[0] = j0;
        out[1] = j1;
        for k in 1..kmax {
            out[k + 1] = (2 * k + 1) as f64 / x * out[k] - out[k - 1];
        }
        return out;
    }
    // downward (Miller) recurrence with normalization against j0
    let start = kmax + 16 + (1.5 * ax) as usize;
    let mut jp = 0.0f64;
    let mut j = 1e-300f64;
    for k in (0..start).rev() {
        let jm = (2 * k + 3) as f64 / x * j - jp;
        jp = j;
        j = jm;
        if k <= kmax {
            out[k] = j;
        }
        if j.abs() > 1e280 {
            let scale = 1e-280;
            j *= scale;
            jp *= scale;
            for slot in out.iter_mut() {
                *slot *= scale;
            }
        }
    }
    let norm = j0 / out[0];
    for slot in out.iter_mut() {
        *slot *= norm;
    }
    out
}

struct FilonPanel {
    center: f64,
    half: f64,
    coeffs: Vec<Complex64>,
}

/// Panelized Legendre expansion of a smooth complex function on [a, b];
/// oscillatory moments against e^{iΩu} come from spherical Bessel values,
/// so one grid serves every frequency.
pub struct FilonGrid {
    panels: Vec<FilonPanel>,
    kmax: usize,
}

impl FilonGrid {
    pub fn build<F: FnMut(f64) -> Complex64>(
        a: f64,
        b: f64,
        n_panels: usize,
        n_nodes: usize,
        mut f: F,
    ) -> Self {
        let kmax = n_nodes.saturating_sub(4);
        let (nodes, weights) = gauss_legendre(n_nodes);
        // Legendre values at the quadrature nodes
        let mut pk = vec![vec![0.0; n_nodes]; kmax + 1];
        for (j, &x) in nodes.iter().enumerate() {
            let (mut p0, mut p1) = (1.0, x);
            pk[0][j] = 1.0;
            if kmax >= 1 {
                pk[1][j] = x;
            }
            for k in 2..=kmax {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
                pk[k][j] = p2;
            }
        }
        let h = (b - a) / n_panels as f64;
        let mut panels = Vec::with_capacity(n_panels);
        for ip in 0..n_panels {
            let lo = a + ip as f64 * h;
            let center = lo + 0.5 * h;
            let half = 0.5 * h;
            let values: Vec<Complex64> =
                nodes.iter().map(|&x| f(center + half * x)).collect::<Vec<_>>();
            let coeffs: Vec<Complex64> = (0..=kmax)
                .map(|k| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n_nodes {
                        acc += weights[j] * values[j] * pk[k][j];
                    }
                    acc * ((2 * k + 1) as f64 / 2.0)
                })
                .collect();
            panels.push(FilonPanel { center, half, coeffs });
        }
        FilonGrid { panels, kmax }
    }

    /// ∫ f(u) e^{iΩu} du with Ω in radians per unit u.
    pub fn integral(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for panel in &self.panels {
            let theta = omega * panel.half;
            let bessel = spherical_bessel(self.kmax, theta);
            let rot = Complex64::from_polar(1.0, omega * panel.center);
            let mut inner = Complex64::new(0.0, 0.0);
            let mut ik = Complex64::new(1.0, 0.0); // i^k
            for k in 0..=self.kmax {
                inner += panel.coeffs[k] * (2.0 * bessel[k]) * ik;
                ik *= Complex64::new(0.0, 1.0);
            }
            acc += rot * inner * panel.half;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// The paired-integral transforms over the dual variable
// ---------------------------------------------------------------------------

/// Phase data of one inner y-integral in cycles:
/// g_u(y) = −(t/2π) log y + d·y + 3c(uy)^{1/3}.
#[derive(Debug, Clone, Copy)]
pub struct JPhase {
    pub t: f64,
    pub c: f64,
    pub d: f64,
}

impl JPhase {
    /// The inner integral 𝒥(u) over the fixed unit window.
    pub fn eval(&self, u: f64, weight: &Weight, tol: f64) -> Result<Complex64, OscIntError> {
        let (t, c, d) = (self.t, self.c, self.d);
        let u3 = u.cbrt();
        let spec = PhaseSpec::new(
            move |y: f64| TAU * (-(t / TAU) * y.ln() + d * y + 3.0 * c * u3 * y.cbrt()),
            move |y: f64| TAU * (-(t / TAU) / y + d + c * u3 * y.powf(-2.0 / 3.0)),
            move |y: f64| TAU * ((t / TAU) / (y * y) - (2.0 / 3.0) * c * u3 * y.powf(-5.0 / 3.0)),
        );
        Ok(integrate_osc(weight, &spec, weight.support, tol)?.value)
    }
}

pub enum HKind {
    /// Paired oscillatory inner integrals against e(−ω n₂ u).
    Oscillatory,
    /// A single smooth window against e(−ω n₂ u).
    Flat,
}

/// Dual-frequency transform evaluator: the u-grid is built once, then each
/// frequency n₂ is a moment read-out.
pub struct HEvaluator {
    grid: FilonGrid,
    /// cycles of e(−ω·n₂·u) per unit u and unit n₂
    pub omega: f64,
}

impl HEvaluator {
    /// Oscillatory kind: G(u) = W(u)·𝒥(u)·conj(𝒥′(u)).
    pub fn new_oscillatory(
        j: JPhase,
        jp: JPhase,
        omega: f64,
        inner_tol: f64,
    ) -> Result<Self, OscIntError> {
        let u_window = Weight::plateau(2.0 / 3.0, 3.0, 0.25);
        let y_window = Weight::plateau(1.0, 2.0, 0.2);
        // resolve the residual u-oscillation of the phase difference
        let delta_phase = ((j.c - jp.c).abs() * 3.0 + (j.c.abs() + jp.c.abs()) * 0.1 + 4.0)
            .min(j.c.abs() * 6.0 + 8.0);
        let n_panels = (delta_phase.ceil() as usize).clamp(12, 640);
        let mut failure = None;
        let grid = FilonGrid::build(2.0 / 3.0, 3.0, n_panels, 24, |u| {
            let w = u_window.eval(u);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let a = j.eval(u, &y_window, inner_tol);
            let b = jp.eval(u, &y_window, inner_tol);
            match (a, b) {
                (Ok(x), Ok(y)) => w * x * y.conj(),
                _ => {
                    failure = Some(OscIntError::QuadratureFailure { err: f64::NAN, tol: inner_tol });
                    Complex64::new(0.0, 0.0)
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(HEvaluator { grid, omega })
    }

    /// Flat kind: G(u) = Φ(u) alone.
    pub fn new_flat(omega: f64) -> Self {
        let window = Weight::plateau(2.0 / 3.0, 3.0, 0.25);
        let grid = FilonGrid::build(2.0 / 3.0, 3.0, 24, 24, |u| {
            Complex64::new(window.eval(u), 0.0)
        });
        HEvaluator { grid, omega }
    }

    /// ℋ(n₂) = ∫ G(u) e(−ω n₂ u) du.
    pub fn eval(&self, n2: f64) -> Complex64 {
        self.grid.integral(-TAU * self.omega * n2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_fresnel_closed_form() {
        // ∫ e^{-y²} e^{iy²} dy = √(π/(1−i))
        let w = Weight::gaussian(0.0, 1.0);
        let spec = PhaseSpec::new(|y| y * y, |y| 2.0 * y, |_| 2.0);
        let r = integrate_osc(&w, &spec, (-9.0, 9.0), 1e-12).unwrap();
        let expect = (Complex64::new(PI, 0.0) / Complex64::new(1.0, -1.0)).sqrt();
        assert!((r.value - expect).norm() < 1e-10, "{} vs {}", r.value, expect);
        assert!(r.err_estimate <= 1e-12);
    }

    #[test]
    fn nonstationary_bump_decays() {
        // 50 cycles across the window, e(x)-convention
        let w = Weight::bump(1.0, 2.0);
        let spec = PhaseSpec::new(|y| TAU * 50.0 * y, |_| TAU * 50.0, |_| 0.0);
        let r = integrate_osc(&w, &spec, (1.0, 2.0), 1e-12).unwrap();
        assert!(r.value.norm() < 1e-6, "|I| = {}", r.value.norm());
    }

    #[test]
    fn stationary_phase_validates_against_quadrature() {
        let w = Weight::bump(1.0, 2.0);
        let h = 200.0;
        let spec = PhaseSpec::new(
            move |y| h * (y - 1.5) * (y - 1.5),
            move |y| 2.0 * h * (y - 1.5),
            move |_| 2.0 * h,
        );
        let main = stationary_phase_main(&w, &spec).unwrap();
        let quad = integrate_osc(&w, &spec, (1.0, 2.0), 1e-12).unwrap().value;
        assert!((main - quad).norm() / quad.norm() < 0.02);
        // the closed form at a pure quadratic: √(π/H) e^{iπ/4} w(y0)
        let expect = (PI / h).sqrt() * Complex64::from_polar(1.0, FRAC_PI_4) * w.eval(1.5);
        assert!((main - expect).norm() < 1e-12);
    }

    #[test]
    fn stationary_point_refused_when_absent() {
        let w = Weight::bump(1.0, 2.0);
        let spec = PhaseSpec::new(|y| 30.0 * y, |_| 30.0, |_| 0.0);
        assert!(matches!(
            stationary_phase_main(&w, &spec),
            Err(OscIntError::NoStationaryPoint)
        ));
    }

    #[test]
    fn derivative_test_bound_formula() {
        let p = DerivativeTestParams {
            a: 0.0,
            b: 1.0,
            z: 1.0,
            u: 1.0,
            y: 1.0,
            q_scale: 1.0,
            r: 1.0,
            a_exp: 3.0,
        };
        assert!((derivative_test_bound(&p) - 27.0).abs() < 1e-12); // (1+1+1)^3
        let p0 = DerivativeTestParams { a_exp: 0.0, ..p };
        assert!((derivative_test_bound(&p0) - 1.0).abs() < 1e-12);
        // Y = R²Q², RQ = RU = 1 gives (b−a)Z·3^A
        let p3 = DerivativeTestParams { y: 1.0, a_exp: 2.0, ..p };
        assert!((derivative_test_bound(&p3) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn v_stationary_closed_forms() {
        // tune X so that v0 = 1 exactly
        let n1 = 2.0f64;
        let n2 = 50.0f64;
        let n = 1e5f64;
        let y = 1.3f64;
        let q_cut = 40.0f64;
        let x = (n1 * n1 * n2).cbrt() * q_cut / (n * y).powf(2.0 / 3.0);
        let p = VStationaryParams {
            n1,
            n2,
            n_scale: n,
            y,
            q_cutoff: q_cut,
            x_scale: x,
            q: 3.0,
            p_lambda: 9.0,
            eta: 1.0,
        };
        let s = v_stationary(&p).unwrap();
        assert!((s.v0 - 1.0).abs() < 1e-12);
        let expect_h = 3.0 * (n1 * n1 * n2 * n * y).cbrt() / (3.0 * 9.0);
        assert!((s.h_v0 - expect_h).abs() < 1e-9 * expect_h.abs());
        // h′(v0) = 0 against the analytic derivative
        assert!(p.dphase_at(s.v0).abs() < 1e-10 * p.dphase_at(2.5).abs().max(1.0));
        // out-of-window flags
        let bad = VStationaryParams { x_scale: x * 10.0, ..p };
        assert!(matches!(v_stationary(&bad), Err(OscIntError::OutOfWindow(_))));
    }

    #[test]
    fn y_series_against_newton() {
        let t = 1e6;
        let c = 1e3;
        let u = 1.0;
        let d = -t / (TAU * 1.4); // y0 = 1.4
        let s = y_stationary_series(c, d, t, u).unwrap();
        let root = y_stationary_newton(c, d, t, u).unwrap();
        assert!((s.y0 + s.y1 + s.y2 - root).abs() <= 10.0 * (c / t).powi(3));
        // C = 0: no perturbation
        let s0 = y_stationary_series(0.0, d, t, u).unwrap();
        assert_eq!(s0.y1, 0.0);
        assert_eq!(s0.y2, 0.0);
        assert!((y_stationary_newton(0.0, d, t, u).unwrap() - s0.y0).abs() < 1e-12);
        // sign check: y1/y0 carries −sgn(C)
        assert!(s.y1 / s.y0 < 0.0);
        let sneg = y_stationary_series(-c, d, t, u).unwrap();
        assert!(sneg.y1 / sneg.y0 > 0.0);
    }

    #[test]
    fn y_series_phase_value() {
        let t = 1e6;
        let c = 1e3;
        let u = 1.0;
        let d = -t / (TAU * 1.4);
        let s = y_stationary_series(c, d, t, u).unwrap();
        let root = y_stationary_newton(c, d, t, u).unwrap();
        let (g, _, _) = y_phase(c, d.abs(), t, u);
        let predicted = -(t / TAU) * s.y0.ln()
            + d.abs() * s.y0
            + s.g1 * c * u.cbrt()
            + s.g2 * c * c * u.cbrt() * u.cbrt();
        assert!(
            (g(root) - predicted).abs() <= 10.0 * c.abs().powi(3) / (t * t),
            "residual {}",
            (g(root) - predicted).abs()
        );
    }

    #[test]
    fn phase_spec_validation() {
        let spec = PhaseSpec::new(|y: f64| y.powi(3), |y| 3.0 * y * y, |y| 6.0 * y);
        assert!(spec.validate(1.0, 2.0, 16) < 1e-6);
    }

    #[test]
    fn filon_matches_direct_quadrature() {
        // smooth f against a fast exponential: Filon grid vs adaptive GK
        let f = |u: f64| Complex64::new((-(u - 1.5) * (u - 1.5) * 4.0).exp(), 0.3 * u);
        let grid = FilonGrid::build(1.0, 2.0, 8, 24, f);
        for omega in [0.0, 3.0, 57.0, 411.0] {
            let w = Weight::plateau(0.9, 2.1, 0.05);
            let spec = PhaseSpec::new(move |u| omega * u, move |_| omega, |_| 0.0);
            let re = integrate_osc(
                &Weight {
                    support: (1.0, 2.0),
                    f: Box::new(move |u| (-(u - 1.5f64) * (u - 1.5) * 4.0).exp()),
                },
                &spec,
                (1.0, 2.0),
                1e-12,
            )
            .unwrap()
            .value;
            let im = integrate_osc(
                &Weight { support: (1.0, 2.0), f: Box::new(move |u| 0.3 * u) },
                &spec,
                (1.0, 2.0),
                1e-12,
            )
            .unwrap()
            .value;
            let direct = re + Complex64::new(0.0, 1.0) * im;
            let filon = grid.integral(omega);
            assert!((filon - direct).norm() < 1e-9, "omega={omega}: {filon} vs {direct}");
            let _ = w;
        }
    }

    #[test]
    fn spherical_bessel_sanity() {
        let j = spherical_bessel(6, 0.5);
        assert!((j[0] - 0.5f64.sin() / 0.5).abs() < 1e-14);
        // j1 at small x ≈ x/3
        let js = spherical_bessel(3, 1e-12);
        assert!((js[1] - 1e-12 / 3.0).abs() < 1e-24);
        // both recurrence paths agree at the same argument: kmax = 8 takes
        // the upward branch at x = 30, kmax = 40 forces Miller
        let up = spherical_bessel(8, 30.0);
        let down = spherical_bessel(40, 30.0);
        for k in 0..=8 {
            assert!(
                (up[k] - down[k]).abs() < 1e-12 * (1.0 + up[k].abs()),
                "k={k}: {} vs {}",
                up[k],
                down[k]
            );
        }
    }

    #[test]
    fn flat_h_transform_decays() {
        let ev = HEvaluator::new_flat(1.0);
        let near = ev.eval(0.5).norm();
        let far = ev.eval(400.0).norm();
        assert!(near > 1e-3);
        assert!(far < 1e-8, "far = {far:.3e}");
    }
}
