//! The degree-three Mellin-Barnes transform Ψ± on a vertical contour,
//! evaluated in high precision.
//!
//! Ψ±(z) = (1/2πi) ∫_(σ) x^{-s} γ±(s) ψ̃(-s) ds with γ± = γ₀ ∓ iγ₁ and
//! ψ(y) = W(y/N) e(c·y/N) on y ≍ N. Folding N into the argument turns every
//! occurrence of x^{-s}·N^{-s} into (zN)^{-s}, so evaluation is organized
//! around zN.
//!
//! The gamma pair on the contour depends only on the spectral parameters
//! and σ, so it is computed once on a fixed uniform τ-grid
//! ([`GammaGrid`]) and shared by every weight. A weight then contributes
//! the Mellin factor ψ̃₁(-s) = ∫ W(u) e(cu) u^{-s-1} du through Gauss
//! panels with per-node phase recurrences ([`PsiTable`]). Truncation walks
//! outward until the integrand envelope drops below the tail budget.

use super::hp::{to_f64, unit_phase, Ctx, HComplex};
use super::{gauss_legendre, OscIntError, Weight};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Archimedean spectral parameters (μ₁, μ₂, μ₃), sum zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanglandsParams {
    pub mu: [Complex64; 3],
}

impl LanglandsParams {
    pub fn new(mu: [Complex64; 3]) -> Result<Self, OscIntError> {
        let sum = mu[0] + mu[1] + mu[2];
        if sum.norm() > 1e-12 {
            return Err(OscIntError::RegimeViolation(format!(
                "spectral parameters must sum to zero, got {sum}"
            )));
        }
        Ok(Self { mu })
    }

    /// Dual form parameters (−μ₃, −μ₂, −μ₁).
    pub fn dual(&self) -> Self {
        Self { mu: [-self.mu[2], -self.mu[1], -self.mu[0]] }
    }

    /// A generic tempered test triple.
    pub fn generic() -> Self {
        Self::new([
            Complex64::new(0.0, 3.5),
            Complex64::new(0.0, -1.2),
            Complex64::new(0.0, -2.3),
        ])
        .expect("sums to zero")
    }

    /// Pole line: the contour must satisfy σ > max_j(−1 − Re μ_j).
    pub fn sigma_limit(&self) -> f64 {
        self.mu.iter().map(|m| -1.0 - m.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn default_sigma(&self) -> f64 {
        self.sigma_limit() + 0.6
    }
}

const GRID_H: f64 = 0.03;
const BLOCK: usize = 512;
/// Argument shift making the Stirling series valid near the real axis.
const SHIFT: u32 = 44;
const SHIFT_FREE_IM: f64 = 43.0;

/// One gamma-ratio argument walked along the contour.
struct ArgWalker {
    /// dz/dτ = i·dir with dir = ±1/2.
    dir: f64,
    /// +1 for numerator gammas, −1 for denominators.
    sign: f64,
    /// Unshifted argument at the current node.
    z: HComplex,
    /// Shift in effect for the current block.
    shift: u32,
    /// ln(z + shift) maintained incrementally inside a block.
    ln_base: HComplex,
}

impl ArgWalker {
    fn start(ctx: &Ctx, z0: HComplex, dir: f64, sign: f64) -> Self {
        ArgWalker { dir, sign, z: z0, shift: 0, ln_base: HComplex::zero(ctx) }
    }

    fn begin_block(&mut self, ctx: &Ctx, block_needs_shift: bool) {
        self.shift = if block_needs_shift { SHIFT } else { 0 };
        let base = self.shifted(ctx);
        self.ln_base = base.ln(ctx);
    }

    fn shifted(&self, ctx: &Ctx) -> HComplex {
        if self.shift == 0 {
            self.z.clone()
        } else {
            self.z.add(&HComplex::from_f64(self.shift as f64, 0.0, ctx), ctx)
        }
    }

    fn step(&mut self, ctx: &Ctx, h: f64) {
        let d = HComplex::from_f64(0.0, self.dir * h, ctx);
        let base = self.shifted(ctx);
        self.ln_base = ctx.ln_increment(&base, &self.ln_base, &d);
        self.z = self.z.add(&d, ctx);
    }

    /// Stirling series value at the shifted argument (branch-free use only:
    /// the result is exponentiated downstream).
    fn stirling(&self, ctx: &Ctx) -> HComplex {
        let zm = self.shifted(ctx);
        let half = HComplex::from_f64(0.5, 0.0, ctx);
        let mut acc = zm.sub(&half, ctx).mul(&self.ln_base, ctx).sub(&zm, ctx);
        acc.re = ctx.add(&acc.re, &ctx.half_ln_two_pi());
        let inv = HComplex::from_f64(1.0, 0.0, ctx).div(&zm, ctx);
        let inv2 = inv.mul(&inv, ctx);
        let mut zpow = inv.clone();
        let n_terms = stirling_terms(zm.to_c64().norm());
        for c in ctx.stirling_coeffs(n_terms) {
            acc = acc.add(&zpow.scale(c, ctx), ctx);
            zpow = zpow.mul(&inv2, ctx);
        }
        acc
    }

    /// Π_{k < shift} (z + k), the rational correction for the shift.
    fn correction(&self, ctx: &Ctx) -> Option<HComplex> {
        if self.shift == 0 {
            return None;
        }
        let mut prod = self.z.clone();
        let mut zk = self.z.clone();
        let one = HComplex::from_f64(1.0, 0.0, ctx);
        for _ in 1..self.shift {
            zk = zk.add(&one, ctx);
            prod = prod.mul(&zk, ctx);
        }
        Some(prod)
    }
}

fn stirling_terms(abs_z: f64) -> usize {
    match abs_z {
        x if x >= 400.0 => 11,
        x if x >= 250.0 => 12,
        x if x >= 150.0 => 15,
        x if x >= 100.0 => 17,
        x if x >= 60.0 => 22,
        _ => 30,
    }
}

/// γ₀ and γ₁ sampled on the uniform contour grid τ = (i − n)·h,
/// i = 0..2n. Weight-independent, so built once per (μ, σ, precision).
pub struct GammaGrid {
    pub params: LanglandsParams,
    pub sigma: f64,
    pub h: f64,
    pub n_half: usize,
    pub g0: Vec<HComplex>,
    pub g1: Vec<HComplex>,
}

impl GammaGrid {
    pub fn tau(&self, i: usize) -> f64 {
        (i as f64 - self.n_half as f64) * self.h
    }

    /// Build the grid over |τ| ≤ tau_max.
    pub fn build(
        ctx: &Ctx,
        params: &LanglandsParams,
        sigma: f64,
        tau_max: f64,
    ) -> Result<Self, OscIntError> {
        let limit = params.sigma_limit();
        if sigma <= limit {
            return Err(OscIntError::ContourViolation { sigma, limit });
        }
        let h = GRID_H;
        let n_half = (tau_max / h).ceil() as usize;
        let total = 2 * n_half + 1;
        // twelve walkers: (ℓ, j, side): numerator (1+s+μ_j+ℓ)/2 rising with
        // τ at rate i/2, denominator (−s−μ_j+ℓ)/2 falling at −i/2
        use rayon::prelude::*;
        let blocks: Vec<(usize, usize)> = (0..total)
            .step_by(BLOCK)
            .map(|i| (i, (i + BLOCK).min(total)))
            .collect();
        let mu = params.mu;
        let prec = ctx.prec;
        let chunks: Vec<(usize, Vec<HComplex>, Vec<HComplex>)> = blocks
            .par_iter()
            .map_init(
                || Ctx::new(prec),
                |ctx, &(i0, i1)| {
                    let tau_start = (i0 as f64 - n_half as f64) * h;
                    let mut walkers: Vec<(usize, ArgWalker)> = Vec::new();
                    for ell in 0..2usize {
                        for j in 0..3 {
                            let num0 = HComplex::from_f64(
                                (1.0 + sigma + mu[j].re + ell as f64) / 2.0,
                                (tau_start + mu[j].im) / 2.0,
                                ctx,
                            );
                            let den0 = HComplex::from_f64(
                                (-sigma - mu[j].re + ell as f64) / 2.0,
                                (-tau_start - mu[j].im) / 2.0,
                                ctx,
                            );
                            walkers.push((ell, ArgWalker::start(ctx, num0, 0.5, 1.0)));
                            walkers.push((ell, ArgWalker::start(ctx, den0, -0.5, -1.0)));
                        }
                    }
                    let ln_pi = ctx.ln_pi();
                    let pref_mod = ctx.mul(
                        &ctx.big(0.5),
                        &ctx.exp(&ctx.mul(&ctx.big(-3.0 * (sigma + 0.5)), &ln_pi)),
                    );
                    let step_phase = unit_phase(&ctx.mul(&ctx.big(-3.0 * h), &ln_pi), ctx);
                    let mut pi_phase =
                        unit_phase(&ctx.mul(&ctx.big(-3.0 * tau_start), &ln_pi), ctx);
                    for (_, w) in walkers.iter_mut() {
                        let im_now = to_f64(&w.z.im).abs();
                        let im_end =
                            (to_f64(&w.z.im) + w.dir * (i1 - i0) as f64 * h).abs();
                        let needs = im_now.min(im_end) < SHIFT_FREE_IM;
                        w.begin_block(ctx, needs);
                    }
                    let mut g0 = Vec::with_capacity(i1 - i0);
                    let mut g1 = Vec::with_capacity(i1 - i0);
                    for _ in i0..i1 {
                        let mut exponent = [HComplex::zero(ctx), HComplex::zero(ctx)];
                        let mut corr_num = [None::<HComplex>, None::<HComplex>];
                        let mut corr_den = [None::<HComplex>, None::<HComplex>];
                        for (ell, w) in walkers.iter() {
                            let st = w.stirling(ctx);
                            exponent[*ell] = if w.sign > 0.0 {
                                exponent[*ell].add(&st, ctx)
                            } else {
                                exponent[*ell].sub(&st, ctx)
                            };
                            if let Some(c) = w.correction(ctx) {
                                let slot = if w.sign > 0.0 {
                                    &mut corr_num[*ell]
                                } else {
                                    &mut corr_den[*ell]
                                };
                                *slot = Some(match slot.take() {
                                    None => c,
                                    Some(prev) => prev.mul(&c, ctx),
                                });
                            }
                        }
                        for ell in 0..2 {
                            let mut val = exponent[ell].exp(ctx);
                            if let Some(cd) = &corr_den[ell] {
                                val = val.mul(cd, ctx);
                            }
                            if let Some(cn) = &corr_num[ell] {
                                val = val.div(cn, ctx);
                            }
                            val = val.mul(&pi_phase, ctx).scale(&pref_mod, ctx);
                            if ell == 0 {
                                g0.push(val);
                            } else {
                                g1.push(val);
                            }
                        }
                        for (_, w) in walkers.iter_mut() {
                            w.step(ctx, h);
                        }
                        pi_phase = pi_phase.mul(&step_phase, ctx);
                    }
                    (i0, g0, g1)
                },
            )
            .collect();
        let mut g0 = Vec::with_capacity(total);
        let mut g1 = Vec::with_capacity(total);
        let mut sorted = chunks;
        sorted.sort_by_key(|c| c.0);
        for (_, b0, b1) in sorted {
            g0.extend(b0);
            g1.extend(b1);
        }
        Ok(GammaGrid { params: *params, sigma, h, n_half, g0, g1 })
    }
}

/// The weight data of ψ: a smooth unit window times e(c·u) on u ∈ [1, 2].
#[derive(Debug, Clone, Copy)]
pub struct PsiWeight {
    /// Cycles of the modulation across the unit window; sign matters.
    pub c_turns: f64,
}

/// Per-weight contour table: the products γ_ℓ(σ+iτ)·ψ̃₁(−σ−iτ) on the
/// subsampled grid, with the truncation chosen by an outward tail scan.
pub struct PsiTable {
    sigma: f64,
    h_eff: f64,
    /// Node τ values, ascending.
    pub taus: Vec<f64>,
    prod0: Vec<HComplex>,
    prod1: Vec<HComplex>,
    /// Envelope Σ|γ ψ̃| h of the last scanned blocks, the truncation tail.
    pub tail_envelope: f64,
}

/// Shared evaluation context: one gamma grid per (μ, σ), reusable across
/// weights and test points.
pub struct PsiSolver {
    pub ctx: Ctx,
    pub grid: GammaGrid,
}

impl PsiSolver {
    pub fn new(prec: usize, params: &LanglandsParams, sigma: f64, tau_max: f64) -> Result<Self, OscIntError> {
        let ctx = Ctx::new(prec);
        let grid = GammaGrid::build(&ctx, params, sigma, tau_max)?;
        Ok(PsiSolver { ctx, grid })
    }

    /// Build the per-weight table. `max_abs_ln_zn` bounds |ln(zN)| of the
    /// later evaluations (it sets the subsampling); `tail_tol` is the
    /// truncation budget on the normalized integrand.
    pub fn table(
        &self,
        weight: &PsiWeight,
        max_abs_ln_zn: f64,
        tail_tol: f64,
    ) -> Result<PsiTable, OscIntError> {
        let ctx = &self.ctx;
        let grid = &self.grid;
        let sigma = grid.sigma;
        let tau_max = grid.n_half as f64 * grid.h;
        // phase speed bound on the integrand in τ
        let speed = max_abs_ln_zn
            + 3.0 * (tau_max / 2.0).max(std::f64::consts::E).ln()
            + 3.0 * std::f64::consts::PI.ln()
            + 1.5;
        let stride = ((TAU / (6.0 * speed)) / grid.h).floor().max(1.0) as usize;
        let h_eff = stride as f64 * grid.h;

        // Mellin factor nodes: Gauss panels over u ∈ [1, 2] sized for the
        // modulation plus the largest u-frequency the grid can reach. The
        // factor is a smooth one-dimensional Fourier-type integral with no
        // cancellation pathology, so it runs in f64 and is lifted into the
        // high-precision contour sum afterwards.
        let turns_budget = weight.c_turns.abs() + tau_max * std::f64::consts::LN_2 / TAU + 6.0;
        let panels = ((turns_budget / 5.0).ceil() as usize).max(3);
        let nodes_per_panel = 32;
        let window = Weight::plateau(1.0, 2.0, 0.35);
        let (gl_nodes, gl_weights) = gauss_legendre(nodes_per_panel);
        let mut u_vals: Vec<f64> = Vec::new();
        let mut v_vals: Vec<Complex64> = Vec::new();
        for ip in 0..panels {
            let lo = 1.0 + ip as f64 / panels as f64;
            let half = 0.5 / panels as f64;
            let center = lo + half;
            for (x, w) in gl_nodes.iter().zip(gl_weights.iter()) {
                let u = center + half * x;
                let wval = window.eval(u);
                if wval == 0.0 {
                    continue;
                }
                // W(u)·e(c u)·u^{−σ−1}, scaled by the quadrature weight
                let v = Complex64::from_polar(1.0, TAU * weight.c_turns * u)
                    * (wval * u.powf(-sigma - 1.0) * w * half);
                u_vals.push(u);
                v_vals.push(v);
            }
        }
        let ln_u: Vec<f64> = u_vals.iter().map(|&u| u.ln()).collect();

        // outward scan from the center, two sides, stopping when a block's
        // envelope drops under the tail budget
        let scan_side = |dir: i64| -> (Vec<(f64, HComplex, HComplex)>, f64, bool) {
            let mut out = Vec::new();
            let block_nodes = 192usize;
            let mut idx: i64 = if dir > 0 { 0 } else { -(stride as i64) };
            let mut tail_env = 0.0f64;
            let mut quiet_blocks = 0;
            let mut done = false;
            let mut peak_env = 0.0f64;
            'outer: loop {
                let mut block_env = 0.0f64;
                let budget = tail_tol * peak_env.max(1.0);
                for _ in 0..block_nodes {
                    let gi = idx + grid.n_half as i64;
                    if gi < 0 || gi as usize >= grid.g0.len() {
                        // grid end: accept when the trailing envelope is
                        // already below budget
                        if block_env < budget && quiet_blocks >= 1 {
                            tail_env = block_env.max(tail_env);
                            done = true;
                        }
                        break 'outer;
                    }
                    let tau = idx as f64 * grid.h;
                    let mut mellin = Complex64::new(0.0, 0.0);
                    for (v, lu) in v_vals.iter().zip(ln_u.iter()) {
                        mellin += v * Complex64::from_polar(1.0, -tau * lu);
                    }
                    let mell_hp = HComplex::from_f64(mellin.re, mellin.im, ctx);
                    let p0 = grid.g0[gi as usize].mul(&mell_hp, ctx);
                    let p1 = grid.g1[gi as usize].mul(&mell_hp, ctx);
                    block_env += (p0.to_c64().norm() + p1.to_c64().norm()) * h_eff;
                    out.push((tau, p0, p1));
                    idx += dir * stride as i64;
                }
                peak_env = peak_env.max(block_env);
                if block_env < budget {
                    quiet_blocks += 1;
                    tail_env = block_env;
                    if quiet_blocks >= 2 {
                        done = true;
                        break;
                    }
                } else {
                    quiet_blocks = 0;
                }
            }
            (out, tail_env.max(0.0), done)
        };
        let (up, tail_up, done_up) = scan_side(1);
        let (down, tail_down, done_down) = scan_side(-1);
        if !done_up || !done_down {
            return Err(OscIntError::TailBoundExceeded {
                tail: up.last().map(|x| x.1.to_c64().norm()).unwrap_or(f64::NAN)
                    + down.last().map(|x| x.1.to_c64().norm()).unwrap_or(f64::NAN),
                budget: tail_tol,
            });
        }
        let mut all: Vec<(f64, HComplex, HComplex)> = down;
        all.extend(up);
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PsiTable {
            sigma,
            h_eff,
            taus: all.iter().map(|x| x.0).collect(),
            prod0: all.iter().map(|x| x.1.clone()).collect(),
            prod1: all.iter().map(|x| x.2.clone()).collect(),
            tail_envelope: tail_up + tail_down,
        })
    }

    /// Evaluate Ψ^{sign} at zN > 0 from a prepared table. Returns the value
    /// and an error estimate combining truncation and discretization.
    pub fn eval(&self, table: &PsiTable, zn: f64, sign: i8) -> (Complex64, f64) {
        assert!(zn > 0.0);
        let ctx = &self.ctx;
        let ln_zn = ctx.ln(&ctx.big(zn));
        let tau0 = table.taus[0];
        let mut phase = unit_phase(&ctx.mul(&ctx.big(-tau0), &ln_zn), ctx);
        let step = unit_phase(&ctx.mul(&ctx.big(-table.h_eff), &ln_zn), ctx);
        let mut acc = HComplex::zero(ctx);
        let mut acc_coarse = HComplex::zero(ctx);
        for i in 0..table.taus.len() {
            let gpm = if sign >= 0 {
                // γ₊ = γ₀ − iγ₁: (a+bi) − i(c+di) = (a+d) + (b−c)i
                HComplex {
                    re: ctx.add(&table.prod0[i].re, &table.prod1[i].im),
                    im: ctx.sub(&table.prod0[i].im, &table.prod1[i].re),
                }
            } else {
                HComplex {
                    re: ctx.sub(&table.prod0[i].re, &table.prod1[i].im),
                    im: ctx.add(&table.prod0[i].im, &table.prod1[i].re),
                }
            };
            let term = gpm.mul(&phase, ctx);
            acc = acc.add(&term, ctx);
            if i % 2 == 0 {
                acc_coarse = acc_coarse.add(&term, ctx);
            }
            phase = phase.mul(&step, ctx);
        }
        let zn_pow = ctx.exp(&ctx.mul(&ctx.big(-table.sigma), &ln_zn));
        let norm = ctx.mul(&zn_pow, &ctx.big(table.h_eff / TAU));
        let value = acc.scale(&norm, ctx).to_c64();
        let coarse = acc_coarse
            .scale(&ctx.mul(&zn_pow, &ctx.big(2.0 * table.h_eff / TAU)), ctx)
            .to_c64();
        let disc = (value - coarse).norm() / 3.0;
        let tail = table.tail_envelope * to_f64(&zn_pow) / TAU;
        (value, disc + tail)
    }
}

/// Single-shot operation: builds a solver sized to the request and
/// evaluates Ψ^{sign}(z) for the weight ψ(y) = W(y/N)e(c y/N).
pub struct PsiConfig {
    pub prec: usize,
    pub sigma: Option<f64>,
    pub tau_max: f64,
    pub tail_tol: f64,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig { prec: 192, sigma: None, tau_max: 240.0, tail_tol: 1e-10 }
    }
}

pub fn psi_transform(
    zn: f64,
    params: &LanglandsParams,
    ell_sign: i8,
    weight: &PsiWeight,
    cfg: &PsiConfig,
) -> Result<(Complex64, f64), OscIntError> {
    let sigma = cfg.sigma.unwrap_or_else(|| params.default_sigma());
    let solver = PsiSolver::new(cfg.prec, params, sigma, cfg.tau_max)?;
    let table = solver.table(weight, zn.ln().abs() + 1.0, cfg.tail_tol)?;
    Ok(solver.eval(&table, zn, ell_sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn langlands_validation_and_dual() {
        assert!(LanglandsParams::new([
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0)
        ])
        .is_err());
        let p = LanglandsParams::generic();
        let d = p.dual();
        let dd = d.dual();
        for j in 0..3 {
            assert!((dd.mu[j] - p.mu[j]).norm() < 1e-15);
        }
        // dual parameters still sum to zero
        assert!((d.mu[0] + d.mu[1] + d.mu[2]).norm() < 1e-12);
    }

    #[test]
    fn gamma_grid_matches_direct_lngamma() {
        // spot-check grid values against a direct (shift-free path) product
        let params = LanglandsParams::generic();
        let sigma = params.default_sigma();
        let ctx = Ctx::new(192);
        let grid = GammaGrid::build(&ctx, &params, sigma, 3.0).unwrap();
        for idx in [0usize, grid.n_half, grid.n_half + 7, 2 * grid.n_half] {
            let tau = grid.tau(idx);
            let mut expect = [Complex64::new(0.0, 0.0); 2];
            for (ell, slot) in expect.iter_mut().enumerate() {
                let mut lg = HComplex::zero(&ctx);
                for j in 0..3 {
                    let mu = params.mu[j];
                    let num = HComplex::from_f64(
                        (1.0 + sigma + mu.re + ell as f64) / 2.0,
                        (tau + mu.im) / 2.0,
                        &ctx,
                    );
                    let den = HComplex::from_f64(
                        (-sigma - mu.re + ell as f64) / 2.0,
                        (-tau - mu.im) / 2.0,
                        &ctx,
                    );
                    lg = lg.add(&ctx.ln_gamma(&num), &ctx).sub(&ctx.ln_gamma(&den), &ctx);
                }
                let pref = HComplex::from_f64(
                    -3.0 * (sigma + 0.5) * std::f64::consts::PI.ln(),
                    -3.0 * tau * std::f64::consts::PI.ln(),
                    &ctx,
                );
                *slot = lg.add(&pref, &ctx).exp(&ctx).scale(&ctx.big(0.5), &ctx).to_c64();
            }
            let got0 = grid.g0[idx].to_c64();
            let got1 = grid.g1[idx].to_c64();
            assert!(
                (got0 - expect[0]).norm() <= 1e-12 * (1.0 + expect[0].norm()),
                "γ0 at τ={tau}: {got0} vs {}",
                expect[0]
            );
            assert!(
                (got1 - expect[1]).norm() <= 1e-12 * (1.0 + expect[1].norm()),
                "γ1 at τ={tau}: {got1} vs {}",
                expect[1]
            );
        }
    }

    #[test]
    fn gamma_grid_continuity() {
        // no spurious jumps along the contour: successive |γ| ratios stay
        // near 1 at the grid resolution
        let params = LanglandsParams::generic();
        let ctx = Ctx::new(192);
        let grid = GammaGrid::build(&ctx, &params, params.default_sigma(), 12.0).unwrap();
        for w in [&grid.g0, &grid.g1] {
            for i in 1..w.len() {
                let a = w[i - 1].to_c64();
                let b = w[i].to_c64();
                if a.norm() > 1e-300 {
                    let r = (b.norm() / a.norm()).ln().abs();
                    assert!(r < 0.2, "jump at node {i}: {r}");
                }
            }
        }
    }
}
