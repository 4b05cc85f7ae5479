use std::time::Instant;
use subconv_core::oscint::psi::{LanglandsParams, PsiSolver, PsiWeight};

fn main() {
    let params = LanglandsParams::generic();
    let sigma = params.default_sigma();
    let t0 = Instant::now();
    let solver = PsiSolver::new(192, &params, sigma, 760.0).unwrap();
    println!("gamma grid: {:?} ({} nodes)", t0.elapsed(), solver.grid.g0.len());

    // oscillatory regime: zN = 2000, x < 0, eta = +1
    let zn = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000.0f64);
    let c = -zn.cbrt();
    let t1 = Instant::now();
    let table = solver.table(&PsiWeight { c_turns: c }, zn.ln().abs() + 1.0, 1e-6).unwrap();
    println!("table: {:?} ({} nodes, tail {:.2e})", t1.elapsed(), table.taus.len(), table.tail_envelope);
    let t2 = Instant::now();
    let (v, err) = solver.eval(&table, zn, 1);
    println!("eval: {:?}", t2.elapsed());
    println!("osc: |psi|/(zN)^1/2 = {:.4}, err {:.2e}", v.norm() / zn.sqrt(), err);
    // phase derivative vs 2π (zN)^{-1/2} |c|^{-1/2}
    let dz = zn * 0.002;
    let (vp, _) = solver.eval(&table, zn + dz, 1);
    let (vm, _) = solver.eval(&table, zn - dz, 1);
    let dphase = {
        let mut d = vp.arg() - vm.arg();
        while d > std::f64::consts::PI { d -= std::f64::consts::TAU; }
        while d < -std::f64::consts::PI { d += std::f64::consts::TAU; }
        d / (2.0 * dz)
    };
    let predict = std::f64::consts::TAU / (zn.sqrt() * c.abs().sqrt());
    println!("dphase/dzN = {:.6e}, predicted ±{:.6e}, ratio {:.4}", dphase, predict, dphase.abs() / predict);

    // wrong sign: same c magnitude but positive (x > 0 with eta = +1)
    let table_w = solver.table(&PsiWeight { c_turns: -c }, zn.ln().abs() + 1.0, 1e-6).unwrap();
    let (vw, errw) = solver.eval(&table_w, zn, 1);
    println!("wrong-sign: |psi|/(zN)^1/2 = {:.3e} (err {:.1e})", vw.norm() / zn.sqrt(), errw);
    // and the minus transform on the same weight should be oscillatory-large
    let (vm2, _) = solver.eval(&table_w, zn, -1);
    println!("minus-transform same weight: {:.4}", vm2.norm() / zn.sqrt());

    // small z: zN = 0.5, c = 0.5
    let table_s = solver.table(&PsiWeight { c_turns: 0.5 }, 6.0, 1e-6).unwrap();
    for zn_s in [0.05f64, 0.2, 0.5, 1.0] {
        let (vs, es) = solver.eval(&table_s, zn_s, 1);
        let (vminus, _) = solver.eval(&table_s, zn_s, -1);
        println!("small zN={zn_s}: |psi+| = {:.4} |psi-| = {:.4} (err {:.1e})", vs.norm(), vminus.norm(), es);
    }
}
