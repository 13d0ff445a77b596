use ahardy_core::caratheodory::{
    bound_comparison, cj_quantities, derivative_from_samples, limit_from_samples,
    main_inequality_check, NtSequence,
};
use ahardy_core::group::{enumerate, Character, Generator, GroupPresentation};
use ahardy_core::hardy::{factor_martin_derivative, interior_samples, BoundaryGrid};
use ahardy_core::moebius::MoebiusMap;
use ahardy_core::orbit::orbit_data;
use ahardy_core::theta::{construct_interpolant, BoundaryDatum, ThetaContext};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cyclic() -> GroupPresentation {
    let s = 0.5_f64;
    let norm = 1.0 / (1.0 - s * s).sqrt();
    let map = MoebiusMap::new(Complex64::new(norm, 0.0), Complex64::new(s * norm, 0.0)).unwrap();
    GroupPresentation::new(
        vec![Generator {
            name: "s".into(),
            map,
        }],
        true,
    )
    .unwrap()
}

fn main() {
    let p = cyclic();
    let trunc = enumerate(&p, 10, 1e-9).unwrap();
    let t0 = I;
    let od = orbit_data(&trunc, t0, 1e-9).unwrap();
    let images: Vec<Complex64> = od.rows().iter().map(|r| r.image).collect();
    let grid = BoundaryGrid::avoiding(1024, &images).unwrap();
    let fact = factor_martin_derivative(&od, &grid).unwrap();
    let names: Vec<String> = p.generators().iter().map(|g| g.name.clone()).collect();
    let delta_char = fact
        .delta_character(&p, &interior_samples(16), 1e-3)
        .unwrap()
        .character(&names)
        .unwrap();
    println!("delta_char = {:?}", delta_char.values());

    let seq = NtSequence::radial(t0, 4, 10).unwrap();
    let vals: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| fact.delta(z).unwrap())
        .collect();
    let d0 = limit_from_samples(&vals, 2e-11).unwrap().value;
    let d1 = derivative_from_samples(&seq, &vals).unwrap().value;
    let bound = (t0 * d1 / d0).re;
    println!("bound = {bound:.7}, |d0| = {:.9}", d0.norm());

    // (A) interpolant at ratio = bound + 1.
    let ctx = ThetaContext::new(&trunc, t0, &delta_char, 1e-9).unwrap();
    let w0 = Complex64::from_polar(1.0, 0.4);
    let w0p = (bound + 1.0) * t0.conj() * w0;
    let datum = BoundaryDatum::new(w0, w0p, t0, 1e-9).unwrap();
    println!("datum ratio = {:.7}", datum.ratio);
    let interp = construct_interpolant(&ctx, &fact, &datum, d0, bound, 1e-6).unwrap();
    println!("rho = {}, multiplier = {}", interp.rho(), interp.multiplier());

    let mut sup_boundary = 0.0_f64;
    for &tj in grid.points() {
        sup_boundary = sup_boundary.max(interp.eval(tj).unwrap().norm());
    }
    let mut sup_interior = 0.0_f64;
    for k in 0..200 {
        let r = 0.97 * ((k as f64 + 0.5) / 200.0).sqrt();
        let z = Complex64::from_polar(r, 2.39996322972865 * k as f64);
        sup_interior = sup_interior.max(interp.eval(z).unwrap().norm());
    }
    println!("sup|w| boundary grid = {sup_boundary:.6}, interior 200 = {sup_interior:.6}");

    let mut auto_res = 0.0_f64;
    for (g, &bv) in p.generators().iter().zip(delta_char.values()) {
        for &z in &interior_samples(16) {
            let moved = g.map.apply(z).unwrap();
            auto_res = auto_res
                .max((interp.eval(moved).unwrap() - bv * interp.eval(z).unwrap()).norm());
        }
    }
    println!("automorphy residual (delta char) = {auto_res:.3e}");

    let wrapped = |z: Complex64| {
        interp
            .eval(z)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    match cj_quantities(&wrapped, t0, None, 1024, 5e-2) {
        Ok(cj) => println!(
            "cj: w0 = {:.6} (want {:.6}), |w0| = {:.6}, ratio = {:.6}+{:.2e}i, d1 = {:.4}, d2 = {:.4}, i1 = {:.4}, i2 = {:.4}, id_res = {:.3e}, julia_excess = {:.3e}",
            cj.boundary_value, w0, cj.boundary_value.norm(), cj.derivative.re, cj.derivative.im, cj.d1, cj.d2, cj.i1, cj.i2, cj.identity_residual, cj.julia_excess
        ),
        Err(e) => println!("cj FAILED: {e}"),
    }

    // (B) full shift-inequality sweep.
    let t_start = std::time::Instant::now();
    match main_inequality_check(
        |z| interp.eval(z),
        &p,
        &delta_char,
        t0,
        &grid,
        256,
        16,
        1e-9,
        1e-2,
        5e-2,
        1e-2,
    ) {
        Ok(rep) => {
            println!(
                "main_inequality: ratio = {:.6}+{:.2e}i, w0 = {:.6}, min_slack = {:.6}, min_lhs = {:.6}, identity_gap = {:.4}, pass = {}  [{:?}]",
                rep.ratio.re, rep.ratio.im, rep.boundary_value, rep.min_slack, rep.min_lhs_form, rep.identity_gap, rep.pass, t_start.elapsed()
            );
            for r in &rep.rows {
                println!(
                    "  chi = {:+.3}{:+.3}i  obj_s = {:.5}  obj = {:.5}  slack = {:.5}  lhs = {:.5}  |diff| = {:.4}",
                    r.character[0].re,
                    r.character[0].im,
                    r.objective_shifted,
                    r.objective,
                    r.slack,
                    r.lhs_form,
                    (r.slack - r.lhs_form).abs()
                );
            }
        }
        Err(e) => println!("main_inequality FAILED: {e}"),
    }

    // (C) bound comparison on the same data.
    let t_start = std::time::Instant::now();
    match bound_comparison(
        &p, &trunc, &fact, &grid, 256, 16, 8, 1e-9, 1e-2, 1e-3, 1e-2, 1e-2,
    ) {
        Ok(r) => println!(
            "bound_comparison: sup_obj = {:.6}, radial = {:.6} (+-{:.1e}), quad = {:.6}, gap = {:.4e}, dct_pass = {}, pass = {}  [{:?}]",
            r.sup_objective, r.bound_radial, r.bound_radial_error_bar, r.bound_quadrature, r.gap, r.dct_pass, r.pass, t_start.elapsed()
        ),
        Err(e) => println!("bound_comparison FAILED: {e}"),
    }

    // (D) trivial group exactness.
    let tp = GroupPresentation::new(Vec::new(), true).unwrap();
    let beta0 = Character::identity(0);
    let t1 = Complex64::new(1.0, 0.0);
    let tgrid = BoundaryGrid::new(512, 0.3).unwrap();
    let rep = main_inequality_check(
        |z| Ok(z),
        &tp,
        &beta0,
        t1,
        &tgrid,
        16,
        4,
        1e-9,
        1e-2,
        1e-2,
        1e-6,
    )
    .unwrap();
    println!(
        "trivial: ratio = {:?}, min_slack = {:?}, min_lhs = {:?}, gap = {:?}, rows = {}",
        rep.ratio,
        rep.min_slack,
        rep.min_lhs_form,
        rep.identity_gap,
        rep.rows.len()
    );
    println!(
        "trivial exact: slack == 1: {}, lhs == 1: {}",
        rep.min_slack == 1.0,
        rep.min_lhs_form == 1.0
    );

    let ttr = enumerate(&tp, 0, 1e-9).unwrap();
    let t2 = Complex64::new(0.6, 0.8);
    let tgrid2 = BoundaryGrid::avoiding(512, &[t2]).unwrap();
    let tod = orbit_data(&ttr, t2, 1e-9).unwrap();
    let tfact = factor_martin_derivative(&tod, &tgrid2).unwrap();
    let r = bound_comparison(
        &tp, &ttr, &tfact, &tgrid2, 32, 4, 4, 1e-9, 1e-2, 1e-3, 1e-2, 1e-2,
    )
    .unwrap();
    println!(
        "trivial bound_comparison: sup = {:e}, radial = {:e}, quad = {:e}, gap = {:e}, dct = {}, pass = {}",
        r.sup_objective, r.bound_radial, r.bound_quadrature, r.gap, r.dct_pass, r.pass
    );
}
