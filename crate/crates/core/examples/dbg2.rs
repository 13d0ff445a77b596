use ahardy_core::caratheodory::NtSequence;
use ahardy_core::group::{enumerate, Generator, GroupPresentation};
use ahardy_core::hardy::{factor_martin_derivative, interior_samples, BoundaryGrid};
use ahardy_core::moebius::MoebiusMap;
use ahardy_core::orbit::orbit_data;
use ahardy_core::theta::{construct_interpolant, BoundaryDatum, ThetaContext};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn main() {
    let s = 0.5_f64;
    let norm = 1.0 / (1.0 - s * s).sqrt();
    let map = MoebiusMap::new(Complex64::new(norm, 0.0), Complex64::new(s * norm, 0.0)).unwrap();
    let p = GroupPresentation::new(
        vec![Generator {
            name: "s".into(),
            map,
        }],
        true,
    )
    .unwrap();
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

    let seq = NtSequence::radial(t0, 4, 10).unwrap();
    let vals: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| fact.delta(z).unwrap())
        .collect();
    use ahardy_core::caratheodory::{derivative_from_samples, limit_from_samples};
    let d0 = limit_from_samples(&vals, 2e-11).unwrap().value;
    let d1 = derivative_from_samples(&seq, &vals).unwrap().value;
    let bound = (t0 * d1 / d0).re;

    let ctx = ThetaContext::new(&trunc, t0, &delta_char, 1e-9).unwrap();
    let w0 = Complex64::from_polar(1.0, 0.4);
    let w0p = (bound + 1.0) * t0.conj() * w0;
    let datum = BoundaryDatum::new(w0, w0p, t0, 1e-9).unwrap();
    let interp = construct_interpolant(&ctx, &fact, &datum, d0, bound, 1e-6).unwrap();

    println!("f0 = {:?}, target w0 = {w0:?}", w0 * d0.conj() / d0.norm());
    println!("  h        w(z)                          |w|      f(z) = Delta*classical        |f|      |w-f|");
    for k in 0..14 {
        let h = 0.5_f64.powi(2 + k);
        let z = t0 * (1.0 - h);
        let w = interp.eval(z).unwrap();
        let f = fact.delta(z).unwrap() * interp.classical_factor(z);
        println!(
            "  2^-{:2}  {:+.6}{:+.6}i  {:.6}  {:+.6}{:+.6}i  {:.6}  {:.3e}",
            2 + k,
            w.re,
            w.im,
            w.norm(),
            f.re,
            f.im,
            f.norm(),
            (w - f).norm()
        );
    }

    // Replicate the cj_quantities stages to find the divergent limit.
    let weval = |z: Complex64| interp.eval(z).unwrap();
    let radial = NtSequence::radial(t0, 4, 10).unwrap();
    let radial_w: Vec<Complex64> = radial.points().iter().map(|&z| weval(z)).collect();
    match limit_from_samples(&radial_w, 2e-11) {
        Ok(est) => println!("boundary_value limit: {:?} (err {:.2e})", est.value, est.error_bar),
        Err(e) => println!("boundary_value limit FAILED: {e}"),
    }
    let bv = limit_from_samples(&radial_w, 2e-11)
        .map(|e| e.value)
        .unwrap_or(w0);

    let ratio_fn =
        |z: Complex64, wz: Complex64| Complex64::new((1.0 - wz.norm_sqr()) / (1.0 - z.norm_sqr()), 0.0);
    let aperture = std::f64::consts::FRAC_PI_4;
    for sigma in [0.0, -0.5 * aperture, 0.5 * aperture, -0.9 * aperture, 0.9 * aperture] {
        let seq = NtSequence::stolz_ray(t0, sigma, 4, 10).unwrap();
        let samples: Vec<Complex64> = seq.points().iter().map(|&z| ratio_fn(z, weval(z))).collect();
        let diffs: Vec<f64> = samples.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        match limit_from_samples(&samples, 2e-11) {
            Ok(est) => println!(
                "d1 ray sigma={sigma:+.3}: {:.5} (err {:.2e}) diffs {:.3e} -> {:.3e}",
                est.value.re, est.error_bar, diffs[0], diffs[diffs.len() - 1]
            ),
            Err(e) => println!(
                "d1 ray sigma={sigma:+.3} FAILED: {e}; samples: {:?}",
                samples.iter().map(|v| (v.re * 1e4).round() / 1e4).collect::<Vec<_>>()
            ),
        }
    }

    let d2s: Vec<Complex64> = radial
        .points()
        .iter()
        .zip(&radial_w)
        .map(|(&z, &wz)| ratio_fn(z, wz))
        .collect();
    match limit_from_samples(&d2s, 2e-11) {
        Ok(est) => println!("d2: {:.5}", est.value.re),
        Err(e) => println!("d2 FAILED: {e}"),
    }
    let d3s: Vec<Complex64> = radial
        .points()
        .iter()
        .zip(&radial_w)
        .map(|(&z, &wz)| {
            (Complex64::new(1.0, 0.0) - wz * bv.conj()) / (Complex64::new(1.0, 0.0) - z * t0.conj())
        })
        .collect();
    match limit_from_samples(&d3s, 2e-11) {
        Ok(est) => println!("d3: {:?}", est.value),
        Err(e) => println!("d3 FAILED: {e}"),
    }
    match derivative_from_samples(&radial, &radial_w) {
        Ok(est) => println!(
            "derivative: {:?} -> ratio {:.5}",
            est.value,
            (est.value * t0 * bv.conj()).re
        ),
        Err(e) => println!("derivative FAILED: {e}"),
    }
}
