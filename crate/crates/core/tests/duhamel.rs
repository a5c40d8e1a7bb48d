use std::f64::consts::PI;

use nsf_core::duhamel::*;
use nsf_core::spaces::weak_l3;
use nsf_core::spectral::*;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_mode(g: &Grid, m: [i64; 3], amp: [Complex64; 3]) -> SpectralField {
    let mut u = SpectralField::zeros(*g);
    u.set_mode(m, amp);
    leray_project(&u)
}

#[test]
fn duhamel_of_zero_is_zero() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let src = Trajectory::zeros(g, vec![0.0, 0.5, 1.0]).unwrap();
    let q = QuadratureConfig::default();
    assert!(duhamel(&src, 0.7, &q).unwrap().is_zero());
    assert!(duhamel(&src, 1.5, &q).is_err());
}

#[test]
fn steady_single_mode_matches_antiderivative() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let m = [1, 2, 0];
    let f0 = single_mode(&g, m, [c(0.4, 0.1), c(-0.1, 0.3), c(0.2, -0.5)]);
    let times = geometric_times(1e-3, 2.0, 12).unwrap();
    let src = Trajectory::constant(&f0, times).unwrap();
    let kappa = 5.0;
    let idx = g.index_of(m).unwrap();
    for q in [
        QuadratureConfig::trapezoid(1).unwrap(),
        QuadratureConfig::midpoint(3).unwrap(),
    ] {
        for t in [0.01, 0.37, 1.0, 2.0] {
            let y = duhamel(&src, t, &q).unwrap();
            let factor = (1.0 - (-kappa * t).exp()) / kappa;
            let got = y.coefficient(idx);
            let want = f0.coefficient(idx);
            for a in 0..3 {
                assert!((got[a] - want[a] * factor).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn midpoint_refinement_is_second_order() {
    // Time-varying single-mode source; the trapezoid scheme integrates the
    // piecewise-linear source exactly and serves as the reference.
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let f0 = single_mode(&g, [1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.5)]);
    let times = uniform_times(1.0, 5).unwrap();
    let src = Trajectory::from_fn(times, |t| Ok(f0.scaled((3.0 * t).sin() + 0.2))).unwrap();
    let exact = duhamel(&src, 1.0, &QuadratureConfig::trapezoid(1).unwrap()).unwrap();
    let err = |s: usize| {
        duhamel(&src, 1.0, &QuadratureConfig::midpoint(s).unwrap())
            .unwrap()
            .max_abs_diff(&exact)
    };
    let (e1, e2, e4) = (err(2), err(4), err(8));
    for ratio in [e1 / e2, e2 / e4] {
        let order = ratio.log2();
        assert!((1.8..2.2).contains(&order), "observed order {order}");
    }
}

#[test]
fn trajectory_integral_matches_pointwise_calls() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let f0 = random_divfree(&g, 1.0, 3.0, 0.0, 5, true);
    let times = geometric_times(0.01, 1.0, 8).unwrap();
    let src = Trajectory::from_fn(times.clone(), |t| Ok(f0.scaled(1.0 + t * t))).unwrap();
    let q = QuadratureConfig::trapezoid(2).unwrap();
    let traj = duhamel_trajectory(&src, &q).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let y = duhamel(&src, t, &q).unwrap();
        assert!(traj.state(i).max_abs_diff(&y) <= 1e-14 * f0.max_coefficient());
    }
}

#[test]
fn bilinear_zero_symmetry_and_structure() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let times = geometric_times(0.01, 0.3, 6).unwrap();
    let u0 = random_divfree(&g, 1.0, 4.0, 0.0, 1, true);
    let v0 = random_divfree(&g, 1.0, 4.0, 0.0, 2, true);
    let u = heat_trajectory(&u0, &times).unwrap();
    let v = heat_trajectory(&v0, &times).unwrap();
    let q = QuadratureConfig::trapezoid(2).unwrap();
    let zero = Trajectory::zeros(g, times.clone()).unwrap();
    assert!(bilinear_b(&zero, &v, &q).unwrap().is_zero());
    let uv = bilinear_b(&u, &v, &q).unwrap();
    let vu = bilinear_b(&v, &u, &q).unwrap();
    assert!(uv.state(0).is_zero());
    let scale = uv
        .states()
        .iter()
        .map(|s| s.max_coefficient())
        .fold(0.0, f64::max);
    assert!(scale > 0.0);
    for (a, b) in uv.states().iter().zip(vu.states()) {
        assert!(a.max_abs_diff(b) <= 1e-14 * scale);
        assert!(a.divergence_defect() < 1e-10);
        assert!(a.hermitian_defect() < 1e-12);
    }
    let other = Trajectory::zeros(g, vec![0.0, 0.3]).unwrap();
    assert!(bilinear_b(&u, &other, &q).is_err());
}

/// `(1/2) P ik·(û⊗v̂ + v̂⊗û)` by explicit convolution over mode pairs.
fn dense_nonlinear(g: &Grid, u: &SpectralField, v: &SpectralField) -> Vec<[Complex64; 3]> {
    let n = g.len();
    let mut out = vec![[Complex64::default(); 3]; n];
    for pu in 0..n {
        let a = u.coefficient(pu);
        if a.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        for pv in 0..n {
            let b = v.coefficient(pv);
            if b.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let (ma, mb) = (g.lattice(pu), g.lattice(pv));
            let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
            let Some(idx) = g.index_of(m) else { continue };
            if !g.is_resolved(m) {
                continue;
            }
            let k = g.wavevector(idx);
            // div(u⊗v)_i = ∂_l (u_i v_l), symmetrised
            let mut d = [Complex64::default(); 3];
            for i in 0..3 {
                for l in 0..3 {
                    d[i] += c(0.0, k[l]) * 0.5 * (a[i] * b[l] + b[i] * a[l]);
                }
            }
            let k2: f64 = k.iter().map(|x| x * x).sum();
            for i in 0..3 {
                let mut s = d[i];
                if k2 > 0.0 {
                    for j in 0..3 {
                        s -= k[i] * k[j] / k2 * d[j];
                    }
                }
                out[idx][i] += s;
            }
        }
    }
    out
}

#[test]
fn bilinear_matches_dense_convolution_and_ode() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let u0 = single_mode(&g, [1, 0, 0], [c(0.0, 0.0), c(0.4, 0.1), c(-0.2, 0.3)]);
    let v0 = single_mode(&g, [0, 1, 1], [c(0.5, -0.2), c(0.1, 0.0), c(-0.1, 0.0)]);
    let times = uniform_times(0.6, 4).unwrap();
    let u = Trajectory::constant(&u0, times.clone()).unwrap();
    let v = Trajectory::constant(&v0, times.clone()).unwrap();
    let b = bilinear_b(&u, &v, &QuadratureConfig::trapezoid(3).unwrap()).unwrap();
    let nhat = dense_nonlinear(&g, &u0, &v0);
    let k2 = g.k_squared();
    let mut touched = 0;
    for idx in 0..g.len() {
        if nhat[idx].iter().all(|z| z.norm() < 1e-15) {
            for s in b.states() {
                assert!(s.coefficient(idx).iter().all(|z| z.norm() < 1e-14));
            }
            continue;
        }
        touched += 1;
        // y' = -κ y + n̂, y(0) = 0, by classical RK4; B = -y
        let steps = 3000;
        let h = 0.6 / steps as f64;
        for a in 0..3 {
            let rhs = |y: Complex64| -k2[idx] * y + nhat[idx][a];
            let mut y = Complex64::default();
            let mut samples = vec![y];
            for step in 1..=steps {
                let k1 = rhs(y);
                let k2_ = rhs(y + k1 * (h / 2.0));
                let k3 = rhs(y + k2_ * (h / 2.0));
                let k4 = rhs(y + k3 * h);
                y += (k1 + k2_ * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                if step % (steps / 3) == 0 {
                    samples.push(y);
                }
            }
            for (m, want) in samples.iter().enumerate() {
                let got = b.state(m).coefficient(idx)[a];
                assert!(
                    (got + want).norm() < 1e-8,
                    "mode {idx} comp {a} time {m}: {got} vs {}",
                    -want
                );
            }
        }
    }
    assert_eq!(touched, 4);
}

#[test]
fn zero_and_gradient_forces_have_no_response() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let times = geometric_times(0.01, 1.0, 6).unwrap();
    let q = QuadratureConfig::default();
    assert!(force_response(&ForceSpec::zero(), &g, &times, &q)
        .unwrap()
        .is_zero());
    let grad = ForceSpec::new(ForceKind::GradientOfProfile {
        amplitude: 2.0,
        width: 0.7,
        center: None,
    });
    let f = grad.evaluate(&g, 0.0).unwrap();
    assert!(f.max_coefficient() > 1e-3);
    assert!(f.hermitian_defect() < 1e-12);
    let resp = force_response(&grad, &g, &times, &q).unwrap();
    for s in resp.states() {
        assert!(s.max_coefficient() < 1e-15);
    }
    let mut grad = grad;
    let y = y_norm(&mut grad, &g, &times, &q).unwrap();
    assert!(y.value < 1e-12);
}

#[test]
fn steady_mode_force_response_and_y_norm() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let m = [0, 0, 1];
    let force = ForceSpec::new(ForceKind::TimeIndependentModeSum {
        modes: vec![ForceMode {
            mode: m,
            amplitude: [0.3, 0.1, 0.7],
        }],
    });
    let times = geometric_times(1e-3, 60.0, 30).unwrap();
    let q = QuadratureConfig::default();
    let resp = force_response(&force, &g, &times, &q).unwrap();
    // closed form: (1 - e^{-t}) P f̂, and P drops the z component
    let pf = leray_project(&force.evaluate(&g, 0.0).unwrap());
    let idx = g.index_of(m).unwrap();
    assert!(pf.coefficient(idx)[2].norm() == 0.0);
    for (t, s) in times.iter().zip(resp.states()) {
        let want = pf.scaled(1.0 - (-t as f64).exp());
        assert!(s.max_abs_diff(&want) < 1e-12);
        assert!(s.divergence_defect() < 1e-12);
    }
    // y_norm against a sweep over the closed form on a finer time set
    let mut f = force.clone();
    let rep = y_norm(&mut f, &g, &times, &q).unwrap();
    let unit = weak_l3(&pf);
    let best = (0..=400)
        .map(|i| 60.0 * i as f64 / 400.0)
        .map(|t| (1.0 - (-t).exp()) * unit)
        .fold(0.0, f64::max);
    assert!((rep.value - best).abs() <= 1e-10 * best);
    assert_eq!(f.y_norm, Some(rep.value));
    assert!(rep.saturated);
    let mut doubled = force.scaled(2.0);
    let rep2 = y_norm(&mut doubled, &g, &times, &q).unwrap();
    assert!((rep2.value - 2.0 * rep.value).abs() <= 1e-12 * rep.value);
    // the running sup is still climbing on a short horizon
    let short = geometric_times(1e-3, 0.5, 10).unwrap();
    assert!(!y_norm(&mut f.clone(), &g, &short, &q).unwrap().saturated);
}

#[test]
fn dirac_surrogate_is_real_and_narrows_with_width() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let mk = |w: f64| {
        ForceSpec::new(ForceKind::ScaledDiracSurrogate {
            amplitude: 1.0,
            width: w,
            direction: [0.0, 0.0, 1.0],
            center: None,
        })
    };
    let wide = mk(1.0).evaluate(&g, 0.0).unwrap();
    let narrow = mk(0.3).evaluate(&g, 0.0).unwrap();
    assert!(wide.hermitian_defect() < 1e-12 && narrow.hermitian_defect() < 1e-12);
    let peak = |f: &SpectralField| {
        f.to_physical().comps[2]
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max)
    };
    assert!(peak(&narrow) > peak(&wide));
    // unit mass: mean coefficient = amplitude / volume
    assert!((wide.coefficient(0)[2].re - 1.0 / g.volume()).abs() < 1e-15);
    assert!(mk(0.0).evaluate(&g, 0.0).is_err());
}
