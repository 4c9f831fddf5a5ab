use invlab_core::harness::{preset_potential, Preset};
use invlab_core::{
    add_noise, synthesize, Algorithm, BoundaryTrace, Complex64, ComplexField, ComplexVector2, DomainMask,
    FourierRecord, FourierTable, Grid, HelmholtzOperator, NoiseSpec, PicardOptions, PlaneWaveSum, TraceKind,
};
use proptest::prelude::*;

fn wave(g: Grid, k: f64, angle: f64) -> ComplexField {
    let w = PlaneWaveSum::single(ComplexVector2::real([k * angle.cos(), k * angle.sin()]));
    ComplexField::from_fn(g, |x| w.eval(x))
}

fn record(xi: [f64; 2], re: f64, im: f64, sigma: f64) -> FourierRecord {
    FourierRecord {
        i: 1,
        s: 1,
        kappa: xi[0].hypot(xi[1]),
        theta: xi[1].atan2(xi[0]),
        xi,
        estimate: Some(Complex64::new(re, im)),
        sigma,
        retained: true,
        algorithm: Algorithm::Alg1,
        k: 10.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let g = Grid::new(41, 0.5).unwrap();
        let mask = DomainMask::disk(&g, 0.5).unwrap();
        let op = HelmholtzOperator::new(&g, &mask, 6.0).unwrap();
        let zero = ComplexField::zeros(g);
        let (w1, w2) = (wave(g, 6.0, t1), wave(g, 6.0, t2));
        let s = Complex64::new(a, b);
        let combo = w1.add(&w2.scale(s)).unwrap();
        let lhs = op.solve(&combo, &zero).unwrap();
        let rhs = op.solve(&w1, &zero).unwrap().add(&op.solve(&w2, &zero).unwrap().scale(s)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-10 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn picard_residual_is_small(amp in 0.01f64..0.5, t in 0.0f64..6.3, m in 2u32..=3) {
        let g = Grid::new(51, 0.5).unwrap();
        let mask = DomainMask::disk(&g, 0.5).unwrap();
        let op = HelmholtzOperator::new(&g, &mask, 5.0).unwrap();
        let c = preset_potential(Preset::Ring, amp, &g, &mask).unwrap();
        let (u, report) = op.solve_nonlinear(m, &c, &wave(g, 5.0, t), PicardOptions::default()).unwrap();
        prop_assert!(report.converged);
        let r = op.residual_max(&u, |i, v| c.values()[i] * v.powu(m));
        prop_assert!(r <= 1e-8 * (1.0 + u.max_abs()), "residual {}", r);
    }

    #[test]
    fn noise_respects_bound(delta in 0.0f64..1.0, seed in any::<u64>()) {
        let values: Vec<Complex64> = (0..64).map(|j| Complex64::from_polar(1.0 + j as f64 * 0.01, j as f64)).collect();
        let t = BoundaryTrace::new(TraceKind::Neumann, values);
        let noisy = add_noise(&t, NoiseSpec::new(delta, seed).unwrap());
        prop_assert!(noisy.max_abs_diff(&t) <= delta * t.sup_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn synthesis_is_additive(
        a in proptest::collection::vec((-30.0f64..30.0, -30.0f64..30.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..0.1), 1..20),
        b in proptest::collection::vec((-30.0f64..30.0, -30.0f64..30.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..0.1), 1..20),
    ) {
        let g = Grid::new(25, 0.5).unwrap();
        let table = |v: &[(f64, f64, f64, f64, f64)]| FourierTable {
            records: v.iter().map(|&(x, y, re, im, s)| record([x, y], re, im, s)).collect(),
        };
        let (ta, tb) = (table(&a), table(&b));
        let mut joint = ta.clone();
        joint.extend(tb.clone());
        let sum = synthesize(&ta, &g).unwrap().add(&synthesize(&tb, &g).unwrap()).unwrap();
        prop_assert!(synthesize(&joint, &g).unwrap().max_abs_diff(&sum).unwrap() <= 1e-12);
    }
}

#[test]
fn noise_bound_over_1000_seeds() {
    let values: Vec<Complex64> = (0..300)
        .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.5).cos()))
        .collect();
    let t = BoundaryTrace::new(TraceKind::Neumann, values);
    for seed in 0..1000 {
        let noisy = add_noise(&t, NoiseSpec::new(0.1, seed).unwrap());
        assert!(noisy.max_abs_diff(&t) <= 0.1 * t.sup_norm());
    }
}
