use invlab_core::{frechet_probe, mu_probe, quadratic_probe, ProbeSet, Regime};
use proptest::prelude::*;

fn check(set: &ProbeSet) -> Result<(), TestCaseError> {
    let k2 = set.k * set.k;
    for p in &set.probes {
        let d = (p.zeta.self_product() - k2).norm();
        prop_assert!(d <= 1e-10 * k2, "ζ·ζ off by {d}");
    }
    let sum = set.weighted_sum();
    let tol = 1e-10 * (1.0 + set.xi[0].hypot(set.xi[1]));
    prop_assert!((sum.0[0] - set.xi[0]).norm() <= tol);
    prop_assert!((sum.0[1] - set.xi[1]).norm() <= tol);
    Ok(())
}

fn at(r: f64, angle: f64) -> [f64; 2] {
    [r * angle.cos(), r * angle.sin()]
}

proptest! {
    #[test]
    fn quadratic_identities(k in 1.0f64..20.0, t in 0.001f64..3.0, angle in 0.0f64..6.3) {
        let set = quadratic_probe(k, at(t * k, angle)).unwrap();
        prop_assert_eq!(set.regime, Regime::Propagating);
        check(&set)?;
    }

    #[test]
    fn quadratic_evanescent_identities(k in 1.0f64..20.0, t in 3.01f64..10.0, angle in 0.0f64..6.3) {
        let set = quadratic_probe(k, at(t * k, angle)).unwrap();
        prop_assert_eq!(set.regime, Regime::Evanescent);
        prop_assert!(set.probes[0].zeta.max_imag() > 0.0);
        check(&set)?;
    }

    #[test]
    fn frechet_identities(k in 1.0f64..20.0, m in 2u32..=6, t in 0.001f64..1.0, angle in 0.0f64..6.3) {
        let set = frechet_probe(k, at(t * (m as f64 + 1.0) * k, angle), m).unwrap();
        prop_assert_eq!(set.probes.len(), m as usize + 1);
        prop_assert!(set.is_propagating());
        check(&set)?;
    }

    #[test]
    fn mu_identities(k in 1.0f64..20.0, m in 2u32..=6, t in 0.0f64..=1.0, angle in 0.0f64..6.3) {
        let mf = m as f64;
        let r = (mf - 1.0 + 2.0 * t) * k;
        let set = mu_probe(k, at(r, angle), m).unwrap();
        prop_assert!(set.is_propagating());
        prop_assert_eq!(set.probes[0].multiplicity, m);
        check(&set)?;
    }

    #[test]
    fn mu_outside_annulus_is_evanescent(k in 1.0f64..20.0, m in 2u32..=6, t in 1.01f64..3.0, angle in 0.0f64..6.3) {
        let set = mu_probe(k, at(t * (m as f64 + 1.0) * k, angle), m).unwrap();
        prop_assert_eq!(set.regime, Regime::Evanescent);
    }
}
