use hdls::datagen::{gaussian_design, gen_example, sample_elliptical, CovarianceSpec, Example, RadialLaw};
use ndarray::{Array2, ArrayView1, Axis};

fn corr(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let (ma, mb) = (a.mean().unwrap(), b.mean().unwrap());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

fn relative_frobenius(s: &Array2<f64>, sigma: &Array2<f64>) -> f64 {
    let d = s - sigma;
    (d.iter().map(|v| v * v).sum::<f64>() / sigma.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

#[test]
fn grouped_columns_are_near_duplicates() {
    for seed in 0..5 {
        let inst = gen_example(Example::Iii, 500, 100, 2.3, seed).unwrap();
        let x = inst.x.view();
        for g in 0..3 {
            let cols: Vec<usize> = (0..5).map(|m| g + 3 * m).collect();
            for (i, &a) in cols.iter().enumerate() {
                for &b in &cols[i + 1..] {
                    let c = corr(x.column(a), x.column(b));
                    assert!(c >= 0.98, "seed {seed}: corr({a}, {b}) = {c}");
                }
            }
        }
    }
}

#[test]
fn compound_symmetry_correlation_near_point_six() {
    let inst = gen_example(Example::Ii, 500, 40, 2.3, 2).unwrap();
    let x = inst.x.view();
    for a in 0..40 {
        for b in a + 1..40 {
            let c = corr(x.column(a), x.column(b));
            assert!((c - 0.6).abs() <= 0.1, "corr({a}, {b}) = {c}");
        }
    }
}

#[test]
fn chi_radius_gives_gaussian_covariance() {
    let spec = CovarianceSpec::Ar1 { rho: 0.5 };
    let sigma = spec.matrix(20, 0).unwrap();
    let x = sample_elliptical(5000, 20, &spec, RadialLaw::ChiSquaredOverP, 4).unwrap();
    let s = x.view().t().dot(&x.view()) / 5000.0;
    let gap = relative_frobenius(&s, &sigma);
    assert!(gap <= 0.15, "{gap}");
}

#[test]
fn sphere_rows_have_centred_coordinates() {
    let n = 4000;
    let x = sample_elliptical(n, 10, &CovarianceSpec::Identity, RadialLaw::Constant { value: 1.0 }, 6).unwrap();
    let means = x.view().mean_axis(Axis(0)).unwrap();
    assert!(means.iter().all(|m| m.abs() <= 5.0 / (n as f64).sqrt()));
}

#[test]
fn factor_design_matches_its_covariance() {
    let spec = CovarianceSpec::FactorModel { k: 5 };
    let (n, p) = (20000, 12);
    let x = gaussian_design(n, p, &spec, 8).unwrap();
    let sigma = spec.matrix(p, 8).unwrap();
    let s = x.t().dot(&x) / n as f64;
    assert!(relative_frobenius(&s, &sigma) <= 0.05);
}

#[test]
fn generation_does_not_depend_on_thread_count() {
    let make = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| gen_example(Example::Iv, 64, 200, 2.3, 77).unwrap())
    };
    let (a, b) = (make(1), make(4));
    assert_eq!(a.checksum(), b.checksum());
    assert!(a.y.view().iter().zip(b.y.view().iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
}
