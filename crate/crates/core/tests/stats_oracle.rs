use forumnet_core::stats::{
    pearson, regularized_incomplete_beta, student_t_two_sided, welch_t_test,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;

fn reference_welch(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let stats = |g: &[f64]| {
        let n = g.len() as f64;
        let m = g.iter().sum::<f64>() / n;
        let v = g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, v)
    };
    let ((na, ma, va), (nb, mb, vb)) = (stats(a), stats(b));
    let (qa, qb) = (va / na, vb / nb);
    let t = (ma - mb) / (qa + qb).sqrt();
    let df = (qa + qb).powi(2) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let p = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
    (t, df, p)
}

#[test]
fn welch_fixture() {
    let t = welch_t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    assert!((t.t + 3.674).abs() < 1e-3, "t = {}", t.t);
    assert!((t.df - 4.0).abs() < 1e-3);
    assert!((t.p - 0.021).abs() < 1e-3, "p = {}", t.p);
    let (rt, rdf, rp) = reference_welch(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
    assert!((t.t - rt).abs() < 1e-12 && (t.df - rdf).abs() < 1e-12 && (t.p - rp).abs() < 1e-9);
}

#[test]
fn pearson_fixtures() {
    let x = [1.0, 2.0, 3.0];
    assert!((pearson(&x, &[2.0, 4.0, 6.0]).unwrap().r - 1.0).abs() < 1e-4);
    assert!((pearson(&x, &[3.0, 2.0, 1.0]).unwrap().r + 1.0).abs() < 1e-4);
    // Sxy = 3, Sxx = 2, Syy = 14/3
    let r = pearson(&x, &[1.0, 2.0, 4.0]).unwrap();
    assert!((r.r - 3.0 / (28.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((r.r - 0.9820).abs() < 1e-4, "r = {}", r.r);
    let t = r.r * (1.0 / (1.0 - r.r * r.r)).sqrt();
    let p = 2.0 * StudentsT::new(0.0, 1.0, 1.0).unwrap().cdf(-t);
    assert!((r.p - p).abs() < 1e-9);
}

proptest! {
    #[test]
    fn incomplete_beta_matches_statrs(a in 0.05f64..60.0, b in 0.05f64..60.0, x in 0.0f64..=1.0) {
        let ours = regularized_incomplete_beta(a, b, x);
        let theirs = beta_reg(a, b, x);
        prop_assert!((ours - theirs).abs() < 1e-9, "I({x}; {a}, {b}) = {ours} vs {theirs}");
    }

    #[test]
    fn t_tail_matches_statrs(t in -40.0f64..40.0, df in 0.5f64..500.0) {
        let theirs = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
        prop_assert!((student_t_two_sided(t, df) - theirs).abs() < 1e-6);
    }

    #[test]
    fn welch_matches_reference(a in prop::collection::vec(-1e3f64..1e3, 2..30), b in prop::collection::vec(-1e3f64..1e3, 2..30)) {
        let ours = welch_t_test(&a, &b).unwrap();
        let (t, df, p) = reference_welch(&a, &b);
        prop_assert!((ours.t - t).abs() <= 1e-9 * t.abs().max(1.0));
        prop_assert!((ours.df - df).abs() <= 1e-9 * df);
        prop_assert!((ours.p - p).abs() < 1e-6);
    }
}
