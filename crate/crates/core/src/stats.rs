//! Welch's unequal-variance t-test and Pearson correlation, with two-sided
//! p-values from the Student t distribution via the regularized incomplete
//! beta function.

use core::fmt;

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Regularized incomplete beta `I_x(a, b)`, continued-fraction evaluation
/// (modified Lentz).
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    /// Both groups have zero variance; `t`/`p` follow the convention
    /// (0/1 for equal means, ±inf/0 otherwise) and `df` is `n_a + n_b - 2`.
    pub degenerate: bool,
}

/// Welch's t-test of `a` against `b` (`t` is positive when `a` has the
/// larger mean), with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    for g in [a, b] {
        if g.len() < 2 {
            return Err(Error::GroupTooSmall(g.len()));
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (sa, sb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let diff = ma - mb;
        let (t, p) = if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), 0.0)
        };
        return Ok(TTest {
            t,
            df: na + nb - 2.0,
            p,
            degenerate: true,
        });
    }
    let t = (ma - mb) / libm::sqrt(se2);
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(TTest {
        t,
        df,
        p: student_t_two_sided(t, df),
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undefined {
    TooFewPairs(usize),
    ZeroVariance(usize),
}

impl Undefined {
    pub fn pairs(self) -> usize {
        match self {
            Undefined::TooFewPairs(n) | Undefined::ZeroVariance(n) => n,
        }
    }
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Undefined::TooFewPairs(n) => write!(f, "only {n} complete pairs (need 3)"),
            Undefined::ZeroVariance(_) => f.write_str("zero variance"),
        }
    }
}

/// Product-moment correlation with the two-sided p of
/// `t = r * sqrt((k - 2) / (1 - r^2))` on `k - 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> core::result::Result<Correlation, Undefined> {
    assert_eq!(x.len(), y.len(), "pearson needs paired samples");
    let k = x.len();
    if k < 3 {
        return Err(Undefined::TooFewPairs(k));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Undefined::ZeroVariance(k));
    }
    let r = (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    let df = (k - 2) as f64;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        student_t_two_sided(r * libm::sqrt(df / (1.0 - r * r)), df)
    };
    Ok(Correlation { r, p, n: k })
}

/// Pearson over the pairs where both sides are present.
pub fn pearson_pairwise<I>(pairs: I) -> core::result::Result<Correlation, Undefined>
where
    I: IntoIterator<Item = (Option<f64>, Option<f64>)>,
{
    let (x, y): (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) = pairs
        .into_iter()
        .filter_map(|(a, b)| Some((a?, b?)))
        .unzip();
    pearson(&x, &y)
}
