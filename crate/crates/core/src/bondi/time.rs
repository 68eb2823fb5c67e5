//! Retarded-time dependence of expansion coefficients.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{Error, Result};

/// Highest derivative order kept for tabulated profiles.
const MAX_ORDER: usize = 4;

/// Samples of a profile on a uniform retarded-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSamples {
    pub u: Vec<f64>,
    pub values: Vec<f64>,
}

/// A tabulated profile. Derivatives come from fourth-order differences on
/// the grid (one-sided near the ends); all orders are interpolated by cubic
/// Lagrange polynomials between nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableSamples", into = "TableSamples")]
pub struct TimeTable {
    samples: TableSamples,
    h: f64,
    derivs: Vec<Vec<f64>>,
}

fn difference4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    let lead = |g: &dyn Fn(usize) -> f64| {
        (
            (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h),
            (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * h),
        )
    };
    (out[0], out[1]) = lead(&|k| f[k]);
    let (a, b) = lead(&|k| f[n - 1 - k]);
    out[n - 1] = -a;
    out[n - 2] = -b;
    out
}

impl TryFrom<TableSamples> for TimeTable {
    type Error = Error;

    fn try_from(samples: TableSamples) -> Result<Self> {
        let n = samples.u.len();
        if n < 5 || samples.values.len() != n {
            return Err(Error::Config(format!(
                "time table needs at least 5 (u, value) pairs of equal length, got {} and {}",
                n,
                samples.values.len()
            )));
        }
        if samples
            .u
            .iter()
            .chain(&samples.values)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config(
                "time table contains non-finite entries".into(),
            ));
        }
        let h = (samples.u[n - 1] - samples.u[0]) / (n - 1) as f64;
        if !(h > 0.0)
            || samples
                .u
                .windows(2)
                .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0))
        {
            return Err(Error::Config(
                "time table u-grid must be uniform and increasing".into(),
            ));
        }
        let mut derivs = vec![samples.values.clone()];
        for k in 0..MAX_ORDER {
            let next = difference4(&derivs[k], h);
            derivs.push(next);
        }
        Ok(TimeTable { samples, h, derivs })
    }
}

impl From<TimeTable> for TableSamples {
    fn from(t: TimeTable) -> Self {
        t.samples
    }
}

impl TimeTable {
    pub fn new(u: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        TableSamples { u, values }.try_into()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.samples.u[0], *self.samples.u.last().expect("nonempty"))
    }

    /// `k`-th derivative at `u`.
    pub fn derivative(&self, u: f64, k: usize) -> f64 {
        let Some(f) = self.derivs.get(k) else {
            return 0.0;
        };
        let n = f.len();
        let s = (u - self.samples.u[0]) / self.h;
        let start = (s.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (s - (start + j) as f64) / (i as f64 - j as f64);
                }
            }
            acc += w * f[start + i];
        }
        acc
    }
}

/// Time dependence of one mode: a polynomial (lowest order first) or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeProfile {
    Polynomial(Vec<f64>),
    Table(TimeTable),
}

impl From<Vec<f64>> for TimeProfile {
    fn from(v: Vec<f64>) -> Self {
        TimeProfile::Polynomial(v)
    }
}

impl TimeProfile {
    pub fn eval<S: Scalar>(&self, u: S) -> S {
        match self {
            TimeProfile::Polynomial(p) => p.iter().rev().fold(S::zero(), |acc, &a| acc * u + a),
            TimeProfile::Table(t) => u.lift(&|x, k| t.derivative(x, k)),
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        match self {
            TimeProfile::Polynomial(p) => {
                TimeProfile::Polynomial(p.into_iter().map(|a| a * k).collect())
            }
            TimeProfile::Table(t) => {
                let TableSamples { u, values } = t.samples;
                TimeProfile::Table(
                    TimeTable::new(u, values.into_iter().map(|v| v * k).collect())
                        .expect("scaling keeps a valid table"),
                )
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeProfile::Polynomial(p) => p.iter().all(|&a| a == 0.0),
            TimeProfile::Table(t) => t.samples.values.iter().all(|&v| v == 0.0),
        }
    }

    /// Retarded-time interval where the profile is defined (`None` = everywhere).
    pub fn range(&self) -> Option<(f64, f64)> {
        match self {
            TimeProfile::Polynomial(_) => None,
            TimeProfile::Table(t) => Some(t.range()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{seed, Dual};

    #[test]
    fn table_reproduces_cubic() {
        let u: Vec<f64> = (0..21).map(|k| k as f64 * 0.1).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let t = TimeTable::new(u.clone(), u.iter().map(|&x| f(x)).collect()).unwrap();
        for x in [0.0, 0.03, 0.77, 1.55, 2.0] {
            assert!((t.derivative(x, 0) - f(x)).abs() < 1e-13);
            assert!((t.derivative(x, 1) - (-2.0 + 1.5 * x * x)).abs() < 1e-11);
            assert!((t.derivative(x, 2) - 3.0 * x).abs() < 1e-9);
        }
        let p = TimeProfile::Table(t);
        let d: Dual<Dual<f64, 1>, 1> = p.eval(seed(seed([0.5]))[0]);
        assert!((d.d[0].d[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TimeTable::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(TimeTable::new(vec![0.0, 1.0, 2.0, 3.5, 4.0], vec![0.0; 5]).is_err());
        assert!(TimeTable::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn serde_forms() {
        let p: TimeProfile = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(p, TimeProfile::Polynomial(vec![1.0, 2.0]));
        let t: TimeProfile =
            serde_json::from_str(r#"{"u":[0,1,2,3,4],"values":[0,1,2,3,4]}"#).unwrap();
        assert_eq!(t.range(), Some((0.0, 4.0)));
        assert!((t.eval(2.5f64) - 2.5).abs() < 1e-14);
    }
}
