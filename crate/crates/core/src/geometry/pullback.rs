use super::{Embedding, Frame, InitialData, SpacetimeMetric};
use crate::dual::{seed, Dual, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{inv3, Mat3, Mat4};

/// Induced metric and second fundamental form of an embedded slice.
///
/// Frame vectors are pushed forward by the embedding differential. The
/// second fundamental form is `h(X, Y) = g(∇_X n, Y)` for the future-directed
/// unit normal `n`, which gives `h = +g` on the Minkowski hyperboloid.
///
/// The normal is obtained by projecting `∂_0` off the slice tangent space, so
/// only the (well-conditioned) induced 3-metric is ever inverted.
#[derive(Debug, Clone)]
pub struct Pullback<M, E> {
    metric: M,
    embedding: E,
    frame: Frame,
}

impl<M: SpacetimeMetric, E: Embedding> Pullback<M, E> {
    pub fn new(metric: M, embedding: E, frame: Frame) -> Result<Self> {
        if metric.chart() != embedding.target_chart() {
            return Err(Error::Usage(format!(
                "embedding targets {:?} but metric uses {:?}",
                embedding.target_chart(),
                metric.chart()
            )));
        }
        Ok(Pullback {
            metric,
            embedding,
            frame,
        })
    }

    pub fn spacetime(&self) -> &M {
        &self.metric
    }

    pub fn embedding(&self) -> &E {
        &self.embedding
    }

    /// Validate a chart point against the frame and the metric's domain.
    pub fn check_point(&self, x: &[f64; 3]) -> Result<()> {
        self.frame.check_point(x)?;
        self.metric.check_domain(&self.embedding.map(x))
    }

    fn tangents<S: Scalar>(&self, x: &[S; 3], dphi: &[[S; 4]; 3]) -> [[S; 4]; 3] {
        let e = self.frame.vectors(x);
        std::array::from_fn(|i| {
            std::array::from_fn(|al| {
                let mut s = S::zero();
                for a in 0..3 {
                    s = s + e[i][a] * dphi[a][al];
                }
                s
            })
        })
    }
}

fn inner<S: Scalar>(g: &Mat4<S>, a: &[S; 4], b: &[S; 4]) -> S {
    let mut s = S::zero();
    for al in 0..4 {
        for be in 0..4 {
            s = s + g[al][be] * a[al] * b[be];
        }
    }
    s
}

fn induced<S: Scalar>(g: &Mat4<S>, e: &[[S; 4]; 3]) -> Mat3<S> {
    let mut out = [[S::zero(); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = inner(g, &e[i], &e[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

fn values<S: Scalar>(x: &[S; 3]) -> [f64; 3] {
    x.map(|c| c.value())
}

impl<M: SpacetimeMetric, E: Embedding> InitialData for Pullback<M, E> {
    fn frame(&self) -> Frame {
        self.frame
    }

    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let phi: [Dual<S, 3>; 4] = self.embedding.map(&seed(*x));
        let p: [S; 4] = phi.map(|c| c.v);
        let dphi: [[S; 4]; 3] = std::array::from_fn(|a| std::array::from_fn(|al| phi[al].d[a]));
        let g = self.metric.components(&p);
        Ok(induced(&g, &self.tangents(x, &dphi)))
    }

    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let phi: [Dual<Dual<S, 3>, 3>; 4] = self.embedding.map(&seed(seed(*x)));
        let p: [S; 4] = phi.map(|c| c.v.v);
        let dphi: [[S; 4]; 3] = std::array::from_fn(|a| std::array::from_fn(|al| phi[al].v.d[a]));
        // ddphi[a][b][α] = ∂_a ∂_b Φ^α
        let ddphi: [[[S; 4]; 3]; 3] = std::array::from_fn(|a| {
            std::array::from_fn(|b| std::array::from_fn(|al| phi[al].d[b].d[a]))
        });

        let comps: Mat4<Dual<S, 4>> = self.metric.components(&seed(p));
        let g: Mat4<S> = std::array::from_fn(|a| std::array::from_fn(|b| comps[a][b].v));
        let dg = |c: usize, a: usize, b: usize| comps[a][b].d[c];

        let e = self.tangents(x, &dphi);
        let gi = induced(&g, &e);
        let degenerate = || Error::DegenerateSlice(values(x));
        if gi[0][0].value() <= 0.0 {
            return Err(degenerate());
        }
        let ginv = inv3(&gi).ok_or_else(degenerate)?;

        // project T = ∂_0 off the tangent space
        let gt: [S; 3] = std::array::from_fn(|j| {
            let mut s = S::zero();
            for be in 0..4 {
                s = s + g[0][be] * e[j][be];
            }
            s
        });
        let mut norm2 = g[0][0];
        let mut coef = [S::zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                coef[i] = coef[i] + ginv[i][j] * gt[j];
            }
            norm2 = norm2 - coef[i] * gt[i];
        }
        if norm2.value() >= 0.0 {
            return Err(degenerate());
        }
        let inv_len = (-norm2).sqrt().recip();
        let mut n_up: [S; 4] = std::array::from_fn(|al| {
            let mut v = if al == 0 { S::one() } else { S::zero() };
            for i in 0..3 {
                v = v - coef[i] * e[i][al];
            }
            v * inv_len
        });
        if n_up[0].value() < 0.0 {
            n_up = n_up.map(|v| -v);
        }
        let n_low: [S; 4] = std::array::from_fn(|al| {
            let mut s = S::zero();
            for be in 0..4 {
                s = s + g[al][be] * n_up[be];
            }
            s
        });

        let fv = self.frame.vectors(x);
        let mut h = [[S::zero(); 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let mut acc = S::zero();
                for al in 0..4 {
                    let mut hess = S::zero();
                    for a in 0..3 {
                        for b in 0..3 {
                            hess = hess + fv[i][a] * fv[j][b] * ddphi[a][b][al];
                        }
                    }
                    acc = acc + n_low[al] * hess;
                }
                for de in 0..4 {
                    for be in 0..4 {
                        for ga in 0..4 {
                            let christ = (dg(be, de, ga) + dg(ga, de, be) - dg(de, be, ga)) * 0.5;
                            acc = acc + n_up[de] * christ * e[i][be] * e[j][ga];
                        }
                    }
                }
                h[i][j] = -acc;
                h[j][i] = -acc;
            }
        }
        Ok(h)
    }
}
