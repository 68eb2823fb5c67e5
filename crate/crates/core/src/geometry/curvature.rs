//! Connection and curvature of 3-dimensional initial data in frame components.
//!
//! The Levi-Civita connection is built from the Koszul formula in a general
//! (non-orthonormal, non-holonomic) frame; commutators of the frame vectors
//! enter through their structure functions `[e_i, e_j] = c_ij^k e_k`.

use serde::Serialize;

use super::InitialData;
use crate::dual::{seed, Dual, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{inv3, Mat3};

type T3<S> = [[[S; 3]; 3]; 3];

/// Connection data at a point.
#[derive(Debug, Clone)]
pub struct FrameConnection<S> {
    pub g: Mat3<S>,
    pub ginv: Mat3<S>,
    /// `gamma[l][i][j] = Γ^l_ij` with `∇_{e_i} e_j = Γ^l_ij e_l`.
    pub gamma: T3<S>,
    /// `structure[i][j][k] = c_ij^k`.
    pub structure: T3<S>,
    /// Frame vectors `E[i][a]` in the coordinate basis.
    pub frame_vectors: Mat3<S>,
    /// `dg[k][i][j] = e_k(g_ij)`.
    pub dg: T3<S>,
}

/// Levi-Civita connection of the data metric in its frame.
pub fn frame_connection<S: Scalar, D: InitialData>(
    data: &D,
    x: &[S; 3],
) -> Result<FrameConnection<S>> {
    let xs: [Dual<S, 3>; 3] = seed(*x);
    let g1 = data.metric(&xs)?;
    let e1 = data.frame().vectors(&xs);
    let g: Mat3<S> = std::array::from_fn(|i| std::array::from_fn(|j| g1[i][j].v));
    let e: Mat3<S> = std::array::from_fn(|i| std::array::from_fn(|a| e1[i][a].v));
    let point = || x.map(|c| c.value());
    let ginv = inv3(&g).ok_or_else(|| Error::DegenerateSlice(point()))?;
    let einv = inv3(&e).ok_or_else(|| Error::Domain {
        point: point().to_vec(),
        reason: "frame is singular".into(),
    })?;

    let dg: T3<S> = std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = S::zero();
                for a in 0..3 {
                    s = s + e[k][a] * g1[i][j].d[a];
                }
                s
            })
        })
    });

    let mut structure = [[[S::zero(); 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let comm: [S; 3] = std::array::from_fn(|a| {
                let mut s = S::zero();
                for b in 0..3 {
                    s = s + e[i][b] * e1[j][a].d[b] - e[j][b] * e1[i][a].d[b];
                }
                s
            });
            for k in 0..3 {
                let mut s = S::zero();
                for a in 0..3 {
                    s = s + comm[a] * einv[a][k];
                }
                structure[i][j][k] = s;
            }
        }
    }
    // C(i,j,k) = g([e_i, e_j], e_k)
    let cc = |i: usize, j: usize, k: usize| {
        let mut s = S::zero();
        for m in 0..3 {
            s = s + structure[i][j][m] * g[m][k];
        }
        s
    };
    let mut low = [[[S::zero(); 3]; 3]; 3];
    for (k, low_k) in low.iter_mut().enumerate() {
        for (i, low_ki) in low_k.iter_mut().enumerate() {
            for (j, v) in low_ki.iter_mut().enumerate() {
                *v = (dg[i][j][k] + dg[j][i][k] - dg[k][i][j] + cc(i, j, k) - cc(j, k, i)
                    + cc(k, i, j))
                    * 0.5;
            }
        }
    }
    let gamma = std::array::from_fn(|l| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = S::zero();
                for k in 0..3 {
                    s = s + ginv[l][k] * low[k][i][j];
                }
                s
            })
        })
    });
    Ok(FrameConnection {
        g,
        ginv,
        gamma,
        structure,
        frame_vectors: e,
        dg,
    })
}

/// Frame components of `∇g`; vanish for a metric-compatible connection.
pub fn metric_compatibility_residual<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<f64> {
    let c = frame_connection(data, x)?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut v = c.dg[k][i][j];
                for m in 0..3 {
                    v -= c.gamma[m][k][i] * c.g[m][j] + c.gamma[m][k][j] * c.g[i][m];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Riemann, Ricci and scalar curvature in frame components.
#[derive(Debug, Clone)]
pub struct Curvature3 {
    /// `riemann[i][j][k][l] = g(R(e_i, e_j) e_l, e_k)`, so that constant
    /// sectional curvature `K` gives `K (g_ik g_jl − g_il g_jk)`.
    pub riemann: [[[[f64; 3]; 3]; 3]; 3],
    pub ricci: Mat3<f64>,
    pub scalar: f64,
    pub connection: FrameConnection<f64>,
}

/// Everything needed for the constraint and rigidity quantities at one point.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub curvature: Curvature3,
    pub p: Mat3<f64>,
    /// `nabla_p[k][i][j] = (∇_k p)_ij`.
    pub nabla_p: T3<f64>,
    /// `nabla_antisym[k][i][j] = (∇_k (p − pᵀ))_ij`.
    pub nabla_antisym: T3<f64>,
}

fn curvature_at<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<Curvature3> {
    let c1 = frame_connection(data, &seed(*x))?;
    let val = |t: &T3<Dual<f64, 3>>| -> T3<f64> { t.map(|a| a.map(|b| b.map(|v| v.v))) };
    let connection = FrameConnection {
        g: c1.g.map(|r| r.map(|v| v.v)),
        ginv: c1.ginv.map(|r| r.map(|v| v.v)),
        gamma: val(&c1.gamma),
        structure: val(&c1.structure),
        frame_vectors: c1.frame_vectors.map(|r| r.map(|v| v.v)),
        dg: val(&c1.dg),
    };
    let e = &connection.frame_vectors;
    let gam = &connection.gamma;
    let cs = &connection.structure;
    // e_m(Γ^l_ij)
    let dgam = |m: usize, l: usize, i: usize, j: usize| {
        let mut s = 0.0;
        for a in 0..3 {
            s += e[m][a] * c1.gamma[l][i][j].d[a];
        }
        s
    };
    // R(e_i, e_j) e_k = R^m_kij e_m
    let mut rup = [[[[0.0; 3]; 3]; 3]; 3];
    for (m, rm) in rup.iter_mut().enumerate() {
        for (k, rmk) in rm.iter_mut().enumerate() {
            for (i, rmki) in rmk.iter_mut().enumerate() {
                for (j, v) in rmki.iter_mut().enumerate() {
                    let mut s = dgam(i, m, j, k) - dgam(j, m, i, k);
                    for l in 0..3 {
                        s += gam[l][j][k] * gam[m][i][l]
                            - gam[l][i][k] * gam[m][j][l]
                            - cs[i][j][l] * gam[m][l][k];
                    }
                    *v = s;
                }
            }
        }
    }
    let g = &connection.g;
    let riemann = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| (0..3).map(|m| rup[m][l][i][j] * g[m][k]).sum())
            })
        })
    });
    let ricci: Mat3<f64> =
        std::array::from_fn(|j| std::array::from_fn(|l| (0..3).map(|i| rup[i][l][i][j]).sum()));
    let mut scalar = 0.0;
    for j in 0..3 {
        for l in 0..3 {
            scalar += connection.ginv[j][l] * ricci[j][l];
        }
    }
    Ok(Curvature3 {
        riemann,
        ricci,
        scalar,
        connection,
    })
}

/// Riemann tensor and scalar curvature of the data metric.
pub fn curvature3<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<Curvature3> {
    data.frame().check_point(x)?;
    curvature_at(data, x)
}

impl PointAnalysis {
    pub fn new<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<Self> {
        let curvature = curvature3(data, x)?;
        let p1 = data.second_form(&seed(*x))?;
        let c = &curvature.connection;
        let p: Mat3<f64> = p1.map(|r| r.map(|v| v.v));
        let frame_derivative = |k: usize, f: &dyn Fn(usize) -> f64| {
            (0..3).map(|a| c.frame_vectors[k][a] * f(a)).sum::<f64>()
        };
        let covariant = |q: &Mat3<f64>, dq: &dyn Fn(usize, usize, usize) -> f64| -> T3<f64> {
            std::array::from_fn(|k| {
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| {
                        let mut v = frame_derivative(k, &|a| dq(a, i, j));
                        for m in 0..3 {
                            v -= c.gamma[m][k][i] * q[m][j] + c.gamma[m][k][j] * q[i][m];
                        }
                        v
                    })
                })
            })
        };
        let nabla_p = covariant(&p, &|a, i, j| p1[i][j].d[a]);
        let anti: Mat3<f64> = std::array::from_fn(|i| std::array::from_fn(|j| p[i][j] - p[j][i]));
        let nabla_antisym = covariant(&anti, &|a, i, j| p1[i][j].d[a] - p1[j][i].d[a]);
        Ok(PointAnalysis {
            curvature,
            p,
            nabla_p,
            nabla_antisym,
        })
    }

    fn ginv(&self) -> &Mat3<f64> {
        &self.curvature.connection.ginv
    }

    fn norm(&self, v: &[f64; 3]) -> f64 {
        let gi = self.ginv();
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += gi[i][j] * v[i] * v[j];
            }
        }
        s.max(0.0).sqrt()
    }

    pub fn constraint_quantities(&self) -> ConstraintQuantities {
        let gi = *self.ginv();
        let p = &self.p;
        let mut tr = 0.0;
        let mut sq = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tr += gi[i][j] * p[i][j];
                for a in 0..3 {
                    for b in 0..3 {
                        sq += gi[i][a] * gi[j][b] * p[a][b] * p[i][j];
                    }
                }
            }
        }
        let mu = 0.5 * (self.curvature.scalar + tr * tr - sq);
        let np = &self.nabla_p;
        let na = &self.nabla_antisym;
        let mut varpi = [0.0; 3];
        let mut sigma = [0.0; 3];
        for j in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    varpi[j] += gi[i][k] * np[k][j][i];
                    varpi[j] -= gi[i][k] * np[j][i][k];
                    sigma[j] += 2.0 * gi[i][k] * na[k][i][j];
                }
            }
        }
        let sum: [f64; 3] = std::array::from_fn(|j| varpi[j] + sigma[j]);
        ConstraintQuantities {
            mu,
            varpi,
            sigma,
            varpi_norm: self.norm(&varpi),
            varpi_plus_sigma_norm: self.norm(&sum),
        }
    }

    pub fn rigidity_residual(&self) -> RigidityResiduals {
        let r = &self.curvature.riemann;
        let p = &self.p;
        let mut curv = 0.0;
        let mut codazzi = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        curv += (r[i][j][k][l] + p[i][k] * p[j][l] - p[i][l] * p[j][k]).powi(2);
                    }
                    codazzi += (self.nabla_p[i][j][k] - self.nabla_p[j][i][k]).powi(2);
                }
            }
        }
        let gi = self.ginv();
        let div: [f64; 3] = std::array::from_fn(|i| {
            let mut s = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    s += gi[j][k] * self.nabla_antisym[k][i][j];
                }
            }
            s
        });
        RigidityResiduals {
            curvature: curv.sqrt(),
            codazzi: codazzi.sqrt(),
            antisymmetric_divergence: self.norm(&div),
        }
    }
}

/// `μ = ½(R + (tr p)² − p_ij p^ij)`, `ϖ_j = ∇^i p_ji − ∇_j tr p`,
/// `σ_j = 2 ∇^i (p_ij − p_ji)`; norms taken with `g`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstraintQuantities {
    pub mu: f64,
    pub varpi: [f64; 3],
    pub sigma: [f64; 3],
    pub varpi_norm: f64,
    pub varpi_plus_sigma_norm: f64,
}

impl ConstraintQuantities {
    /// `μ − max(|ϖ|, |ϖ + σ|)`; nonnegative exactly where the energy condition holds.
    pub fn dec_margin(&self) -> f64 {
        self.mu - self.varpi_norm.max(self.varpi_plus_sigma_norm)
    }
}

/// Norms of `R_ijkl + p_ik p_jl − p_il p_jk`, `∇_i p_jk − ∇_j p_ik` and `∇^j (p_ij − p_ji)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RigidityResiduals {
    pub curvature: f64,
    pub codazzi: f64,
    pub antisymmetric_divergence: f64,
}

impl RigidityResiduals {
    pub fn max(&self) -> f64 {
        self.curvature
            .max(self.codazzi)
            .max(self.antisymmetric_divergence)
    }
}

pub fn constraint_quantities<D: InitialData>(
    data: &D,
    x: &[f64; 3],
) -> Result<ConstraintQuantities> {
    Ok(PointAnalysis::new(data, x)?.constraint_quantities())
}

pub fn rigidity_residual<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<RigidityResiduals> {
    Ok(PointAnalysis::new(data, x)?.rigidity_residual())
}
