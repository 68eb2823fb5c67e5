use std::f64::consts::PI;

use charges_core::bondi::scenario::{biaxial, biaxial_slice};
use charges_core::dual::{seed, Dual};
use charges_core::fit::decay_exponent;
use charges_core::geometry::{
    christoffel4, curvature3, evaluate, metric_compatibility_residual, ricci4, signature, Chart4,
    Embedding, Frame, InitialData, PointAnalysis, Pullback, SpacetimeMetric, SpacetimePoint,
};
use charges_core::linalg::{inv3, Mat3};
use charges_core::spacetimes::{
    BondiMetric, BondiSlice, Hyperboloid, Kerr, KerrParameters, Minkowski, PolarFromCartesianSlice,
    Schwarzschild, StaticSlice,
};
use charges_core::synthetic::{HyperboloidModel, PerturbedHyperboloid, RoundCylinder};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PROBES: usize = 100;
const FD_STEP: f64 = 1e-5;
const FD_REL: f64 = 1e-6;

fn rng() -> StdRng {
    StdRng::seed_from_u64(0x5eed)
}

fn polar3(rng: &mut StdRng, r_lo: f64, r_hi: f64) -> [f64; 3] {
    let r = (r_lo.ln() + rng.gen::<f64>() * (r_hi / r_lo).ln()).exp();
    [
        r,
        rng.gen_range(0.15..PI - 0.15),
        rng.gen_range(0.0..2.0 * PI),
    ]
}

/// Compare forward-mode gradients of every output with central differences.
fn check_gradients<const N: usize>(
    points: &[[f64; N]],
    plain: impl Fn(&[f64; N]) -> Vec<f64>,
    dual: impl Fn(&[Dual<f64, N>; N]) -> Vec<Dual<f64, N>>,
    what: &str,
) {
    for x in points {
        let exact = dual(&seed(*x));
        for k in 0..N {
            let (mut xp, mut xm) = (*x, *x);
            xp[k] += FD_STEP;
            xm[k] -= FD_STEP;
            let (fp, fm) = (plain(&xp), plain(&xm));
            for (c, e) in exact.iter().enumerate() {
                let fd = (fp[c] - fm[c]) / (2.0 * FD_STEP);
                let d = e.d[k];
                assert!(
                    (d - fd).abs() <= FD_REL * d.abs().max(1.0),
                    "{what}: component {c}, direction {k} at {x:?}: dual {d} vs fd {fd}"
                );
            }
        }
    }
}

fn metric_gradients<M: SpacetimeMetric>(metric: &M, points: &[[f64; 4]], what: &str) {
    check_gradients(
        points,
        |x| metric.components(x).iter().flatten().copied().collect(),
        |x| metric.components(x).iter().flatten().copied().collect(),
        what,
    );
}

fn data_gradients<D: InitialData>(data: &D, points: &[[f64; 3]], what: &str) {
    let both = |g: Mat3<f64>, h: Mat3<f64>| {
        g.iter()
            .chain(h.iter())
            .flatten()
            .copied()
            .collect::<Vec<_>>()
    };
    check_gradients(
        points,
        |x| {
            let (g, h) = evaluate(data, x).unwrap();
            both(g, h)
        },
        |x| {
            let g = data.metric(x).unwrap();
            let h = data.second_form(x).unwrap();
            g.iter().chain(h.iter()).flatten().copied().collect()
        },
        what,
    );
}

fn spacetime_points(rng: &mut StdRng, r_lo: f64, r_hi: f64) -> Vec<[f64; 4]> {
    (0..PROBES)
        .map(|_| {
            let [r, t, p] = polar3(rng, r_lo, r_hi);
            [rng.gen_range(-1.0..1.0), r, t, p]
        })
        .collect()
}

#[test]
fn metric_derivatives_match_finite_differences() {
    let mut rng = rng();
    let pts = spacetime_points(&mut rng, 3.0, 60.0);
    metric_gradients(
        &Minkowski::new(Chart4::StaticPolar),
        &pts,
        "minkowski polar",
    );
    metric_gradients(
        &Minkowski::new(Chart4::Retarded),
        &pts,
        "minkowski retarded",
    );
    metric_gradients(
        &Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap(),
        &pts,
        "schwarzschild static",
    );
    metric_gradients(
        &Schwarzschild::new(1.0, Chart4::Retarded).unwrap(),
        &pts,
        "schwarzschild retarded",
    );
    metric_gradients(
        &Kerr::new(KerrParameters::new(1.0, 0.5).unwrap()),
        &pts,
        "kerr",
    );
    let pts = spacetime_points(&mut rng, 5.0, 60.0);
    metric_gradients(
        &BondiMetric::with_r_min(biaxial(), 5.0),
        &pts,
        "bondi biaxial",
    );
}

#[test]
fn embedding_derivatives_match_finite_differences() {
    let mut rng = rng();
    let pts: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 0.5, 60.0)).collect();
    let emb =
        |e: &dyn Fn(&[f64; 3]) -> [f64; 4],
         d: &dyn Fn(&[Dual<f64, 3>; 3]) -> [Dual<f64, 3>; 4],
         what| { check_gradients(&pts, |x| e(x).to_vec(), |x| d(x).to_vec(), what) };
    let h = Hyperboloid::static_polar();
    emb(&|x| h.map(x), &|x| h.map(x), "hyperboloid");
    let h = Hyperboloid::retarded();
    emb(&|x| h.map(x), &|x| h.map(x), "hyperboloid retarded");
    let s = BondiSlice::new(biaxial_slice(), biaxial());
    emb(&|x| s.map(x), &|x| s.map(x), "bondi slice");
    let cart: Vec<[f64; 3]> = pts
        .iter()
        .map(|&[r, t, p]| [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()])
        // keep away from the branch cut of ψ
        .filter(|x| x[1].abs() > 1e-3 || x[0] > 0.0)
        .collect();
    let c = PolarFromCartesianSlice { t0: 0.0 };
    check_gradients(
        &cart,
        |x| c.map(x).to_vec(),
        |x| c.map(x).to_vec(),
        "polar from cartesian",
    );
}

#[test]
fn initial_data_derivatives_match_finite_differences() {
    let mut rng = rng();
    let pts: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 0.5, 60.0)).collect();
    let hyp = Pullback::new(
        Minkowski::new(Chart4::StaticPolar),
        Hyperboloid::static_polar(),
        Frame::hyperbolic(),
    )
    .unwrap();
    data_gradients(&hyp, &pts, "hyperboloid pullback");
    let mut p = PerturbedHyperboloid::symmetric(0.3, 0.2, 2.0);
    p.antisym = 0.5;
    data_gradients(&p, &pts, "perturbed hyperboloid");
    let far: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 8.0, 80.0)).collect();
    let bondi = Pullback::new(
        BondiMetric::with_r_min(biaxial(), 5.0),
        BondiSlice::new(biaxial_slice(), biaxial()),
        Frame::hyperbolic(),
    )
    .unwrap();
    data_gradients(&bondi, &far, "bondi slice pullback");
    let sch = Pullback::new(
        Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap(),
        StaticSlice::new(0.0),
        Frame::hyperbolic(),
    )
    .unwrap();
    data_gradients(&sch, &far, "schwarzschild static slice");
}

#[test]
fn hyperboloid_pullback_is_identity() {
    let mut rng = rng();
    for chart in [Chart4::StaticPolar, Chart4::Retarded] {
        let emb = Hyperboloid { chart };
        let data = Pullback::new(Minkowski::new(chart), emb, Frame::hyperbolic()).unwrap();
        for _ in 0..PROBES {
            let x = polar3(&mut rng, 0.05, 200.0);
            let (g, h) = evaluate(&data, &x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (g[i][j] - id).abs() < 1e-10,
                        "{chart:?} g{i}{j} at {x:?}: {}",
                        g[i][j]
                    );
                    assert!(
                        (h[i][j] - id).abs() < 1e-10,
                        "{chart:?} h{i}{j} at {x:?}: {}",
                        h[i][j]
                    );
                }
            }
            let rig = PointAnalysis::new(&data, &x).unwrap().rigidity_residual();
            assert!(rig.max() <= 1e-7, "{rig:?} at {x:?}");
        }
    }
}

#[test]
fn static_slices_are_time_symmetric() {
    let mut rng = rng();
    let flat = Pullback::new(
        Minkowski::new(Chart4::StaticPolar),
        StaticSlice::new(0.7),
        Frame::hyperbolic(),
    )
    .unwrap();
    let sch = Pullback::new(
        Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap(),
        StaticSlice::new(-2.0),
        Frame::hyperbolic(),
    )
    .unwrap();
    for _ in 0..20 {
        let x = polar3(&mut rng, 3.0, 100.0);
        for h in [
            evaluate(&flat, &x).unwrap().1,
            evaluate(&sch, &x).unwrap().1,
        ] {
            assert!(h.iter().flatten().all(|v| *v == 0.0), "{h:?}");
        }
    }
    // Euclidean frame on a Cartesian slice of Minkowski: g = δ, h = 0
    let cart = Pullback::new(
        Minkowski::new(Chart4::Cartesian),
        charges_core::spacetimes::CartesianSlice { t0: 0.0 },
        Frame::cartesian(),
    )
    .unwrap();
    let (g, h) = evaluate(&cart, &[1.0, -2.0, 0.5]).unwrap();
    assert_eq!(g, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    assert_eq!(h, [[0.0; 3]; 3]);
}

#[test]
fn frame_scaling_is_bilinear() {
    let scales = [2.0, 0.5, -3.0];
    let x = [3.0, 1.1, 0.4];
    let base = Pullback::new(
        BondiMetric::with_r_min(biaxial(), 1.0),
        BondiSlice::new(biaxial_slice(), biaxial()),
        Frame::hyperbolic(),
    )
    .unwrap();
    let scaled = Pullback::new(
        BondiMetric::with_r_min(biaxial(), 1.0),
        BondiSlice::new(biaxial_slice(), biaxial()),
        Frame::hyperbolic().scaled(scales),
    )
    .unwrap();
    let (g0, h0) = evaluate(&base, &x).unwrap();
    let (g1, h1) = evaluate(&scaled, &x).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let k = scales[i] * scales[j];
            assert!((g1[i][j] - k * g0[i][j]).abs() < 1e-13 * k.abs().max(1.0));
            assert!((h1[i][j] - k * h0[i][j]).abs() < 1e-13 * k.abs().max(1.0));
        }
    }
}

#[test]
fn christoffel_symmetric_and_compatible() {
    let mut rng = rng();
    let k = Kerr::new(KerrParameters::new(1.0, 0.6).unwrap());
    let b = BondiMetric::with_r_min(biaxial(), 5.0);
    for x in spacetime_points(&mut rng, 6.0, 40.0).iter().take(30) {
        for (chart, gam, g, dg) in [
            (
                Chart4::StaticPolar,
                christoffel4(&k, &SpacetimePoint::new(Chart4::StaticPolar, *x).unwrap()).unwrap(),
                k.components(x),
                k.components(&seed(*x)),
            ),
            (
                Chart4::Retarded,
                christoffel4(&b, &SpacetimePoint::new(Chart4::Retarded, *x).unwrap()).unwrap(),
                b.components(x),
                b.components(&seed(*x)),
            ),
        ] {
            for a in 0..4 {
                for bb in 0..4 {
                    for c in 0..4 {
                        assert_eq!(gam[a][bb][c], gam[a][c][bb]);
                        // ∇_c g_ab = ∂_c g_ab − Γ^e_ca g_eb − Γ^e_cb g_ae
                        let mut r = dg[a][bb].d[c];
                        for e in 0..4 {
                            r -= gam[e][c][a] * g[e][bb] + gam[e][c][bb] * g[a][e];
                        }
                        let scale = dg[a][bb].d[c].abs().max(g[a][bb].abs()).max(1.0);
                        assert!(r.abs() <= 1e-9 * scale, "{chart:?} ∇g at {x:?}: {r}");
                    }
                }
            }
        }
    }
}

#[test]
fn catalog_metrics_are_lorentzian() {
    let mut rng = rng();
    let s = Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap();
    let k = Kerr::new(KerrParameters::new(1.0, 0.9).unwrap());
    let b = BondiMetric::with_r_min(biaxial(), 5.0);
    for x in spacetime_points(&mut rng, 6.0, 300.0).iter().take(40) {
        assert_eq!(signature(&s, x), (1, 3));
        assert_eq!(signature(&k, x), (1, 3));
        assert_eq!(signature(&b, x), (1, 3));
        for g in [s.components(x), k.components(x), b.components(x)] {
            for a in 0..4 {
                for c in 0..4 {
                    assert_eq!(g[a][c], g[c][a]);
                }
            }
        }
    }
}

#[test]
fn small_mass_limit_is_minkowski() {
    let flat = Minkowski::new(Chart4::StaticPolar);
    for m in [1e-6, 1e-9, 1e-12] {
        let s = Schwarzschild::new(m, Chart4::StaticPolar).unwrap();
        let x = [0.0, 7.0, 1.2, 0.3];
        let (a, b) = (s.components(&x), flat.components(&x));
        let err = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (a[i][j] - b[i][j]).abs())
            .fold(0.0, f64::max);
        assert!(err <= 2.0 * m, "m = {m}: {err}");
    }
    let s = Schwarzschild::new(1e-14, Chart4::StaticPolar).unwrap();
    let (a, b) = (
        s.components(&[0.0, 7.0, 1.2, 0.3]),
        flat.components(&[0.0, 7.0, 1.2, 0.3]),
    );
    for i in 0..4 {
        for j in 0..4 {
            assert!((a[i][j] - b[i][j]).abs() <= 1e-12 * b[i][j].abs().max(1.0));
        }
    }
}

#[test]
fn truncated_bondi_ricci_decay_by_equation_class() {
    // Main equations (rr, rA, AB) and the trivial ur equation hold to the
    // truncation order; the supplementary uu and uA equations would fix the
    // u-evolution of M and N, which is not modelled.
    let radii = [50.0, 100.0, 200.0, 400.0, 800.0];
    for (name, exp) in [
        (
            "quadrupole",
            charges_core::bondi::scenario::quadrupole(0.1, 0.0, 1.0),
        ),
        ("biaxial", biaxial()),
    ] {
        let b = BondiMetric::with_r_min(exp, 1.0);
        let mut main = Vec::new();
        let mut uu = Vec::new();
        let mut ua = Vec::new();
        for &r in &radii {
            let (mut m, mut a, mut c) = (0.0f64, 0.0f64, 0.0f64);
            for &(th, ps) in &[(0.7, 0.3), (1.3, 2.0), (2.2, 4.0)] {
                let p = SpacetimePoint::new(Chart4::Retarded, [0.4, r, th, ps]).unwrap();
                let ric = ricci4(&b, &p).unwrap();
                let s = Chart4::Retarded.scale_factors(&p.coords);
                let unit = |i: usize, j: usize| (ric[i][j] / (s[i] * s[j])).abs();
                a = a.max(unit(0, 0));
                c = c.max(unit(0, 2)).max(unit(0, 3));
                for i in 1..4 {
                    for j in i..4 {
                        m = m.max(unit(i, j));
                    }
                }
                m = m.max(unit(0, 1));
            }
            main.push(m);
            uu.push(a);
            ua.push(c);
        }
        let main = decay_exponent(&radii, &main).unwrap().exponent();
        let uu = decay_exponent(&radii, &uu).unwrap().exponent();
        let ua = decay_exponent(&radii, &ua).unwrap().exponent();
        assert!(main >= 3.5, "{name}: main-equation Ricci decays at {main}");
        assert!((uu - 2.0).abs() < 0.05, "{name}: R_uu decays at {uu}");
        assert!(ua >= 2.9, "{name}: R_uA decays at {ua}");
    }
}

fn hyperbolic_frame_inverse(x: &[f64; 3]) -> [f64; 3] {
    [1.0 / (1.0 + x[0] * x[0]).sqrt(), x[0], x[0] * x[1].sin()]
}

/// Coordinate metric of hyperbolic-frame data (the frame is diagonal).
fn coordinate_metric<D: InitialData>(data: &D, x: &[f64; 3]) -> Mat3<f64> {
    let (g, _) = evaluate(data, x).unwrap();
    let w = hyperbolic_frame_inverse(x);
    std::array::from_fn(|a| std::array::from_fn(|b| w[a] * w[b] * g[a][b]))
}

/// Fourth-order central difference of a matrix-valued function.
fn d4<const N: usize>(
    f: &dyn Fn(&[f64; 3]) -> [[f64; N]; N],
    x: &[f64; 3],
    k: usize,
    h: f64,
) -> [[f64; N]; N] {
    let at = |s: f64| {
        let mut y = *x;
        y[k] += s * h;
        f(&y)
    };
    let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (m2[i][j] - 8.0 * m1[i][j] + 8.0 * p1[i][j] - p2[i][j]) / (12.0 * h)
        })
    })
}

/// Coordinate Christoffel symbols `Γ^a_bc` of `g` by finite differences.
fn fd_christoffel(g: &dyn Fn(&[f64; 3]) -> Mat3<f64>, x: &[f64; 3], h: f64) -> [Mat3<f64>; 3] {
    let dg: [Mat3<f64>; 3] = std::array::from_fn(|k| d4(g, x, k, h));
    let gi = inv3(&g(x)).unwrap();
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                (0..3)
                    .map(|e| 0.5 * gi[a][e] * (dg[b][e][c] + dg[c][e][b] - dg[e][b][c]))
                    .sum()
            })
        })
    })
}

/// `R_abcd = g(R(∂_a, ∂_b)∂_d, ∂_c)` in coordinates, by nested finite differences.
fn fd_riemann(g: &dyn Fn(&[f64; 3]) -> Mat3<f64>, x: &[f64; 3]) -> [[Mat3<f64>; 3]; 3] {
    const H: f64 = 1e-3;
    let gam = fd_christoffel(g, x, H);
    let dgam: [[Mat3<f64>; 3]; 3] = std::array::from_fn(|k| {
        let comp: [Mat3<f64>; 3] =
            std::array::from_fn(|c| d4(&|y| fd_christoffel(g, y, H)[c], x, k, H));
        comp
    });
    let gx = g(x);
    // R^c_{dab} = ∂_a Γ^c_bd − ∂_b Γ^c_ad + Γ^c_ae Γ^e_bd − Γ^c_be Γ^e_ad
    let up = |c: usize, d: usize, a: usize, b: usize| {
        let mut s = dgam[a][c][b][d] - dgam[b][c][a][d];
        for e in 0..3 {
            s += gam[c][a][e] * gam[e][b][d] - gam[c][b][e] * gam[e][a][d];
        }
        s
    };
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                std::array::from_fn(|d| (0..3).map(|e| gx[c][e] * up(e, d, a, b)).sum())
            })
        })
    })
}

fn fd_scalar(g: &dyn Fn(&[f64; 3]) -> Mat3<f64>, x: &[f64; 3]) -> f64 {
    let r = fd_riemann(g, x);
    let gi = inv3(&g(x)).unwrap();
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    s += gi[a][c] * gi[b][d] * r[a][b][c][d];
                }
            }
        }
    }
    s
}

#[test]
fn curvature_of_model_spaces() {
    let mut rng = rng();
    for _ in 0..20 {
        let x = polar3(&mut rng, 0.2, 50.0);
        let c = curvature3(&HyperboloidModel, &x).unwrap();
        assert!((c.scalar + 6.0).abs() < 1e-9, "{}", c.scalar);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let want = -(d(i, k) * d(j, l) - d(i, l) * d(j, k));
                        assert!((c.riemann[i][j][k][l] - want).abs() < 1e-9);
                    }
                }
            }
        }
    }
    let cyl = RoundCylinder { rho: 2.0 };
    for x in [[1.0, 0.7, 0.2], [5.0, 1.6, 3.0], [20.0, 2.5, 5.5]] {
        let c = curvature3(&cyl, &x).unwrap();
        assert!((c.scalar - 0.5).abs() < 1e-9, "{}", c.scalar);
        let fd = fd_scalar(&|y| coordinate_metric(&cyl, y), &x);
        assert!((c.scalar - fd).abs() < 1e-7, "{} vs {fd}", c.scalar);
    }
}

#[test]
fn riemann_symmetries_on_generic_data() {
    let mut rng = rng();
    let mut data = PerturbedHyperboloid::symmetric(0.3, 0.4, 1.5);
    data.antisym = 0.3;
    for _ in 0..20 {
        let x = polar3(&mut rng, 0.3, 20.0);
        let c = curvature3(&data, &x).unwrap();
        let r = &c.riemann;
        let scale = r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = r[i][j][k][l];
                        assert!((v + r[j][i][k][l]).abs() < 1e-9 * scale);
                        assert!((v + r[i][j][l][k]).abs() < 1e-9 * scale);
                        assert!((v - r[k][l][i][j]).abs() < 1e-9 * scale);
                        assert!((v + r[j][l][k][i] + r[l][i][k][j]).abs() < 1e-9 * scale);
                    }
                }
            }
        }
        let gi = c.connection.ginv;
        let mut trace = 0.0;
        for j in 0..3 {
            for l in 0..3 {
                trace += gi[j][l] * c.ricci[j][l];
            }
        }
        assert!((trace - c.scalar).abs() < 1e-12 * scale);
        assert!(metric_compatibility_residual(&data, &x).unwrap() < 1e-9);
    }
}

#[test]
fn rigidity_residual_matches_finite_difference_oracle() {
    let data = PerturbedHyperboloid::symmetric(0.3, 0.2, 2.0);
    for x in [[0.8, 0.9, 1.4], [2.0, 2.1, 4.0], [4.0, 1.3, 0.3]] {
        let engine = PointAnalysis::new(&data, &x)
            .unwrap()
            .rigidity_residual()
            .curvature;
        assert!(
            engine > 1e-4,
            "perturbation should break rigidity: {engine}"
        );
        let rc = fd_riemann(&|y| coordinate_metric(&data, y), &x);
        let (_, p) = evaluate(&data, &x).unwrap();
        let e = [
            (1.0 + x[0] * x[0]).sqrt(),
            1.0 / x[0],
            1.0 / (x[0] * x[1].sin()),
        ];
        let mut sum = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let frame = rc[i][j][k][l] * e[i] * e[j] * e[k] * e[l];
                        sum += (frame + p[i][k] * p[j][l] - p[i][l] * p[j][k]).powi(2);
                    }
                }
            }
        }
        let fd = sum.sqrt();
        assert!((engine - fd).abs() < 1e-6, "{engine} vs {fd}");
    }
}

#[test]
fn vacuum_constraints_on_static_slices() {
    let mut rng = rng();
    let sch = Pullback::new(
        Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap(),
        StaticSlice::new(0.0),
        Frame::hyperbolic(),
    )
    .unwrap();
    let hyp = Pullback::new(
        Minkowski::new(Chart4::StaticPolar),
        Hyperboloid::static_polar(),
        Frame::hyperbolic(),
    )
    .unwrap();
    for _ in 0..30 {
        let x = polar3(&mut rng, 3.0, 200.0);
        for q in [
            PointAnalysis::new(&sch, &x)
                .unwrap()
                .constraint_quantities(),
            PointAnalysis::new(&hyp, &x)
                .unwrap()
                .constraint_quantities(),
        ] {
            assert!(q.mu.abs() < 1e-7 && q.varpi_norm < 1e-7, "{q:?} at {x:?}");
            assert_eq!(q.sigma, [0.0; 3]);
        }
    }
}

#[test]
fn antisymmetric_part_drives_sigma() {
    let mut data = PerturbedHyperboloid::symmetric(0.1, 0.3, 1.0);
    data.antisym = 1.0;
    let q = PointAnalysis::new(&data, &[1.0, 1.0, 1.0])
        .unwrap()
        .constraint_quantities();
    assert!(q.sigma.iter().any(|s| s.abs() > 1e-3), "{q:?}");
    assert!(!data.symmetric());
}

#[test]
fn embedding_into_wrong_chart_is_rejected() {
    let e = Pullback::new(
        Minkowski::new(Chart4::Retarded),
        StaticSlice::new(0.0),
        Frame::hyperbolic(),
    );
    assert!(e.is_err());
    let data = Pullback::new(
        Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap(),
        StaticSlice::new(0.0),
        Frame::hyperbolic(),
    )
    .unwrap();
    assert!(data.check_point(&[1.5, 1.0, 0.0]).is_err());
    assert!(data.check_point(&[3.0, 0.0, 0.0]).is_err());
    assert!(SpacetimePoint::new(Chart4::StaticPolar, [0.0, -1.0, 1.0, 0.0]).is_err());
    assert!(SpacetimePoint::new(Chart4::StaticPolar, [0.0, 1.0, 1.0, 7.0]).is_err());
}
