//! Small dense matrices over a generic [`Scalar`].

use crate::dual::Scalar;

pub type Mat3<S> = [[S; 3]; 3];
pub type Mat4<S> = [[S; 4]; 4];

pub fn det3<S: Scalar>(m: &Mat3<S>) -> S {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse by adjugate; `None` when the determinant vanishes.
pub fn inv3<S: Scalar>(m: &Mat3<S>) -> Option<Mat3<S>> {
    let det = det3(m);
    if det.value() == 0.0 || !det.value().is_finite() {
        return None;
    }
    let inv_det = det.recip();
    let c =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    Some([
        [
            c(1, 2, 1, 2) * inv_det,
            -c(0, 2, 1, 2) * inv_det,
            c(0, 1, 1, 2) * inv_det,
        ],
        [
            -c(1, 2, 0, 2) * inv_det,
            c(0, 2, 0, 2) * inv_det,
            -c(0, 1, 0, 2) * inv_det,
        ],
        [
            c(1, 2, 0, 1) * inv_det,
            -c(0, 2, 0, 1) * inv_det,
            c(0, 1, 0, 1) * inv_det,
        ],
    ])
}

fn minor3<S: Scalar>(m: &Mat4<S>, row: usize, col: usize) -> S {
    let mut sub = [[S::zero(); 3]; 3];
    let mut ri = 0;
    for (r, mrow) in m.iter().enumerate() {
        if r == row {
            continue;
        }
        let mut ci = 0;
        for (c, &x) in mrow.iter().enumerate() {
            if c == col {
                continue;
            }
            sub[ri][ci] = x;
            ci += 1;
        }
        ri += 1;
    }
    det3(&sub)
}

pub fn det4<S: Scalar>(m: &Mat4<S>) -> S {
    let mut det = S::zero();
    for c in 0..4 {
        let term = m[0][c] * minor3(m, 0, c);
        det = if c % 2 == 0 { det + term } else { det - term };
    }
    det
}

/// Inverse by cofactors; no pivoting, so zero diagonal entries (as in
/// retarded charts) are handled.
pub fn inv4<S: Scalar>(m: &Mat4<S>) -> Option<Mat4<S>> {
    let det = det4(m);
    if det.value() == 0.0 || !det.value().is_finite() {
        return None;
    }
    let inv_det = det.recip();
    let mut out = [[S::zero(); 4]; 4];
    for (r, orow) in out.iter_mut().enumerate() {
        for (c, o) in orow.iter_mut().enumerate() {
            // transpose of the cofactor matrix
            let cof = minor3(m, c, r) * inv_det;
            *o = if (r + c) % 2 == 0 { cof } else { -cof };
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_multiply_to_identity() {
        let m3 = [[2.0, 0.3, -0.1], [0.3, 1.5, 0.2], [-0.1, 0.2, 1.1]];
        let i3 = inv3(&m3).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let s: f64 = (0..3).map(|k| m3[r][k] * i3[k][c]).sum();
                assert!((s - if r == c { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        // retarded Minkowski: zero rr entry
        let m4 = [
            [-1.0, -1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 4.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
        ];
        let i4 = inv4(&m4).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let s: f64 = (0..4).map(|k| m4[r][k] * i4[k][c]).sum();
                assert!((s - if r == c { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert_eq!(i4[0][0], 0.0);
        assert!(inv3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }
}
