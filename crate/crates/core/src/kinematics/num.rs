//! Scalar abstraction for the kinematic chain. The same chain code runs on
//! plain `f64` (solvers) and on [`Dual3`] (forward-mode derivatives with
//! respect to chassis x, y, heading), which is how the reachability penalty
//! differentiates through unrolled solver iterations.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Primal value, ignoring any derivative payload.
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    /// Hinge: identity for positive values, zero (with zero derivative)
    /// otherwise.
    fn max_zero(self) -> Self;
    /// Clamp by primal value. Outside the band the result is the constant
    /// bound, so the derivative saturates to zero.
    fn clamp_value(self, lo: f64, hi: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn max_zero(self) -> Self {
        if self > 0.0 {
            self
        } else {
            0.0
        }
    }
    fn clamp_value(self, lo: f64, hi: f64) -> Self {
        self.clamp(lo, hi)
    }
}

/// Forward-mode dual number carrying derivatives with respect to three
/// independent variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual3 {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual3 {
    pub const fn constant(v: f64) -> Self {
        Dual3 { v, d: [0.0; 3] }
    }

    /// Seeds variable `index` (0..3) with unit derivative.
    pub fn var(v: f64, index: usize) -> Self {
        let mut d = [0.0; 3];
        d[index] = 1.0;
        Dual3 { v, d }
    }
}

impl Add for Dual3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual3 {
            v: self.v + o.v,
            d: [
                self.d[0] + o.d[0],
                self.d[1] + o.d[1],
                self.d[2] + o.d[2],
            ],
        }
    }
}

impl Sub for Dual3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual3 {
            v: self.v - o.v,
            d: [
                self.d[0] - o.d[0],
                self.d[1] - o.d[1],
                self.d[2] - o.d[2],
            ],
        }
    }
}

impl Mul for Dual3 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual3 {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
            ],
        }
    }
}

impl Div for Dual3 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let inv2 = inv * inv;
        Dual3 {
            v: self.v * inv,
            d: [
                (self.d[0] * o.v - self.v * o.d[0]) * inv2,
                (self.d[1] * o.v - self.v * o.d[1]) * inv2,
                (self.d[2] * o.v - self.v * o.d[2]) * inv2,
            ],
        }
    }
}

impl Neg for Dual3 {
    type Output = Self;
    fn neg(self) -> Self {
        Dual3 {
            v: -self.v,
            d: [-self.d[0], -self.d[1], -self.d[2]],
        }
    }
}

impl Scalar for Dual3 {
    fn from_f64(v: f64) -> Self {
        Dual3::constant(v)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Dual3 {
            v: s,
            d: [c * self.d[0], c * self.d[1], c * self.d[2]],
        }
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Dual3 {
            v: c,
            d: [-s * self.d[0], -s * self.d[1], -s * self.d[2]],
        }
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        // Derivative blows up at zero; callers keep arguments away from it.
        let k = 0.5 / r.max(1e-300);
        Dual3 {
            v: r,
            d: [k * self.d[0], k * self.d[1], k * self.d[2]],
        }
    }
    fn atan2(self, x: Self) -> Self {
        let y = self;
        let den = x.v * x.v + y.v * y.v;
        let k = 1.0 / den.max(1e-300);
        Dual3 {
            v: y.v.atan2(x.v),
            d: [
                (x.v * y.d[0] - y.v * x.d[0]) * k,
                (x.v * y.d[1] - y.v * x.d[1]) * k,
                (x.v * y.d[2] - y.v * x.d[2]) * k,
            ],
        }
    }
    fn max_zero(self) -> Self {
        if self.v > 0.0 {
            self
        } else {
            Dual3::constant(0.0)
        }
    }
    fn clamp_value(self, lo: f64, hi: f64) -> Self {
        if self.v < lo {
            Dual3::constant(lo)
        } else if self.v > hi {
            Dual3::constant(hi)
        } else {
            self
        }
    }
}

// ---------------------------------------------------------------------------
// Small fixed-size linear algebra over Scalar
// ---------------------------------------------------------------------------

pub type V3<S> = [S; 3];
pub type M3<S> = [[S; 3]; 3];

pub fn v3_sub<S: Scalar>(a: V3<S>, b: V3<S>) -> V3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn v3_add<S: Scalar>(a: V3<S>, b: V3<S>) -> V3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn v3_dot<S: Scalar>(a: V3<S>, b: V3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn v3_cross<S: Scalar>(a: V3<S>, b: V3<S>) -> V3<S> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn v3_norm<S: Scalar>(a: V3<S>) -> S {
    v3_dot(a, a).sqrt()
}

pub fn m3_mul<S: Scalar>(a: &M3<S>, b: &M3<S>) -> M3<S> {
    let mut out = [[S::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn m3_mul_v3<S: Scalar>(a: &M3<S>, v: V3<S>) -> V3<S> {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

pub fn m3_transpose<S: Scalar>(a: &M3<S>) -> M3<S> {
    let mut out = [[S::zero(); 3]; 3];
    for (i, row) in a.iter().enumerate() {
        for (j, &cell) in row.iter().enumerate() {
            out[j][i] = cell;
        }
    }
    out
}

pub fn m3_identity<S: Scalar>() -> M3<S> {
    let mut out = [[S::zero(); 3]; 3];
    out[0][0] = S::one();
    out[1][1] = S::one();
    out[2][2] = S::one();
    out
}

/// Rigid transform: rotation plus translation.
#[derive(Debug, Clone, Copy)]
pub struct TransformG<S: Scalar> {
    pub r: M3<S>,
    pub p: V3<S>,
}

impl<S: Scalar> TransformG<S> {
    pub fn identity() -> Self {
        TransformG {
            r: m3_identity(),
            p: [S::zero(); 3],
        }
    }

    pub fn compose(&self, other: &TransformG<S>) -> TransformG<S> {
        TransformG {
            r: m3_mul(&self.r, &other.r),
            p: v3_add(self.p, m3_mul_v3(&self.r, other.p)),
        }
    }

    pub fn z_axis(&self) -> V3<S> {
        [self.r[0][2], self.r[1][2], self.r[2][2]]
    }
}

/// Log map of a rotation matrix: the rotation vector (axis times angle).
///
/// Near the identity the ratio angle/sin(angle) is taken as 1, which is
/// accurate to O(angle^2). Near a half-turn the axis is recovered from the
/// dominant diagonal of R + I.
pub fn rot_log<S: Scalar>(r: &M3<S>) -> V3<S> {
    let v = [
        (r[2][1] - r[1][2]) * S::from_f64(0.5),
        (r[0][2] - r[2][0]) * S::from_f64(0.5),
        (r[1][0] - r[0][1]) * S::from_f64(0.5),
    ];
    let s = v3_norm(v); // sin(angle)
    let c = (r[0][0] + r[1][1] + r[2][2] - S::one()) * S::from_f64(0.5); // cos(angle)
    let sv = s.value();
    if sv < 1e-7 {
        if c.value() > 0.0 {
            // angle ~ 0
            return v;
        }
        // angle ~ pi: axis from the largest diagonal of R + I
        let diag = [r[0][0].value(), r[1][1].value(), r[2][2].value()];
        let k = if diag[0] >= diag[1] && diag[0] >= diag[2] {
            0
        } else if diag[1] >= diag[2] {
            1
        } else {
            2
        };
        let mut col = [
            r[0][k] + if k == 0 { S::one() } else { S::zero() },
            r[1][k] + if k == 1 { S::one() } else { S::zero() },
            r[2][k] + if k == 2 { S::one() } else { S::zero() },
        ];
        let n = v3_norm(col);
        let angle = s.atan2(c);
        for c_i in &mut col {
            *c_i = *c_i / n * angle;
        }
        return col;
    }
    let angle = s.atan2(c);
    let k = angle / s;
    [v[0] * k, v[1] * k, v[2] * k]
}

/// Solves A x = b for symmetric positive-definite A via Cholesky.
pub fn chol_solve6<S: Scalar>(a: &[[S; 6]; 6], b: &[S; 6]) -> Option<[S; 6]> {
    let mut l = [[S::zero(); 6]; 6];
    for i in 0..6 {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                if sum.value() <= 0.0 {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // forward substitution L y = b
    let mut y = [S::zero(); 6];
    for i in 0..6 {
        let mut sum = b[i];
        for k in 0..i {
            sum = sum - l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    // back substitution L^T x = y
    let mut x = [S::zero(); 6];
    for i in (0..6).rev() {
        let mut sum = y[i];
        for k in (i + 1)..6 {
            sum = sum - l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd3(f: impl Fn([f64; 3]) -> f64, x: [f64; 3], h: f64) -> [f64; 3] {
        let mut g = [0.0; 3];
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (f(xp) - f(xm)) / (2.0 * h);
        }
        g
    }

    #[test]
    fn dual_arithmetic_matches_finite_differences() {
        let f_dual = |x: [f64; 3]| {
            let a = Dual3::var(x[0], 0);
            let b = Dual3::var(x[1], 1);
            let c = Dual3::var(x[2], 2);
            a.sin() * b + (c * c + a / b).sqrt() + c.atan2(a)
        };
        let f = |x: [f64; 3]| f_dual(x).v;
        let x = [0.7, 1.3, -0.4];
        let d = f_dual(x);
        let g = fd3(f, x, 1e-6);
        for i in 0..3 {
            assert!((d.d[i] - g[i]).abs() < 1e-7, "{:?} vs {:?}", d.d, g);
        }
    }

    #[test]
    fn rot_log_recovers_axis_angle() {
        // rotation about z by 0.3 rad
        let (s, c) = 0.3f64.sin_cos();
        let r: M3<f64> = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let w = rot_log(&r);
        assert!((w[0]).abs() < 1e-12);
        assert!((w[1]).abs() < 1e-12);
        assert!((w[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rot_log_handles_half_turn() {
        // rotation about x by pi
        let r: M3<f64> = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        let w = rot_log(&r);
        assert!((w[0].abs() - std::f64::consts::PI).abs() < 1e-6);
        assert!(w[1].abs() < 1e-6 && w[2].abs() < 1e-6);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        // A = M Mᵀ + I is SPD for any M
        let mut a = [[0.0f64; 6]; 6];
        let m: Vec<f64> = (0..36).map(|i| ((i * 7 + 3) % 11) as f64 / 11.0).collect();
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    a[i][j] += m[i * 6 + k] * m[j * 6 + k];
                }
            }
            a[i][i] += 1.0;
        }
        let x_true = [1.0, -2.0, 0.5, 3.0, -1.5, 0.25];
        let mut b = [0.0f64; 6];
        for i in 0..6 {
            for j in 0..6 {
                b[i] += a[i][j] * x_true[j];
            }
        }
        let x = chol_solve6(&a, &b).unwrap();
        for i in 0..6 {
            assert!((x[i] - x_true[i]).abs() < 1e-10);
        }
    }
}
