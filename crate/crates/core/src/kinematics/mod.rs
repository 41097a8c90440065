//! Six-axis arm kinematics: forward kinematics over a DH table, the
//! geometric Jacobian, damped least-squares inverse kinematics, and a
//! differentiable reachability penalty that backs label-free training of
//! the chassis position network.
//!
//! All lengths are millimetres, all angles radians.

pub mod num;

use nalgebra::{Matrix6, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num::{
    chol_solve6, m3_mul, m3_transpose, rot_log, v3_cross, v3_norm, v3_sub, Dual3, Scalar,
    TransformG, M3, V3,
};

/// Joint angles of the six-axis arm, radians.
pub type JointVector = [f64; 6];

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("joint {index} angle {value} outside limits [{low}, {high}]")]
    JointLimit {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("orientation quaternion norm deviates from 1 by {0}")]
    NotUnitQuaternion(f64),
}

// ---------------------------------------------------------------------------
// Poses and the chassis
// ---------------------------------------------------------------------------

/// A 6-DOF pose: position in millimetres plus a unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose6 {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose6 {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Pose6 {
            position,
            orientation,
        }
    }

    /// Builds a pose from a raw quaternion, rejecting non-unit input.
    pub fn checked(
        position: Vector3<f64>,
        quat_wxyz: [f64; 4],
    ) -> Result<Self, KinematicsError> {
        let [w, x, y, z] = quat_wxyz;
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(KinematicsError::NotUnitQuaternion((norm - 1.0).abs()));
        }
        let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z));
        Ok(Pose6 {
            position,
            orientation: q,
        })
    }

    pub fn identity() -> Self {
        Pose6 {
            position: Vector3::zeros(),
            orientation: UnitQuaternion::identity(),
        }
    }

    /// Rigid composition `self ∘ other`.
    pub fn compose(&self, other: &Pose6) -> Pose6 {
        Pose6 {
            position: self.position + self.orientation * other.position,
            orientation: self.orientation * other.orientation,
        }
    }

    /// Inverse transform.
    pub fn inverse(&self) -> Pose6 {
        let inv_q = self.orientation.inverse();
        Pose6 {
            position: -(inv_q * self.position),
            orientation: inv_q,
        }
    }

    /// Position error (mm) and rotation error (rad) against another pose.
    pub fn error_to(&self, other: &Pose6) -> (f64, f64) {
        let dp = (other.position - self.position).norm();
        let dq = (other.orientation * self.orientation.inverse()).scaled_axis().norm();
        (dp, dq)
    }

    fn to_transform(self) -> TransformG<f64> {
        let m = self.orientation.to_rotation_matrix();
        let r = [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ];
        TransformG {
            r,
            p: [self.position.x, self.position.y, self.position.z],
        }
    }

    fn from_transform(t: &TransformG<f64>) -> Pose6 {
        let m = nalgebra::Matrix3::new(
            t.r[0][0], t.r[0][1], t.r[0][2], t.r[1][0], t.r[1][1], t.r[1][2], t.r[2][0],
            t.r[2][1], t.r[2][2],
        );
        Pose6 {
            position: Vector3::new(t.p[0], t.p[1], t.p[2]),
            orientation: UnitQuaternion::from_rotation_matrix(
                &nalgebra::Rotation3::from_matrix_unchecked(m),
            ),
        }
    }
}

/// Planar pose of the mobile chassis: position in the world plane plus a
/// heading, normalized to (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChassisPose {
    pub x_mm: f64,
    pub y_mm: f64,
    pub heading_rad: f64,
}

impl ChassisPose {
    pub fn new(x_mm: f64, y_mm: f64, heading_rad: f64) -> Self {
        ChassisPose {
            x_mm,
            y_mm,
            heading_rad: wrap_heading(heading_rad),
        }
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_heading(h: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = (h + PI).rem_euclid(2.0 * PI);
    if x == 0.0 {
        x = 2.0 * PI;
    }
    x - PI
}

/// Pose of the arm base frame implied by a chassis pose: the base sits at
/// the chassis origin on the ground plane, rotated by the heading.
pub fn chassis_base_pose(c: &ChassisPose) -> Pose6 {
    Pose6 {
        position: Vector3::new(c.x_mm, c.y_mm, 0.0),
        orientation: UnitQuaternion::from_axis_angle(&Vector3::z_axis(), c.heading_rad),
    }
}

/// A world pose expressed in the arm-base frame of the given chassis pose.
pub fn pose_in_base(c: &ChassisPose, world: &Pose6) -> Pose6 {
    chassis_base_pose(c).inverse().compose(world)
}

/// Canonical effector pose for working a bolt: the tool z-axis opposes the
/// bolt axis and the tool tip sits `standoff_mm` above the head.
pub fn effector_target_for_bolt(bolt: &Pose6, standoff_mm: f64) -> Pose6 {
    let z = bolt.orientation * Vector3::z();
    let flip = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI);
    Pose6 {
        position: bolt.position + standoff_mm * z,
        orientation: bolt.orientation * flip,
    }
}

// ---------------------------------------------------------------------------
// DH table
// ---------------------------------------------------------------------------

/// One Denavit-Hartenberg row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub a_mm: f64,
    pub alpha_rad: f64,
    pub d_mm: f64,
    pub theta_offset_rad: f64,
}

/// DH parameters plus joint limits for the six-axis arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DhTable {
    pub rows: [DhRow; 6],
    /// Per-joint (low, high) limits, radians. low < high.
    pub limits: [(f64, f64); 6],
}

impl Default for DhTable {
    /// A representative 6-DOF collaborative arm with ~850 mm reach.
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, TAU};
        let row = |a_mm, alpha_rad, d_mm| DhRow {
            a_mm,
            alpha_rad,
            d_mm,
            theta_offset_rad: 0.0,
        };
        DhTable {
            rows: [
                row(0.0, FRAC_PI_2, 162.5),
                row(-425.0, 0.0, 0.0),
                row(-392.2, 0.0, 0.0),
                row(0.0, FRAC_PI_2, 133.3),
                row(0.0, -FRAC_PI_2, 99.7),
                row(0.0, 0.0, 99.6),
            ],
            limits: [(-TAU, TAU); 6],
        }
    }
}

impl DhTable {
    pub fn check_limits(&self, joints: &JointVector) -> Result<(), KinematicsError> {
        for (i, (&q, &(low, high))) in joints.iter().zip(self.limits.iter()).enumerate() {
            if q < low || q > high {
                return Err(KinematicsError::JointLimit {
                    index: i,
                    value: q,
                    low,
                    high,
                });
            }
        }
        Ok(())
    }
}

/// Tucked travel configuration; also the first IK seed.
pub const HOME_JOINTS: JointVector = [0.0, -1.5708, 1.5708, -1.5708, -1.5708, 0.0];

/// Fixed seed set for multi-start inverse kinematics. Spread over base
/// rotations and elbow/wrist configurations.
pub const IK_SEEDS: [JointVector; 8] = [
    [0.0, -1.5708, 1.5708, -1.5708, -1.5708, 0.0],
    [1.5708, -1.5708, 1.5708, -1.5708, -1.5708, 0.0],
    [3.1416, -1.5708, 1.5708, -1.5708, -1.5708, 0.0],
    [-1.5708, -1.5708, 1.5708, -1.5708, -1.5708, 0.0],
    [0.0, -0.9, -1.2, 0.5, 1.5708, 0.0],
    [1.5708, -2.2, 2.2, -1.5708, 1.5708, 0.0],
    [-2.4, -0.7, 1.1, -1.9, -1.2, 0.8],
    [0.8, -2.4, -1.4, 1.2, 1.2, -0.8],
];

// ---------------------------------------------------------------------------
// Generic chain
// ---------------------------------------------------------------------------

fn dh_transform<S: Scalar>(theta: S, row: &DhRow) -> TransformG<S> {
    let th = theta + S::from_f64(row.theta_offset_rad);
    let (st, ct) = (th.sin(), th.cos());
    let sa = S::from_f64(row.alpha_rad.sin());
    let ca = S::from_f64(row.alpha_rad.cos());
    let a = S::from_f64(row.a_mm);
    let d = S::from_f64(row.d_mm);
    TransformG {
        r: [
            [ct, -st * ca, st * sa],
            [st, ct * ca, -ct * sa],
            [S::zero(), sa, ca],
        ],
        p: [a * ct, a * st, d],
    }
}

struct Frames<S: Scalar> {
    /// Joint axes in the base frame (axis of joint i before its rotation).
    axes: [V3<S>; 6],
    /// Joint frame origins in the base frame.
    origins: [V3<S>; 6],
    end: TransformG<S>,
}

fn fk_frames<S: Scalar>(dh: &DhTable, joints: &[S; 6]) -> Frames<S> {
    let mut t = TransformG::<S>::identity();
    let mut axes = [[S::zero(); 3]; 6];
    let mut origins = [[S::zero(); 3]; 6];
    for i in 0..6 {
        axes[i] = t.z_axis();
        origins[i] = t.p;
        t = t.compose(&dh_transform(joints[i], &dh.rows[i]));
    }
    Frames {
        axes,
        origins,
        end: t,
    }
}

fn jacobian_from_frames<S: Scalar>(frames: &Frames<S>) -> [[S; 6]; 6] {
    let mut j = [[S::zero(); 6]; 6];
    for col in 0..6 {
        let lin = v3_cross(frames.axes[col], v3_sub(frames.end.p, frames.origins[col]));
        for row in 0..3 {
            j[row][col] = lin[row];
            j[row + 3][col] = frames.axes[col][row];
        }
    }
    j
}

/// One damped least-squares update toward `target`:
/// dq = Jᵀ (J Jᵀ + λ² I)⁻¹ e, with the step norm capped at `max_step` and
/// joint-limit clamping. The cap keeps the iteration stable when the error
/// is large relative to the damping.
fn dls_step<S: Scalar>(
    dh: &DhTable,
    joints: &[S; 6],
    target: &TransformG<S>,
    lambda: f64,
    max_step: f64,
) -> ([S; 6], S, S) {
    let frames = fk_frames(dh, joints);
    let e_pos = v3_sub(target.p, frames.end.p);
    let r_err = m3_mul(&target.r, &m3_transpose(&frames.end.r));
    let e_rot = rot_log(&r_err);
    let e = [e_pos[0], e_pos[1], e_pos[2], e_rot[0], e_rot[1], e_rot[2]];

    let j = jacobian_from_frames(&frames);
    let mut a = [[S::zero(); 6]; 6];
    for (i, a_row) in a.iter_mut().enumerate() {
        for (k, cell) in a_row.iter_mut().enumerate() {
            let mut sum = S::zero();
            for j_col in 0..6 {
                sum = sum + j[i][j_col] * j[k][j_col];
            }
            *cell = sum;
        }
        a_row[i] = a_row[i] + S::from_f64(lambda * lambda);
    }

    let pos_norm = v3_norm(e_pos);
    let rot_norm = v3_norm(e_rot);
    let y = match chol_solve6(&a, &e) {
        Some(y) => y,
        None => return (*joints, pos_norm, rot_norm),
    };
    let mut delta = [S::zero(); 6];
    let mut norm_sq = S::from_f64(1e-12);
    for (col, d) in delta.iter_mut().enumerate() {
        let mut dq = S::zero();
        for row in 0..6 {
            dq = dq + j[row][col] * y[row];
        }
        *d = dq;
        norm_sq = norm_sq + dq * dq;
    }
    let norm = norm_sq.sqrt();
    let factor = if norm.value() > max_step {
        S::from_f64(max_step) / norm
    } else {
        S::one()
    };
    let mut out = *joints;
    for col in 0..6 {
        let (low, high) = dh.limits[col];
        out[col] = (out[col] + delta[col] * factor).clamp_value(low, high);
    }
    (out, pos_norm, rot_norm)
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Forward kinematics: the effector pose for a joint configuration.
pub fn fk(joints: &JointVector, dh: &DhTable) -> Result<Pose6, KinematicsError> {
    dh.check_limits(joints)?;
    let frames = fk_frames(dh, joints);
    Ok(Pose6::from_transform(&frames.end))
}

/// Geometric Jacobian at a configuration: column i is
/// (z_i × (p_e − p_i), z_i) in the base frame.
pub fn jacobian(joints: &JointVector, dh: &DhTable) -> Result<Matrix6<f64>, KinematicsError> {
    dh.check_limits(joints)?;
    let frames = fk_frames(dh, joints);
    let j = jacobian_from_frames(&frames);
    let mut out = Matrix6::zeros();
    for r in 0..6 {
        for c in 0..6 {
            out[(r, c)] = j[r][c];
        }
    }
    Ok(out)
}

/// Damped least-squares IK configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkParams {
    pub lambda: f64,
    pub max_iters: usize,
    pub tol_pos_mm: f64,
    pub tol_rot_rad: f64,
    /// Per-iteration cap on the joint-step norm, radians.
    pub max_step_rad: f64,
}

impl Default for IkParams {
    fn default() -> Self {
        IkParams {
            lambda: 0.1,
            max_iters: 150,
            tol_pos_mm: 1e-3,
            tol_rot_rad: 1e-4,
            max_step_rad: 0.5,
        }
    }
}

/// Outcome of an IK solve. `converged` implies both residuals are within
/// the tolerances of the params used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkResult {
    pub joints: JointVector,
    pub residual_pos_mm: f64,
    pub residual_rot_rad: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Iterative damped least-squares IK from a single seed. Non-convergence is
/// a normal result (`converged = false`), not an error.
pub fn ik_dls(target: &Pose6, seed: &JointVector, params: &IkParams, dh: &DhTable) -> IkResult {
    let t = target.to_transform();
    let mut q = *seed;
    for (i, (qi, &(low, high))) in q.iter_mut().zip(dh.limits.iter()).enumerate() {
        let _ = i;
        *qi = qi.clamp(low, high);
    }
    let mut pos;
    let mut rot;
    let mut iters = 0;
    loop {
        let frames = fk_frames(&dh.clone(), &q);
        let e_pos = v3_sub(t.p, frames.end.p);
        let r_err = m3_mul(&t.r, &m3_transpose(&frames.end.r));
        let e_rot = rot_log(&r_err);
        pos = v3_norm(e_pos);
        rot = v3_norm(e_rot);
        if pos < params.tol_pos_mm && rot < params.tol_rot_rad {
            return IkResult {
                joints: q,
                residual_pos_mm: pos,
                residual_rot_rad: rot,
                converged: true,
                iterations: iters,
            };
        }
        if iters >= params.max_iters {
            return IkResult {
                joints: q,
                residual_pos_mm: pos,
                residual_rot_rad: rot,
                converged: false,
                iterations: iters,
            };
        }
        let (q_next, _, _) = dls_step(dh, &q, &t, params.lambda, params.max_step_rad);
        q = q_next;
        iters += 1;
    }
}

/// Multi-start IK over the fixed seed set. The lowest position residual
/// wins among converged results (all seeds among none); ties break by seed
/// index.
pub fn ik_solve_multi(target: &Pose6, params: &IkParams, dh: &DhTable) -> IkResult {
    let mut best: Option<IkResult> = None;
    for seed in IK_SEEDS.iter() {
        let r = ik_dls(target, seed, params, dh);
        best = Some(match best {
            None => r,
            Some(b) => {
                let better = match (r.converged, b.converged) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => r.residual_pos_mm < b.residual_pos_mm,
                };
                if better {
                    r
                } else {
                    b
                }
            }
        });
    }
    best.expect("seed set is non-empty")
}

// ---------------------------------------------------------------------------
// Reachability penalty
// ---------------------------------------------------------------------------

/// Parameters of the differentiable reachability penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub r_min_mm: f64,
    pub r_max_mm: f64,
    /// Number of unrolled damped least-squares iterations in the
    /// differentiable residual term.
    pub unroll_iters: usize,
    pub lambda: f64,
    pub max_step_rad: f64,
    pub w_unroll: f64,
    /// Residuals below this are treated as solved, so the interior of the
    /// feasible band has exactly zero value and gradient.
    pub dead_zone_mm: f64,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams {
            r_min_mm: 300.0,
            r_max_mm: 850.0,
            unroll_iters: 10,
            lambda: 0.1,
            max_step_rad: 0.5,
            w_unroll: 0.01,
            dead_zone_mm: 1.0,
        }
    }
}

/// Penalty value (dimensionless, metre-scaled) with its exact gradient with
/// respect to chassis x (mm), y (mm), and heading (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    pub value: f64,
    pub gradient: [f64; 3],
}

/// Differentiable reachability of a bolt from a chassis pose.
///
/// Two hinge terms penalize leaving the [r_min, r_max] distance band of the
/// arm base, and a third term penalizes the pose error remaining after a
/// fixed number of unrolled damped least-squares iterations toward the
/// bolt's effector target. Derivatives flow through the unrolled iterations
/// via forward-mode duals, so the gradient is exact for the computation as
/// written.
pub fn reachability_penalty(
    chassis: &ChassisPose,
    bolt: &Pose6,
    dh: &DhTable,
    pp: &PenaltyParams,
) -> Penalty {
    const KM: f64 = 1e-3; // mm → m, keeps values and gradients well-scaled

    let x = Dual3::var(chassis.x_mm, 0);
    let y = Dual3::var(chassis.y_mm, 1);
    let th = Dual3::var(chassis.heading_rad, 2);
    let (st, ct) = (th.sin(), th.cos());

    // Bolt position in the arm-base frame: Rz(th)ᵀ (p_w − t)
    let dx = Dual3::constant(bolt.position.x) - x;
    let dy = Dual3::constant(bolt.position.y) - y;
    let dz = Dual3::constant(bolt.position.z);
    let px = ct * dx + st * dy;
    let py = -(st * dx) + ct * dy;
    let pz = dz;

    let r = (px * px + py * py + pz * pz).sqrt();
    let over = ((r - Dual3::constant(pp.r_max_mm)) * Dual3::constant(KM)).max_zero();
    let under = ((Dual3::constant(pp.r_min_mm) - r) * Dual3::constant(KM)).max_zero();
    let mut value = over * over + under * under;

    // Unrolled IK residual toward the flipped bolt pose in the base frame.
    let world_target = effector_target_for_bolt(bolt, 0.0);
    let rw = world_target.orientation.to_rotation_matrix();
    let mut r_base = [[Dual3::constant(0.0); 3]; 3];
    // Rz(th)ᵀ rows: [ct, st, 0], [-st, ct, 0], [0, 0, 1]
    let rzt = [
        [ct, st, Dual3::constant(0.0)],
        [-st, ct, Dual3::constant(0.0)],
        [
            Dual3::constant(0.0),
            Dual3::constant(0.0),
            Dual3::constant(1.0),
        ],
    ];
    let rw_d: M3<Dual3> = [
        [
            Dual3::constant(rw[(0, 0)]),
            Dual3::constant(rw[(0, 1)]),
            Dual3::constant(rw[(0, 2)]),
        ],
        [
            Dual3::constant(rw[(1, 0)]),
            Dual3::constant(rw[(1, 1)]),
            Dual3::constant(rw[(1, 2)]),
        ],
        [
            Dual3::constant(rw[(2, 0)]),
            Dual3::constant(rw[(2, 1)]),
            Dual3::constant(rw[(2, 2)]),
        ],
    ];
    let prod = m3_mul(&rzt, &rw_d);
    for (i, row) in prod.iter().enumerate() {
        r_base[i] = *row;
    }
    let target = TransformG {
        r: r_base,
        p: [px, py, pz],
    };

    // Seed with the base joint aimed at the target azimuth so the capped
    // iterations spend their budget on extension, not slewing. The home
    // configuration's own azimuth is the constant correction.
    let home_end = fk_frames(dh, &HOME_JOINTS).end;
    let home_bearing = home_end.p[1].atan2(home_end.p[0]);
    let q1 = py.atan2(px) - Dual3::constant(home_bearing);
    let mut q: [Dual3; 6] = [
        q1,
        Dual3::constant(HOME_JOINTS[1]),
        Dual3::constant(HOME_JOINTS[2]),
        Dual3::constant(HOME_JOINTS[3]),
        Dual3::constant(HOME_JOINTS[4]),
        Dual3::constant(HOME_JOINTS[5]),
    ];
    for _ in 0..pp.unroll_iters {
        let (next, _, _) = dls_step(dh, &q, &target, pp.lambda, pp.max_step_rad);
        q = next;
    }
    let frames = fk_frames(dh, &q);
    let e = v3_sub(target.p, frames.end.p);
    let resid_m = (v3_dot_d(e, e) + Dual3::constant(1e-12)).sqrt() * Dual3::constant(KM);
    let gated =
        (resid_m - Dual3::constant(pp.dead_zone_mm * KM)).max_zero();
    value = value + Dual3::constant(pp.w_unroll) * gated * gated;

    Penalty {
        value: value.v,
        gradient: value.d,
    }
}

fn v3_dot_d(a: V3<Dual3>, b: V3<Dual3>) -> Dual3 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    use crate::rng::stream_rng;

    fn mat4_mul(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for (k, b_row) in b.iter().enumerate() {
                    out[i][j] += a[i][k] * b_row[j];
                }
            }
        }
        out
    }

    /// Independent 4x4 DH composition used as the oracle for fk.
    fn fk_oracle(dh: &DhTable, q: &JointVector) -> [[f64; 4]; 4] {
        let mut t = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for (i, row) in dh.rows.iter().enumerate() {
            let th = q[i] + row.theta_offset_rad;
            let (st, ct) = th.sin_cos();
            let (sa, ca) = row.alpha_rad.sin_cos();
            let a = [
                [ct, -st * ca, st * sa, row.a_mm * ct],
                [st, ct * ca, -ct * sa, row.a_mm * st],
                [0.0, sa, ca, row.d_mm],
                [0.0, 0.0, 0.0, 1.0],
            ];
            t = mat4_mul(t, a);
        }
        t
    }

    #[test]
    fn fk_at_zero_matches_hand_composed_transforms() {
        let dh = DhTable::default();
        let q = [0.0; 6];
        let pose = fk(&q, &dh).unwrap();

        // Frozen values from composing the six DH transforms by hand.
        assert_relative_eq!(pose.position.x, -817.2, epsilon = 1e-9);
        assert_relative_eq!(pose.position.y, -232.9, epsilon = 1e-9);
        assert_relative_eq!(pose.position.z, 62.8, epsilon = 1e-9);
        let q_exp = std::f64::consts::FRAC_1_SQRT_2;
        let quat = pose.orientation.quaternion();
        assert_relative_eq!(quat.w.abs(), q_exp, epsilon = 1e-12);
        assert_relative_eq!(quat.i.abs(), q_exp, epsilon = 1e-12);
        assert!(quat.j.abs() < 1e-12 && quat.k.abs() < 1e-12);

        // Cross-check against the independent composition at random configs.
        let mut rng = stream_rng(11, 0);
        for _ in 0..20 {
            let q: JointVector = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let pose = fk(&q, &dh).unwrap();
            let t = fk_oracle(&dh, &q);
            assert_relative_eq!(pose.position.x, t[0][3], epsilon = 1e-9);
            assert_relative_eq!(pose.position.y, t[1][3], epsilon = 1e-9);
            assert_relative_eq!(pose.position.z, t[2][3], epsilon = 1e-9);
        }
    }

    #[test]
    fn fk_is_periodic_in_each_revolute_joint() {
        use std::f64::consts::TAU;
        let mut dh = DhTable::default();
        dh.limits = [(-3.0 * TAU, 3.0 * TAU); 6];
        let q: JointVector = [0.3, -1.1, 0.7, 0.2, -0.5, 1.0];
        let base = fk(&q, &dh).unwrap();
        for axis in 0..6 {
            let mut q2 = q;
            q2[axis] += TAU;
            let shifted = fk(&q2, &dh).unwrap();
            let (dp, dr) = base.error_to(&shifted);
            assert!(dp < 1e-9 && dr < 1e-9, "axis {axis}: dp={dp} dr={dr}");
        }
    }

    #[test]
    fn fk_rejects_joint_limit_violation() {
        let dh = DhTable::default();
        let mut q = [0.0; 6];
        q[2] = 7.0;
        assert!(matches!(
            fk(&q, &dh),
            Err(KinematicsError::JointLimit { index: 2, .. })
        ));
    }

    #[test]
    fn jacobian_matches_central_finite_differences() {
        let dh = DhTable::default();
        let mut rng = stream_rng(23, 0);
        let h = 1e-6;
        for _ in 0..100 {
            let q: JointVector = std::array::from_fn(|_| rng.random_range(-2.5..2.5));
            let j = jacobian(&q, &dh).unwrap();
            let scale = j.amax().max(1.0);
            for col in 0..6 {
                let mut qp = q;
                let mut qm = q;
                qp[col] += h;
                qm[col] -= h;
                let fp = fk(&qp, &dh).unwrap();
                let fm = fk(&qm, &dh).unwrap();
                let dp = (fp.position - fm.position) / (2.0 * h);
                let dr = (fp.orientation * fm.orientation.inverse()).scaled_axis() / (2.0 * h);
                for row in 0..3 {
                    assert!(
                        (j[(row, col)] - dp[row]).abs() / scale < 1e-5,
                        "lin block col {col}"
                    );
                    assert!(
                        (j[(row + 3, col)] - dr[row]).abs() / scale.max(1.0) < 1e-5,
                        "rot block col {col}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_rank_deficient_at_wrist_singularity() {
        // q5 = 0 aligns the axes of joints 4 and 6.
        let dh = DhTable::default();
        let j = jacobian(&[0.0; 6], &dh).unwrap();
        let svd = j.svd(false, false);
        let max_sv = svd.singular_values.max();
        let min_sv = svd.singular_values.min();
        assert!(min_sv / max_sv < 1e-10, "min/max = {}", min_sv / max_sv);
    }

    #[test]
    fn zero_joint_velocity_gives_zero_twist() {
        let dh = DhTable::default();
        let j = jacobian(&[0.4, -1.0, 0.9, -0.3, 1.1, 0.2], &dh).unwrap();
        let twist = j * nalgebra::Vector6::zeros();
        assert_eq!(twist, nalgebra::Vector6::zeros());
    }

    #[test]
    fn ik_round_trips_near_seed() {
        let dh = DhTable::default();
        let params = IkParams::default();
        let mut rng = stream_rng(31, 0);
        for _ in 0..20 {
            let q: JointVector = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
            let target = fk(&q, &dh).unwrap();
            let seed: JointVector = std::array::from_fn(|i| q[i] + rng.random_range(-0.05..0.05));
            let r = ik_dls(&target, &seed, &params, &dh);
            assert!(r.converged, "residual {} mm", r.residual_pos_mm);
            assert!(r.residual_pos_mm < 1e-3);
            let back = fk(&r.joints, &dh).unwrap();
            let (dp, _) = back.error_to(&target);
            assert!(dp < 1e-3);
        }
    }

    #[test]
    fn ik_reports_unreachable_targets_as_unconverged() {
        let dh = DhTable::default();
        let target = Pose6 {
            position: Vector3::new(10_000.0, 0.0, 0.0),
            orientation: UnitQuaternion::identity(),
        };
        let r = ik_solve_multi(&target, &IkParams::default(), &dh);
        assert!(!r.converged);
    }

    #[test]
    fn ik_multi_seed_covers_the_workspace() {
        let dh = DhTable::default();
        let params = IkParams::default();
        let mut rng = stream_rng(47, 0);
        let mut solved = 0;
        for _ in 0..100 {
            let q: JointVector = std::array::from_fn(|_| rng.random_range(-2.8..2.8));
            let target = fk(&q, &dh).unwrap();
            if ik_solve_multi(&target, &params, &dh).converged {
                solved += 1;
            }
        }
        assert!(solved >= 95, "solved {solved}/100");
    }

    fn mid_band_bolt() -> Pose6 {
        // Straight ahead of the base at mid band height, axis up.
        Pose6 {
            position: Vector3::new(575.0, 0.0, 40.0),
            orientation: UnitQuaternion::identity(),
        }
    }

    #[test]
    fn penalty_zero_inside_feasible_band() {
        let dh = DhTable::default();
        let pp = PenaltyParams::default();
        let chassis = ChassisPose::new(0.0, 0.0, 0.0);
        let p = reachability_penalty(&chassis, &mid_band_bolt(), &dh, &pp);
        assert_eq!(p.value, 0.0);
        assert_eq!(p.gradient, [0.0; 3]);
    }

    #[test]
    fn penalty_positive_beyond_reach_and_decreasing_toward_bolt() {
        let dh = DhTable::default();
        let pp = PenaltyParams::default();
        let bolt = Pose6 {
            position: Vector3::new(950.0, 0.0, 40.0),
            orientation: UnitQuaternion::identity(),
        };
        let chassis = ChassisPose::new(0.0, 0.0, 0.0);
        let p = reachability_penalty(&chassis, &bolt, &dh, &pp);
        assert!(p.value > 0.0);
        // Moving the chassis toward the bolt must decrease the value.
        let delta = 1.0;
        let closer = ChassisPose::new(delta, 0.0, 0.0);
        let farther = ChassisPose::new(-delta, 0.0, 0.0);
        let pc = reachability_penalty(&closer, &bolt, &dh, &pp);
        let pf = reachability_penalty(&farther, &bolt, &dh, &pp);
        assert!(pc.value < p.value && p.value < pf.value);
        assert!(p.gradient[0] < 0.0, "gradient should point away from bolt");
    }

    #[test]
    fn penalty_gradient_matches_central_finite_differences() {
        let dh = DhTable::default();
        let pp = PenaltyParams::default();
        let mut rng = stream_rng(59, 0);
        let h = 1e-4;
        let mut checked = 0;
        while checked < 50 {
            let bolt = Pose6 {
                position: Vector3::new(
                    rng.random_range(-1000.0..1000.0),
                    rng.random_range(-1000.0..1000.0),
                    rng.random_range(0.0..300.0),
                ),
                orientation: UnitQuaternion::from_scaled_axis(Vector3::new(
                    rng.random_range(-0.4..0.4),
                    rng.random_range(-0.4..0.4),
                    rng.random_range(-3.0..3.0),
                )),
            };
            let chassis = ChassisPose::new(
                rng.random_range(-400.0..400.0),
                rng.random_range(-400.0..400.0),
                rng.random_range(-3.0..3.0),
            );
            let p = reachability_penalty(&chassis, &bolt, &dh, &pp);
            let grad_norm = (p.gradient[0].powi(2)
                + p.gradient[1].powi(2)
                + p.gradient[2].powi(2))
            .sqrt();
            if grad_norm < 1e-8 {
                // Zero-penalty interior: confirm FD agrees it is flat.
                continue;
            }
            let eval = |c: ChassisPose| reachability_penalty(&c, &bolt, &dh, &pp).value;
            let fd = [
                (eval(ChassisPose::new(chassis.x_mm + h, chassis.y_mm, chassis.heading_rad))
                    - eval(ChassisPose::new(
                        chassis.x_mm - h,
                        chassis.y_mm,
                        chassis.heading_rad,
                    )))
                    / (2.0 * h),
                (eval(ChassisPose::new(chassis.x_mm, chassis.y_mm + h, chassis.heading_rad))
                    - eval(ChassisPose::new(
                        chassis.x_mm,
                        chassis.y_mm - h,
                        chassis.heading_rad,
                    )))
                    / (2.0 * h),
                (eval(ChassisPose::new(chassis.x_mm, chassis.y_mm, chassis.heading_rad + h))
                    - eval(ChassisPose::new(
                        chassis.x_mm,
                        chassis.y_mm,
                        chassis.heading_rad - h,
                    )))
                    / (2.0 * h),
            ];
            for i in 0..3 {
                let rel = (p.gradient[i] - fd[i]).abs() / grad_norm.max(1e-12);
                assert!(
                    rel < 1e-4,
                    "component {i}: analytic {} vs fd {} (rel {rel})",
                    p.gradient[i],
                    fd[i]
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn penalty_zero_implies_full_ik_solvable() {
        let dh = DhTable::default();
        let pp = PenaltyParams::default();
        let params = IkParams::default();
        let mut rng = stream_rng(61, 0);
        let mut zero_count = 0;
        let mut ok = 0;
        for _ in 0..1000 {
            let bolt = Pose6 {
                position: Vector3::new(
                    rng.random_range(-900.0..900.0),
                    rng.random_range(-900.0..900.0),
                    rng.random_range(0.0..200.0),
                ),
                orientation: UnitQuaternion::from_scaled_axis(Vector3::new(
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-3.0..3.0),
                )),
            };
            let chassis = ChassisPose::new(0.0, 0.0, 0.0);
            let p = reachability_penalty(&chassis, &bolt, &dh, &pp);
            if p.value == 0.0 {
                zero_count += 1;
                let target = pose_in_base(&chassis, &effector_target_for_bolt(&bolt, 0.0));
                if ik_solve_multi(&target, &params, &dh).converged {
                    ok += 1;
                }
            }
        }
        assert!(zero_count > 100, "want a meaningful sample, got {zero_count}");
        assert!(
            (ok as f64) / (zero_count as f64) >= 0.99,
            "{ok}/{zero_count} solvable"
        );
    }

    #[test]
    fn heading_wraps_into_half_open_interval() {
        use std::f64::consts::PI;
        assert_relative_eq!(wrap_heading(PI), PI);
        assert_relative_eq!(wrap_heading(-PI), PI);
        assert_relative_eq!(wrap_heading(3.0 * PI), PI);
        assert_relative_eq!(wrap_heading(0.1 - 2.0 * PI), 0.1, epsilon = 1e-12);
    }
}
