// temp diagnostic
use debolt_core::kinematics::*;
use nalgebra::{UnitQuaternion, Vector3};

fn main() {
    let dh = DhTable::default();
    for dist in [350.0, 450.0, 575.0, 700.0, 820.0, 950.0] {
        let bolt = Pose6::new(Vector3::new(dist, 0.0, 40.0), UnitQuaternion::identity());
        let target = effector_target_for_bolt(&bolt, 0.0);
        let p10 = IkParams { max_iters: 10, tol_pos_mm: 1e-9, tol_rot_rad: 1e-9, ..Default::default() };
        let r = ik_dls(&target, &HOME_JOINTS, &p10, &dh);
        let r2 = ik_dls(&target, &HOME_JOINTS, &IkParams::default(), &dh);
        let pp = PenaltyParams::default();
        let p = reachability_penalty(&ChassisPose::new(0.0,0.0,0.0), &bolt, &dh, &pp);
        println!("dist {dist}: 10-iter resid {:.4} mm | full conv={} iters {} | penalty {:.6} grad [{:.3e} {:.3e} {:.3e}]",
            r.residual_pos_mm, r2.converged, r2.iterations, p.value, p.gradient[0], p.gradient[1], p.gradient[2]);
    }
}
