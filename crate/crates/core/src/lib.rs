//! Core library of the debolt workbench: a desk-scale, fully seeded
//! simulation of robotic bolt disassembly together with the software stack
//! that drives it.
//!
//! The crate is organised around the lifecycle of a disassembly run:
//!
//! - [`scene`] — deterministic scene simulator: bolts, obstacles, sleeve
//!   rack, chassis and arm state, noisy multi-sensor observations, and
//!   primitive execution with failure injection.
//! - [`kinematics`] — forward kinematics, geometric Jacobian, damped
//!   least-squares inverse kinematics, and a differentiable reachability
//!   penalty for training the chassis position network.
//! - [`rpsn`] — the robot position speculation network: a small MLP
//!   mapping a bolt pose to a chassis pose, trained without labels against
//!   kinematic feasibility penalties, plus verified sampling loops.
//! - [`perception`] — probabilistic predicate layer turning observations
//!   into a quasi-symbolic state, and logistic classifier training.
//! - [`estimation`] — the pose-refinement pipeline behind the `mate`
//!   primitive: RANSAC plane fitting, pose construction from adjacent
//!   planes, and a Kalman filter loop with a covariance stopping rule.
//! - [`pddl`] — parser, grounder, and transition semantics for the typed
//!   STRIPS subset that defines the twelve disassembly primitives.
//! - [`planner`] — breadth-first and oracle-guided task search plus the
//!   execution-time verification engine with replanning.
//! - [`oracle`] — heuristic oracles: the exact symbolic oracle, a verdict
//!   noise wrapper, and a remote LLM oracle with prompt templates.

pub mod estimation;
pub mod facts;
pub mod kinematics;
pub mod oracle;
pub mod pddl;
pub mod perception;
pub mod planner;
pub mod rng;
pub mod rpsn;
pub mod scene;
