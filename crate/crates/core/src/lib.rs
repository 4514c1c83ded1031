//! Pseudo-surfaces defined by non-integrable Pfaffian forms, and the
//! Foucault pendulum as a worked example.

pub mod calculus;
pub mod curves;
pub mod formlang;
pub mod foucault;
pub mod geometry;
pub mod linalg;
pub mod pfaff;
pub mod rk4;
