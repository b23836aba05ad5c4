//! Spectral geometry of Euclidean hypersurfaces of revolution.
//!
//! The crate builds explicit families of immersed hypersurfaces in R^{n+1}
//! (round and perturbed spheres, glued bi-spherical necks, dumbbell chains,
//! tuned thin appendages), evaluates their extrinsic curvature in closed
//! form, computes Laplace-Beltrami spectra by separation of variables into
//! 1D Sturm-Liouville problems, and runs the quantitative gap/cluster
//! diagnostics that relate a hypersurface to its comparison sphere of radius
//! 1/||H||_2.
//!
//! Conventions: the Laplacian is the geometer's positive one (Delta = -div
//! grad; the round unit S^n has spectrum k(n+k-1)), and every L^p norm is
//! volume-normalized, ||f||_p^p = (1/v_M) int |f|^p.

pub mod cutoff;
pub mod fiber;
pub mod geometry;
pub mod harmonic;
pub mod linalg;
pub mod moments;
pub mod pinching;
pub mod profile;
pub mod quad;
pub mod spectral;
