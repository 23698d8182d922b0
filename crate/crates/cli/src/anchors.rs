//! The identity each report row checks, as a fixed statement string.

use twisted_core::weyl;

pub const MONOMIAL_LADDER: &str = weyl::MONOMIAL_LADDER;
pub const HARMONIC_LADDER: &str = weyl::HARMONIC_LADDER;
pub const GENERALIZED_LADDER: &str = weyl::GENERALIZED_LADDER;
pub const COMMUTATOR: &str = weyl::COMMUTATOR;
pub const EIGENFUNCTION: &str = weyl::EIGENFUNCTION;
pub const TAU_ORDERING: &str = "W(P) = tau(P) = tau'(P) for harmonic P";
pub const LAGUERRE_DERIVATIVE: &str = "d/dx L_k^a(x) = -L_{k-1}^{a+1}(x)";
pub const LAGUERRE_SUM: &str = "L_{k-1}^{a+1} + L_k^a = L_k^{a+1}";
pub const GENERALIZED_RECURSIONS: &str = "d/dx M_a^m = -M_{a+1}^{m+1}, M_{a+1}^{m+1} + M_a^m = M_a^{m+1} (a in C_#)";
pub const COMMON_ZEROS: &str = "L_{k1}^{n-1} and L_{k2}^{n-1} have no common positive zero for k1 != k2";
pub const DIMENSION: &str = "dim H_{p,q} = dim ker(Laplacian on P_{p,q}) = dim P_{p,q} - dim P_{p-1,q-1}";
pub const DIMENSION_PRINTED: &str = "d(p,q) = (p+n-2)!(q+n-2)!((p+n-1)(q+n-1) - pq) / (p! q! (n-1)!)";
pub const BASIS: &str = "H_{p,q} basis: harmonic, pairwise orthogonal, dim H_{p,q} elements";
pub const ORTHOGONALITY: &str = "phi_j x phi_k = (2pi)^n delta_jk phi_k";
pub const RADIAL_PROJECTION: &str = "f x phi_k = B_k^n <f, phi_k> phi_k for radial f";
pub const HECKE_BOCHNER: &str = "aP x phi_k = (2pi)^{-n} C <a, phi_{k-p}^{n+p+q-1}> P phi_{k-p}^{n+p+q-1}";
pub const WEIGHTED_MEAN: &str = "phi_k x (P dmu_t)(z) = (2pi)^{-n} C t^{2(p+q)} phi_{k-q}^{n+p+q-1}(t) P(z) phi_{k-q}^{n+p+q-1}(z)";
pub const EXPANSION: &str = "f x phi_k(z) = (2pi)^n sum_{p,q} P_{p,q}^k(z) phi_{k-p}^{n+p+q-1}(z) on |z| <= R";
pub const TSM: &str = "f x mu_r(z) = int f(z - w) P(w) e^{(i/2) Im(z.conj w)} dmu_r(w)";
pub const SPHERE_INJECTIVITY: &str = "f x (P dmu_r) = 0 for r in S forces <f, phi_k> = 0 for every k";
pub const CONE_INJECTIVITY: &str = "f x phi_k vanishing on a cone forces P_{s,t}^k = 0 off the cone's zero set";
pub const HEISENBERG: &str = "Fourier transform in t of f * g on the group = f^lambda x_lambda g^lambda";
