//! Seeded random-state generation for property suites.
//!
//! All samplers draw from a [`ChaCha8Rng`] seeded explicitly, so every
//! property report is reproducible from its recorded seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fock::{C64, CMatrix, DensityMatrix, DimSignature};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate via Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Complex standard Gaussian (independent real and imaginary parts).
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Haar-random pure state on the signature.
pub fn haar_pure(sig: &DimSignature, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let amps: Vec<C64> = (0..sig.total()).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::from_pure(sig.clone(), &amps).expect("Gaussian vector is almost surely nonzero")
}

/// Full-rank mixed state: G G^dag normalized to unit trace, with G a square
/// complex Gaussian matrix (Wishart-style construction).
pub fn wishart_mixed(sig: &DimSignature, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let n = sig.total();
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let mut m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    m /= C64::new(tr, 0.0);
    DensityMatrix::from_trusted(sig.clone(), m, 0.0)
}

/// Random probability vector (normalized exponential deviates).
pub fn random_probability_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(f64::MIN_POSITIVE..1.0)).ln())
        .collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// Random diagonal (incoherent) state.
pub fn random_diagonal(sig: &DimSignature, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let probs = random_probability_vector(sig.total(), rng);
    DensityMatrix::diagonal(sig.clone(), &probs).expect("normalized nonnegative diagonal")
}

/// Product of independent per-subsystem mixed states.
pub fn random_product(sig: &DimSignature, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let factors: Vec<DensityMatrix> = sig
        .dims()
        .iter()
        .map(|&d| wishart_mixed(&DimSignature::single(d).unwrap(), rng))
        .collect();
    let refs: Vec<&DensityMatrix> = factors.iter().collect();
    crate::fock::tensor_states(&refs).expect("at least one factor")
}

/// Separable state across the A|B cut: convex mixture of `terms` random
/// product states rho_A (x) rho_B, returned on signature sig_A (+) sig_B.
pub fn random_separable(
    sig_a: &DimSignature,
    sig_b: &DimSignature,
    terms: usize,
    rng: &mut ChaCha8Rng,
) -> DensityMatrix {
    let sig = sig_a.concat(sig_b);
    let n = sig.total();
    let weights = random_probability_vector(terms.max(1), rng);
    let mut acc = CMatrix::zeros(n, n);
    for &w in &weights {
        let a = wishart_mixed(sig_a, rng);
        let b = wishart_mixed(sig_b, rng);
        acc += a.matrix().kronecker(b.matrix()).map(|z| z * w);
    }
    DensityMatrix::from_trusted(sig, acc, 0.0)
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phase
/// convention fixed so the distribution is exactly Haar.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}
