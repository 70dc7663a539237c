//! Coherence and entanglement quantifiers, plus the distance functions the
//! monotonicity and contraction checks are stated in.
//!
//! Coherence is always meant with respect to the Fock (number) basis the
//! states are stored in. Entropic quantities use base-2 logarithms
//! throughout, so entropies are in bits.
//!
//! These functions take the state as given: callers working with
//! trace-deficient channel outputs are expected to renormalize first (see
//! [`DensityMatrix::renormalized`]) so that a measure never silently mixes
//! truncation loss into a resource value.

use crate::error::{Error, Result};
use crate::fock::{hermitian_eigensystem, C64, CMatrix, DensityMatrix};

/// Eigenvalues at or below this (relative to the largest) count as outside
/// the support for entropic quantities.
pub const SUPPORT_EPS: f64 = 1e-14;
/// Largest weight a state may place outside another's support before their
/// relative entropy is reported as infinite.
pub const SUPPORT_VIOLATION_TOL: f64 = 1e-12;

/// Sum of absolute off-diagonal entries, sum_{i != j} |rho_ij|.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = m.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// Full dephasing in the Fock basis: keep the diagonal, drop the rest.
pub fn dephased(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.matrix().nrows();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(rho.matrix()[(i, i)].re, 0.0);
    }
    DensityMatrix::from_trusted(rho.sig().clone(), m, rho.trace_deficit())
}

fn entropy_of_eigenvalues(eigs: &[f64], scale: f64) -> Result<f64> {
    let mut s = 0.0;
    for &lam in eigs {
        if lam < -crate::fock::TOL_PSD * scale.max(1.0) {
            return Err(Error::NotPositive { min_eig: lam });
        }
        if lam > 0.0 {
            s -= lam * lam.log2();
        }
    }
    Ok(s)
}

/// Von Neumann entropy S(rho) = -tr(rho log2 rho), in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (eigs, _) = hermitian_eigensystem(rho.matrix())?;
    entropy_of_eigenvalues(&eigs, eigs.last().copied().unwrap_or(1.0))
}

/// Relative entropy of coherence, S(dephased(rho)) - S(rho).
pub fn relative_entropy_of_coherence(rho: &DensityMatrix) -> Result<f64> {
    let diag: Vec<f64> = (0..rho.matrix().nrows())
        .map(|i| rho.matrix()[(i, i)].re)
        .collect();
    let s_diag = entropy_of_eigenvalues(&diag, 1.0)?;
    Ok((s_diag - von_neumann_entropy(rho)?).max(0.0))
}

/// Transpose the listed subsystems in place of the full transpose.
pub fn partial_transpose(rho: &DensityMatrix, parties: &[usize]) -> Result<CMatrix> {
    let sig = rho.sig();
    let n = sig.len();
    if parties.is_empty() || parties.iter().any(|&p| p >= n) {
        return Err(Error::InvalidArgument(format!(
            "transpose parties {parties:?} invalid for {n} subsystems"
        )));
    }
    let mut flags = vec![false; n];
    for &p in parties {
        flags[p] = true;
    }
    let d = sig.total();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        let di = sig.unravel(i);
        for j in 0..d {
            let dj = sig.unravel(j);
            let mut ri = di.clone();
            let mut rj = dj.clone();
            for p in 0..n {
                if flags[p] {
                    ri[p] = dj[p];
                    rj[p] = di[p];
                }
            }
            out[(sig.ravel(&ri), sig.ravel(&rj))] = rho.matrix()[(i, j)];
        }
    }
    Ok(out)
}

/// Negativity across the cut defined by transposing `parties`:
/// the absolute sum of negative eigenvalues of the partial transpose,
/// (||rho^T_B||_1 - 1) / 2 for a normalized state.
pub fn negativity(rho: &DensityMatrix, parties: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho, parties)?;
    let (eigs, _) = hermitian_eigensystem(&pt)?;
    Ok(eigs.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}

fn check_same_shape(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.sig().total() != b.sig().total() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.sig().dims()),
            got: format!("{:?}", b.sig().dims()),
        });
    }
    Ok(())
}

/// Trace distance, ||a - b||_1 / 2.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    let (eigs, _) = hermitian_eigensystem(&(a.matrix() - b.matrix()))?;
    Ok(0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>())
}

/// Hilbert-Schmidt (Frobenius) distance, ||a - b||_2.
pub fn hilbert_schmidt_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    Ok((a.matrix() - b.matrix())
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (eigs, vecs) = hermitian_eigensystem(m)?;
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (j, &lam) in eigs.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        let col = vecs.column(j);
        for a in 0..d {
            for b in 0..d {
                out[(a, b)] += C64::new(s, 0.0) * col[a] * col[b].conj();
            }
        }
    }
    Ok(out)
}

/// Uhlmann fidelity F(a, b) = (tr sqrt(sqrt(a) b sqrt(a)))^2, the squared
/// convention: F = 1 iff a = b, F = |<psi|phi>|^2 for pure states.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    let ra = psd_sqrt(a.matrix())?;
    let inner = &ra * b.matrix() * &ra;
    let (eigs, _) = hermitian_eigensystem(&inner)?;
    let root_sum: f64 = eigs.iter().map(|&e| e.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0))
}

/// Bures distance, sqrt(2 - 2 sqrt(F)).
pub fn bures_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * fidelity(a, b)?.sqrt()).max(0.0).sqrt())
}

/// Quantum relative entropy D(a || b) = tr a (log2 a - log2 b).
///
/// Returns +infinity when `a` puts more than [`SUPPORT_VIOLATION_TOL`]
/// weight outside the numerical support of `b` (eigenvalues at or below
/// [`SUPPORT_EPS`] relative to the largest).
pub fn relative_entropy(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    let (ea, _) = hermitian_eigensystem(a.matrix())?;
    let (eb, vb) = hermitian_eigensystem(b.matrix())?;
    let scale_b = eb.last().copied().unwrap_or(0.0).max(SUPPORT_EPS);

    let mut outside = 0.0;
    let mut cross = 0.0; // tr(a log2 b) over the support of b
    for (j, &mu) in eb.iter().enumerate() {
        let v = vb.column(j);
        let av = a.matrix() * v;
        let weight = v.dotc(&av).re.max(0.0);
        if mu <= SUPPORT_EPS * scale_b {
            outside += weight;
        } else {
            cross += weight * mu.log2();
        }
    }
    if outside > SUPPORT_VIOLATION_TOL {
        return Ok(f64::INFINITY);
    }

    let neg_s_a: f64 = ea
        .iter()
        .filter(|&&lam| lam > 0.0)
        .map(|&lam| lam * lam.log2())
        .sum();
    Ok((neg_s_a - cross).max(0.0))
}

/// Robustness of coherence for a single qubit, by direct search: the least
/// s >= 0 such that (rho + s tau) / (1 + s) is diagonal for some state tau.
///
/// The search bisects on s, testing feasibility by minimizing the residual
/// off-diagonal magnitude over the Bloch ball with a compass search. For
/// qubits the result coincides with the l1 coherence; keeping the search
/// form makes it an independent witness of that identity rather than a
/// restatement.
pub fn robustness_of_coherence(rho: &DensityMatrix) -> Result<f64> {
    if rho.sig().total() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: rho.sig().total(),
            operation: "robustness of coherence (direct search)".into(),
        });
    }
    let target = rho.matrix()[(0, 1)];
    let feasible = |s: f64| -> bool {
        if s == 0.0 {
            return target.norm() <= 1e-13;
        }
        // tau = (I + x sx + y sy + z sz)/2 has tau_01 = (x - i y)/2; z plays
        // no role in the off-diagonal, so search the (x, y) disc.
        let residual = |x: f64, y: f64| -> f64 {
            if x * x + y * y > 1.0 {
                return f64::INFINITY;
            }
            (target + C64::new(0.5 * s * x, -0.5 * s * y)).norm()
        };
        let mut best = (0.0f64, 0.0f64, residual(0.0, 0.0));
        for i in -8..=8i32 {
            for j in -8..=8i32 {
                let (x, y) = (i as f64 / 8.0, j as f64 / 8.0);
                let v = residual(x, y);
                if v < best.2 {
                    best = (x, y, v);
                }
            }
        }
        let mut step = 0.125;
        while step > 1e-16 {
            let mut moved = false;
            for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = residual(best.0 + dx, best.1 + dy);
                if v < best.2 {
                    best = (best.0 + dx, best.1 + dy, v);
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best.2 <= 1e-13
    };

    if feasible(0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if !feasible(hi) {
        return Err(Error::PropertyFailed(
            "robustness search found no feasible mixing weight up to s = 2".into(),
        ));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Resource quantifiers addressable by name from the monotonicity suites and
/// the sweep front end.
#[derive(Clone, Debug)]
pub enum Quantifier {
    L1Coherence,
    RelativeEntropyCoherence,
    /// Negativity across the cut obtained by transposing these parties.
    Negativity { transpose_parties: Vec<usize> },
    /// Direct-search robustness; evaluable on single-qubit states only.
    RobustnessQubit,
}

/// Names accepted by the CLI measure list, in display order.
pub const QUANTIFIER_NAMES: [&str; 4] = [
    "l1-coherence",
    "relative-entropy-coherence",
    "negativity",
    "robustness",
];

impl Quantifier {
    pub fn name(&self) -> &'static str {
        match self {
            Quantifier::L1Coherence => "l1-coherence",
            Quantifier::RelativeEntropyCoherence => "relative-entropy-coherence",
            Quantifier::Negativity { .. } => "negativity",
            Quantifier::RobustnessQubit => "robustness",
        }
    }

    /// Evaluate on a normalized state. Tiny negative values from eigensolve
    /// noise are clamped to zero.
    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        let v = match self {
            Quantifier::L1Coherence => l1_coherence(rho),
            Quantifier::RelativeEntropyCoherence => relative_entropy_of_coherence(rho)?,
            Quantifier::Negativity { transpose_parties } => negativity(rho, transpose_parties)?,
            Quantifier::RobustnessQubit => robustness_of_coherence(rho)?,
        };
        if v < -1e-12 {
            return Err(Error::PropertyFailed(format!(
                "quantifier {} returned {v:.3e} < 0",
                self.name()
            )));
        }
        Ok(v.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::rindler_expand;
    use crate::fock::{partial_trace, tensor_states, DimSignature};
    use crate::sample;
    use crate::states;
    use approx::assert_relative_eq;

    #[test]
    fn l1_of_standard_states() {
        assert_relative_eq!(
            l1_coherence(&states::plus_state()),
            1.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            l1_coherence(&states::preset("bell-phi-plus").unwrap()),
            1.0,
            epsilon = 1e-14
        );
        let mixed = dephased(&states::plus_state());
        assert_eq!(l1_coherence(&mixed), 0.0);
    }

    #[test]
    fn entropy_of_pure_mixed_and_product_states() {
        let pure = states::preset("bell-phi-plus").unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-10);

        let sig = DimSignature::single(2).unwrap();
        let mixed = DensityMatrix::diagonal(sig, &[0.5, 0.5]).unwrap();
        assert_relative_eq!(von_neumann_entropy(&mixed).unwrap(), 1.0, epsilon = 1e-12);

        let mut rng = sample::rng(3);
        let a = sample::wishart_mixed(&DimSignature::single(3).unwrap(), &mut rng);
        let b = sample::wishart_mixed(&DimSignature::single(2).unwrap(), &mut rng);
        let ab = tensor_states(&[&a, &b]).unwrap();
        assert_relative_eq!(
            von_neumann_entropy(&ab).unwrap(),
            von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn squeezed_vacuum_reduction_has_thermal_entropy() {
        // S(Tr_II |TMSV><TMSV|) = cosh^2 log2 cosh^2 - sinh^2 log2 sinh^2
        let r = 0.5;
        let psi = rindler_expand(0, r, 30).unwrap().state().unwrap();
        let reduced = partial_trace(&psi, &[0]).unwrap();
        let (c2, s2) = (r.cosh() * r.cosh(), r.sinh() * r.sinh());
        let expect = c2 * c2.log2() - s2 * s2.log2();
        assert_relative_eq!(
            von_neumann_entropy(&reduced).unwrap(),
            expect,
            epsilon = 1e-12
        );
    }

    #[test]
    fn relative_entropy_coherence_of_standard_states() {
        assert_relative_eq!(
            relative_entropy_of_coherence(&states::plus_state()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            relative_entropy_of_coherence(&states::preset("bell-phi-plus").unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partial_transpose_is_an_involution_and_preserves_trace() {
        let mut rng = sample::rng(11);
        let sig = DimSignature::new(vec![2, 3]).unwrap();
        let rho = sample::wishart_mixed(&sig, &mut rng);
        let pt = partial_transpose(&rho, &[1]).unwrap();
        let trace: f64 = (0..6).map(|i| pt[(i, i)].re).sum();
        assert_relative_eq!(trace, 1.0, epsilon = 1e-12);
        let back = partial_transpose(
            &DensityMatrix::from_trusted(sig, pt, 0.0),
            &[1],
        )
        .unwrap();
        let diff = (&back - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn negativity_of_bell_product_and_werner_states() {
        let bell = states::preset("bell-phi-plus").unwrap();
        assert_relative_eq!(negativity(&bell, &[1]).unwrap(), 0.5, epsilon = 1e-12);

        let mut rng = sample::rng(19);
        let sig2 = DimSignature::single(2).unwrap();
        let a = sample::wishart_mixed(&sig2, &mut rng);
        let b = sample::wishart_mixed(&sig2, &mut rng);
        let prod = tensor_states(&[&a, &b]).unwrap();
        assert!(negativity(&prod, &[1]).unwrap() < 1e-12);

        // Werner state p |Psi-><Psi-| + (1-p) I/4: negativity max(0, (3p-1)/4)
        for (p, expect) in [(0.8, 0.35), (0.2, 0.0)] {
            let psi_minus = {
                let sig = DimSignature::new(vec![2, 2]).unwrap();
                let amps = [
                    C64::new(0.0, 0.0),
                    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    C64::new(0.0, 0.0),
                ];
                DensityMatrix::from_pure(sig, &amps).unwrap()
            };
            let mut m = psi_minus.matrix().map(|z| z * p);
            for i in 0..4 {
                m[(i, i)] += C64::new((1.0 - p) / 4.0, 0.0);
            }
            let werner = DensityMatrix::from_trusted(psi_minus.sig().clone(), m, 0.0);
            assert_relative_eq!(
                negativity(&werner, &[1]).unwrap(),
                expect,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn trace_distance_limits_and_triangle_inequality() {
        let sig = DimSignature::single(3).unwrap();
        let e0 = DensityMatrix::from_pure(
            sig.clone(),
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let e1 = DensityMatrix::from_pure(
            sig.clone(),
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        assert_relative_eq!(trace_distance(&e0, &e1).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(trace_distance(&e0, &e0).unwrap(), 0.0);

        let mut rng = sample::rng(29);
        for _ in 0..10 {
            let a = sample::wishart_mixed(&sig, &mut rng);
            let b = sample::wishart_mixed(&sig, &mut rng);
            let c = sample::wishart_mixed(&sig, &mut rng);
            let (ab, bc, ac) = (
                trace_distance(&a, &b).unwrap(),
                trace_distance(&b, &c).unwrap(),
                trace_distance(&a, &c).unwrap(),
            );
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn fidelity_agrees_with_pure_overlaps_and_bounds_trace_distance() {
        let sig = DimSignature::single(4).unwrap();
        let mut rng = sample::rng(37);
        let psi = sample::haar_pure(&sig, &mut rng);
        let phi = sample::haar_pure(&sig, &mut rng);
        // overlap directly from the eigenvector of each rank-1 state
        let cross = (psi.matrix() * phi.matrix())
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum::<f64>();
        // rank-deficient inputs limit the Uhlmann square-root formula to
        // sqrt(machine-epsilon) accuracy: each clamped near-zero eigenvalue
        // contributes O(1e-8)
        assert_relative_eq!(
            fidelity(&psi, &phi).unwrap(),
            cross.max(0.0),
            epsilon = 1e-7
        );
        assert_relative_eq!(fidelity(&psi, &psi).unwrap(), 1.0, epsilon = 1e-7);

        for _ in 0..8 {
            let a = sample::wishart_mixed(&sig, &mut rng);
            let b = sample::wishart_mixed(&sig, &mut rng);
            let f = fidelity(&a, &b).unwrap();
            let t = trace_distance(&a, &b).unwrap();
            // Fuchs - van de Graaf
            assert!(1.0 - f.sqrt() <= t + 1e-10);
            assert!(t <= (1.0 - f).sqrt() + 1e-10);
            let bures = bures_distance(&a, &b).unwrap();
            assert!(bures >= 0.0 && bures <= 2.0f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn relative_entropy_matches_classical_divergence_on_diagonals() {
        let sig = DimSignature::single(3).unwrap();
        let p = [0.5, 0.3, 0.2];
        let q = [0.2, 0.5, 0.3];
        let a = DensityMatrix::diagonal(sig.clone(), &p).unwrap();
        let b = DensityMatrix::diagonal(sig, &q).unwrap();
        let kl: f64 = p
            .iter()
            .zip(&q)
            .map(|(pi, qi)| pi * (pi / qi).log2())
            .sum();
        assert_relative_eq!(relative_entropy(&a, &b).unwrap(), kl, epsilon = 1e-12);
        assert!(relative_entropy(&a, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support_sentinel() {
        let sig = DimSignature::single(2).unwrap();
        let pure0 = DensityMatrix::from_pure(
            sig.clone(),
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let mixed = DensityMatrix::diagonal(sig.clone(), &[0.5, 0.5]).unwrap();
        // support of pure0 inside support of mixed: finite
        assert!(relative_entropy(&pure0, &mixed).unwrap().is_finite());
        // mixed puts weight outside the support of pure0: infinite
        assert!(relative_entropy(&mixed, &pure0).unwrap().is_infinite());
    }

    #[test]
    fn robustness_search_recovers_l1_on_qubits() {
        let sig = DimSignature::single(2).unwrap();
        let mut rng = sample::rng(43);
        for _ in 0..6 {
            let rho = sample::wishart_mixed(&sig, &mut rng);
            let r = robustness_of_coherence(&rho).unwrap();
            assert!(
                (r - l1_coherence(&rho)).abs() < 1e-6,
                "search {r} vs l1 {}",
                l1_coherence(&rho)
            );
        }
        let plus = states::plus_state();
        assert!((robustness_of_coherence(&plus).unwrap() - 1.0).abs() < 1e-6);
        let incoherent = dephased(&plus);
        assert_eq!(robustness_of_coherence(&incoherent).unwrap(), 0.0);
        // only the direct qubit search is implemented
        let big = DensityMatrix::diagonal(
            DimSignature::single(3).unwrap(),
            &[0.5, 0.25, 0.25],
        )
        .unwrap();
        assert!(matches!(
            robustness_of_coherence(&big),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
