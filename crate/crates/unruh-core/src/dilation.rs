//! Two-mode squeezing picture of the amplifier channel.
//!
//! A Minkowski Fock state |l> expands over the two Rindler wedges as
//!
//! ```text
//! |l>  ->  sum_n c_n^l |n + l>_I |n>_II ,
//! c_n^l = sqrt(C(n+l, l)) tanh^n(r) / cosh^(l+1)(r) ,
//! ```
//!
//! i.e. the image of |l, 0> under the two-mode squeeze exp[r(ab - a^dag
//! b^dag)]^dag = exp[r(a^dag b^dag - ab)]. Tracing wedge II reproduces the
//! channel of [`crate::channel`], but through a genuinely different pipeline:
//! amplitudes from a recurrence instead of closed-form binomials, truncation
//! by total excitation instead of Kraus index, and a sequential per-party
//! contraction instead of a joint multi-index family. That independence is
//! what makes [`dilate_and_trace`] a useful cross-check oracle.

use crate::channel::{KrausSet, CHOI_SIDE_BUDGET};
use crate::error::{Error, Result};
use crate::fock::{
    hermitian_eigensystem, tensor_operators, C64, CMatrix, DensityMatrix, DimSignature,
    FockOperator,
};
use crate::report::PropertyReport;

/// Agreement tolerance between the Kraus and dilation pipelines under
/// certified cutoffs (the residual is the certified tail, far below this).
pub const ORACLE_TOL: f64 = 1e-8;

/// Pure state of the two Rindler wedge modes, both truncated at `cutoff`
/// excitations. Amplitude on |i>_I |j>_II sits at entry (i, j).
#[derive(Clone, Debug)]
pub struct TwoModeState {
    coeffs: CMatrix,
}

impl TwoModeState {
    /// Per-mode dimension, cutoff + 1.
    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    /// Amplitude matrix, entry (i, j) = <i j | psi>.
    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn amp(&self, i: usize, j: usize) -> C64 {
        self.coeffs[(i, j)]
    }

    /// Squared norm; below 1 by exactly the truncation tail.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Normalized density matrix on the two-mode space (signature [D, D]).
    pub fn state(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let mut vec = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                vec.push(self.coeffs[(i, j)]);
            }
        }
        DensityMatrix::from_pure(DimSignature::new(vec![d, d])?, &vec)
    }
}

/// Rindler-wedge amplitudes c_n^l for n = 0..=n_max, by the stable recurrence
/// c_0 = cosh^-(l+1), c_{n+1} = c_n tanh(r) sqrt((l+n+1)/(n+1)).
fn rindler_amps(r: f64, level: usize, n_max: usize) -> Vec<f64> {
    let t = r.tanh();
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = r.cosh().powi(-(level as i32 + 1));
    for n in 0..=n_max {
        amps.push(c);
        c *= t * ((level + n + 1) as f64 / (n + 1) as f64).sqrt();
    }
    amps
}

/// Two-wedge expansion of the Minkowski Fock state |level> with both modes
/// truncated at `cutoff`: amplitude c_n^level at (n + level, n) for
/// n <= cutoff - level.
pub fn rindler_expand(level: usize, r: f64, cutoff: usize) -> Result<TwoModeState> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "squeezing parameter must be finite and nonnegative, got {r}"
        )));
    }
    if level > cutoff {
        return Err(Error::InvalidArgument(format!(
            "Fock level {level} exceeds cutoff {cutoff}"
        )));
    }
    let d = cutoff + 1;
    let mut coeffs = CMatrix::zeros(d, d);
    for (n, amp) in rindler_amps(r, level, cutoff - level).iter().enumerate() {
        coeffs[(n + level, n)] = C64::new(*amp, 0.0);
    }
    Ok(TwoModeState { coeffs })
}

/// exp[r(a^dag b^dag - ab)] restricted to the excitation-difference sector
/// n_I - n_II = delta >= 0, in the basis (delta + m, m), m = 0..cutoff-delta.
///
/// The generator there is a real skew tridiagonal with
/// g_m = r sqrt((delta + m + 1)(m + 1)); it is exponentiated through the
/// Hermitian eigensystem of i times it, so the block is exactly unitary at
/// every truncation (boundary effects deform the *state*, never unitarity).
pub fn squeezing_sector(r: f64, cutoff: usize, delta: usize) -> Result<CMatrix> {
    if delta > cutoff {
        return Err(Error::InvalidArgument(format!(
            "sector delta {delta} exceeds cutoff {cutoff}"
        )));
    }
    let s = cutoff - delta + 1;
    let mut h = CMatrix::zeros(s, s);
    for m in 0..s - 1 {
        let g = r * (((delta + m + 1) * (m + 1)) as f64).sqrt();
        h[(m + 1, m)] = C64::new(0.0, g);
        h[(m, m + 1)] = C64::new(0.0, -g);
    }
    let (eigs, vecs) = hermitian_eigensystem(&h)?;
    // exp(G) = exp(-iH) = U exp(-i lambda) U^dag
    let mut block = CMatrix::zeros(s, s);
    for (j, lam) in eigs.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lam);
        let col = vecs.column(j);
        for a in 0..s {
            for b in 0..s {
                block[(a, b)] += phase * col[a] * col[b].conj();
            }
        }
    }
    Ok(block)
}

/// Full two-mode squeezing unitary exp[r(a^dag b^dag - ab)] on the truncated
/// space (cutoff + 1)^2, assembled from its difference sectors. Exactly
/// unitary at any cutoff; entries agree with the untruncated operator on
/// states supported below cutoff/2.
pub fn squeezing_operator(r: f64, cutoff: usize) -> Result<CMatrix> {
    let d = cutoff + 1;
    let side = d * d;
    if side > CHOI_SIDE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "two-mode squeezing operator side".into(),
            needed: side,
            budget: CHOI_SIDE_BUDGET,
        });
    }
    let idx = |n_i: usize, n_ii: usize| n_i * d + n_ii;
    let mut s = CMatrix::zeros(side, side);
    for delta in 0..=cutoff {
        let block = squeezing_sector(r, cutoff, delta)?;
        let m_max = cutoff - delta;
        for m1 in 0..=m_max {
            for m2 in 0..=m_max {
                s[(idx(delta + m1, m1), idx(delta + m2, m2))] = block[(m1, m2)];
                if delta > 0 {
                    // the mirror sector n_II - n_I = delta has the same block
                    s[(idx(m1, delta + m1), idx(m2, delta + m2))] = block[(m1, m2)];
                }
            }
        }
    }
    Ok(s)
}

/// Isometry V |l> = sum_n c_n^l |n+l>_I |n>_II on the doubly truncated
/// two-mode space, as a (cutoff+1)^2 x d_in matrix with two-mode row index
/// n_I (cutoff+1) + n_II. Its Gram V^dag V is exactly diagonal with entries
/// 1 - tail(l).
pub fn dilation_isometry(r: f64, d_in: usize, cutoff: usize) -> Result<CMatrix> {
    if d_in == 0 || d_in > cutoff + 1 {
        return Err(Error::InvalidArgument(format!(
            "d_in = {d_in} incompatible with cutoff {cutoff}"
        )));
    }
    let d = cutoff + 1;
    let mut v = CMatrix::zeros(d * d, d_in);
    for l in 0..d_in {
        let expansion = rindler_expand(l, r, cutoff)?;
        for n in 0..=(cutoff - l) {
            v[((n + l) * d + n, l)] = expansion.amp(n + l, n);
        }
    }
    Ok(v)
}

/// Wedge-II contraction operators for one party: B_n of shape
/// (cutoff+1) x d_in with B_n[n+l, l] = c_n^l, so that
/// Tr_II(V rho V^dag) = sum_n B_n rho B_n^dag.
pub(crate) fn rindler_ops(r: f64, d_in: usize, cutoff: usize) -> Vec<FockOperator> {
    debug_assert!(d_in >= 1 && d_in <= cutoff + 1);
    let d_out = cutoff + 1;
    let per_level: Vec<Vec<f64>> = (0..d_in)
        .map(|l| rindler_amps(r, l, cutoff - l))
        .collect();
    (0..=cutoff)
        .map(|n| {
            let mut m = CMatrix::zeros(d_out, d_in);
            for (l, amps) in per_level.iter().enumerate() {
                if n + l <= cutoff {
                    m[(n + l, l)] = C64::new(amps[n], 0.0);
                }
            }
            FockOperator::new(m)
        })
        .collect()
}

/// Channel action computed through the dilation picture: expand each
/// accelerated party over the two wedges, trace wedge II.
///
/// Output dimensions match [`crate::channel::apply_channel`]; the values
/// differ from it only by truncation residuals of the order of the certified
/// tail, because this path keeps total-excitation edge terms the Kraus-index
/// truncation drops.
pub fn dilate_and_trace(ks: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.sig() != ks.input_sig() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", ks.input_sig().dims()),
            got: format!("{:?}", rho.sig().dims()),
        });
    }
    let spec = ks.spec();
    let mut cur = rho.clone();
    for (m, &p) in spec.accelerated().iter().enumerate() {
        let d = spec.local_dims()[p];
        let cutoff = d - 1 + spec.cutoffs()[m];
        let ops = rindler_ops(spec.accel()[m].r(), d, cutoff);

        let dims = cur.sig().dims().to_vec();
        let left = FockOperator::identity(dims[..p].iter().product());
        let right = FockOperator::identity(dims[p + 1..].iter().product());
        let side_out: usize = dims
            .iter()
            .enumerate()
            .map(|(i, &di)| if i == p { cutoff + 1 } else { di })
            .product();

        let trace_in = cur.trace();
        let mut out = CMatrix::zeros(side_out, side_out);
        for b in &ops {
            let full = tensor_operators(&[&left, b, &right])?;
            out += full.matrix() * cur.matrix() * full.adjoint().matrix();
        }
        let trace_out: f64 = (0..side_out).map(|i| out[(i, i)].re).sum();

        let mut new_dims = dims;
        new_dims[p] = cutoff + 1;
        cur = DensityMatrix::from_trusted(
            DimSignature::new(new_dims)?,
            out,
            cur.trace_deficit() + (trace_in - trace_out),
        );
    }
    Ok(cur)
}

/// Worst max-norm disagreement between the Kraus pipeline and the dilation
/// pipeline over the given states, reported against [`ORACLE_TOL`].
pub fn oracle_compare(ks: &KrausSet, states: &[&DensityMatrix], seed: u64) -> Result<PropertyReport> {
    let mut worst = 0.0f64;
    for rho in states {
        let via_kraus = crate::channel::apply_channel(ks, rho)?;
        let via_dilation = dilate_and_trace(ks, rho)?;
        let diff = (via_kraus.matrix() - via_dilation.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    Ok(PropertyReport::new(
        "oracle: Kraus vs dilation pipelines",
        states.len(),
        worst,
        ORACLE_TOL,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        apply_channel, kraus_multiparty, truncation_tail, AccelerationParam, ChannelSpec,
    };
    use crate::sample;
    use approx::assert_relative_eq;

    fn r_half() -> f64 {
        0.5f64.sqrt().atanh()
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (1..=k).map(|i| (n - k + i) as f64 / i as f64).product()
    }

    #[test]
    fn expansion_norm_shortfall_is_exactly_the_tail() {
        let r = 0.9;
        for level in 0..4 {
            let psi = rindler_expand(level, r, 30).unwrap();
            let tail = truncation_tail(r, level, 30 - level);
            assert_relative_eq!(psi.norm_sqr(), 1.0 - tail, epsilon = 1e-15);
        }
    }

    #[test]
    fn expansion_amplitudes_match_closed_form() {
        let r = 0.7;
        let psi = rindler_expand(2, r, 20).unwrap();
        for n in [0usize, 1, 5, 11] {
            let expect = binomial(n + 2, 2).sqrt() * r.tanh().powi(n as i32)
                / r.cosh().powi(3);
            assert_relative_eq!(psi.amp(n + 2, n).re, expect, max_relative = 1e-14);
        }
        // vacuum expansion is the plain geometric two-mode squeezed state
        let vac = rindler_expand(0, r, 20).unwrap();
        for n in 0..10 {
            assert_relative_eq!(
                vac.amp(n, n).re,
                r.tanh().powi(n as i32) / r.cosh(),
                max_relative = 1e-14
            );
        }
        assert!(rindler_expand(5, r, 4).is_err());
    }

    #[test]
    fn sector_blocks_are_unitary_at_every_truncation() {
        let cutoff = 40;
        for delta in [0usize, 1, 7, 25, 40] {
            let block = squeezing_sector(1.0, cutoff, delta).unwrap();
            let s = block.nrows();
            let defect = (block.adjoint() * &block - CMatrix::identity(s, s))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(defect < 1e-12, "delta = {delta}: defect = {defect:.3e}");
        }
    }

    #[test]
    fn full_operator_is_unitary_and_respects_sectors() {
        let cutoff = 12;
        let d = cutoff + 1;
        let s = squeezing_operator(0.8, cutoff).unwrap();
        let defect = (s.adjoint() * &s - CMatrix::identity(d * d, d * d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-12);
        // the squeezed vacuum only populates equal occupation pairs
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    assert_eq!(s[(i * d + j, 0)], C64::new(0.0, 0.0));
                }
            }
        }
        // budget guard
        assert!(squeezing_operator(0.5, 64).is_err());
    }

    #[test]
    fn squeezed_vacuum_matches_geometric_series_on_converged_subspace() {
        // Spectral exponentiation vs the analytic tanh^n / cosh amplitudes.
        // At cutoff 40 the truncation deforms amplitudes near the boundary,
        // so the 1e-8 agreement is asserted below cutoff/2; doubling the
        // cutoff makes the whole retained range agree.
        let cutoff = 40;
        for r in [0.5, r_half(), 1.0] {
            let block = squeezing_sector(r, cutoff, 0).unwrap();
            for n in 0..=cutoff / 2 {
                let expect = r.tanh().powi(n as i32) / r.cosh();
                assert!(
                    (block[(n, 0)].re - expect).abs() < 1e-8,
                    "r = {r}, n = {n}"
                );
                assert!(block[(n, 0)].im.abs() < 1e-12);
            }
        }
        let block = squeezing_sector(1.0, 80, 0).unwrap();
        for n in 0..=80usize {
            let expect = 1.0f64.tanh().powi(n as i32) / 1.0f64.cosh();
            assert!((block[(n, 0)].re - expect).abs() < 1e-8, "n = {n}");
        }
        // honesty check: at r = 1, cutoff 40, the boundary amplitude really
        // is off by more than the subspace tolerance
        let block = squeezing_sector(1.0, 40, 0).unwrap();
        let expect = 1.0f64.tanh().powi(40) / 1.0f64.cosh();
        let err = (block[(40, 0)].re - expect).abs();
        assert!(err > 1e-7 && err < 1e-4, "boundary error = {err:.3e}");
    }

    #[test]
    fn squeezing_level_one_column_matches_rindler_expansion() {
        let r = 0.9;
        let cutoff = 40;
        let d = cutoff + 1;
        let s = squeezing_operator(r, cutoff).unwrap();
        let psi = rindler_expand(1, r, cutoff).unwrap();
        // S |1, 0> has amplitude c_n^1 on |n+1, n>
        for n in 0..=cutoff / 2 {
            let got = s[((n + 1) * d + n, d)]; // column index of |1, 0> is 1*d + 0
            assert!(
                (got.re - psi.amp(n + 1, n).re).abs() < 1e-8,
                "n = {n}"
            );
        }
    }

    #[test]
    fn isometry_gram_is_diagonal_with_tail_deficits() {
        let r = 0.8;
        let (d_in, cutoff) = (3, 25);
        let v = dilation_isometry(r, d_in, cutoff).unwrap();
        let gram = v.adjoint() * &v;
        for i in 0..d_in {
            for j in 0..d_in {
                if i == j {
                    let tail = truncation_tail(r, i, cutoff - i);
                    assert_relative_eq!(gram[(i, i)].re, 1.0 - tail, epsilon = 1e-14);
                } else {
                    assert!(gram[(i, j)].norm() < 1e-16);
                }
            }
        }
    }

    #[test]
    fn dilation_matches_kraus_on_single_party() {
        let spec = ChannelSpec::certified(
            vec![2],
            vec![0],
            vec![AccelerationParam::from_r(r_half()).unwrap()],
            1e-10,
        )
        .unwrap();
        let ks = kraus_multiparty(&spec).unwrap();
        let mut rng = sample::rng(9);
        for _ in 0..4 {
            let rho = sample::wishart_mixed(ks.input_sig(), &mut rng);
            let a = apply_channel(&ks, &rho).unwrap();
            let b = dilate_and_trace(&ks, &rho).unwrap();
            assert_eq!(a.sig(), b.sig());
            let diff = (a.matrix() - b.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-9, "diff = {diff:.3e}");
        }
    }

    #[test]
    fn dilation_matches_kraus_with_inertial_and_two_accelerated_parties() {
        let spec = ChannelSpec::new(
            vec![2, 2, 2],
            vec![0, 2],
            vec![
                AccelerationParam::from_r(0.6).unwrap(),
                AccelerationParam::from_r(0.9).unwrap(),
            ],
            vec![18, 24],
        )
        .unwrap();
        let ks = kraus_multiparty(&spec).unwrap();
        let mut rng = sample::rng(13);
        let rho = sample::wishart_mixed(ks.input_sig(), &mut rng);
        let a = apply_channel(&ks, &rho).unwrap();
        let b = dilate_and_trace(&ks, &rho).unwrap();
        assert_eq!(a.sig().dims(), &[20, 2, 26]);
        assert_eq!(b.sig().dims(), &[20, 2, 26]);
        let diff = (a.matrix() - b.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "diff = {diff:.3e}");
        // the wedge expansion keeps the extra terms n in (K, d-1+K] that the
        // Kraus cutoff drops, so it loses no more trace than the Kraus path
        // and the two deficits agree within the certified tail
        assert!(b.trace_deficit() <= a.trace_deficit() + 1e-12);
        assert!((a.trace_deficit() - b.trace_deficit()).abs() <= ks.tail_bound());
    }

    #[test]
    fn oracle_compare_reports_pass_under_certified_cutoffs() {
        let spec = ChannelSpec::certified(
            vec![2, 2],
            vec![1],
            vec![AccelerationParam::from_r(1.2).unwrap()],
            1e-10,
        )
        .unwrap();
        let ks = kraus_multiparty(&spec).unwrap();
        let mut rng = sample::rng(21);
        let s1 = sample::wishart_mixed(ks.input_sig(), &mut rng);
        let s2 = sample::wishart_mixed(ks.input_sig(), &mut rng);
        let report = oracle_compare(&ks, &[&s1, &s2], 21).unwrap();
        assert!(report.pass, "worst = {:.3e}", report.worst_violation);
    }
}
