//! A prior construction of the noninertial qubit map, reproduced to show it
//! fails trace preservation.
//!
//! That construction transforms a two-qubit state (inertial qubit A, second
//! qubit handed to an accelerating observer) with operators
//!
//! ```text
//! A_n = (1/sqrt(n!)) (tanh^n r / cosh^2 r) (cosh r)^{n_A} (x) (b_I^dag)^n ,
//! ```
//!
//! summing rho' = sum_n A_n rho A_n^dag over the wedge-II excitation label n.
//! On |Phi+> = (|00> + |11>)/sqrt(2) the output trace is
//! (1/cosh^2 r + cosh^2 r)/2 — strictly greater than 1 for every r > 0
//! (1.25 at cosh r = sqrt(2)) — because the diagonal weight cosh^{n_A}
//! overamplifies the |11> branch. The amplifier channel of
//! [`crate::channel`] applied to the same state stays trace preserving
//! within its certified truncation tail; [`side_by_side_report`] tabulates
//! both, plus the one known agreement case |Psi+> = (|01> + |10>)/sqrt(2),
//! where the two constructions coincide operator by operator.

use serde::Serialize;

use crate::channel::{
    apply_channel, kraus_multiparty, AccelerationParam, ChannelSpec,
};
use crate::error::{Error, Result};
use crate::fock::{tensor_operators, C64, CMatrix, DensityMatrix, DimSignature, FockOperator};

/// Series tail target for choosing the prior map's excitation cutoff.
pub const AHN_TAIL_TARGET: f64 = 1e-12;
/// Largest excitation cutoff considered before giving up on r.
pub const AHN_CUTOFF_BUDGET: usize = 4096;
/// Largest cutoff for which the operators are materialized densely.
pub const AHN_MATERIALIZE_BUDGET: usize = 512;

/// Closed-form output trace of the prior map on |Phi+>:
/// (1/cosh^2 r + cosh^2 r)/2. Equals 1 iff r = 0.
pub fn ahn_trace_formula(r: f64) -> f64 {
    let c2 = r.cosh() * r.cosh();
    0.5 * (1.0 / c2 + c2)
}

/// Smallest cutoff N whose discarded series weight (both Fock branches of a
/// Bell input, geometric and arithmetico-geometric remainders) is below
/// [`AHN_TAIL_TARGET`].
pub fn required_cutoff(r: f64) -> Result<usize> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "prior-map parameter r must be finite and nonnegative, got {r}"
        )));
    }
    let t = r.tanh() * r.tanh();
    if t == 0.0 {
        return Ok(0);
    }
    let c2 = r.cosh() * r.cosh();
    for n_cut in 0..=AHN_CUTOFF_BUDGET {
        let head = t.powi(n_cut as i32 + 1);
        // sum_{n > N} t^n / cosh^4  +  sum_{n > N} (n+1) t^n / cosh^2
        let s1 = head / ((1.0 - t) * c2 * c2);
        let s2 = head * ((n_cut as f64 + 2.0) * (1.0 - t) + t)
            / ((1.0 - t) * (1.0 - t) * c2);
        if s1 + s2 <= AHN_TAIL_TARGET {
            return Ok(n_cut);
        }
    }
    Err(Error::BudgetExceeded {
        what: format!("prior-map series cutoff for r = {r}"),
        needed: AHN_CUTOFF_BUDGET + 1,
        budget: AHN_CUTOFF_BUDGET,
    })
}

/// Amplitude w(q_A, l_B, n): the coefficient of |q_A>|l_B + n>_I in
/// A_n |q_A, l_B>.
fn ahn_weight(r: f64, q_a: usize, l_b: usize, n: usize) -> f64 {
    // (tanh^n / cosh^2) cosh^{q_A} sqrt(C(l_B + n, n)), with the binomial
    // product looped over the smaller index
    let (small, large) = if n < l_b { (n, l_b) } else { (l_b, n) };
    let mut binom = 1.0f64;
    for i in 1..=small {
        binom = binom * (large + i) as f64 / i as f64;
    }
    r.tanh().powi(n as i32) / r.cosh().powi(2) * r.cosh().powi(q_a as i32) * binom.sqrt()
}

/// The two Bell inputs the reproduction is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BellInput {
    /// (|00> + |11>)/sqrt(2): the trace-anomaly witness.
    PhiPlus,
    /// (|01> + |10>)/sqrt(2): the case where prior map and amplifier agree.
    PsiPlus,
}

impl BellInput {
    pub fn label(&self) -> &'static str {
        match self {
            BellInput::PhiPlus => "phi-plus",
            BellInput::PsiPlus => "psi-plus",
        }
    }

    /// (q_A, l_B, amplitude) components of the Bell vector.
    fn components(&self) -> [(usize, usize, f64); 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellInput::PhiPlus => [(0, 0, h), (1, 1, h)],
            BellInput::PsiPlus => [(0, 1, h), (1, 0, h)],
        }
    }

    fn state(&self) -> DensityMatrix {
        let sig = DimSignature::new(vec![2, 2]).unwrap();
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        for (q_a, l_b, a) in self.components() {
            amps[q_a * 2 + l_b] = C64::new(a, 0.0);
        }
        DensityMatrix::from_pure(sig, &amps).unwrap()
    }
}

/// Apply the prior map to a Bell input without materializing operators:
/// the output is sum_n |phi_n><phi_n| with each |phi_n> = A_n |psi> carrying
/// at most two nonzero amplitudes.
///
/// The result sits on signature (2, cutoff + 2) and records its trace
/// surplus/shortfall as a (possibly negative) trace deficit — the anomaly
/// this module exists to exhibit.
pub fn ahn_apply_state(r: f64, cutoff: usize, input: BellInput) -> Result<DensityMatrix> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "prior-map parameter r must be finite and nonnegative, got {r}"
        )));
    }
    let dim_i = cutoff + 2;
    let sig = DimSignature::new(vec![2, dim_i])?;
    let mut out = CMatrix::zeros(2 * dim_i, 2 * dim_i);
    for n in 0..=cutoff {
        let entries: Vec<(usize, f64)> = input
            .components()
            .iter()
            .map(|&(q_a, l_b, amp)| (q_a * dim_i + l_b + n, amp * ahn_weight(r, q_a, l_b, n)))
            .collect();
        for &(i, vi) in &entries {
            for &(j, vj) in &entries {
                out[(i, j)] += C64::new(vi * vj, 0.0);
            }
        }
    }
    let trace: f64 = (0..2 * dim_i).map(|i| out[(i, i)].re).sum();
    Ok(DensityMatrix::from_trusted(sig, out, 1.0 - trace))
}

/// Prior map on |Phi+> at the given cutoff.
pub fn ahn_apply(r: f64, cutoff: usize) -> Result<DensityMatrix> {
    ahn_apply_state(r, cutoff, BellInput::PhiPlus)
}

/// The prior map's operators materialized densely on the full two-qubit
/// input space — used to cross-check the structured application and to
/// exhibit the completeness failure directly.
#[derive(Clone, Debug)]
pub struct AhnKrausSet {
    r: f64,
    cutoff: usize,
    ops: Vec<FockOperator>,
}

impl AhnKrausSet {
    pub fn new(r: f64, cutoff: usize) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "prior-map parameter r must be finite and nonnegative, got {r}"
            )));
        }
        if cutoff > AHN_MATERIALIZE_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "materialized prior-map operator cutoff".into(),
                needed: cutoff,
                budget: AHN_MATERIALIZE_BUDGET,
            });
        }
        let dim_i = cutoff + 2;
        let ops = (0..=cutoff)
            .map(|n| {
                let mut m = CMatrix::zeros(2 * dim_i, 4);
                for q_a in 0..2 {
                    for l_b in 0..2 {
                        m[(q_a * dim_i + l_b + n, q_a * 2 + l_b)] =
                            C64::new(ahn_weight(r, q_a, l_b, n), 0.0);
                    }
                }
                FockOperator::new(m)
            })
            .collect();
        Ok(Self { r, cutoff, ops })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn ops(&self) -> &[FockOperator] {
        &self.ops
    }

    /// I - sum_n A_n^dag A_n. For this family the gap is diagonal with
    /// entries of *both* signs: the map is neither trace preserving nor
    /// trace nonincreasing.
    pub fn completeness_gap(&self) -> CMatrix {
        let mut gap = CMatrix::identity(4, 4);
        for op in &self.ops {
            gap -= op.adjoint().matrix() * op.matrix();
        }
        gap
    }

    /// sum_n A_n rho A_n^dag on an arbitrary two-qubit input.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.sig().dims() != [2, 2] {
            return Err(Error::DimensionMismatch {
                expected: "[2, 2]".into(),
                got: format!("{:?}", rho.sig().dims()),
            });
        }
        let dim_i = self.cutoff + 2;
        let mut out = CMatrix::zeros(2 * dim_i, 2 * dim_i);
        for op in &self.ops {
            out += op.matrix() * rho.matrix() * op.adjoint().matrix();
        }
        let trace: f64 = (0..2 * dim_i).map(|i| out[(i, i)].re).sum();
        Ok(DensityMatrix::from_trusted(
            DimSignature::new(vec![2, dim_i])?,
            out,
            1.0 - trace,
        ))
    }
}

/// One row of the side-by-side table.
#[derive(Clone, Debug, Serialize)]
pub struct AhnRow {
    /// Input state label.
    pub state: &'static str,
    pub r: f64,
    /// Prior-map series cutoff used for this row.
    pub cutoff: usize,
    /// Output trace of the prior map.
    pub prior_trace: f64,
    /// Closed-form prediction for that trace.
    pub formula_trace: f64,
    /// |prior_trace - 1|: the anomaly size.
    pub trace_deviation: f64,
    /// Trace deficit of the amplifier channel on the same input.
    pub amplifier_deficit: f64,
    /// Certified bound on that deficit.
    pub amplifier_tail_bound: f64,
    /// Max-norm difference between prior-map and amplifier outputs on the
    /// common (padded) space; near zero only for the agreement case.
    pub amplifier_distance: f64,
    /// Verdict: the prior map failed trace preservation on this row.
    pub non_trace_preserving: bool,
}

/// Zero-pad the second party of a (2, d) state up to dimension `dim_i`.
fn pad_second_party(rho: &DensityMatrix, dim_i: usize) -> Result<DensityMatrix> {
    let dims = rho.sig().dims();
    let id = FockOperator::identity(dims[0]);
    let emb = FockOperator::embedding(dims[1], dim_i);
    let pad = tensor_operators(&[&id, &emb])?;
    let data = pad.matrix() * rho.matrix() * pad.adjoint().matrix();
    Ok(DensityMatrix::from_trusted(
        DimSignature::new(vec![dims[0], dim_i])?,
        data,
        rho.trace_deficit(),
    ))
}

fn report_row(r: f64, input: BellInput) -> Result<AhnRow> {
    let cutoff = required_cutoff(r)?;
    let prior_out = ahn_apply_state(r, cutoff, input)?;
    let prior_trace = prior_out.trace();

    // amplifier channel on the same input, second party accelerated
    let accel = AccelerationParam::from_r(r)?;
    let spec = if r == 0.0 {
        ChannelSpec::new(vec![2, 2], vec![1], vec![accel], vec![0])?
    } else {
        ChannelSpec::certified(vec![2, 2], vec![1], vec![accel], 1e-10)?
    };
    let ks = kraus_multiparty(&spec)?;
    let amp_out = apply_channel(&ks, &input.state())?;

    let common = prior_out.sig().dims()[1].max(amp_out.sig().dims()[1]);
    let a = pad_second_party(&prior_out, common)?;
    let b = pad_second_party(&amp_out, common)?;
    let distance = (a.matrix() - b.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let formula_trace = match input {
        BellInput::PhiPlus => ahn_trace_formula(r),
        // both series cancel the cosh weights exactly for |Psi+>
        BellInput::PsiPlus => 1.0,
    };
    let trace_deviation = (prior_trace - 1.0).abs();
    Ok(AhnRow {
        state: input.label(),
        r,
        cutoff,
        prior_trace,
        formula_trace,
        trace_deviation,
        amplifier_deficit: amp_out.trace_deficit(),
        amplifier_tail_bound: ks.tail_bound(),
        amplifier_distance: distance,
        non_trace_preserving: trace_deviation > 1e-9,
    })
}

/// Side-by-side table: one |Phi+> row per grid point, plus a single |Psi+>
/// agreement row at tanh^2 r = 1/2.
pub fn side_by_side_report(r_grid: &[f64]) -> Result<Vec<AhnRow>> {
    let mut rows = Vec::with_capacity(r_grid.len() + 1);
    for &r in r_grid {
        rows.push(report_row(r, BellInput::PhiPlus)?);
    }
    rows.push(report_row(0.5f64.sqrt().atanh(), BellInput::PsiPlus)?);
    Ok(rows)
}
