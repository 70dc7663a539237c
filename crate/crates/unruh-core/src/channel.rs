//! The noninertial bosonic-amplifier channel as an explicit Kraus family on
//! truncated Fock spaces.
//!
//! A party accelerating uniformly with Rindler frequency Omega sees its mode
//! through a two-mode squeezing of strength r, cosh r = (1 - e^(-2 pi
//! Omega))^(-1/2). Tracing the hidden partner mode leaves the amplifier
//! channel with Kraus operators
//!
//! ```text
//! A_k = sum_n sqrt(C(n+k, k)) tanh^k(r) / cosh^(n+1)(r) |n+k><n| ,   k = 0, 1, ...
//! ```
//!
//! The infinite family is truncated at index K; the discarded completeness
//! weight for Fock input |l> is the binomial-series tail computed by
//! [`truncation_tail`], so every truncation is certified rather than ad hoc.
//! Multipartite channels act as the identity on inertial parties tensored
//! with one single-mode family per accelerated party.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    hermitian_eigensystem, permute_subsystems, tensor_operators, C64, CMatrix, DensityMatrix,
    DimSignature, FockOperator, TOL_PSD,
};
use crate::report::PropertyReport;
use crate::sample;

/// Largest accepted squeezing parameter. tanh^2(2.5) ~ 0.974 already needs
/// cutoffs near 10^3 for the default tail target; beyond that dense sizes
/// explode.
pub const MAX_R: f64 = 2.5;
/// Default certified-tail target for cutoff selection.
pub const DEFAULT_EPSILON: f64 = 1e-10;
/// Accepted range for the certified-tail target.
pub const EPSILON_RANGE: (f64, f64) = (1e-14, 1e-6);
/// Default limit on the number of multiparty Kraus operators.
pub const DEFAULT_OP_BUDGET: usize = 4096;
/// Largest Choi-matrix side built before the check is skipped with a notice.
pub const CHOI_SIDE_BUDGET: usize = 4096;
/// Largest per-party excitation cutoff considered by [`choose_cutoff`].
pub const CUTOFF_BUDGET: usize = 4096;

/// Squeezing strength r, optionally tagged with the Rindler frequency Omega
/// it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccelerationParam {
    r: f64,
    omega: Option<f64>,
}

impl AccelerationParam {
    /// From the squeezing parameter directly.
    pub fn from_r(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "acceleration parameter r must be finite and nonnegative, got {r}"
            )));
        }
        if r > MAX_R {
            return Err(Error::InvalidArgument(format!(
                "r = {r} exceeds the supported maximum {MAX_R}"
            )));
        }
        Ok(Self { r, omega: None })
    }

    /// From the dimensionless Rindler frequency via
    /// cosh r = (1 - e^(-2 pi Omega))^(-1/2).
    pub fn from_omega(omega: f64) -> Result<Self> {
        let r = r_from_omega(omega)?;
        if r > MAX_R {
            return Err(Error::InvalidArgument(format!(
                "omega = {omega} maps to r = {r:.4}, exceeding the supported maximum {MAX_R}"
            )));
        }
        Ok(Self { r, omega: Some(omega) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }
}

/// Squeezing parameter for a given Rindler frequency:
/// r = arccosh((1 - e^(-2 pi Omega))^(-1/2)), strictly decreasing in Omega.
///
/// Evaluated as r = ln(1 + sqrt(x)) - ln(1 - x)/2 with x = e^(-2 pi Omega),
/// which is stable at both ends of the range.
pub fn r_from_omega(omega: f64) -> Result<f64> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::DivergentAcceleration { omega });
    }
    let x = (-std::f64::consts::TAU * omega).exp();
    Ok(x.sqrt().ln_1p() - 0.5 * (-x).ln_1p())
}

/// Probability weight discarded by truncating the Kraus index at `k_cutoff`
/// for Fock input |level>:
///
/// ```text
/// tail(l, K) = 1 - sum_{k=0}^{K} C(k+l, l) tanh^(2k)(r) / cosh^(2(l+1))(r)
/// ```
///
/// Computed as the remainder series from k = K+1 (the same binomial series;
/// the full sum is exactly 1), which keeps full relative precision even for
/// tails far below machine epsilon of 1.
pub fn truncation_tail(r: f64, level: usize, k_cutoff: usize) -> f64 {
    debug_assert!(r >= 0.0);
    if r == 0.0 {
        return 0.0;
    }
    let t = r.tanh() * r.tanh();
    let ch2 = r.cosh() * r.cosh();
    // term(k) = C(k + level, level) t^k / ch2^(level + 1)
    let mut term = ch2.powi(-(level as i32 + 1));
    for k in 0..=k_cutoff {
        term *= t * (k + 1 + level) as f64 / (k + 1) as f64;
    }
    let mut sum = 0.0;
    let mut k = k_cutoff + 1;
    while term > sum * 1e-18 + 1e-300 {
        sum += term;
        k += 1;
        term *= t * (k + level) as f64 / k as f64;
    }
    sum
}

/// Smallest cutoff K whose worst tail over input levels 0..d stays at or
/// below `epsilon`.
pub fn choose_cutoff(r: f64, d: usize, epsilon: f64) -> Result<usize> {
    for k in 0..=CUTOFF_BUDGET {
        let worst = (0..d)
            .map(|l| truncation_tail(r, l, k))
            .fold(0.0, f64::max);
        if worst <= epsilon {
            return Ok(k);
        }
    }
    Err(Error::BudgetExceeded {
        what: format!("excitation cutoff for r = {r}, tail target {epsilon:.1e}"),
        needed: CUTOFF_BUDGET + 1,
        budget: CUTOFF_BUDGET,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

/// Single-mode Kraus family truncated at index `k_max`: K+1 operators of
/// shape (d_in + k_max) x d_in, operator k carrying entries
/// sqrt(C(n+k, k)) tanh^k(r) / cosh^(n+1)(r) at (n+k, n).
pub fn kraus_single(r: f64, d_in: usize, k_max: usize) -> Vec<FockOperator> {
    debug_assert!(d_in >= 1);
    let t = r.tanh();
    let ch = r.cosh();
    let d_out = d_in + k_max;
    (0..=k_max)
        .map(|k| {
            let mut m = CMatrix::zeros(d_out, d_in);
            for n in 0..d_in {
                let amp = binomial(n + k, k).sqrt() * t.powi(k as i32) / ch.powi(n as i32 + 1);
                m[(n + k, n)] = C64::new(amp, 0.0);
            }
            FockOperator::new(m)
        })
        .collect()
}

/// N parties with local dimensions `local_dims`, of which the parties listed
/// in `accelerated` (strictly increasing) undergo noninertial motion with
/// per-party squeezing `accel[m]` and excitation cutoff `cutoffs[m]`.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    local_dims: Vec<usize>,
    accelerated: Vec<usize>,
    accel: Vec<AccelerationParam>,
    cutoffs: Vec<usize>,
    op_budget: usize,
}

impl ChannelSpec {
    /// Spec with explicit cutoffs.
    pub fn new(
        local_dims: Vec<usize>,
        accelerated: Vec<usize>,
        accel: Vec<AccelerationParam>,
        cutoffs: Vec<usize>,
    ) -> Result<Self> {
        let n = local_dims.len();
        let m = accelerated.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no parties".into()));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= M <= N accelerated parties, got M = {m}, N = {n}"
            )));
        }
        if accel.len() != m || cutoffs.len() != m {
            return Err(Error::InvalidArgument(
                "accel and cutoffs must have one entry per accelerated party".into(),
            ));
        }
        if local_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("local dimensions must be >= 1".into()));
        }
        if accelerated.windows(2).any(|w| w[0] >= w[1]) || accelerated.iter().any(|&p| p >= n) {
            return Err(Error::InvalidArgument(
                "accelerated party indices must be strictly increasing and in range".into(),
            ));
        }
        if accelerated.iter().any(|&p| local_dims[p] < 2) {
            return Err(Error::InvalidArgument(
                "accelerated parties need local dimension >= 2 (Fock levels 0..d-1)".into(),
            ));
        }
        Ok(Self {
            local_dims,
            accelerated,
            accel,
            cutoffs,
            op_budget: DEFAULT_OP_BUDGET,
        })
    }

    /// Spec with cutoffs certified against a tail target: each K_m is the
    /// smallest cutoff whose worst tail over that party's input levels is at
    /// most `epsilon`.
    pub fn certified(
        local_dims: Vec<usize>,
        accelerated: Vec<usize>,
        accel: Vec<AccelerationParam>,
        epsilon: f64,
    ) -> Result<Self> {
        if !(epsilon >= EPSILON_RANGE.0 && epsilon <= EPSILON_RANGE.1) {
            return Err(Error::InvalidArgument(format!(
                "tail target must lie in [{:.0e}, {:.0e}], got {epsilon:.3e}",
                EPSILON_RANGE.0, EPSILON_RANGE.1
            )));
        }
        let cutoffs = accelerated
            .iter()
            .zip(&accel)
            .map(|(&p, a)| choose_cutoff(a.r(), local_dims[p], epsilon))
            .collect::<Result<Vec<_>>>()?;
        Self::new(local_dims, accelerated, accel, cutoffs)
    }

    /// Replace the operator-count budget (default [`DEFAULT_OP_BUDGET`]).
    pub fn with_op_budget(mut self, budget: usize) -> Self {
        self.op_budget = budget;
        self
    }

    pub fn n_parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn accelerated(&self) -> &[usize] {
        &self.accelerated
    }

    pub fn accel(&self) -> &[AccelerationParam] {
        &self.accel
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    /// Number of multi-index Kraus operators, prod_m (K_m + 1).
    pub fn op_count(&self) -> usize {
        self.cutoffs.iter().map(|&k| k + 1).product()
    }

    /// Input signature in the caller's party order.
    pub fn input_sig(&self) -> DimSignature {
        DimSignature::new(self.local_dims.clone()).expect("validated at construction")
    }

    /// Output signature in the caller's party order: accelerated party m is
    /// enlarged from d to d + K_m.
    pub fn output_sig(&self) -> DimSignature {
        let mut dims = self.local_dims.clone();
        for (m, &p) in self.accelerated.iter().enumerate() {
            dims[p] += self.cutoffs[m];
        }
        DimSignature::new(dims).expect("validated at construction")
    }

    /// Party order used internally: inertial parties first (original order),
    /// accelerated parties last. Entry i is the caller-order index of the
    /// party placed at canonical slot i.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_parties())
            .filter(|p| !self.accelerated.contains(p))
            .collect();
        order.extend_from_slice(&self.accelerated);
        order
    }

    /// Worst certified tail for accelerated party m over its input levels.
    pub fn party_tail_bound(&self, m: usize) -> f64 {
        let d = self.local_dims[self.accelerated[m]];
        (0..d)
            .map(|l| truncation_tail(self.accel[m].r(), l, self.cutoffs[m]))
            .fold(0.0, f64::max)
    }

    /// Certified bound on the trace deficit for any input state:
    /// 1 - prod_m (1 - worst per-party tail).
    pub fn tail_bound(&self) -> f64 {
        let survive: f64 = (0..self.accelerated.len())
            .map(|m| 1.0 - self.party_tail_bound(m))
            .product();
        1.0 - survive
    }
}

/// Truncated Kraus family of one multipartite channel instance, with its
/// completeness bookkeeping and the party permutation used internally.
#[derive(Clone, Debug)]
pub struct KrausSet {
    spec: ChannelSpec,
    ops: Vec<FockOperator>,
    multi_indices: Vec<Vec<usize>>,
    /// Per operator, per input column: the nonzero (row, value) entries.
    /// The amplifier operators are one-nonzero-per-column, so applications
    /// run in O(nnz * side) instead of dense cubic time.
    cols: Vec<Vec<Vec<(usize, C64)>>>,
    /// I - sum_k A_k^dag A_k on the canonical input space.
    gap: CMatrix,
    completeness_defect: f64,
    in_sig_user: DimSignature,
    out_sig_user: DimSignature,
    in_sig_canon: DimSignature,
    out_sig_canon: DimSignature,
    /// canonical slot -> caller party index
    to_canonical: Vec<usize>,
    /// caller party index -> canonical slot
    from_canonical: Vec<usize>,
    identity_perm: bool,
}

fn dense_cols(m: &CMatrix) -> Vec<Vec<(usize, C64)>> {
    (0..m.ncols())
        .map(|c| {
            (0..m.nrows())
                .filter(|&r| m[(r, c)] != C64::new(0.0, 0.0))
                .map(|r| (r, m[(r, c)]))
                .collect()
        })
        .collect()
}

/// Enumerate the multiparty Kraus family of `spec`: all multi-indices
/// (k_1, ..., k_M), k_m in [0, K_m], in lexicographic order, each operator
/// being the identity on inertial parties tensored with the per-party
/// single-mode factors.
pub fn kraus_multiparty(spec: &ChannelSpec) -> Result<KrausSet> {
    let count = spec.op_count();
    if count > spec.op_budget {
        return Err(Error::BudgetExceeded {
            what: "multi-index Kraus operator count".into(),
            needed: count,
            budget: spec.op_budget,
        });
    }

    let order = spec.canonical_order();
    let n = spec.n_parties();
    let m_acc = spec.accelerated().len();
    let mut from_canonical = vec![0usize; n];
    for (slot, &party) in order.iter().enumerate() {
        from_canonical[party] = slot;
    }
    let identity_perm = order.iter().enumerate().all(|(i, &p)| i == p);

    let in_sig_user = spec.input_sig();
    let out_sig_user = spec.output_sig();
    let in_sig_canon = DimSignature::new(order.iter().map(|&p| in_sig_user.dims()[p]).collect())?;
    let out_sig_canon = DimSignature::new(order.iter().map(|&p| out_sig_user.dims()[p]).collect())?;

    let singles: Vec<Vec<FockOperator>> = spec
        .accelerated()
        .iter()
        .zip(spec.accel())
        .zip(spec.cutoffs())
        .map(|((&p, a), &k)| kraus_single(a.r(), spec.local_dims()[p], k))
        .collect();

    let inertial_dim: usize = order[..n - m_acc]
        .iter()
        .map(|&p| spec.local_dims()[p])
        .product();
    let identity = FockOperator::identity(inertial_dim);

    let radices: Vec<usize> = spec.cutoffs().iter().map(|&k| k + 1).collect();
    let mut ops = Vec::with_capacity(count);
    let mut multi_indices = Vec::with_capacity(count);
    for flat in 0..count {
        let mut digits = vec![0usize; m_acc];
        let mut rest = flat;
        for i in (0..m_acc).rev() {
            digits[i] = rest % radices[i];
            rest /= radices[i];
        }
        let mut factors: Vec<&FockOperator> = Vec::with_capacity(m_acc + 1);
        if inertial_dim > 0 && n > m_acc {
            factors.push(&identity);
        }
        for (m, &k) in digits.iter().enumerate() {
            factors.push(&singles[m][k]);
        }
        ops.push(tensor_operators(&factors)?);
        multi_indices.push(digits);
    }

    let d_in = in_sig_canon.total();
    let mut gap = CMatrix::identity(d_in, d_in);
    for op in &ops {
        gap -= op.adjoint().matrix() * op.matrix();
    }
    let completeness_defect = gap.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cols = ops.iter().map(|op| dense_cols(op.matrix())).collect();

    Ok(KrausSet {
        spec: spec.clone(),
        ops,
        multi_indices,
        cols,
        gap,
        completeness_defect,
        in_sig_user,
        out_sig_user,
        in_sig_canon,
        out_sig_canon,
        to_canonical: order,
        from_canonical,
        identity_perm,
    })
}

impl KrausSet {
    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn ops(&self) -> &[FockOperator] {
        &self.ops
    }

    /// Multi-index (k_1, ..., k_M) of each operator, in enumeration order.
    pub fn multi_indices(&self) -> &[Vec<usize>] {
        &self.multi_indices
    }

    /// Max-norm of I - sum_k A_k^dag A_k, recorded at construction.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    /// Input signature in the caller's party order.
    pub fn input_sig(&self) -> &DimSignature {
        &self.in_sig_user
    }

    /// Output signature in the caller's party order.
    pub fn output_sig(&self) -> &DimSignature {
        &self.out_sig_user
    }

    /// Certified trace-deficit bound inherited from the spec.
    pub fn tail_bound(&self) -> f64 {
        self.spec.tail_bound()
    }

    /// Linear action sum_k A_k M A_k^dag on a canonical-order matrix
    /// (not necessarily a state).
    fn apply_matrix_canonical(&self, m: &CMatrix) -> CMatrix {
        let d_out = self.out_sig_canon.total();
        let d_in = self.in_sig_canon.total();
        let mut out = CMatrix::zeros(d_out, d_out);
        let mut b = CMatrix::zeros(d_out, d_in);
        for cols in &self.cols {
            b.fill(C64::new(0.0, 0.0));
            // B = A * M
            for (c, entries) in cols.iter().enumerate() {
                for &(r, v) in entries {
                    for j in 0..d_in {
                        b[(r, j)] += v * m[(c, j)];
                    }
                }
            }
            // out += B * A^dag
            for (c, entries) in cols.iter().enumerate() {
                for &(r, v) in entries {
                    let vc = v.conj();
                    for i in 0..d_out {
                        out[(i, r)] += b[(i, c)] * vc;
                    }
                }
            }
        }
        out
    }

    /// Expectation of the completeness gap, <I - sum A^dag A>_rho, for a
    /// canonical-order matrix.
    fn gap_expectation(&self, m: &CMatrix) -> f64 {
        let d = m.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += m[(i, j)] * self.gap[(j, i)];
            }
        }
        acc.re
    }

    /// Test hook: drop one operator from the family, recomputing the
    /// completeness bookkeeping honestly. Used for fault injection.
    pub fn with_operator_removed(&self, index: usize) -> Result<KrausSet> {
        if index >= self.ops.len() {
            return Err(Error::InvalidArgument(format!(
                "operator index {index} out of range ({} operators)",
                self.ops.len()
            )));
        }
        let mut broken = self.clone();
        broken.ops.remove(index);
        broken.multi_indices.remove(index);
        broken.cols.remove(index);
        let d_in = broken.in_sig_canon.total();
        let mut gap = CMatrix::identity(d_in, d_in);
        for op in &broken.ops {
            gap -= op.adjoint().matrix() * op.matrix();
        }
        broken.completeness_defect = gap.iter().map(|z| z.norm()).fold(0.0, f64::max);
        broken.gap = gap;
        Ok(broken)
    }

    /// Test hook: compose every operator with a unitary on the output space
    /// (completeness is untouched; freeness properties generally break).
    /// Used for fault injection and contrapositive checks.
    pub fn with_output_rotation(&self, u: &CMatrix) -> Result<KrausSet> {
        let d_out = self.out_sig_canon.total();
        if u.nrows() != d_out || u.ncols() != d_out {
            return Err(Error::DimensionMismatch {
                expected: format!("{d_out}x{d_out} unitary"),
                got: format!("{}x{}", u.nrows(), u.ncols()),
            });
        }
        let unitarity = (u.adjoint() * u - CMatrix::identity(d_out, d_out))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if unitarity > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "rotation is not unitary (defect {unitarity:.3e})"
            )));
        }
        let mut rotated = self.clone();
        rotated.ops = self
            .ops
            .iter()
            .map(|op| FockOperator::new(u * op.matrix()))
            .collect();
        rotated.cols = rotated.ops.iter().map(|op| dense_cols(op.matrix())).collect();
        Ok(rotated)
    }
}

/// Apply the channel: E(rho) = sum_k A_k rho A_k^dag.
///
/// The output records the exact trace deficit <I - sum A^dag A>_rho on top
/// of any deficit the input already carried.
pub fn apply_channel(ks: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.sig() != ks.input_sig() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", ks.input_sig().dims()),
            got: format!("{:?}", rho.sig().dims()),
        });
    }
    let rho_c;
    let rho_canonical = if ks.identity_perm {
        rho
    } else {
        rho_c = permute_subsystems(rho, &ks.to_canonical)?;
        &rho_c
    };
    let out_data = ks.apply_matrix_canonical(rho_canonical.matrix());
    let deficit = rho.trace_deficit() + ks.gap_expectation(rho_canonical.matrix());
    let out_c = DensityMatrix::from_trusted(ks.out_sig_canon.clone(), out_data, deficit);
    if ks.identity_perm {
        Ok(out_c)
    } else {
        permute_subsystems(&out_c, &ks.from_canonical)
    }
}

/// Choi matrix sum_{ij} |i><j| (x) E(|i><j|) over the caller-order input
/// basis; positive semidefinite iff the truncated family is completely
/// positive (it is, being an explicit Kraus family).
pub fn choi_matrix(ks: &KrausSet) -> Result<DensityMatrix> {
    let d_in = ks.in_sig_user.total();
    let d_out = ks.out_sig_user.total();
    let side = d_in * d_out;
    if side > CHOI_SIDE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "Choi matrix side".into(),
            needed: side,
            budget: CHOI_SIDE_BUDGET,
        });
    }

    // caller-order basis index -> canonical-order basis index
    let map_in: Vec<usize> = (0..d_in)
        .map(|i| {
            let digits = ks.in_sig_user.unravel(i);
            let canon: Vec<usize> = ks.to_canonical.iter().map(|&p| digits[p]).collect();
            ks.in_sig_canon.ravel(&canon)
        })
        .collect();
    let map_out: Vec<usize> = (0..d_out)
        .map(|a| {
            let digits = ks.out_sig_user.unravel(a);
            let canon: Vec<usize> = ks.to_canonical.iter().map(|&p| digits[p]).collect();
            ks.out_sig_canon.ravel(&canon)
        })
        .collect();

    let mut choi = CMatrix::zeros(side, side);
    for i in 0..d_in {
        for j in 0..d_in {
            // E(|i><j|) in canonical coordinates, exploiting column sparsity
            let (ci, cj) = (map_in[i], map_in[j]);
            let mut block = CMatrix::zeros(d_out, d_out);
            for cols in &ks.cols {
                for &(r1, v1) in &cols[ci] {
                    for &(r2, v2) in &cols[cj] {
                        block[(r1, r2)] += v1 * v2.conj();
                    }
                }
            }
            for a in 0..d_out {
                for b in 0..d_out {
                    choi[(i * d_out + a, j * d_out + b)] = block[(map_out[a], map_out[b])];
                }
            }
        }
    }
    // The Choi matrix has trace d_in - (discarded weight); record it as a
    // deficit against the nominal trace d_in by scaling into state form.
    let sig = DimSignature::new(vec![d_in, d_out])?;
    let trace: f64 = (0..side).map(|i| choi[(i, i)].re).sum();
    let scaled = choi.map(|z| z / C64::new(d_in as f64, 0.0));
    Ok(DensityMatrix::from_trusted(
        sig,
        scaled,
        1.0 - trace / d_in as f64,
    ))
}

/// Four-part CPTP verification: linearity, trace deficit against the
/// certified tail bound, output positivity, Choi positivity.
#[derive(Clone, Debug, Serialize)]
pub struct CptpReport {
    pub linearity: PropertyReport,
    pub trace_bound: PropertyReport,
    pub positivity: PropertyReport,
    pub choi: PropertyReport,
}

impl CptpReport {
    /// All four checks pass (a skipped Choi check passes with its notice).
    pub fn pass(&self) -> bool {
        self.linearity.pass && self.trace_bound.pass && self.positivity.pass && self.choi.pass
    }

    pub fn reports(&self) -> [&PropertyReport; 4] {
        [
            &self.linearity,
            &self.trace_bound,
            &self.positivity,
            &self.choi,
        ]
    }
}

/// Verify the CPTP properties on `samples` random mixed states.
///
/// (a) linearity of the action on convex mixtures, (b) trace deficit of
/// every output at or below the certified tail bound, (c) output minimum
/// eigenvalue, (d) Choi minimum eigenvalue (skipped with a notice when the
/// Choi side exceeds the budget).
pub fn verify_cptp(ks: &KrausSet, samples: usize, seed: u64) -> Result<CptpReport> {
    let mut rng = sample::rng(seed);
    let sig = ks.input_sig().clone();

    let mut worst_lin = 0.0f64;
    let mut worst_trace_excess = 0.0f64;
    let mut worst_deficit = 0.0f64;
    let mut worst_neg = 0.0f64;
    let bound = ks.tail_bound();
    for _ in 0..samples {
        let rho1 = sample::wishart_mixed(&sig, &mut rng);
        let rho2 = sample::wishart_mixed(&sig, &mut rng);
        let p: f64 = rand::Rng::gen(&mut rng);

        let mixed_data = rho1.matrix().map(|z| z * p) + rho2.matrix().map(|z| z * (1.0 - p));
        let mixed = DensityMatrix::from_trusted(sig.clone(), mixed_data, 0.0);
        let out_mix = apply_channel(ks, &mixed)?;
        let out1 = apply_channel(ks, &rho1)?;
        let out2 = apply_channel(ks, &rho2)?;
        let lin = (out_mix.matrix()
            - (out1.matrix().map(|z| z * p) + out2.matrix().map(|z| z * (1.0 - p))))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
        worst_lin = worst_lin.max(lin);

        for out in [&out_mix, &out1, &out2] {
            let deficit = out.trace_deficit();
            worst_deficit = worst_deficit.max(deficit);
            worst_trace_excess = worst_trace_excess.max(deficit - bound);
            let (eigs, _) = hermitian_eigensystem(out.matrix())?;
            worst_neg = worst_neg.max(-eigs[0]);
        }
    }

    let choi = match choi_matrix(ks) {
        Ok(c) => {
            let (eigs, _) = hermitian_eigensystem(c.matrix())?;
            PropertyReport::new("cptp: Choi min eigenvalue", 1, (-eigs[0]).max(0.0), TOL_PSD, seed)
        }
        Err(Error::BudgetExceeded { needed, budget, .. }) => PropertyReport::skipped(
            "cptp: Choi min eigenvalue",
            seed,
            format!("skipped: Choi side {needed} exceeds budget {budget}"),
        ),
        Err(e) => return Err(e),
    };

    Ok(CptpReport {
        linearity: PropertyReport::new("cptp: linearity", samples, worst_lin, 1e-12, seed),
        trace_bound: PropertyReport::new(
            "cptp: trace deficit within certified tail",
            samples,
            worst_trace_excess.max(0.0),
            1e-12,
            seed,
        )
        .with_note(format!(
            "worst deficit {worst_deficit:.3e} vs bound {bound:.3e}"
        )),
        positivity: PropertyReport::new(
            "cptp: output positivity",
            samples,
            worst_neg.max(0.0),
            TOL_PSD,
            seed,
        ),
        choi,
    })
}
