//! Truncated Fock-space linear algebra: dimension signatures, density
//! matrices, rectangular Fock operators, tensor composition, partial trace,
//! subsystem permutation, and a Hermitian eigensolver.
//!
//! Composite indices are row-major over the signature order: the *leftmost*
//! subsystem varies slowest. That convention is fixed here and assumed by
//! every other module (partial transpose, Kraus construction, Choi blocks).
//!
//! Everything is dense complex double precision. Truncated sides stay below
//! a few thousand for all supported parameter ranges, so dense storage is
//! simpler and fast enough.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// Dense complex matrix used throughout.
pub type CMatrix = DMatrix<C64>;

/// Max tolerated Hermiticity defect (max |A - A^dag| entry), relative to
/// the matrix max-norm.
pub const TOL_HERM: f64 = 1e-10;
/// Most negative eigenvalue accepted from a nominally PSD matrix, relative
/// to the matrix max-norm.
pub const TOL_PSD: f64 = 1e-10;
/// Eigendecomposition reconstruction tolerance per unit of matrix side.
pub const TOL_EIG: f64 = 1e-12;
/// Agreement required between a density-matrix trace and its recorded
/// target trace (1 minus the recorded deficit).
pub const TOL_TRACE: f64 = 1e-9;

/// Ordered list of local dimensions, one per subsystem.
///
/// The order is fixed at construction; no operation silently permutes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimSignature {
    dims: Vec<usize>,
}

impl DimSignature {
    /// Build a signature; every local dimension must be >= 1.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("empty dimension signature".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(
                "every local dimension must be >= 1".into(),
            ));
        }
        Ok(Self { dims })
    }

    /// Signature of a single subsystem.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// Local dimensions in order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    /// True when the signature holds no subsystems (never constructible).
    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Total (product) dimension.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Concatenation with another signature (tensor composition order).
    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }

    /// Composite index of the given per-subsystem digits (row-major,
    /// leftmost slowest).
    pub fn ravel(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        let mut idx = 0;
        for (d, &dim) in digits.iter().zip(&self.dims) {
            debug_assert!(*d < dim);
            idx = idx * dim + d;
        }
        idx
    }

    /// Per-subsystem digits of a composite index (inverse of [`ravel`]).
    ///
    /// [`ravel`]: DimSignature::ravel
    pub fn unravel(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.total());
        let mut digits = vec![0; self.dims.len()];
        let mut rest = index;
        for i in (0..self.dims.len()).rev() {
            digits[i] = rest % self.dims[i];
            rest /= self.dims[i];
        }
        digits
    }
}

/// Density matrix with its subsystem signature and a recorded trace deficit.
///
/// Physical inputs carry deficit 0 (target trace 1). Truncated channel
/// outputs carry the probability weight lost to the cutoff, so their target
/// trace is `1 - trace_deficit`. The deficit may be negative for maps that
/// are not trace-nonincreasing (the amplifier counterexample produces one).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    sig: DimSignature,
    data: CMatrix,
    trace_deficit: f64,
}

impl DensityMatrix {
    /// Build a physical state with full validation: Hermiticity, unit trace,
    /// and positive semidefiniteness (one eigensolve).
    pub fn new(sig: DimSignature, data: CMatrix) -> Result<Self> {
        let dm = Self::with_deficit(sig, data, 0.0)?;
        let (eigs, _) = hermitian_eigensystem(&dm.data)?;
        let scale = dm.max_norm().max(1.0);
        if eigs[0] < -TOL_PSD * scale {
            return Err(Error::NotPositive { min_eig: eigs[0] });
        }
        Ok(dm)
    }

    /// Build a state with a recorded trace deficit, validating Hermiticity
    /// and the trace against the target `1 - deficit` (no eigensolve).
    pub fn with_deficit(sig: DimSignature, data: CMatrix, deficit: f64) -> Result<Self> {
        if data.nrows() != sig.total() || data.ncols() != sig.total() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", sig.total()),
                got: format!("{}x{}", data.nrows(), data.ncols()),
            });
        }
        let dm = Self {
            sig,
            data,
            trace_deficit: deficit,
        };
        let scale = dm.max_norm().max(1.0);
        let herm = dm.hermiticity_defect();
        if herm > TOL_HERM * scale {
            return Err(Error::NotHermitian {
                defect: herm,
                tol: TOL_HERM * scale,
            });
        }
        let target = 1.0 - deficit;
        if (dm.trace() - target).abs() > TOL_TRACE * scale.max(target.abs()) {
            return Err(Error::TraceMismatch {
                trace: dm.trace(),
                target,
            });
        }
        Ok(dm)
    }

    /// Normalized pure state |psi><psi| from amplitudes in the composite basis.
    pub fn from_pure(sig: DimSignature, amps: &[C64]) -> Result<Self> {
        if amps.len() != sig.total() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} amplitudes", sig.total()),
                got: format!("{}", amps.len()),
            });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let n = amps.len();
        let data = CMatrix::from_fn(n, n, |i, j| amps[i] * amps[j].conj() / norm2);
        Ok(Self {
            sig,
            data,
            trace_deficit: 0.0,
        })
    }

    /// Diagonal (incoherent) state from a probability vector.
    pub fn diagonal(sig: DimSignature, probs: &[f64]) -> Result<Self> {
        if probs.len() != sig.total() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} probabilities", sig.total()),
                got: format!("{}", probs.len()),
            });
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::NotPositive {
                min_eig: probs.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceMismatch {
                trace: total,
                target: 1.0,
            });
        }
        let n = probs.len();
        let mut data = CMatrix::zeros(n, n);
        for (i, &p) in probs.iter().enumerate() {
            data[(i, i)] = C64::new(p, 0.0);
        }
        Ok(Self {
            sig,
            data,
            trace_deficit: 0.0,
        })
    }

    /// Internal constructor for outputs of operations that preserve
    /// Hermiticity and positivity by construction (channel application,
    /// partial trace, tensor products). Hermiticity is still checked in
    /// debug builds.
    pub(crate) fn from_trusted(sig: DimSignature, data: CMatrix, trace_deficit: f64) -> Self {
        let dm = Self {
            sig,
            data,
            trace_deficit,
        };
        debug_assert!(
            dm.hermiticity_defect() <= TOL_HERM * dm.max_norm().max(1.0) * 10.0,
            "trusted constructor received a non-Hermitian matrix"
        );
        dm
    }

    /// Subsystem signature.
    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    /// Dense matrix data.
    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    /// Real part of the trace (imaginary part is zero for Hermitian data).
    pub fn trace(&self) -> f64 {
        (0..self.data.nrows()).map(|i| self.data[(i, i)].re).sum()
    }

    /// Probability weight recorded as lost to truncation (0 for inputs).
    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    /// State rescaled to unit trace with the deficit cleared.
    ///
    /// Used before resource predicates so truncation loss does not
    /// masquerade as resource generation.
    pub fn renormalized(&self) -> Self {
        let tr = self.trace();
        Self {
            sig: self.sig.clone(),
            data: self.data.map(|z| z / tr),
            trace_deficit: 0.0,
        }
    }

    /// Max |entry| of the matrix.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max |A - A^dag| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.data.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude (coherence witness).
    pub fn max_offdiag(&self) -> f64 {
        let n = self.data.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.data[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Full validation against the type invariants (Hermiticity, PSD,
    /// trace vs recorded target). Costs one eigensolve.
    pub fn validate(&self) -> Result<()> {
        let scale = self.max_norm().max(1.0);
        let herm = self.hermiticity_defect();
        if herm > TOL_HERM * scale {
            return Err(Error::NotHermitian {
                defect: herm,
                tol: TOL_HERM * scale,
            });
        }
        let target = 1.0 - self.trace_deficit;
        if (self.trace() - target).abs() > TOL_TRACE * scale.max(target.abs()) {
            return Err(Error::TraceMismatch {
                trace: self.trace(),
                target,
            });
        }
        let (eigs, _) = hermitian_eigensystem(&self.data)?;
        if eigs[0] < -TOL_PSD * scale {
            return Err(Error::NotPositive { min_eig: eigs[0] });
        }
        Ok(())
    }
}

/// Rectangular operator between truncated Fock spaces.
#[derive(Clone, Debug)]
pub struct FockOperator {
    dim_in: usize,
    dim_out: usize,
    data: CMatrix,
}

impl FockOperator {
    /// Wrap a dense matrix; dimensions are read from its shape.
    pub fn new(data: CMatrix) -> Self {
        Self {
            dim_in: data.ncols(),
            dim_out: data.nrows(),
            data,
        }
    }

    /// Identity operator on `dim` levels.
    pub fn identity(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim))
    }

    /// Identity embedding of `dim_in` levels into `dim_out >= dim_in` levels
    /// (zero-padding isometry).
    pub fn embedding(dim_in: usize, dim_out: usize) -> Self {
        let mut data = CMatrix::zeros(dim_out, dim_in);
        for i in 0..dim_in.min(dim_out) {
            data[(i, i)] = C64::new(1.0, 0.0);
        }
        Self::new(data)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.data.adjoint())
    }
}

/// Creation operator b^dag on `dim_in` levels. The output has one extra
/// level so the top amplitude is never lost: entries sqrt(n+1) at (n+1, n).
pub fn creation_operator(dim_in: usize) -> FockOperator {
    let mut data = CMatrix::zeros(dim_in + 1, dim_in);
    for n in 0..dim_in {
        data[(n + 1, n)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    FockOperator::new(data)
}

/// Number operator diag(0, 1, ..., dim-1).
pub fn number_operator(dim: usize) -> FockOperator {
    let mut data = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        data[(n, n)] = C64::new(n as f64, 0.0);
    }
    FockOperator::new(data)
}

/// Kronecker product of operators, in the given order.
pub fn tensor_operators(factors: &[&FockOperator]) -> Result<FockOperator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor of zero factors".into()))?;
    let mut acc = first.data.clone();
    for f in rest {
        acc = acc.kronecker(&f.data);
    }
    Ok(FockOperator::new(acc))
}

/// Kronecker product of density matrices; the signature is the
/// concatenation of the factor signatures.
pub fn tensor_states(factors: &[&DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor of zero factors".into()))?;
    let mut data = first.data.clone();
    let mut sig = first.sig.clone();
    for f in rest {
        data = data.kronecker(&f.data);
        sig = sig.concat(&f.sig);
    }
    let trace: f64 = (0..data.nrows()).map(|i| data[(i, i)].re).sum();
    Ok(DensityMatrix::from_trusted(sig, data, 1.0 - trace))
}

/// Partial trace keeping the listed subsystems (any order accepted; the
/// output keeps them in their original relative order).
pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n_sub = state.sig.len();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("empty keep set".into()));
    }
    if keep.iter().any(|&k| k >= n_sub) {
        return Err(Error::InvalidArgument(format!(
            "subsystem index out of range (signature has {n_sub} subsystems)"
        )));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();

    let traced: Vec<usize> = (0..n_sub).filter(|i| !keep_sorted.contains(i)).collect();
    if traced.is_empty() {
        return Ok(state.clone());
    }

    let dims = state.sig.dims();
    // Stride of each subsystem in the composite index.
    let mut strides = vec![1usize; n_sub];
    for i in (0..n_sub.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    // Composite-index offsets contributed by kept and traced digit patterns.
    let index_offsets = |subs: &[usize]| -> Vec<usize> {
        let count: usize = subs.iter().map(|&s| dims[s]).product();
        let mut offsets = vec![0usize; count];
        for (flat, off) in offsets.iter_mut().enumerate() {
            let mut rest = flat;
            for &s in subs.iter().rev() {
                *off += (rest % dims[s]) * strides[s];
                rest /= dims[s];
            }
        }
        offsets
    };
    let kept_off = index_offsets(&keep_sorted);
    let traced_off = index_offsets(&traced);

    let d_keep = kept_off.len();
    let mut out = CMatrix::zeros(d_keep, d_keep);
    for (i, &oi) in kept_off.iter().enumerate() {
        for (j, &oj) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &ot in &traced_off {
                acc += state.data[(oi + ot, oj + ot)];
            }
            out[(i, j)] = acc;
        }
    }
    let out_sig = DimSignature::new(keep_sorted.iter().map(|&s| dims[s]).collect())?;
    Ok(DensityMatrix::from_trusted(
        out_sig,
        out,
        state.trace_deficit,
    ))
}

/// Reorder subsystems: `new_order[i]` is the original position of the
/// subsystem placed at slot `i` of the output.
pub fn permute_subsystems(state: &DensityMatrix, new_order: &[usize]) -> Result<DensityMatrix> {
    let n_sub = state.sig.len();
    let mut seen = vec![false; n_sub];
    if new_order.len() != n_sub || {
        for &p in new_order {
            if p >= n_sub || seen[p] {
                seen = vec![];
                break;
            }
            seen[p] = true;
        }
        seen.is_empty() || seen.iter().any(|&s| !s)
    } {
        return Err(Error::InvalidArgument(format!(
            "new_order must be a permutation of 0..{n_sub}"
        )));
    }
    let dims = state.sig.dims();
    let new_sig = DimSignature::new(new_order.iter().map(|&p| dims[p]).collect())?;

    // map[old composite index] -> new composite index
    let total = state.sig.total();
    let mut map = vec![0usize; total];
    for (old, m) in map.iter_mut().enumerate() {
        let digits = state.sig.unravel(old);
        let new_digits: Vec<usize> = new_order.iter().map(|&p| digits[p]).collect();
        *m = new_sig.ravel(&new_digits);
    }
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = state.data[(i, j)];
        }
    }
    Ok(DensityMatrix::from_trusted(
        new_sig,
        out,
        state.trace_deficit,
    ))
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching eigenvector columns.
///
/// The input is validated against the Hermiticity tolerance and symmetrized
/// before the solve, so roundoff asymmetry cannot leak into the spectrum.
pub fn hermitian_eigensystem(mat: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", mat.nrows(), mat.ncols()),
        });
    }
    let n = mat.nrows();
    let scale = mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    if defect > TOL_HERM * scale {
        return Err(Error::NotHermitian {
            defect,
            tol: TOL_HERM * scale,
        });
    }
    let herm = CMatrix::from_fn(n, n, |i, j| (mat[(i, j)] + mat[(j, i)].conj()) * 0.5);
    let se = herm.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok((eigenvalues, eigenvectors))
}
