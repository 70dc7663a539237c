//! Named preset states used by the sweep CLI and the test suites.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, DimSignature};

fn pure(sig: DimSignature, amps: &[(usize, f64)]) -> DensityMatrix {
    let mut v = vec![C64::new(0.0, 0.0); sig.total()];
    for &(idx, a) in amps {
        v[idx] = C64::new(a, 0.0);
    }
    DensityMatrix::from_pure(sig, &v).expect("preset amplitudes are valid")
}

/// Bell state (|00> + |11>)/sqrt(2) on signature (2, 2).
pub fn bell_phi_plus() -> DensityMatrix {
    let sig = DimSignature::new(vec![2, 2]).unwrap();
    pure(sig, &[(0, 1.0), (3, 1.0)])
}

/// Bell state (|01> + |10>)/sqrt(2) on signature (2, 2).
pub fn bell_psi_plus() -> DensityMatrix {
    let sig = DimSignature::new(vec![2, 2]).unwrap();
    pure(sig, &[(1, 1.0), (2, 1.0)])
}

/// GHZ state (|000> + |111>)/sqrt(2) on signature (2, 2, 2).
pub fn ghz3() -> DensityMatrix {
    let sig = DimSignature::new(vec![2, 2, 2]).unwrap();
    pure(sig, &[(0, 1.0), (7, 1.0)])
}

/// W state (|001> + |010> + |100>)/sqrt(3) on signature (2, 2, 2).
pub fn w3() -> DensityMatrix {
    let sig = DimSignature::new(vec![2, 2, 2]).unwrap();
    pure(sig, &[(1, 1.0), (2, 1.0), (4, 1.0)])
}

/// Single-qubit |+> = (|0> + |1>)/sqrt(2), the maximally coherent qubit.
pub fn plus_state() -> DensityMatrix {
    let sig = DimSignature::single(2).unwrap();
    pure(sig, &[(0, 1.0), (1, 1.0)])
}

/// Names accepted by [`preset`], in display order.
pub const PRESET_NAMES: [&str; 4] = ["bell-phi-plus", "bell-psi-plus", "ghz3", "w3"];

/// Look up a preset state by CLI name.
pub fn preset(name: &str) -> Result<DensityMatrix> {
    match name {
        "bell-phi-plus" => Ok(bell_phi_plus()),
        "bell-psi-plus" => Ok(bell_psi_plus()),
        "ghz3" => Ok(ghz3()),
        "w3" => Ok(w3()),
        other => Err(Error::InvalidArgument(format!(
            "unknown preset '{other}' (expected one of {PRESET_NAMES:?} or a matrix file path)"
        ))),
    }
}
