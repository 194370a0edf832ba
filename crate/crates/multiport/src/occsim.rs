//! Occupation-vector gate semantics for two dual-rail photons.
//!
//! Two photons, one per dual-rail pair, are described by a signed
//! four-entry occupation vector: which rail of each pair is occupied, with
//! signs carrying relative phases. The two-qubit gates act on these vectors
//! through non-orthogonal 4×4 matrices; decoding reads the bits back off
//! the occupied rails and reports the accumulated sign.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};

/// Scale relating a network's upper-left block to its gate matrix: block
/// entries are ±1/√8 at 50:50 magnitudes while gate entries are ±1/2.
pub const BLOCK_SCALE: f64 = std::f64::consts::SQRT_2;

/// A two-qubit computational basis state (control, target).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogicalState {
    control: u8,
    target: u8,
}

impl LogicalState {
    pub fn new(control: u8, target: u8) -> Result<Self> {
        if control > 1 || target > 1 {
            return Err(Error::InvalidArgument(format!(
                "bits must be 0 or 1, got ({control}, {target})"
            )));
        }
        Ok(Self { control, target })
    }

    /// The four basis states in order 00, 01, 10, 11.
    pub fn all() -> [Self; 4] {
        [
            Self { control: 0, target: 0 },
            Self { control: 0, target: 1 },
            Self { control: 1, target: 0 },
            Self { control: 1, target: 1 },
        ]
    }

    /// Parse a two-character label such as "10".
    pub fn from_label(label: &str) -> Result<Self> {
        let bytes = label.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(|b| *b == b'0' || *b == b'1') {
            return Err(Error::InvalidArgument(format!(
                "logical state label must be two bits, got {label:?}"
            )));
        }
        Self::new(bytes[0] - b'0', bytes[1] - b'0')
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.control, self.target)
    }

    pub fn control(&self) -> u8 {
        self.control
    }

    pub fn target(&self) -> u8 {
        self.target
    }

    /// Basis index 0..4 in the order 00, 01, 10, 11.
    pub fn index(&self) -> usize {
        (2 * self.control + self.target) as usize
    }
}

impl std::fmt::Display for LogicalState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.control, self.target)
    }
}

/// Signed occupation vector over the four gate modes.
///
/// Exactly one rail of pair {0,1} and one rail of pair {2,3} carries a
/// photon; entries are −1, 0 or +1 with the signs tracking relative phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccupationVector {
    entries: [i8; 4],
}

impl OccupationVector {
    pub fn new(entries: [i8; 4]) -> Result<Self> {
        if entries.iter().any(|e| !(-1..=1).contains(e)) {
            return Err(Error::InvalidArgument(format!(
                "occupation entries must be in {{-1, 0, 1}}: {entries:?}"
            )));
        }
        let first = entries[0].unsigned_abs() + entries[1].unsigned_abs();
        let second = entries[2].unsigned_abs() + entries[3].unsigned_abs();
        if first != 1 || second != 1 {
            return Err(Error::InvalidArgument(format!(
                "exactly one photon per pair required: {entries:?}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i8; 4] {
        &self.entries
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::from_fn(|i, _| f64::from(self.entries[i]))
    }
}

/// Which gate a target matrix stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Cnot,
    Swap,
    Custom,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Cnot => "cnot",
            GateKind::Swap => "swap",
            GateKind::Custom => "custom",
        }
    }
}

/// A 4×4 real gate matrix acting on occupation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTarget {
    kind: GateKind,
    matrix: Matrix4<f64>,
}

impl GateTarget {
    /// The CNOT target. Acting on the encoded basis it flips the target
    /// rail when the control rail is 1, with signs −1 on the inputs whose
    /// target bit is 0.
    pub fn cnot() -> Self {
        let matrix = Matrix4::new(
            1.0, -1.0, 1.0, 1.0, //
            -1.0, 1.0, 1.0, 1.0, //
            -1.0, 1.0, -1.0, 1.0, //
            1.0, -1.0, -1.0, 1.0,
        ) / 2.0;
        Self { kind: GateKind::Cnot, matrix }
    }

    /// The SWAP target.
    ///
    /// Note that acting on the encoded basis this matrix holds the control
    /// pair fixed and copies it onto the target pair (00→00, 01→00, 10→11,
    /// 11→11, all signs +1); its decoded truth table is not the two-bit
    /// exchange. Gate reports surface this through the truth-table flag.
    pub fn swap() -> Self {
        let matrix = Matrix4::new(
            1.0, -1.0, 1.0, 1.0, //
            -1.0, 1.0, 1.0, 1.0, //
            1.0, -1.0, 1.0, 1.0, //
            -1.0, 1.0, 1.0, 1.0,
        ) / 2.0;
        Self { kind: GateKind::Swap, matrix }
    }

    pub fn custom(matrix: Matrix4<f64>) -> Result<Self> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "custom gate matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { kind: GateKind::Custom, matrix })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }
}

/// Encode a basis state as an all-positive occupation vector:
/// bit 0 occupies the first rail of its pair, bit 1 the second.
pub fn encode_logical(state: LogicalState) -> OccupationVector {
    let mut entries = [0i8; 4];
    entries[state.control() as usize] = 1;
    entries[2 + state.target() as usize] = 1;
    OccupationVector { entries }
}

/// Read the bits off the occupied rails; the sign is the product of the
/// two nonzero entries.
pub fn decode_occupation(v: &OccupationVector) -> (LogicalState, i8) {
    let e = v.entries();
    let control = u8::from(e[1] != 0);
    let target = u8::from(e[3] != 0);
    let sign = e.iter().filter(|x| **x != 0).product::<i8>();
    (LogicalState { control, target }, sign)
}

/// Apply a gate matrix to an occupation vector.
///
/// The result must again be a signed occupation vector (two entries of
/// magnitude one, one per pair); otherwise the target does not map the
/// occupation basis to itself and a not-representable error is returned.
pub fn apply_occupation(target: &GateTarget, v: &OccupationVector) -> Result<OccupationVector> {
    let out = target.matrix() * v.as_vector();
    let mut entries = [0i8; 4];
    for i in 0..4 {
        let rounded = out[i].round();
        if (out[i] - rounded).abs() > 1e-9 || rounded.abs() > 1.0 {
            return Err(Error::NotRepresentable(format!(
                "gate output {:?} is not a signed occupation vector",
                out.as_slice()
            )));
        }
        entries[i] = rounded as i8;
    }
    OccupationVector::new(entries).map_err(|_| {
        Error::NotRepresentable(format!(
            "gate output {entries:?} does not keep one photon per pair"
        ))
    })
}

/// Reference truth tables: CNOT xors the control onto the target, SWAP
/// exchanges the two bits. Custom gates have no reference.
pub fn reference_gate(state: LogicalState, gate: GateKind) -> Option<LogicalState> {
    match gate {
        GateKind::Cnot => Some(LogicalState {
            control: state.control,
            target: state.target ^ state.control,
        }),
        GateKind::Swap => Some(LogicalState {
            control: state.target,
            target: state.control,
        }),
        GateKind::Custom => None,
    }
}

/// ‖√2·A − target‖max: how far a network's upper-left block is from
/// realizing the target matrix. Below 1e-12 counts as a match.
pub fn block_matches_target(block: &Matrix4<f64>, target: &GateTarget) -> f64 {
    (block * BLOCK_SCALE - target.matrix()).amax()
}

/// Residual threshold declaring a block/target match.
pub const BLOCK_MATCH_TOL: f64 = 1e-12;
