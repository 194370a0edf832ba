//! Staged beam-splitter networks on eight optical modes.
//!
//! Twelve two-mode beam splitters arranged in three stages of four mix the
//! input operators â0..â7 into the output operators b̂0..b̂7. Every splitter
//! is a real rotation by an angle θ, so the composed 8×8 transfer matrix is
//! real orthogonal. The module builds the network, composes the transfer
//! matrix, evaluates the upper-left block directly from the per-entry
//! trigonometric products (an independent cross-check on the wiring), and
//! verifies the block-unitarity conditions.

use nalgebra::{Matrix2, Matrix4, SMatrix};

use crate::error::{Error, Result};

/// Number of optical modes in the staged network.
pub const MODE_COUNT: usize = 8;

/// Number of beam splitters (three stages of four).
pub const SPLITTER_COUNT: usize = 12;

/// 8×8 real matrix type used for transfer matrices.
pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Mode-line pairs acted on by the twelve splitters, in stage order.
///
/// Stage 1 (θ1..θ4) mixes each low mode with its partner high mode, stage 2
/// (θ5..θ8) mixes the first-stage outputs across the two dual-rail pairs,
/// and stage 3 (θ9..θ12) mixes neighbouring lines. The first line of each
/// pair receives `+sin` of the second.
pub const STAGE_WIRING: [(usize, usize); SPLITTER_COUNT] = [
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
    (0, 2),
    (1, 3),
    (4, 6),
    (5, 7),
    (0, 1),
    (2, 3),
    (4, 5),
    (6, 7),
];

/// Physical line that carries output operator b̂k after the third stage.
///
/// The stage wiring leaves the outputs interleaved: b̂0..b̂3 sit on the even
/// lines and b̂4..b̂7 on the odd lines. With all angles zero the transfer
/// matrix is therefore this fixed permutation, not the identity.
pub const OUTPUT_LINES: [usize; MODE_COUNT] = [0, 2, 4, 6, 1, 3, 5, 7];

/// The twelve splitter angles θ1..θ12, stored in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    theta: [f64; SPLITTER_COUNT],
}

impl AngleVector {
    /// Build from θ1..θ12 in order. Every entry must be finite.
    pub fn new(theta: [f64; SPLITTER_COUNT]) -> Result<Self> {
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "theta{} is not finite: {}",
                i + 1,
                theta[i]
            )));
        }
        Ok(Self { theta })
    }

    /// All twelve angles zero.
    pub fn zeros() -> Self {
        Self {
            theta: [0.0; SPLITTER_COUNT],
        }
    }

    /// Angle θi with the conventional 1-based index, i in 1..=12.
    pub fn theta(&self, i: usize) -> f64 {
        assert!((1..=SPLITTER_COUNT).contains(&i), "theta index {i} out of range");
        self.theta[i - 1]
    }

    pub fn as_array(&self) -> &[f64; SPLITTER_COUNT] {
        &self.theta
    }
}

/// A single beam splitter acting on two mode lines.
///
/// `line_a` receives `cosθ·a + sinθ·b`; `line_b` receives `−sinθ·a + cosθ·b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterOp {
    pub line_a: usize,
    pub line_b: usize,
    pub theta: f64,
}

impl BeamSplitterOp {
    pub fn new(line_a: usize, line_b: usize, theta: f64) -> Result<Self> {
        if line_a == line_b || line_a >= MODE_COUNT || line_b >= MODE_COUNT {
            return Err(Error::InvalidArgument(format!(
                "invalid splitter lines ({line_a}, {line_b})"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {theta}")));
        }
        Ok(Self { line_a, line_b, theta })
    }
}

/// The fixed three-stage arrangement of twelve splitters.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedNetwork {
    ops: [BeamSplitterOp; SPLITTER_COUNT],
}

impl StagedNetwork {
    /// Splitters in application order (stage 1 first).
    pub fn ops(&self) -> &[BeamSplitterOp; SPLITTER_COUNT] {
        &self.ops
    }

    pub const fn mode_count(&self) -> usize {
        MODE_COUNT
    }
}

/// The 2×2 rotation applied by one beam splitter.
///
/// Returns `[[cosθ, sinθ], [−sinθ, cosθ]]`; determinant 1 for every finite θ.
pub fn rotation_pair(theta: f64) -> Result<Matrix2<f64>> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angle {theta}")));
    }
    let (s, c) = theta.sin_cos();
    Ok(Matrix2::new(c, s, -s, c))
}

/// Assemble the staged network for the given angles.
///
/// The wiring is the fixed [`STAGE_WIRING`] table; the i-th splitter gets
/// θ(i+1). Deterministic by construction.
pub fn staged_network(angles: &AngleVector) -> StagedNetwork {
    let ops = std::array::from_fn(|i| {
        let (a, b) = STAGE_WIRING[i];
        BeamSplitterOp {
            line_a: a,
            line_b: b,
            theta: angles.as_array()[i],
        }
    });
    StagedNetwork { ops }
}

/// 8×8 real orthogonal transfer matrix G with b̂ = G·â.
///
/// Row k holds the coefficients of output operator b̂k over the inputs
/// â0..â7. Orthogonality (‖GGᵀ − I‖max below 1e-12) is what preserves the
/// bosonic commutation relations.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    g: Matrix8,
}

/// Orthogonality tolerance for composed transfer matrices: products of at
/// most three double-precision trig factors stay well inside 1e-12.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

impl TransferMatrix {
    /// Wrap an externally supplied matrix, verifying orthogonality.
    pub fn from_matrix(g: Matrix8) -> Result<Self> {
        let residual = orthogonality_residual(&g);
        if !(residual < 1e-9) {
            return Err(Error::Inconsistent(format!(
                "matrix is not orthogonal: residual {residual:.3e}"
            )));
        }
        Ok(Self { g })
    }

    pub fn as_matrix(&self) -> &Matrix8 {
        &self.g
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.g[(row, col)]
    }

    /// ‖GGᵀ − I‖max.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.g)
    }

    /// The 4×4 quadrant starting at (`row`, `col`) × 4.
    fn quadrant(&self, row: usize, col: usize) -> Matrix4<f64> {
        self.g.fixed_view::<4, 4>(4 * row, 4 * col).into_owned()
    }

    /// Upper-left block A: the b̂0..b̂3 ← â0..â3 couplings the gate lives in.
    pub fn upper_left_block(&self) -> Matrix4<f64> {
        self.quadrant(0, 0)
    }
}

fn orthogonality_residual(g: &Matrix8) -> f64 {
    (g * g.transpose() - Matrix8::identity()).amax()
}

/// Compose the transfer matrix of a staged network.
///
/// Applies the twelve rotations to the mode lines in stage order, then
/// relabels lines to output operators via [`OUTPUT_LINES`]. Every output
/// operator ends up depending on all eight inputs for generic angles.
pub fn transfer_matrix(network: &StagedNetwork) -> TransferMatrix {
    let mut m = Matrix8::identity();
    for op in network.ops() {
        let (s, c) = op.theta.sin_cos();
        for j in 0..MODE_COUNT {
            let ra = m[(op.line_a, j)];
            let rb = m[(op.line_b, j)];
            m[(op.line_a, j)] = c * ra + s * rb;
            m[(op.line_b, j)] = -s * ra + c * rb;
        }
    }
    let mut g = Matrix8::zeros();
    for (out, &line) in OUTPUT_LINES.iter().enumerate() {
        for j in 0..MODE_COUNT {
            g[(out, j)] = m[(line, j)];
        }
    }
    TransferMatrix { g }
}

/// Upper-left block evaluated directly from the per-entry trig products.
///
/// Each entry of the b̂0..b̂3 ← â0..â3 coupling is a product of three sines
/// and cosines; this evaluates those products without composing any
/// matrices, so it cross-checks [`transfer_matrix`] and pins the wiring.
pub fn closed_form_block(angles: &AngleVector) -> Matrix4<f64> {
    let s: Vec<f64> = angles.as_array().iter().map(|t| t.sin()).collect();
    let c: Vec<f64> = angles.as_array().iter().map(|t| t.cos()).collect();
    // 1-based accessors to keep the products readable against θ1..θ12.
    let sn = |i: usize| s[i - 1];
    let cs = |i: usize| c[i - 1];
    Matrix4::new(
        cs(9) * cs(5) * cs(1),
        sn(9) * cs(6) * cs(2),
        cs(9) * sn(5) * cs(3),
        sn(9) * sn(6) * cs(4),
        -sn(5) * cs(1) * cs(10),
        -sn(6) * cs(2) * sn(10),
        cs(5) * cs(3) * cs(10),
        cs(6) * cs(4) * sn(10),
        -cs(7) * sn(1) * cs(11),
        -cs(8) * sn(2) * sn(11),
        -sn(7) * sn(3) * cs(11),
        -sn(8) * sn(4) * sn(11),
        sn(7) * sn(1) * cs(12),
        sn(8) * sn(2) * sn(12),
        -cs(7) * sn(3) * cs(12),
        -cs(8) * sn(4) * sn(12),
    )
}

/// Residuals of the four block-unitarity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockResiduals {
    /// ‖AAᵀ + BBᵀ − I‖max
    pub aat_bbt: f64,
    /// ‖CCᵀ + EEᵀ − I‖max
    pub cct_eet: f64,
    /// ‖ACᵀ + BEᵀ‖max
    pub act_bet: f64,
    /// ‖CAᵀ + EBᵀ‖max
    pub cat_ebt: f64,
}

impl BlockResiduals {
    pub fn max(&self) -> f64 {
        self.aat_bbt.max(self.cct_eet).max(self.act_bet).max(self.cat_ebt)
    }
}

/// The four 4×4 quadrants of a transfer matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub a: Matrix4<f64>,
    pub b: Matrix4<f64>,
    pub c: Matrix4<f64>,
    pub e: Matrix4<f64>,
    pub residuals: BlockResiduals,
}

/// Split G into quadrants A, B, C, E and report the unitarity residuals.
///
/// Fails if G is not orthogonal to 1e-9.
pub fn block_decompose(g: &TransferMatrix) -> Result<BlockDecomposition> {
    let residual = g.orthogonality_residual();
    if !(residual < 1e-9) {
        return Err(Error::Inconsistent(format!(
            "transfer matrix is not orthogonal: residual {residual:.3e}"
        )));
    }
    let a = g.quadrant(0, 0);
    let b = g.quadrant(0, 1);
    let c = g.quadrant(1, 0);
    let e = g.quadrant(1, 1);
    let id = Matrix4::identity();
    let residuals = BlockResiduals {
        aat_bbt: (a * a.transpose() + b * b.transpose() - id).amax(),
        cct_eet: (c * c.transpose() + e * e.transpose() - id).amax(),
        act_bet: (a * c.transpose() + b * e.transpose()).amax(),
        cat_ebt: (c * a.transpose() + e * b.transpose()).amax(),
    };
    Ok(BlockDecomposition { a, b, c, e, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

    fn random_angles(rng: &mut ChaCha8Rng) -> AngleVector {
        AngleVector::new(std::array::from_fn(|_| rng.random_range(0.0..TAU))).unwrap()
    }

    /// The zero-angle transfer matrix: outputs are a fixed relabeling of the
    /// inputs, b̂k ← â(OUTPUT_LINES[k]).
    fn zero_angle_permutation() -> Matrix8 {
        let mut p = Matrix8::zeros();
        for (out, &line) in OUTPUT_LINES.iter().enumerate() {
            p[(out, line)] = 1.0;
        }
        p
    }

    /// Coefficients of b̂4..b̂7 over â0..â3, written out from the third-stage
    /// complement combinations. Independent check on the lower-left quadrant.
    fn complement_rows(angles: &AngleVector) -> Matrix4<f64> {
        let sn = |i: usize| angles.theta(i).sin();
        let cs = |i: usize| angles.theta(i).cos();
        Matrix4::new(
            -sn(9) * cs(5) * cs(1),
            cs(9) * cs(6) * cs(2),
            -sn(9) * sn(5) * cs(3),
            cs(9) * sn(6) * cs(4),
            sn(10) * sn(5) * cs(1),
            -cs(10) * sn(6) * cs(2),
            -sn(10) * cs(5) * cs(3),
            cs(10) * cs(6) * cs(4),
            sn(11) * cs(7) * sn(1),
            -cs(11) * cs(8) * sn(2),
            sn(11) * sn(7) * sn(3),
            -cs(11) * sn(8) * sn(4),
            -sn(12) * sn(7) * sn(1),
            cs(12) * sn(8) * sn(2),
            sn(12) * cs(7) * sn(3),
            -cs(12) * cs(8) * sn(4),
        )
    }

    #[test]
    fn rotation_pair_identity_at_zero() {
        let r = rotation_pair(0.0).unwrap();
        assert_eq!(r, Matrix2::identity());
    }

    #[test]
    fn rotation_pair_quarter_turn() {
        let r = rotation_pair(FRAC_PI_2).unwrap();
        let expected = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn rotation_pair_fifty_fifty() {
        let r = rotation_pair(FRAC_PI_4).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for v in r.iter() {
            assert!((v.abs() - inv_sqrt2).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_pair_determinant_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rotation_pair(rng.random_range(-10.0..10.0)).unwrap();
            assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_pair_rejects_non_finite() {
        assert!(rotation_pair(f64::NAN).is_err());
        assert!(rotation_pair(f64::INFINITY).is_err());
    }

    #[test]
    fn angle_vector_rejects_non_finite() {
        let mut theta = [0.0; 12];
        theta[3] = f64::NAN;
        assert!(AngleVector::new(theta).is_err());
    }

    #[test]
    fn network_wiring_is_fixed() {
        let net = staged_network(&AngleVector::zeros());
        for (op, &(a, b)) in net.ops().iter().zip(STAGE_WIRING.iter()) {
            assert_eq!((op.line_a, op.line_b), (a, b));
        }
    }

    // With every splitter at θ=0, the first-stage and second-stage rotations
    // are identities but the output labels remain interleaved across the
    // stage wiring, so G is the fixed relabeling permutation rather than the
    // identity. (b̂1 reduces to â2 at zero angles: it is the first output of
    // the second output pair, which is fed from the second input pair.)
    #[test]
    fn zero_angles_compose_to_output_permutation() {
        let g = transfer_matrix(&staged_network(&AngleVector::zeros()));
        assert_eq!(*g.as_matrix(), zero_angle_permutation());
        assert!(g.orthogonality_residual() < 1e-15);
    }

    #[test]
    fn transfer_matrix_is_orthogonal_for_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = transfer_matrix(&staged_network(&random_angles(&mut rng)));
            assert!(g.orthogonality_residual() < ORTHOGONALITY_TOL);
        }
    }

    #[test]
    fn leading_entry_is_triple_cosine_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let angles = random_angles(&mut rng);
            let g = transfer_matrix(&staged_network(&angles));
            let expected = angles.theta(9).cos() * angles.theta(5).cos() * angles.theta(1).cos();
            assert!((g.entry(0, 0) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn every_output_couples_to_every_input() {
        // Generic angles: no structural zeros anywhere in G.
        let angles =
            AngleVector::new(std::array::from_fn(|i| 0.3 + 0.11 * i as f64)).unwrap();
        let g = transfer_matrix(&staged_network(&angles));
        for i in 0..MODE_COUNT {
            for j in 0..MODE_COUNT {
                assert!(
                    g.entry(i, j).abs() > 1e-6,
                    "entry ({i},{j}) vanished for generic angles"
                );
            }
        }
    }

    #[test]
    fn closed_form_block_at_zero_angles() {
        let block = closed_form_block(&AngleVector::zeros());
        let expected = Matrix4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0,
        );
        assert_eq!(block, expected);
    }

    #[test]
    fn closed_form_block_matches_composed_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let angles = random_angles(&mut rng);
            let composed = transfer_matrix(&staged_network(&angles)).upper_left_block();
            let direct = closed_form_block(&angles);
            assert!((composed - direct).amax() < 1e-12);
        }
    }

    #[test]
    fn complement_rows_match_lower_left_quadrant() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let angles = random_angles(&mut rng);
            let g = transfer_matrix(&staged_network(&angles));
            let c = block_decompose(&g).unwrap().c;
            assert!((c - complement_rows(&angles)).amax() < 1e-12);
        }
    }

    #[test]
    fn block_decompose_identity() {
        let g = TransferMatrix::from_matrix(Matrix8::identity()).unwrap();
        let d = block_decompose(&g).unwrap();
        assert_eq!(d.a, Matrix4::identity());
        assert_eq!(d.e, Matrix4::identity());
        assert_eq!(d.b, Matrix4::zeros());
        assert_eq!(d.c, Matrix4::zeros());
        assert!(d.residuals.max() < 1e-15);
    }

    #[test]
    fn block_conditions_hold_for_random_networks() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let g = transfer_matrix(&staged_network(&random_angles(&mut rng)));
            let d = block_decompose(&g).unwrap();
            assert!(d.residuals.max() < 1e-12);
        }
    }

    #[test]
    fn block_decompose_rejects_non_orthogonal() {
        let mut m = Matrix8::identity();
        m[(0, 0)] = 2.0;
        assert!(TransferMatrix::from_matrix(m).is_err());
        let g = TransferMatrix { g: m };
        assert!(matches!(block_decompose(&g), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn stage_order_matters() {
        // Swapping two splitters from different stages changes G for
        // generic angles: composition is order-sensitive.
        let angles =
            AngleVector::new(std::array::from_fn(|i| 0.2 + 0.07 * i as f64)).unwrap();
        let g = transfer_matrix(&staged_network(&angles));

        let mut ops = *staged_network(&angles).ops();
        ops.swap(0, 8); // θ1 splitter after the θ9 splitter
        let mut m = Matrix8::identity();
        for op in &ops {
            let (s, c) = op.theta.sin_cos();
            for j in 0..MODE_COUNT {
                let ra = m[(op.line_a, j)];
                let rb = m[(op.line_b, j)];
                m[(op.line_a, j)] = c * ra + s * rb;
                m[(op.line_b, j)] = -s * ra + c * rb;
            }
        }
        let mut swapped = Matrix8::zeros();
        for (out, &line) in OUTPUT_LINES.iter().enumerate() {
            for j in 0..MODE_COUNT {
                swapped[(out, j)] = m[(line, j)];
            }
        }
        assert!((g.as_matrix() - swapped).amax() > 1e-3);
    }

    #[test]
    fn splitter_rejects_bad_lines() {
        assert!(BeamSplitterOp::new(3, 3, 0.1).is_err());
        assert!(BeamSplitterOp::new(0, 8, 0.1).is_err());
        assert!(BeamSplitterOp::new(0, 1, f64::NAN).is_err());
    }

    #[test]
    fn theta_accessor_is_one_based() {
        let mut theta = [0.0; 12];
        theta[0] = 0.5;
        theta[11] = PI;
        let angles = AngleVector::new(theta).unwrap();
        assert_eq!(angles.theta(1), 0.5);
        assert_eq!(angles.theta(12), PI);
    }
}
