//! Fast algorithm for the 8-point low-complexity matrix `T₈*`.
//!
//! `T₈* = P · A₂ · A₁ · B₈`: a butterfly layer, two sparse add/shift layers
//! (8 → 10 → 8 nodes) and an output permutation. The flow graph below executes
//! 24 additions and 6 doublings; sign flips fold into the adders.

use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::approx::ParametricFamily;
use crate::error::Result;
use crate::matrix::IntMatrix;

/// Squared row norms of `T₈*`; the scaling diagonal is `1/sqrt` of these.
pub const T8_ROW_ENERGIES: [i64; 8] = [8, 12, 12, 20, 12, 14, 12, 10];

/// Output `m` of the flow graph is intermediate node `OUTPUT_ORDER[m]`.
const OUTPUT_ORDER: [usize; 8] = [0, 6, 3, 5, 1, 7, 2, 4];

const B8: [[i64; 8]; 8] = [
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 1, -1, 0, 0, 0],
    [0, 0, 1, 0, 0, -1, 0, 0],
    [0, 1, 0, 0, 0, 0, -1, 0],
    [1, 0, 0, 0, 0, 0, 0, -1],
];

const A1: [[i64; 8]; 10] = [
    [0, 0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, 0],
    [2, 0, -1, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, -1, 0, 0],
    [0, 0, 0, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 2, -1],
    [0, 0, 0, 0, 0, 0, 0, -2],
];

const A2: [[i64; 10]; 8] = [
    [1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, -2, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, -1, 0, 1],
    [0, 0, 0, 0, 0, 0, -1, 0, 1, 0],
];

/// Arithmetic a signal flow graph needs.
pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    /// Multiplication by two (a left shift for integers).
    fn double(self) -> Self;
}

impl Sample for i32 {
    fn double(self) -> Self {
        self << 1
    }
}

impl Sample for i64 {
    fn double(self) -> Self {
        self << 1
    }
}

impl Sample for f64 {
    fn double(self) -> Self {
        self * 2.0
    }
}

/// `T₈* · x` through the factorized flow graph.
pub fn fast_forward_8<T: Sample>(x: &[T; 8]) -> [T; 8] {
    // B8: butterflies
    let b0 = x[0] + x[7];
    let b1 = x[1] + x[6];
    let b2 = x[2] + x[5];
    let b3 = x[3] + x[4];
    let b4 = x[3] - x[4];
    let b5 = x[2] - x[5];
    let b6 = x[1] - x[6];
    let b7 = x[0] - x[7];

    // A1
    let a0 = b2;
    let a1 = b0 + b3;
    let a2 = b1;
    let a3 = b2.double() - b1 - b3;
    let a4 = b0.double() - b2 - b3;
    let a5 = b4.double() - b5;
    let a6 = b4 + b5;
    let a7 = b5 + b6;
    let a8 = b6.double() - b7;
    let a9 = -b7.double();

    // A2
    let c = [
        a0 + a1 + a2,
        a1 - a2.double(),
        a3,
        a4,
        a5,
        a6 + a7 + a9,
        a9 - a7,
        a8 - a6,
    ];

    OUTPUT_ORDER.map(|i| c[i])
}

/// `T₈*ᵀ · y`: the flow graph with every arrow reversed.
pub fn transposed_flow_8<T: Sample>(y: &[T; 8]) -> [T; 8] {
    // Pᵀ
    let mut c = [y[0]; 8];
    for (m, &node) in OUTPUT_ORDER.iter().enumerate() {
        c[node] = y[m];
    }

    // A2ᵀ
    let a0 = c[0];
    let a1 = c[0] + c[1];
    let a2 = c[0] - c[1].double();
    let a3 = c[2];
    let a4 = c[3];
    let a5 = c[4];
    let a6 = c[5] - c[7];
    let a7 = c[5] - c[6];
    let a8 = c[7];
    let a9 = c[5] + c[6];

    // A1ᵀ
    let b0 = a1 + a4.double();
    let b1 = a2 - a3;
    let b2 = a0 + a3.double() - a4;
    let b3 = a1 - a3 - a4;
    let b4 = a5.double() + a6;
    let b5 = a6 + a7 - a5;
    let b6 = a7 + a8.double();
    let b7 = -(a8 + a9.double());

    // B8ᵀ
    [
        b0 + b7,
        b1 + b6,
        b2 + b5,
        b3 + b4,
        b3 - b4,
        b2 - b5,
        b1 - b6,
        b0 - b7,
    ]
}

/// Scaling diagonal of `T̂₈*`.
pub fn t8_scaling() -> [f64; 8] {
    T8_ROW_ENERGIES.map(|e| 1.0 / (e as f64).sqrt())
}

/// `T̂₈* · x = S · T₈* · x`.
pub fn scaled_forward_8(x: &[f64; 8]) -> [f64; 8] {
    let y = fast_forward_8(x);
    let s = t8_scaling();
    std::array::from_fn(|k| s[k] * y[k])
}

/// `T̂₈*ᵀ · X`: scale, then run the transposed graph. Approximately inverts
/// [`scaled_forward_8`].
pub fn near_inverse_8(coeffs: &[f64; 8]) -> [f64; 8] {
    let s = t8_scaling();
    transposed_flow_8(&std::array::from_fn(|k| s[k] * coeffs[k]))
}

/// Row-column 2-D integer transform `T₈* · X · T₈*ᵀ`.
pub fn fast_forward_8x8(block: &[[i64; 8]; 8]) -> [[i64; 8]; 8] {
    let rows: [[i64; 8]; 8] = block.map(|r| fast_forward_8(&r));
    let mut out = [[0i64; 8]; 8];
    for c in 0..8 {
        let col: [i64; 8] = std::array::from_fn(|r| rows[r][c]);
        let t = fast_forward_8(&col);
        for r in 0..8 {
            out[r][c] = t[r];
        }
    }
    out
}

/// Arithmetic operation tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OpCount {
    pub additions: u32,
    pub shifts: u32,
    pub multiplications: u32,
    pub total: u32,
}

impl OpCount {
    pub fn new(additions: u32, shifts: u32, multiplications: u32) -> Self {
        Self {
            additions,
            shifts,
            multiplications,
            total: additions + shifts + multiplications,
        }
    }

    /// Structural cost of computing `M · x`: per row, `nnz - 1` additions;
    /// per coefficient, nothing for `±1`, one shift for other powers of two
    /// and one multiplication otherwise.
    pub fn of_matrix(m: &IntMatrix) -> Self {
        let (mut adds, mut shifts, mut mults) = (0, 0, 0);
        for r in 0..m.nrows() {
            let nonzero: Vec<i64> = m.row(r).iter().copied().filter(|&v| v != 0).collect();
            adds += nonzero.len().saturating_sub(1) as u32;
            for v in nonzero {
                match v.unsigned_abs() {
                    1 => {}
                    a if a.is_power_of_two() => shifts += 1,
                    _ => mults += 1,
                }
            }
        }
        Self::new(adds, shifts, mults)
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(
            self.additions + rhs.additions,
            self.shifts + rhs.shifts,
            self.multiplications + rhs.multiplications,
        )
    }
}

/// The sparse factorization of `T₈*` as explicit stage matrices.
#[derive(Debug, Clone)]
pub struct FastAlgorithm8 {
    pub butterflies: IntMatrix,
    pub first_layer: IntMatrix,
    pub second_layer: IntMatrix,
    pub permutation: IntMatrix,
}

impl Default for FastAlgorithm8 {
    fn default() -> Self {
        Self::new()
    }
}

impl FastAlgorithm8 {
    pub fn new() -> Self {
        let rows = |m: &[&[i64]]| IntMatrix::from_rows(m).expect("rectangular constant");
        let b8: Vec<&[i64]> = B8.iter().map(|r| r.as_slice()).collect();
        let a1: Vec<&[i64]> = A1.iter().map(|r| r.as_slice()).collect();
        let a2: Vec<&[i64]> = A2.iter().map(|r| r.as_slice()).collect();
        Self {
            butterflies: rows(&b8),
            first_layer: rows(&a1),
            second_layer: rows(&a2),
            permutation: IntMatrix::from_fn(8, 8, |r, c| i64::from(OUTPUT_ORDER[r] == c)),
        }
    }

    /// `P · A₂ · A₁ · B₈`.
    pub fn product(&self) -> IntMatrix {
        self.permutation
            .mul(&self.second_layer)
            .and_then(|m| m.mul(&self.first_layer))
            .and_then(|m| m.mul(&self.butterflies))
            .expect("stage shapes chain")
    }

    /// Arithmetic of the three computing stages; the permutation is free.
    pub fn operation_count(&self) -> OpCount {
        OpCount::of_matrix(&self.butterflies)
            + OpCount::of_matrix(&self.first_layer)
            + OpCount::of_matrix(&self.second_layer)
    }

    /// Worst-case magnitude after each computing stage for inputs bounded by
    /// `input_bound` in absolute value.
    pub fn stage_bounds(&self, input_bound: i64) -> [i64; 3] {
        let propagate = |m: &IntMatrix, input: &[i64]| -> Vec<i64> {
            (0..m.nrows())
                .map(|r| m.row(r).iter().zip(input).map(|(c, b)| c.abs() * b).sum())
                .collect()
        };
        let s1 = propagate(&self.butterflies, &[input_bound; 8]);
        let s2 = propagate(&self.first_layer, &s1);
        let s3 = propagate(&self.second_layer, &s2);
        let peak = |v: &[i64]| v.iter().copied().max().unwrap_or(0);
        [peak(&s1), peak(&s2), peak(&s3)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Factorized flow graph.
    Fast8,
    /// Row-by-row multiply with `round(2 · D₈ · T₈)` before common factors
    /// are pulled into the scaling, as a direct implementation would see it.
    Direct8,
}

pub fn count_operations(alg: Algorithm) -> Result<OpCount> {
    match alg {
        Algorithm::Fast8 => Ok(FastAlgorithm8::new().operation_count()),
        Algorithm::Direct8 => {
            let raw = ParametricFamily::new(8)?.rounded(2.0)?;
            Ok(OpCount::of_matrix(raw.as_int()))
        }
    }
}
