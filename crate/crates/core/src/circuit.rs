//! Gate-level model of the state-preparation circuit `G` and the exact
//! complete-graph walk circuit, simulated densely on `m + 1` qubits.
//!
//! Register layout: the primary register holds an integer `y < 2^m` on qubits
//! `0..m` (qubit `j` is bit `j`); the ancilla is qubit `m`. Basis state index
//! is `y + 2^m * ancilla`.
//!
//! `G = U#^dag H S_0(theta) H S_chi(theta) H` maps `|0>` to the uniform
//! superposition over the first `M` integers (then relabelled). `S_chi`
//! marks `y < M` through comparator / ancilla rotation / comparator, `S_0`
//! marks `y = 0` through a zero-controlled NOT / ancilla rotation / NOT.
//! The walk is `G R_0 G^dag` where `R_0` puts the phase `e^{iMt}` on `|0>`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Largest register `circuit_unitary` will expand to a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{qubits} qubits exceeds the dense simulation bound of {MAX_DENSE_QUBITS}")]
    TooManyQubits { qubits: usize },
    #[error("need at least 2 solutions, got {0}")]
    TooFewSolutions(usize),
    #[error("relabel map is not a permutation of 0..{0}")]
    BadRelabel(usize),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    Primary(usize),
    Ancilla,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Hadamard on every primary qubit.
    HadamardLayer,
    /// Toggles the ancilla iff the primary register holds a value below
    /// `threshold`.
    Comparator { threshold: usize },
    /// `diag(e^{-i angle/2}, e^{+i angle/2})` on one wire.
    Rz { wire: Wire, angle: f64 },
    /// Toggles the ancilla iff every primary qubit is `|0>`.
    ZeroControlledNot,
    /// Basis relabelling `|y> -> |map[y]>` of the primary register; stands in
    /// for the (un)indexing unitary.
    Relabel { map: Vec<usize> },
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rz { wire, angle } => Gate::Rz {
                wire: *wire,
                angle: -angle,
            },
            Gate::Relabel { map } => {
                let mut inv = vec![0; map.len()];
                for (y, &z) in map.iter().enumerate() {
                    inv[z] = y;
                }
                Gate::Relabel { map: inv }
            }
            other => other.clone(),
        }
    }
}

/// Ordered gate list acting on `primary` qubits plus one ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCircuit {
    primary: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(primary: usize) -> Self {
        Self {
            primary,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Gate::Relabel { map } = &gate {
            let n = 1usize << self.primary;
            let mut seen = vec![false; n];
            if map.len() != n
                || map
                    .iter()
                    .any(|&z| z >= n || std::mem::replace(&mut seen[z], true))
            {
                return Err(CircuitError::BadRelabel(n));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn primary_qubits(&self) -> usize {
        self.primary
    }

    pub fn qubits(&self) -> usize {
        self.primary + 1
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Reversed circuit of inverted gates.
    pub fn inverse(&self) -> Self {
        Self {
            primary: self.primary,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(mut self, next: &GateCircuit) -> Self {
        assert_eq!(self.primary, next.primary, "register sizes differ");
        self.gates.extend(next.gates.iter().cloned());
        self
    }

    /// Applies every gate in order to a `2^(m+1)` statevector.
    pub fn apply(&self, state: &mut [Complex64]) {
        assert_eq!(state.len(), self.dim(), "state dimension");
        let half = 1usize << self.primary;
        let ancilla_bit = half;
        for gate in &self.gates {
            match gate {
                Gate::HadamardLayer => {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    for q in 0..self.primary {
                        let bit = 1 << q;
                        for i in 0..state.len() {
                            if i & bit == 0 {
                                let (x, y) = (state[i], state[i | bit]);
                                state[i] = (x + y) * s;
                                state[i | bit] = (x - y) * s;
                            }
                        }
                    }
                }
                Gate::Comparator { threshold } => {
                    for y in 0..half.min(*threshold) {
                        state.swap(y, y | ancilla_bit);
                    }
                }
                Gate::Rz { wire, angle } => {
                    let bit = match wire {
                        Wire::Primary(q) => 1 << q,
                        Wire::Ancilla => ancilla_bit,
                    };
                    let low = Complex64::cis(-angle / 2.0);
                    let high = Complex64::cis(angle / 2.0);
                    for (i, a) in state.iter_mut().enumerate() {
                        *a *= if i & bit == 0 { low } else { high };
                    }
                }
                Gate::ZeroControlledNot => state.swap(0, ancilla_bit),
                Gate::Relabel { map } => {
                    let old = state.to_vec();
                    for (i, a) in old.into_iter().enumerate() {
                        let (y, anc) = (i & (half - 1), i & ancilla_bit);
                        state[map[y] | anc] = a;
                    }
                }
            }
        }
    }

    /// Output state for a basis input.
    pub fn apply_to_basis(&self, index: usize) -> Vec<Complex64> {
        let mut state = vec![Complex64::default(); self.dim()];
        state[index] = Complex64::new(1.0, 0.0);
        self.apply(&mut state);
        state
    }
}

/// Dense matrix of the whole circuit (columns are images of basis states).
pub fn circuit_unitary(c: &GateCircuit) -> Result<DMatrix<Complex64>> {
    if c.qubits() > MAX_DENSE_QUBITS {
        return Err(CircuitError::TooManyQubits { qubits: c.qubits() });
    }
    let dim = c.dim();
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = c.apply_to_basis(col);
        u.set_column(col, &nalgebra::DVector::from_vec(out));
    }
    Ok(u)
}

/// Register size and rotation angle for preparing `|s>` over `M` indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepAngle {
    pub solutions: usize,
    /// `ceil(log2 M)`
    pub m: usize,
    /// `2 arcsin sqrt(2^m / 4M)`
    pub theta: f64,
    /// Plain Hadamards already prepare `|s>`.
    pub power_of_two: bool,
}

pub fn prep_angle(solutions: usize) -> PrepAngle {
    assert!(solutions >= 1, "need at least one solution");
    let m = (usize::BITS - (solutions - 1).leading_zeros()) as usize;
    let ratio = (1u64 << m) as f64 / (4.0 * solutions as f64);
    PrepAngle {
        solutions,
        m,
        theta: 2.0 * ratio.sqrt().asin(),
        power_of_two: solutions.is_power_of_two(),
    }
}

/// `G` with the identity standing in for the unindexing relabel.
pub fn build_state_prep(solutions: usize) -> Result<GateCircuit> {
    if solutions < 2 {
        return Err(CircuitError::TooFewSolutions(solutions));
    }
    let m = prep_angle(solutions).m;
    build_state_prep_relabelled(solutions, (0..1 << m).collect())
}

/// `G` ending in an explicit relabel of the primary register.
pub fn build_state_prep_relabelled(solutions: usize, relabel: Vec<usize>) -> Result<GateCircuit> {
    if solutions < 2 {
        return Err(CircuitError::TooFewSolutions(solutions));
    }
    let angle = prep_angle(solutions);
    let mut c = GateCircuit::new(angle.m);
    c.push(Gate::HadamardLayer)?;
    if !angle.power_of_two {
        let theta = angle.theta;
        // S_chi(theta)
        c.push(Gate::Comparator {
            threshold: solutions,
        })?;
        c.push(Gate::Rz {
            wire: Wire::Ancilla,
            angle: theta,
        })?;
        c.push(Gate::Comparator {
            threshold: solutions,
        })?;
        c.push(Gate::HadamardLayer)?;
        // S_0(theta)
        c.push(Gate::ZeroControlledNot)?;
        c.push(Gate::Rz {
            wire: Wire::Ancilla,
            angle: theta,
        })?;
        c.push(Gate::ZeroControlledNot)?;
        c.push(Gate::HadamardLayer)?;
    }
    c.push(Gate::Relabel { map: relabel })?;
    Ok(c)
}

/// Rotation about `|0>` by the walk phase: `e^{iMt}` on `|0>` relative to
/// every other basis state, with `phi_t = -Mt/2` and ancilla angle
/// `-2 phi_t`.
fn rotation_about_zero(primary: usize, solutions: usize, t: f64) -> GateCircuit {
    let phi = -(solutions as f64) * t / 2.0;
    GateCircuit {
        primary,
        gates: vec![
            Gate::ZeroControlledNot,
            Gate::Rz {
                wire: Wire::Ancilla,
                angle: -2.0 * phi,
            },
            Gate::ZeroControlledNot,
        ],
    }
}

/// Circuit for `exp(-itL)` (up to global phase) on the complete graph over
/// the `M` valid indices: `G^dag`, rotation about zero, `G`.
pub fn build_walk_circuit(solutions: usize, t: f64) -> Result<GateCircuit> {
    build_walk_circuit_from(&build_state_prep(solutions)?, solutions, t)
}

pub fn build_walk_circuit_from(
    prep: &GateCircuit,
    solutions: usize,
    t: f64,
) -> Result<GateCircuit> {
    if solutions < 2 {
        return Err(CircuitError::TooFewSolutions(solutions));
    }
    let rotation = rotation_about_zero(prep.primary_qubits(), solutions, t);
    Ok(prep.inverse().then(&rotation).then(prep))
}

/// Maximum elementwise deviation of `actual` from `target` after removing a
/// global phase, fixed by the largest-magnitude entry of `target`.
pub fn phase_aligned_residual(target: &[Complex64], actual: &[Complex64]) -> f64 {
    assert_eq!(target.len(), actual.len());
    let (k, _) = target.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
        if z.norm() > best.1 {
            (i, z.norm())
        } else {
            best
        }
    });
    if actual[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    let ratio = target[k] / actual[k];
    let phase = ratio / ratio.norm();
    target
        .iter()
        .zip(actual)
        .map(|(t, a)| (a * phase - t).norm())
        .fold(0.0, f64::max)
}

/// Outcome of checking both circuits for one `(M, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub solutions: usize,
    pub t: f64,
    /// `G|0>|0>` against the uniform superposition over valid indices.
    pub prep_residual: f64,
    /// Walk circuit on valid inputs against `I + (e^{iMt} - 1)|s><s|`.
    pub walk_residual: f64,
    /// Largest probability found on basis states outside the valid indices.
    pub leakage: f64,
    /// Largest probability of finding the ancilla in `|1>`.
    pub ancilla_residual: f64,
}

impl VerificationReport {
    pub fn residual(&self) -> f64 {
        self.prep_residual.max(self.walk_residual)
    }
}

pub fn verify(solutions: usize, t: f64) -> Result<VerificationReport> {
    let m = prep_angle(solutions.max(1)).m;
    verify_relabelled(solutions, t, (0..1 << m).collect())
}

/// Verification with the valid indices relabelled by `relabel`: the walk
/// must act on the span of `|relabel[y]>`, `y < M`.
pub fn verify_relabelled(
    solutions: usize,
    t: f64,
    relabel: Vec<usize>,
) -> Result<VerificationReport> {
    let prep = build_state_prep_relabelled(solutions, relabel.clone())?;
    let walk = build_walk_circuit_from(&prep, solutions, t)?;
    let half = 1usize << prep.primary_qubits();
    let valid: Vec<usize> = relabel[..solutions].to_vec();
    let mut is_valid = vec![false; half];
    for &v in &valid {
        is_valid[v] = true;
    }
    let stray = |state: &[Complex64]| -> (f64, f64) {
        let ancilla: f64 = state[half..].iter().map(|a| a.norm_sqr()).sum();
        let leak: f64 = (0..half)
            .filter(|&y| !is_valid[y])
            .map(|y| state[y].norm_sqr() + state[y + half].norm_sqr())
            .sum();
        (leak, ancilla)
    };

    let prepared = prep.apply_to_basis(0);
    let amp = Complex64::new(1.0 / (solutions as f64).sqrt(), 0.0);
    let target: Vec<Complex64> = valid.iter().map(|_| amp).collect();
    let actual: Vec<Complex64> = valid.iter().map(|&v| prepared[v]).collect();
    let prep_residual = phase_aligned_residual(&target, &actual);
    let (mut leakage, mut ancilla_residual) = stray(&prepared);

    let mf = solutions as f64;
    let off = {
        let half = (0.5 * mf * t).sin();
        Complex64::new(-2.0 * half * half, (mf * t).sin()) / mf
    };
    let mut target = Vec::with_capacity(solutions * solutions);
    let mut actual = Vec::with_capacity(solutions * solutions);
    for (col, &input) in valid.iter().enumerate() {
        let out = walk.apply_to_basis(input);
        let (leak, anc) = stray(&out);
        leakage = leakage.max(leak);
        ancilla_residual = ancilla_residual.max(anc);
        for (row, &v) in valid.iter().enumerate() {
            let diag = if row == col { 1.0 } else { 0.0 };
            target.push(off + diag);
            actual.push(out[v]);
        }
    }
    let walk_residual = phase_aligned_residual(&target, &actual);

    Ok(VerificationReport {
        solutions,
        t,
        prep_residual,
        walk_residual,
        leakage,
        ancilla_residual,
    })
}
