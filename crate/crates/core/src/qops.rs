//! Truncated Fock-space operators, Pauli matrices, spin-j angular momentum
//! and embeddings into the composite `matter ⊗ field` space.
//!
//! Conventions: the qubit basis is ordered (ground, excited) with
//! `σz = diag(−1, +1)`; spin-j bases are ordered by ascending `m`, so the
//! j = 1/2 case coincides with the qubit ordering and `σk = 2 Jk`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, OperatorMatrix, C64};
use crate::math;

/// Oscillator space `|0⟩ … |cutoff⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(invalid("cutoff", "Fock cutoff must be at least 1"));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }
}

/// Ladder operators of a truncated oscillator.
#[derive(Debug, Clone)]
pub struct FockOps {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub n_op: OperatorMatrix,
}

impl FockOps {
    /// `a + a†`.
    pub fn position(&self) -> OperatorMatrix {
        (&self.a + &self.a_dag).hermitian_part()
    }

    /// `i(a† − a)`.
    pub fn momentum(&self) -> OperatorMatrix {
        (&self.a_dag - &self.a).scale(C64::new(0.0, 1.0)).hermitian_part()
    }
}

/// `a` with `a[n−1][n] = √n`, its adjoint, and `a†a`.
pub fn fock_ops(space: FockSpace) -> FockOps {
    let dim = space.dim();
    let a = OperatorMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            C64::new(math::sqrt(j as f64), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a_dag = a.adjoint();
    let diag: alloc::vec::Vec<f64> = (0..dim).map(|n| n as f64).collect();
    FockOps {
        a,
        a_dag,
        n_op: OperatorMatrix::from_diag(&diag),
    }
}

/// Pauli matrices in the (ground, excited) basis.
#[derive(Debug, Clone)]
pub struct Pauli {
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
    pub z: OperatorMatrix,
}

pub fn pauli() -> Pauli {
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let x = OperatorMatrix::from_real_row_major(2, &[0.0, 1.0, 1.0, 0.0])
        .expect("2x2")
        .hermitian_part();
    let y = OperatorMatrix::from_row_major(2, alloc::vec![zero, i, -i, zero])
        .expect("2x2")
        .hermitian_part();
    let z = OperatorMatrix::from_diag(&[-1.0, 1.0]);
    Pauli { x, y, z }
}

/// Spin-j space of dimension `two_j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinSpace {
    two_j: usize,
}

impl SpinSpace {
    pub fn new(two_j: usize) -> Result<Self> {
        if two_j < 1 {
            return Err(invalid("two_j", "spin must satisfy 2j >= 1"));
        }
        Ok(Self { two_j })
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }
}

#[derive(Debug, Clone)]
pub struct SpinOps {
    pub jx: OperatorMatrix,
    pub jy: OperatorMatrix,
    pub jz: OperatorMatrix,
}

impl SpinOps {
    /// `J² = Jx² + Jy² + Jz²`.
    pub fn casimir(&self) -> OperatorMatrix {
        let sum = &(&self.jx.matmul(&self.jx) + &self.jy.matmul(&self.jy)) + &self.jz.matmul(&self.jz);
        sum.hermitian_part()
    }
}

/// Angular momentum matrices in the `|j, m⟩` basis, ascending `m`.
pub fn spin_ops(space: SpinSpace) -> SpinOps {
    let dim = space.dim();
    let j = space.j();
    let m_of = |k: usize| -j + k as f64;
    // J+ |m⟩ = √(j(j+1) − m(m+1)) |m+1⟩, i.e. entry [k+1][k].
    let raise = OperatorMatrix::from_fn(dim, |row, col| {
        if row == col + 1 {
            let m = m_of(col);
            C64::new(math::sqrt(j * (j + 1.0) - m * (m + 1.0)), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let lower = raise.adjoint();
    let jx = (&raise + &lower).scale_real(0.5).hermitian_part();
    let jy = (&raise - &lower).scale(C64::new(0.0, -0.5)).hermitian_part();
    let diag: alloc::vec::Vec<f64> = (0..dim).map(m_of).collect();
    SpinOps {
        jx,
        jy,
        jz: OperatorMatrix::from_diag(&diag),
    }
}

/// Which tensor factor an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Matter,
    Field,
}

/// `op ⊗ I` (matter) or `I ⊗ op` (field) on `matter ⊗ field`.
pub fn embed(op: &OperatorMatrix, slot: Slot, matter_dim: usize, field_dim: usize) -> Result<OperatorMatrix> {
    let expected = match slot {
        Slot::Matter => matter_dim,
        Slot::Field => field_dim,
    };
    if op.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: op.dim(),
        });
    }
    match slot {
        Slot::Matter => kron(op, &OperatorMatrix::identity(field_dim)),
        Slot::Field => kron(&OperatorMatrix::identity(matter_dim), op),
    }
}
