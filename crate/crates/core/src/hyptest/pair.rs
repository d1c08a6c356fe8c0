use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    gen_block_ones_plus_identity, gen_identity, gen_sparse_precision, is_in_sparse_class, log_det, SparseClass,
    SymmetricMatrix,
};

/// Eigenvalue floor for positive definiteness checks on precision matrices.
pub const PD_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    /// Null precision with `m/2` blocks of size `2k`, alternative with `m`
    /// blocks of size `k`.
    BlockDiagonal { k: usize, m: usize },
    /// Identity null against an alternative in `G_r(M_p)`.
    Sparse { r: f64, m_p: f64, c0: f64 },
}

/// Simple null and alternative precision matrices `H0: Omega = A` vs
/// `H1: Omega = B`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    null: SymmetricMatrix<f64>,
    alt: SymmetricMatrix<f64>,
    structure: Structure,
}

fn require_pd(m: &SymmetricMatrix<f64>, name: &str) -> Result<()> {
    log_det(m, PD_EPS).map(|_| ()).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => e,
        other => Error::Dimension(format!("{name}: {other}")),
    })
}

fn outside_blocks_zero(m: &SymmetricMatrix<f64>, block: usize) -> bool {
    let p = m.dim();
    (0..p).all(|j| (0..p).all(|k| j / block == k / block || m.get(j, k) == 0.0))
}

impl HypothesisPair {
    pub fn block_diagonal(null: SymmetricMatrix<f64>, alt: SymmetricMatrix<f64>, k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::Dimension("k and m must be positive".into()));
        }
        if m % 2 != 0 {
            return Err(Error::Dimension(format!(
                "block test needs an even number of alternative blocks, got m = {m}"
            )));
        }
        let p = m * k;
        if null.dim() != p || alt.dim() != p {
            return Err(Error::Dimension(format!(
                "matrices must be {p} x {p} for k = {k}, m = {m}"
            )));
        }
        if !outside_blocks_zero(&null, 2 * k) {
            return Err(Error::Dimension(format!("null matrix is not block diagonal with {}x{} blocks", 2 * k, 2 * k)));
        }
        if !outside_blocks_zero(&alt, k) {
            return Err(Error::Dimension(format!("alternative matrix is not block diagonal with {k}x{k} blocks")));
        }
        require_pd(&null, "null")?;
        require_pd(&alt, "alternative")?;
        Ok(Self {
            null,
            alt,
            structure: Structure::BlockDiagonal { k, m },
        })
    }

    /// Null blocks `1_{2k x 2k} + Id`, alternative `Id`.
    pub fn block_ones_vs_identity(k: usize, m: usize) -> Result<Self> {
        if m % 2 != 0 {
            return Err(Error::Dimension(format!(
                "block test needs an even number of alternative blocks, got m = {m}"
            )));
        }
        let null = gen_block_ones_plus_identity(m / 2, 2 * k)?;
        let alt = gen_identity(m * k)?;
        Self::block_diagonal(null, alt, k, m)
    }

    pub fn sparse(alt: SymmetricMatrix<f64>, class: SparseClass) -> Result<Self> {
        let membership = is_in_sparse_class(&alt, &class)?;
        if !membership.member {
            return Err(Error::InfeasibleClass(format!("alternative is not in the class: {membership:?}")));
        }
        let null = gen_identity(alt.dim())?;
        if alt == null {
            return Err(Error::Domain("sparse alternative must differ from the identity".into()));
        }
        require_pd(&alt, "alternative")?;
        Ok(Self {
            null,
            alt,
            structure: Structure::Sparse {
                r: class.r,
                m_p: class.m_p,
                c0: class.c0,
            },
        })
    }

    /// Identity null against a generated sparse precision alternative.
    pub fn sparse_generated(p: usize, r: f64, m_p: f64, seed: u64) -> Result<Self> {
        let alt = gen_sparse_precision(p, r, m_p, seed)?;
        Self::sparse(
            alt,
            SparseClass {
                r,
                m_p,
                c0: crate::linalg::generators::SPARSE_PRECISION_C0,
            },
        )
    }

    pub fn null(&self) -> &SymmetricMatrix<f64> {
        &self.null
    }

    pub fn alt(&self) -> &SymmetricMatrix<f64> {
        &self.alt
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn dim(&self) -> usize {
        self.null.dim()
    }

    /// The same pair with null and alternative exchanged structure-free;
    /// used to simulate under the alternative.
    pub fn truth(&self, under_alternative: bool) -> &SymmetricMatrix<f64> {
        if under_alternative {
            &self.alt
        } else {
            &self.null
        }
    }
}
