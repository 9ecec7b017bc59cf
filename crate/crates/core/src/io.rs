//! JSON encoding of problem files.
//!
//! A matrix is either dense (array of rows) or a triplet list with explicit
//! shape:
//!
//! ```json
//! {"shape": [4, 4], "rows": [0, 1], "cols": [0, 1], "vals": [1.0, 1.0]}
//! ```
//!
//! A dense `[]` is read as a matrix with zero rows and the column count the
//! surrounding document implies.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::model::ProblemData;

/// Matrices with at most this many cells are written densely.
const DENSE_WRITE_LIMIT: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Dense(Vec<Vec<f64>>),
    Triplets(TripletRepr),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletRepr {
    pub shape: [usize; 2],
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl MatrixRepr {
    pub fn to_matrix(&self, cols_hint: usize) -> Result<SparseMatrix> {
        match self {
            MatrixRepr::Dense(rows) => {
                let ncols = rows.first().map_or(cols_hint, Vec::len);
                SparseMatrix::from_dense(rows, ncols).map_err(|e| Error::Format(e.to_string()))
            }
            MatrixRepr::Triplets(t) => {
                if t.rows.len() != t.cols.len() || t.rows.len() != t.vals.len() {
                    return Err(Error::Format("triplet arrays differ in length".into()));
                }
                let entries = t.rows.iter().zip(&t.cols).zip(&t.vals).map(|((&r, &c), &v)| (r, c, v));
                SparseMatrix::from_triplets(t.shape[0], t.shape[1], entries).map_err(|e| Error::Format(e.to_string()))
            }
        }
    }

    pub fn from_matrix(m: &SparseMatrix) -> Self {
        if m.nrows() * m.ncols() <= DENSE_WRITE_LIMIT {
            return MatrixRepr::Dense(m.to_dense());
        }
        Self::triplets(m)
    }

    pub fn triplets(m: &SparseMatrix) -> Self {
        let t = m.triplets_row_major();
        MatrixRepr::Triplets(TripletRepr {
            shape: [m.nrows(), m.ncols()],
            rows: t.iter().map(|e| e.0).collect(),
            cols: t.iter().map(|e| e.1).collect(),
            vals: t.iter().map(|e| e.2).collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub num_partitions: usize,
    #[serde(rename = "A")]
    pub a: MatrixRepr,
    #[serde(rename = "B_blocks")]
    pub b_blocks: Vec<MatrixRepr>,
    #[serde(rename = "E")]
    pub e: MatrixRepr,
    pub s: Vec<f64>,
    pub r_blocks: Vec<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_problem(p: &ProblemData) -> Self {
        Self {
            n: p.n(),
            num_partitions: p.num_partitions(),
            a: MatrixRepr::from_matrix(p.a()),
            b_blocks: p.b_blocks().iter().map(MatrixRepr::from_matrix).collect(),
            e: MatrixRepr::from_matrix(p.e()),
            s: p.s().to_vec(),
            r_blocks: p.r_blocks().to_vec(),
        }
    }

    pub fn into_problem(self) -> Result<ProblemData> {
        let n = self.n;
        let b_blocks = self
            .b_blocks
            .iter()
            .zip(self.r_blocks.iter().map(Vec::len).chain(std::iter::repeat(0)))
            .map(|(b, width)| b.to_matrix(width))
            .collect::<Result<Vec<_>>>()?;
        let p = ProblemData::new(
            n,
            self.num_partitions,
            self.a.to_matrix(n)?,
            b_blocks,
            self.e.to_matrix(n)?,
            self.s,
            self.r_blocks,
        );
        let finite = p.a().all_finite()
            && p.e().all_finite()
            && p.b_blocks().iter().all(SparseMatrix::all_finite)
            && p.s().iter().chain(p.r_blocks().iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Format("non-finite number in problem file".into()));
        }
        Ok(p)
    }
}

pub fn problem_from_json(text: &str) -> Result<ProblemData> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_problem()
}

pub fn problem_to_json(p: &ProblemData) -> String {
    serde_json::to_string_pretty(&ProblemFile::from_problem(p)).expect("problem file serializes")
}

/// Triplet encoding as a JSON value, always sparse.
pub fn matrix_triplets_json(m: &SparseMatrix) -> Value {
    serde_json::to_value(MatrixRepr::triplets(m)).expect("matrix serializes")
}
