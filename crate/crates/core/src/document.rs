//! JSON input documents: algebra definitions for `verify` and `reconstruct`,
//! tensors for `norm`. Complex numbers are `[re, im]` pairs and matrices are
//! row-major.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::csalg::{CStarAlgebra, Tensor};
use crate::error::{Error, Result};
use crate::examples::{function_algebra, group_algebra, monoid_function_algebra, FiniteGroup};
use crate::hopf::Comultiplication;
use crate::linalg::C64;

pub type Complex = [f64; 2];

pub fn to_complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn from_complex(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// An algebra together with its comultiplication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraDocument {
    /// `C(G)` for the group with the given table.
    FunctionAlgebra {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        options: Option<DocumentOptions>,
    },
    /// The group algebra in the regular representation.
    GroupAlgebra {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        options: Option<DocumentOptions>,
    },
    /// `C(M)` for a monoid table (associative with identity).
    Monoid {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        options: Option<DocumentOptions>,
    },
    /// `⊕M_{n_i}` with its matrix-unit basis and the `dim² × dim` matrix of
    /// `φ`; row `i·dim + j` holds the coefficient of `e_i⊗e_j`.
    Explicit {
        block_dims: Vec<usize>,
        comultiplication: Vec<Vec<Complex>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        options: Option<DocumentOptions>,
    },
}

fn check_table(order: usize, table: &[Vec<usize>]) -> Result<()> {
    if table.len() != order {
        return Err(Error::InvalidInput(format!("table has {} rows, expected order {order}", table.len())));
    }
    Ok(())
}

impl AlgebraDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            AlgebraDocument::FunctionAlgebra { .. } => "function_algebra",
            AlgebraDocument::GroupAlgebra { .. } => "group_algebra",
            AlgebraDocument::Monoid { .. } => "monoid",
            AlgebraDocument::Explicit { .. } => "explicit",
        }
    }

    pub fn options(&self) -> Option<&DocumentOptions> {
        match self {
            AlgebraDocument::FunctionAlgebra { options, .. }
            | AlgebraDocument::GroupAlgebra { options, .. }
            | AlgebraDocument::Monoid { options, .. }
            | AlgebraDocument::Explicit { options, .. } => options.as_ref(),
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        self.options().and_then(|o| o.tolerance)
    }

    /// Builds the algebra and comultiplication. Group tables are validated.
    pub fn build(&self) -> Result<(Arc<CStarAlgebra>, Comultiplication)> {
        match self {
            AlgebraDocument::FunctionAlgebra { order, table, .. } => {
                check_table(*order, table)?;
                function_algebra(&FiniteGroup::new(table.clone())?)
            }
            AlgebraDocument::GroupAlgebra { order, table, .. } => {
                check_table(*order, table)?;
                group_algebra(&FiniteGroup::new(table.clone())?)
            }
            AlgebraDocument::Monoid { order, table, .. } => {
                check_table(*order, table)?;
                monoid_function_algebra(table)
            }
            AlgebraDocument::Explicit { block_dims, comultiplication, .. } => {
                let alg = CStarAlgebra::full(block_dims)?;
                let d = alg.dim();
                if comultiplication.len() != d * d || comultiplication.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidInput(format!(
                        "comultiplication must be a {}×{d} matrix for dimension {d}",
                        d * d
                    )));
                }
                let m = DMatrix::from_fn(d * d, d, |i, j| from_complex(&comultiplication[i][j]));
                let comult = Comultiplication::from_matrix(&alg, m)?;
                Ok((alg, comult))
            }
        }
    }
}

/// A tensor in `A ⊗ A` for `A = ⊕M_{n_i}` with the matrix-unit basis, given
/// either by its coordinates (index `i·dim + j` for `e_i⊗e_j`) or as a sum of
/// elementary tensors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub block_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TensorTerm>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorTerm {
    pub left: Vec<Complex>,
    pub right: Vec<Complex>,
}

impl TensorDocument {
    pub fn build(&self) -> Result<Tensor> {
        let alg = CStarAlgebra::full(&self.block_dims)?;
        let d = alg.dim();
        let legs = vec![alg.clone(), alg.clone()];
        let vector = |v: &[Complex], n: usize, what: &str| -> Result<DVector<C64>> {
            if v.len() != n {
                return Err(Error::InvalidInput(format!("{what} has {} entries, expected {n}", v.len())));
            }
            Ok(DVector::from_iterator(n, v.iter().map(from_complex)))
        };
        match (&self.coords, &self.terms) {
            (Some(c), None) => Tensor::new(legs, vector(c, d * d, "coords")?),
            (None, Some(terms)) => {
                let mut x = Tensor::zeros(legs);
                for (k, t) in terms.iter().enumerate() {
                    let p = alg.element(vector(&t.left, d, &format!("term {k} left"))?)?;
                    let q = alg.element(vector(&t.right, d, &format!("term {k} right"))?)?;
                    x = x.try_add(&Tensor::elementary(&[&p, &q]))?;
                }
                Ok(x)
            }
            _ => Err(Error::InvalidInput("give exactly one of coords and terms".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let doc = AlgebraDocument::FunctionAlgebra { order: 2, table: vec![vec![0, 1], vec![1, 0]], options: None };
        let s = serde_json::to_string_pretty(&doc).unwrap();
        let back: AlgebraDocument = serde_json::from_str(&s).unwrap();
        assert_eq!(back, doc);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), s);
        assert!(s.contains("\"kind\": \"function_algebra\""));
    }

    #[test]
    fn explicit_shape_is_checked() {
        let doc = AlgebraDocument::Explicit { block_dims: vec![1], comultiplication: vec![], options: None };
        assert!(matches!(doc.build(), Err(Error::InvalidInput(_))));
        let doc = AlgebraDocument::Explicit { block_dims: vec![1], comultiplication: vec![vec![[1.0, 0.0]]], options: None };
        assert_eq!(doc.build().unwrap().0.dim(), 1);
    }

    #[test]
    fn tensor_terms_and_coords_agree() {
        let terms = TensorDocument {
            block_dims: vec![1, 1],
            coords: None,
            terms: Some(vec![TensorTerm { left: vec![[1.0, 0.0], [0.0, 0.0]], right: vec![[0.0, 0.0], [2.0, 0.0]] }]),
        };
        let coords = TensorDocument {
            block_dims: vec![1, 1],
            coords: Some(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 0.0], [0.0, 0.0]]),
            terms: None,
        };
        assert_eq!(terms.build().unwrap().coords(), coords.build().unwrap().coords());
        let both = TensorDocument { terms: terms.terms.clone(), ..coords };
        assert!(both.build().is_err());
    }
}
