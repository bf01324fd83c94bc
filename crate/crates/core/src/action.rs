//! Automorphism families and their action on cohomology classes.

use crate::algebra::{Algebra, AlgebraError};
use crate::cohomology::{self, BilinearForm, CohomologyError};
use crate::linalg::{self, Matrix, Pivoting};
use crate::scalar::{Gq, Scalar, Var};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("transformed form is not in the span of the nabla basis and B^2")]
    BasisExpansionFailure,
    #[error("assignment makes the matrix singular")]
    SingularAssignment,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

impl From<linalg::LinalgError> for ActionError {
    fn from(e: linalg::LinalgError) -> Self {
        ActionError::Algebra(AlgebraError::Linalg(e))
    }
}

/// Column j of `phi` is φ(e_j).
#[derive(Clone, Debug)]
pub struct AutFamily {
    pub phi: Matrix,
}

impl AutFamily {
    pub fn identity(n: usize) -> AutFamily {
        AutFamily { phi: linalg::identity(n) }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.phi
            .iter()
            .map(|row| row.iter().zip(v.iter()).fold(Scalar::zero(), |a, (x, y)| if x.is_zero() || y.is_zero() { a } else { a.add(&x.mul(y)) }))
            .collect()
    }

    fn column(&self, j: usize) -> Vec<Scalar> {
        self.phi.iter().map(|r| r[j].clone()).collect()
    }

    pub fn instantiate(&self, at: &HashMap<Var, Scalar>) -> Result<AutFamily, ActionError> {
        let phi = self
            .phi
            .iter()
            .map(|r| r.iter().map(|x| x.substitute(at).map_err(|e| ActionError::Algebra(e.into()))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AutFamily { phi })
    }

    pub fn compose(&self, o: &AutFamily) -> AutFamily {
        AutFamily { phi: linalg::mat_mul(&self.phi, &o.phi) }
    }
}

/// First (i, j) (1-based) with φ(e_i e_j) ≠ φ(e_i)φ(e_j), if any.
pub fn verify_aut_family(a: &Algebra, fam: &AutFamily) -> Option<(usize, usize)> {
    let n = a.n;
    let cols: Vec<Vec<Scalar>> = (0..n).map(|j| fam.column(j)).collect();
    for i in 0..n {
        for j in 0..n {
            let lhs = fam.apply(&a.product_of_basis(i, j));
            let rhs = a.multiply(&cols[i], &cols[j]).expect("dimensions agree");
            if lhs.iter().zip(rhs.iter()).any(|(x, y)| !x.equals(y)) {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

/// (φθ)(x, y) = θ(φx, φy), i.e. the matrix φᵀ M φ.
pub fn act_on_cocycle(fam: &AutFamily, t: &BilinearForm) -> BilinearForm {
    let n = t.n;
    let m: Matrix = (0..n).map(|i| (0..n).map(|j| t.get(i, j).clone()).collect()).collect();
    let r = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&fam.phi), &m), &fam.phi);
    BilinearForm::from_flat(n, r.into_iter().flatten().collect())
}

/// Coordinates of a cocycle along the nabla list, modulo B².
pub fn nabla_coordinates(a: &Algebra, nabla: &[BilinearForm], t: &BilinearForm) -> Result<Vec<Scalar>, ActionError> {
    let b2 = cohomology::coboundary_space(a)?;
    let mut basis: Vec<Vec<Scalar>> = nabla.iter().map(|f| f.m.clone()).collect();
    basis.extend(b2.into_iter().map(|f| f.m));
    let x = linalg::express_in_span(&basis, &t.m, &Pivoting::Generic)?.ok_or(ActionError::BasisExpansionFailure)?;
    Ok(x[..nabla.len()].to_vec())
}

#[derive(Clone, Debug)]
pub struct ActionTable {
    pub name: String,
    pub base: String,
    pub nabla: Vec<BilinearForm>,
    pub family: AutFamily,
    /// Claimed α_i* in terms of a1, a2, ... and the family parameters.
    pub claims: Vec<Scalar>,
}

#[derive(Clone, Debug)]
pub struct ActionCheck {
    pub aut_counterexample: Option<(usize, usize)>,
    /// (1-based index, computed minus claimed) for each failing coordinate.
    pub mismatches: Vec<(usize, Scalar)>,
}

impl ActionCheck {
    pub fn matches(&self) -> bool {
        self.aut_counterexample.is_none() && self.mismatches.is_empty()
    }
}

pub fn generic_cocycle(nabla: &[BilinearForm]) -> BilinearForm {
    let n = nabla[0].n;
    let mut t = BilinearForm::zero(n);
    for (i, f) in nabla.iter().enumerate() {
        t = t.add(&f.scale(&Scalar::var(&format!("a{}", i + 1))));
    }
    t
}

pub fn verify_action_table(a: &Algebra, table: &ActionTable) -> Result<ActionCheck, ActionError> {
    let aut_counterexample = verify_aut_family(a, &table.family);
    let t = generic_cocycle(&table.nabla);
    let image = act_on_cocycle(&table.family, &t);
    let coords = nabla_coordinates(a, &table.nabla, &image)?;
    let mismatches = coords
        .iter()
        .zip(table.claims.iter())
        .enumerate()
        .filter_map(|(i, (got, want))| {
            let d = got.sub(want);
            if d.is_zero() {
                None
            } else {
                Some((i + 1, d))
            }
        })
        .collect();
    Ok(ActionCheck { aut_counterexample, mismatches })
}

/// Whether an instantiated φ maps span(W_from) onto span(W_to) modulo B².
pub fn orbit_transporter_check(
    a: &Algebra,
    fam: &AutFamily,
    assignment: &HashMap<Var, Gq>,
    w_from: &[BilinearForm],
    w_to: &[BilinearForm],
) -> Result<bool, ActionError> {
    let sub: HashMap<Var, Scalar> = assignment.iter().map(|(v, x)| (*v, Scalar::constant(x.clone()))).collect();
    let phi = fam.instantiate(&sub)?;
    if linalg::determinant(&phi.phi).is_zero() {
        return Err(ActionError::SingularAssignment);
    }
    let b2: Vec<Vec<Scalar>> = cohomology::coboundary_space(a)?.into_iter().map(|f| f.m).collect();
    let nn = a.n * a.n;
    let images: Vec<Vec<Scalar>> = w_from.iter().map(|f| act_on_cocycle(&phi, f).m).collect();
    let targets: Vec<Vec<Scalar>> = w_to.iter().map(|f| f.m.clone()).collect();
    let piv = Pivoting::Generic;
    let with = |extra: &[Vec<Scalar>]| -> Result<usize, ActionError> {
        let mut m = b2.clone();
        m.extend(extra.iter().cloned());
        Ok(linalg::rank(m, nn, &piv)?)
    };
    let r_img = with(&images)?;
    let r_to = with(&targets)?;
    let both: Vec<Vec<Scalar>> = images.iter().chain(targets.iter()).cloned().collect();
    Ok(r_img == r_to && with(&both)? == r_to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn n01() -> Algebra {
        Algebra::from_products(3, &[(1, 1, 2, Scalar::one())])
    }

    fn n01_family(corner: &str) -> AutFamily {
        let p = |s: &str| parse_scalar(s).unwrap();
        AutFamily {
            phi: vec![
                vec![p("x"), p("0"), p("0")],
                vec![p("y"), p(corner), p("u")],
                vec![p("z"), p("0"), p("t")],
            ],
        }
    }

    #[test]
    fn n01_family_is_an_automorphism_family() {
        assert_eq!(verify_aut_family(&n01(), &n01_family("x^2")), None);
        assert_eq!(verify_aut_family(&n01(), &AutFamily::identity(3)), None);
        assert_eq!(verify_aut_family(&n01(), &n01_family("x")), Some((1, 1)));
    }

    #[test]
    fn identity_acts_trivially() {
        let t = BilinearForm::parse(3, "D21 + 2*D33").unwrap();
        assert_eq!(act_on_cocycle(&AutFamily::identity(3), &t), t);
    }

    #[test]
    fn transporter_identity() {
        let w = [BilinearForm::delta(3, 2, 1)];
        assert!(orbit_transporter_check(&n01(), &AutFamily::identity(3), &HashMap::new(), &w, &w).unwrap());
    }
}
