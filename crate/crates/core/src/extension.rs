//! Central extensions A_θ and the quotient A/Ann(A).

use crate::algebra::{unit, Algebra, AlgebraError};
use crate::cohomology::{self, BilinearForm, CohomologyError};
use crate::linalg::Matrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error("form {index} is not a cocycle: {form}")]
    NotACocycle { index: usize, form: String },
    #[error("the annihilator is trivial")]
    TrivialAnnihilator,
    #[error("unknown nabla {0}")]
    UnknownNabla(String),
    #[error("representative is not in T_s: {0}")]
    NotInTs(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A ⊕ V with e_i e_j = (old product) + Σ_f θ_f(e_i, e_j) e_{n+f}.
pub fn central_extension(base: &Algebra, forms: &[BilinearForm]) -> Result<Algebra, ExtensionError> {
    for (index, f) in forms.iter().enumerate() {
        if f.n != base.n || !cohomology::is_cocycle(base, f) {
            return Err(ExtensionError::NotACocycle { index: index + 1, form: f.to_string() });
        }
    }
    Ok(extend_unchecked(base, forms))
}

pub fn extend_unchecked(base: &Algebra, forms: &[BilinearForm]) -> Algebra {
    let n = base.n;
    let total = n + forms.len();
    let mut a = Algebra::zero(total);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                a.set(i, j, k, base.get(i, j, k).clone());
            }
            for (f, form) in forms.iter().enumerate() {
                a.set(i, j, n + f, form.get(i, j).clone());
            }
        }
    }
    a.constraints = base.constraints.clone();
    a.collect_params();
    a
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: Algebra,
    /// Induced cocycles, one per annihilator basis vector.
    pub forms: Vec<BilinearForm>,
    /// Adapted basis: complement vectors first, then the annihilator basis.
    pub basis: Matrix,
}

pub fn quotient_by_annihilator_component(a: &Algebra) -> Result<Quotient, ExtensionError> {
    let n = a.n;
    let ann = a.annihilator()?;
    let d = ann.dim();
    if d == 0 {
        return Err(ExtensionError::TrivialAnnihilator);
    }
    let mut basis: Matrix = (0..n).filter(|c| !ann.pivots.contains(c)).map(|c| unit(n, c)).collect();
    basis.extend(ann.rows.iter().cloned());
    let b = a.change_basis(&basis)?;
    let m = n - d;
    let mut q = Algebra::zero(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                q.set(i, j, k, b.get(i, j, k).clone());
            }
        }
    }
    q.constraints = a.constraints.clone();
    q.collect_params();
    let forms = (0..d)
        .map(|f| {
            let mut form = BilinearForm::zero(m);
            for i in 0..m {
                for j in 0..m {
                    form.m[i * m + j] = b.get(i, j, m + f).clone();
                }
            }
            form
        })
        .collect();
    Ok(Quotient { algebra: q, forms, basis })
}

/// Quotient then extend again; compare with the tensor in the adapted basis.
pub fn quotient_round_trip(a: &Algebra) -> Result<bool, ExtensionError> {
    let q = quotient_by_annihilator_component(a)?;
    if q.algebra.check_right_leibniz().is_some() {
        return Ok(false);
    }
    let ext = central_extension(&q.algebra, &q.forms)?;
    let adapted = a.change_basis(&q.basis)?;
    Ok(ext.tensor_eq(&adapted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn int(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    #[test]
    fn first_extension_of_n01() {
        let n01 = Algebra::from_products(3, &[(1, 1, 2, int(1))]);
        let w = [BilinearForm::delta(3, 2, 1), BilinearForm::delta(3, 3, 1)];
        let l = central_extension(&n01, &w).unwrap();
        let expect = Algebra::from_products(5, &[(1, 1, 2, int(1)), (2, 1, 4, int(1)), (3, 1, 5, int(1))]);
        assert!(l.tensor_eq(&expect));
        assert!(l.check_right_leibniz().is_none());
        let q = quotient_by_annihilator_component(&l).unwrap();
        assert_eq!(q.algebra.n, 3);
        assert!(q.algebra.tensor_eq(&n01));
        assert!(quotient_round_trip(&l).unwrap());
    }

    #[test]
    fn zero_form_splits_off_a_line() {
        let n01 = Algebra::from_products(3, &[(1, 1, 2, int(1))]);
        let s = central_extension(&n01, &[BilinearForm::zero(3)]).unwrap();
        assert!(s.tensor_eq(&n01.direct_sum(&Algebra::zero(1))));
    }

    #[test]
    fn non_cocycles_are_rejected() {
        let l1 = Algebra::from_products(3, &[(1, 1, 2, int(1)), (2, 1, 3, int(1))]);
        let bad = BilinearForm::delta(3, 1, 2);
        assert!(matches!(central_extension(&l1, &[bad]), Err(ExtensionError::NotACocycle { .. })));
    }

    #[test]
    fn trivial_annihilator_is_an_error() {
        let a = Algebra::from_products(1, &[(1, 1, 1, int(1))]);
        assert_eq!(quotient_by_annihilator_component(&a).unwrap_err(), ExtensionError::TrivialAnnihilator);
    }
}
