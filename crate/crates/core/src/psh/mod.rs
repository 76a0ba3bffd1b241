//! Plurisubharmonicity tools: Levi forms, mollification and the regularized maximum.

pub mod kernel;
pub mod levi;
pub mod mollify;
pub mod regmax;

pub use kernel::{bump, smoothstep, RegMaxKernel, BUMP_NORMALIZATION};
pub use levi::{
    check_pluriharmonic, generalized_max_eigenvalue, hermitian_eigenvalues, jacobi_eigenvalues, levi_form,
    min_levi_eigenvalue, LeviMatrix, PluriharmonicCheck, PshReport,
};
pub use mollify::{mollify, MollifierRule};
pub use regmax::{reg_max_fields, reg_max_fields_with, reg_max_scalar};
