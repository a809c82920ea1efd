//! Spectral types of Fuchsian systems, Katz's middle convolution and
//! connection coefficients.

pub mod connection;
pub mod enumerate;
pub mod error;
pub mod katz;
pub mod linalg;
pub mod matrixmc;
pub mod paramform;
pub mod rational;
pub mod rootlattice;
pub mod spectype;

pub use enumerate::{
    count_table, enumerate_basic, enumerate_basic_with, enumerate_rigid, enumerate_rigid_with,
    CountTable, EnumerateOptions, EnumerationReport,
};
pub use connection::{
    connection_formula, connection_formula_pinned, even_family_shape, fuchs_value,
    hypergeometric_shape, hypergeometric_substitution, rigid_decompositions,
    rigid_decompositions_pinned, series_limit_oracle, GammaFormula, RiemannScheme,
};
pub use error::{Error, Result};
pub use katz::{
    classify, d_ell, ds_existence, nilpotent_realizable, partial_ell, partial_max, pidx, reduce,
    reflect_by_rigid, special_family, Classification, ReductionStep, ReductionTrace, Scheme,
    SpecialKind, Verdict,
};
pub use linalg::RationalMatrix;
pub use matrixmc::{
    addition, build_l, centralizer_dim, check_mc_assumptions, construct_rigid,
    construct_rigid_random, convolution, middle_convolution, orbit_dims, predict_mc,
    spectral_data_of, MatrixTuple, OrbitDims, SpectralData,
};
pub use paramform::ParamForm;
pub use rational::Q;
pub use rootlattice::{
    alpha_aligned, alpha_of, classify_root, inner, norm_alpha0, reflect_by, tuple_of, RootClass,
    RootVector, SimpleRoot,
};
pub use spectype::{
    canonicalize, dominance_leq, gcd_of, idx, idx_aligned, scale_add, AlignedTuple, CanonicalForm,
    Partition, SpectralType,
};
