use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // arithmetic
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible; the declared monomial basis is not linearly independent")]
    NotInvertible,
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("element is not real: {0}")]
    NotReal(String),
    #[error("interval refinement exhausted its iteration budget: {0}")]
    PrecisionExhausted(String),
    #[error("invalid generator `{name}`: {reason}")]
    InvalidGenerator { name: String, reason: String },
    #[error("numeric screen found a small integer relation {relation:?}: {what}")]
    IndependenceSuspect { what: String, relation: Vec<i64> },

    // lattices and tori
    #[error("period matrix does not span a lattice: {0}")]
    DegenerateLattice(String),
    #[error("D^2 is not d times the identity")]
    NotSquareRootOfD,
    #[error("D does not preserve the lattice: {0}")]
    NotAnEndomorphism(String),
    #[error("d = {0} is a perfect square")]
    PerfectSquare(i64),
    #[error("m*n = {0} is a perfect square")]
    SquareProduct(i64),

    // endomorphisms
    #[error("basis products leave the Z-span of the ring basis")]
    NotClosed,
    #[error("unrecognized algebra structure: {0}")]
    UnrecognizedStructure(String),
    #[error("not a polarization: {0}")]
    NotPolarization(String),
    #[error("Rosati image leaves End_Q: {0}")]
    NotStable(String),
    #[error("no symmetric element with a non-square discriminant")]
    NoSuchElement,
    #[error("symmetric element has a non-positive discriminant {0}")]
    NegativeDiscriminant(String),
    #[error("symmetric element does not satisfy a quadratic equation over Q")]
    NotQuadratic,
    #[error("oracle bound {0} exceeds the maximum of 3")]
    BoundTooLarge(u32),

    // Neron-Severi
    #[error("operation requires a nonscalar multiplication")]
    ScalarD,
    #[error("form is not in N_D: {0}")]
    NotInND(String),
    #[error("e1, e2, De1, De2 do not span the lattice rationally")]
    NotABasis,
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("form does not induce an endomorphism: {0}")]
    NotInEndo(String),

    // builders
    #[error("failed to generate a nondegenerate lattice after {0} draws")]
    GenerationFailed(usize),

    // documents
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a failure
    /// inside the computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::PrecisionExhausted(_)
                | Error::NotInvertible
                | Error::NotClosed
                | Error::NotStable(_)
                | Error::NegativeDiscriminant(_)
                | Error::NotQuadratic
        )
    }
}
