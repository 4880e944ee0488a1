use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different prime fields ({0} vs {1})")]
    IncompatibleField(u64, u64),
    #[error("order of the zero function is undefined")]
    ZeroFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("point ({x}, {y}) does not satisfy the curve equation")]
    PointNotOnCurve { x: u64, y: u64 },
    #[error("divisor is not principal: {0}")]
    NotPrincipal(String),
    #[error("function has zeros or poles outside the rational points")]
    NonRationalSupport,
    #[error("curve coefficients are not a valid short Weierstrass model: {0}")]
    InvalidCurve(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("section is invalid: {0}")]
    InvalidSection(String),
    #[error("sections are not disjoint (intersection number {0})")]
    NotDisjoint(u64),
    #[error("sections coincide as projective pairs")]
    EqualSections,
    #[error("gamma is not a global section of the twisting class: {0}")]
    NotGlobalSection(String),
    #[error("base field too large for certified search (p = {0})")]
    FieldTooLarge(u64),
    #[error("enumeration budget of {0} candidates exhausted before certification")]
    BudgetExhausted(u64),
    #[error("transition matrix has identically zero determinant at index {0}")]
    SingularTransition(usize),
    #[error("special points must be distinct: {0}")]
    DuplicateSpecial(String),
    #[error("{0} special points but {1} transition matrices")]
    ShapeMismatch(usize, usize),
    #[error("no auxiliary point available outside the special fibers")]
    AuxPointsExhausted,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl From<ArithError> for BundleError {
    fn from(e: ArithError) -> Self {
        BundleError::Curve(CurveError::Arith(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl From<ArithError> for ParseError {
    fn from(e: ArithError) -> Self {
        ParseError::Curve(CurveError::Arith(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("descriptors live over different base curves")]
    BaseMismatch,
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("descriptor undetermined: {0}")]
    Undetermined(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

impl From<CurveError> for DescriptorError {
    fn from(e: CurveError) -> Self {
        DescriptorError::Bundle(BundleError::Curve(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("center is inconsistent with the descriptor: {0}")]
    InconsistentCenter(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

impl From<CurveError> for TransformError {
    fn from(e: CurveError) -> Self {
        TransformError::Bundle(BundleError::Curve(e))
    }
}

impl From<ArithError> for TransformError {
    fn from(e: ArithError) -> Self {
        TransformError::Bundle(BundleError::from(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("descriptor class is not maximal: {0}")]
    NotMaximalClass(String),
    #[error("two-torsion of the base is not fully rational; the Klein kernel needs a split cubic")]
    CharTwoOutOfScope,
    #[error("the two-torsion subgroup has fewer than four rational points")]
    IncompleteTorsion,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}
