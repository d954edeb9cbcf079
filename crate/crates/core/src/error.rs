use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // group construction
    #[error("table is not a Latin square: {0}")]
    TableNotLatin(String),
    #[error("operation is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
    #[error("group order {order} exceeds the configured bound {bound}")]
    OrderBoundExceeded { order: usize, bound: usize },

    // subgroup machinery
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("prime {prime} does not divide the group order {order}")]
    PrimeDoesNotDivideOrder { prime: u64, order: usize },
    #[error("group is not a p-group")]
    NotPGroup,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("homomorphism is not surjective")]
    NotSurjective,

    // actions and contexts
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("action is not faithful: element {0} acts trivially")]
    NonFaithfulAction(usize),
    #[error("base size {0}^{1} exceeds the representable bound")]
    BaseTooLarge(usize, usize),
    #[error("invalid base vector: {0}")]
    InvalidBaseVector(String),
    #[error("elements belong to different wreath contexts")]
    ContextMismatch,
    #[error("invalid winning set: {0}")]
    InvalidWinSet(String),

    // strategies
    #[error("path budget exceeded: {needed} adversary paths > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("search budget exhausted after {states} belief states")]
    SearchBudgetExceeded { states: usize },
    #[error("belief cap exceeded: |K| = {k_size} > cap {cap}")]
    BeliefCapExceeded { k_size: usize, cap: usize },

    // synthesis
    #[error("not a permutation of the non-identity elements")]
    NotAPermutation,
    #[error("generators do not generate the group")]
    DoesNotGenerate,
    #[error("group is not generated by involutions")]
    NotInvolutionGenerated,
    #[error("input strategy does not verify: {0}")]
    InputStrategyInvalid(String),
    #[error("lifted strategy failed verification")]
    LiftedStrategyFailedVerification,
    #[error("switch and spin groups are not p-groups for a common prime")]
    NotSamePrime,
    #[error("base case strategy failed verification")]
    BaseCaseVerificationFailed,
    #[error("no strategy within depth {max_depth} (reachable belief graph exhausted: {exhausted})")]
    NoStrategyWithinDepth { max_depth: usize, exhausted: bool },
    #[error("no covering walk within {0} Hamiltonian search nodes")]
    HamiltonianBudgetExceeded(usize),
    #[error("constructed strategy is not surjective: {0}")]
    ConstructionFailedVerification(String),
    #[error("construction precondition failed: {0}")]
    Precondition(String),

    // decision
    #[error("certificate search budget of {0} nodes exhausted")]
    CertificateBudgetExceeded(usize),
    #[error("certificate does not validate: {0}")]
    InvalidCertificate(String),

    // analysis
    #[error("context too small: |K| = {0} (need |K| > 2)")]
    ContextTooSmall(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    // io
    #[error("parse error at {line}:{col}: {msg}")]
    Format { line: usize, col: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
