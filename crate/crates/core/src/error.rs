use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision p^N with p = {p}, N = {n} does not fit a 64-bit modulus")]
    PrecisionTooLarge { p: u64, n: u32 },
    #[error("{0} does not lie in Z_{1}")]
    NotInZp(String, u64),
    #[error("p-adic contexts differ")]
    CtxMismatch,
    #[error("division by a p-adic zero")]
    DivisionByZero,
    #[error("value is not a p-adic integer (valuation {0})")]
    NotIntegral(i32),
    #[error("only {have} digits are known, {want} requested")]
    PrecisionLoss { have: i64, want: u32 },
    #[error("Gamma table of {entries} entries exceeds the budget; use lazy evaluation")]
    TableBudget { entries: u64 },
    #[error("p = {p} is ramified for {what}")]
    Ramified { p: u64, what: String },
    #[error("index {a} is beyond a_3 = {a3}; the summand vanishes mod p^3")]
    OutOfTrackedRange { a: u64, a3: u64 },
    #[error("{0}")]
    Domain(String),
    #[error("|{value}| exceeds the Weil bound {bound:.2}")]
    BoundViolation { value: i64, bound: f64 },
    #[error("complex oracle rounding error {0:e} is too large")]
    Rounding(f64),
    #[error("term budget {budget} is below the {needed} terms required")]
    Budget { needed: u64, budget: u64 },
    #[error("series known to q^{n_max}, coefficient {n} requested")]
    SeriesOrder { n: usize, n_max: usize },
    #[error("case {0} has no eta quotient")]
    NoEtaFormula(String),
    #[error("unknown case {0}")]
    UnknownCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
