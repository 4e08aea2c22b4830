//! p-adic and finite-field machinery for checking mod-`p³` supercongruences
//! of truncated `₄F₃` sums attached to rigid Calabi–Yau hypergeometric data.

pub mod data;
pub mod error;
pub mod finite;
pub mod gamma;
pub mod harness;
pub mod modforms;
pub mod numtheory;
pub mod oracle;
pub mod padic;
pub mod report;
pub mod trunc;

pub use data::{find_case, fourteen_cases, order_alpha, HGCase, OrderedAlpha};
pub use error::{Error, Result};
pub use finite::{HGSumInput, HGSumResult, Route};
pub use gamma::GammaEval;
pub use harness::{sweep, verify_case, CheckFilter, HarnessConfig};
pub use modforms::{EtaQuotientSpec, QSeries};
pub use padic::{PadicCtx, PadicNum, RationalInZp};
pub use report::{Check, CongruenceReport, SkipReason, Verdict};
pub use trunc::{SummandDecomposition, TruncationSpec};
