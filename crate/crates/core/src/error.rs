use alloc::string::String;
use core::fmt;

/// Errors raised by the algebra engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// ℓ is not prime, or d does not divide ℓ − 1.
    InvalidPrime { ell: u32, d: u32 },
    /// The operation only exists for odd ℓ.
    OddPrimeRequired(&'static str),
    /// Voevodsky letters are formal and never enter the Adem engine.
    FormalVoevodsky,
    /// A word mixes the {β, P} and {Sq} families, or uses the wrong family for ℓ.
    MixedFamilies,
    /// An admissible sequence was expected.
    NotAdmissible,
    /// P ↔ P_V conversion requested outside the established zone.
    ConversionZone { n: i64, i: i64, a: i64 },
    /// The coefficient model has no Bott element b.
    MissingBott,
    /// A coefficient symbol the model does not know.
    UnknownSymbol(String),
    /// A P-action or Bockstein value the model does not declare.
    UndeclaredAction { symbol: String, op: String },
    /// Inconsistent coefficient model.
    InvalidModel(String),
    /// Duplicate generator label in a basis computation.
    DuplicateLabel(String),
    /// Generator of non-positive degree in a free-algebra computation.
    NonPositiveDegree(String),
    /// A generator is flagged as not transgressive.
    NotTransgressive(String),
    /// The window cannot hold the fundamental class.
    WindowTooSmall { needed: i64, max_deg: i64 },
    /// The enumerator needs ζ ∈ k.
    NeedsZeta,
    /// The conjectural enumerator is only stated for n ≥ 2i.
    ConjectureZone { n: i64, i: i64 },
    /// Generic precondition failure.
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPrime { ell, d } => {
                write!(f, "invalid prime context: ell={ell}, d={d} (ell must be prime and d | ell-1)")
            }
            Error::OddPrimeRequired(what) => write!(f, "{what} is only defined for odd ell"),
            Error::FormalVoevodsky => {
                write!(f, "formal Voevodsky letters cannot be Adem-reduced in this module")
            }
            Error::MixedFamilies => write!(f, "word mixes operation families not valid for this ell"),
            Error::NotAdmissible => write!(f, "sequence is not admissible (reduce first)"),
            Error::ConversionZone { n, i, a } => write!(
                f,
                "conversion not established in the intermediate zone i<n<2i \
                 (requires n>=2i and n>=2a; got n={n}, i={i}, a={a})"
            ),
            Error::MissingBott => write!(f, "coefficient model has no Bott element b"),
            Error::UnknownSymbol(s) => write!(f, "unknown symbol {s}"),
            Error::UndeclaredAction { symbol, op } => {
                write!(f, "model does not declare {op} on symbol {symbol}")
            }
            Error::InvalidModel(msg) => write!(f, "invalid coefficient model: {msg}"),
            Error::DuplicateLabel(l) => write!(f, "duplicate generator label {l}"),
            Error::NonPositiveDegree(l) => write!(f, "generator {l} has non-positive degree"),
            Error::NotTransgressive(l) => write!(f, "generator {l} is not transgressive"),
            Error::WindowTooSmall { needed, max_deg } => write!(
                f,
                "window too small: fundamental class has degree {needed} > max degree {max_deg}"
            ),
            Error::NeedsZeta => write!(f, "model has d != 1; use descent enumerator"),
            Error::ConjectureZone { n, i } => {
                write!(f, "conjecture zone requires n>=2i (got n={n}, i={i})")
            }
            Error::Precondition(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
