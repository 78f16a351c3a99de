use thiserror::Error;

/// Library-wide error type.
///
/// The variants map onto the CLI exit codes: `Malformed` and `Domain` are
/// exit 2, `Capacity` is exit 3 and `Internal` is exit 4 (always a bug).
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_) | Error::Domain(_) => 2,
            Error::Capacity(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Multiplication budget for the truncated powering routines.
///
/// One unit is charged per coefficient multiplication, so the cost of a
/// polynomial product is `|f| * |g|` units.  Exhaustion surfaces as a
/// `Capacity` error rather than an unbounded computation.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 200_000_000;

    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget { limit: u64::MAX, used: 0 }
    }

    pub fn charge(&mut self, amount: u64) -> Result<()> {
        self.used = self.used.saturating_add(amount);
        if self.used > self.limit {
            Err(Error::Capacity(format!(
                "work budget exceeded ({} > {} multiplications)",
                self.used, self.limit
            )))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        let limit = std::env::var("FROBFORMS_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(Self::DEFAULT_LIMIT);
        Budget::new(limit)
    }
}
