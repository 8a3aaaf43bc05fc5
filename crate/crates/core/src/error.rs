use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degree matrix is not almost free")]
    NotAlmostFree,
    #[error("resource cap exceeded: {what} ({size} > {cap}){}", context.as_deref().map(|c| format!(" at {c}")).unwrap_or_default())]
    ResourceCap {
        what: &'static str,
        size: u128,
        cap: u128,
        context: Option<String>,
    },
    #[error("dimension {0} exceeds the supported maximum {1}")]
    DimensionCap(usize, usize),
    #[error("region is {0}")]
    Degenerate(&'static str),
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is unbounded")]
    UnboundedRegion,
}

impl Error {
    pub fn with_context(self, ctx: impl Into<String>) -> Self {
        match self {
            Error::ResourceCap { what, size, cap, .. } => Error::ResourceCap {
                what,
                size,
                cap,
                context: Some(ctx.into()),
            },
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
