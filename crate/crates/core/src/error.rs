//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across parsing, coding, embedding and
/// analysis. The CLI maps any of these to a nonzero exit status, so variants
/// carry enough context to produce a useful diagnostic on their own.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input that does not match the expected file structure.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input ended before a complete structure could be read.
    #[error("unexpected end of input")]
    TruncatedInput,

    /// Structurally valid input using a feature this implementation does not
    /// handle (wrong chroma layout, unknown container version, ...).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// An operation that needs at least one element received none.
    #[error("empty input")]
    EmptyInput,

    /// The file is not a stego container at all (bad magic).
    #[error("not a stego container")]
    NotAStegoContainer,

    /// The file claims to be a stego container but violates its own format.
    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    /// Frame or plane dimensions that the codec cannot represent.
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    /// A macroblock hook pushed a motion vector past the representable range.
    #[error("hook produced motion vector ({dx},{dy}) outside +/-{max_abs} quarter-pel")]
    HookRange { dx: i32, dy: i32, max_abs: i32 },

    /// The cover object ran out of embedding slots before the payload ended.
    #[error("insufficient capacity: placed {placed} of {required} payload bits")]
    InsufficientCapacity { placed: u64, required: u64 },

    /// No embedding mode yielded a parseable payload.
    #[error("no payload found")]
    NoPayloadFound,

    /// A payload frame was located but failed validation (bad CRC, bad
    /// declared length, or decryption with the wrong key).
    #[error("corrupt payload")]
    CorruptPayload,

    /// The payload is encrypted and no key was supplied.
    #[error("payload is encrypted: key required")]
    KeyRequired,

    /// Key material of a length AES does not define.
    #[error("invalid key: {0}")]
    InvalidKey(String),

    /// Two inputs that a comparison requires to be structurally identical
    /// are not.
    #[error("inputs not comparable: {0}")]
    InvalidComparison(String),
}
