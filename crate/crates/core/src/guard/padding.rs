//! Length padding: removing the wire-length feature from observations.

use thiserror::Error;

use crate::net::{CryptoError, EncryptionScheme};
use crate::ptp::MessageKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaddingError {
    #[error("padding target {target} smaller than required wire length {needed}")]
    TargetTooSmall { needed: u32, target: u32 },
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaddingPolicy {
    /// Plain encryption wrapping, lengths leak.
    None,
    /// Every packet leaves at exactly this wire length.
    Fixed(u32),
    /// Every packet leaves at the largest wire length any protocol message
    /// produces under the scheme in use.
    SchemeMax,
}

impl PaddingPolicy {
    /// Resolves the target wire length of `SchemeMax` for a scheme.
    pub fn scheme_max_target(scheme: &EncryptionScheme) -> Result<u32, PaddingError> {
        let mut max = 0;
        for kind in MessageKind::ALL {
            max = max.max(scheme.encrypt_wrap(kind.plain_len())?);
        }
        Ok(max)
    }
}

/// Wire length for a plaintext of `plain` bytes under `policy`.
pub fn apply_padding(
    plain: u32,
    policy: PaddingPolicy,
    scheme: &EncryptionScheme,
) -> Result<u32, PaddingError> {
    let wrapped = scheme.encrypt_wrap(plain)?;
    let target = match policy {
        PaddingPolicy::None => return Ok(wrapped),
        PaddingPolicy::Fixed(target) => target,
        PaddingPolicy::SchemeMax => PaddingPolicy::scheme_max_target(scheme)?,
    };
    if wrapped > target {
        return Err(PaddingError::TargetTooSmall { needed: wrapped, target });
    }
    Ok(target)
}
