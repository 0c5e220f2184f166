pub mod cli;
pub mod error;
pub mod instance;
pub mod intraday;
pub mod lp;
pub mod mip;
pub mod norms;
pub mod pricing;
pub mod robust;
pub mod verify;

pub use error::{Error, Result};

/// Six-decimal rendering used by every report; negative zero prints as zero.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|c| c == b'0' || c == b'.') => rest.to_string(),
        _ => s,
    }
}
