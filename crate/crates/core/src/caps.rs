use crate::error::{Error, Result};

/// Environment variable that may raise the enumeration caps.
pub const CAP_ENV: &str = "SUPERCHAR_CAP";

/// Upper bounds on what the library is willing to enumerate.
///
/// `elements` bounds the order of a finite field that is enumerated or
/// tabulated; `orbit` bounds the size of an algebra `u_n(F_q)` (or of a
/// single orbit) that is walked explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub elements: u64,
    pub orbit: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            elements: 1 << 16,
            orbit: 1 << 20,
        }
    }
}

impl Caps {
    /// Defaults, raised (never lowered) by `SUPERCHAR_CAP` when it holds an integer.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var(CAP_ENV).ok().and_then(|s| s.trim().parse::<u64>().ok()) {
            caps.elements = caps.elements.max(v);
            caps.orbit = caps.orbit.max(v);
        }
        caps
    }

    pub(crate) fn check_elements(&self, what: &'static str, size: u128) -> Result<()> {
        if size > self.elements as u128 {
            return Err(Error::CapExceeded {
                what,
                size,
                cap: self.elements,
            });
        }
        Ok(())
    }

    pub(crate) fn check_orbit(&self, what: &'static str, size: u128) -> Result<()> {
        if size > self.orbit as u128 {
            return Err(Error::CapExceeded {
                what,
                size,
                cap: self.orbit,
            });
        }
        Ok(())
    }
}
