//! Injective mapping of SUMO identifiers onto TPTP-safe names.

use std::collections::BTreeMap;

use thiserror::Error;

/// Keeps ASCII alphanumerics; everything else becomes `_hh` or `_uhhhhhh`.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if (c as u32) <= 0xff {
            out.push_str(&format!("_{:02x}", c as u32));
        } else {
            out.push_str(&format!("_u{:06x}", c as u32));
        }
    }
    out
}

pub fn unescape(s: &str) -> Option<String> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(c) = rest.chars().next() {
        if c == '_' {
            let (width, skip) = if rest[1..].starts_with('u') { (6, 2) } else { (2, 1) };
            let hex = rest.get(skip..skip + width)?;
            if !hex.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
                return None;
            }
            out.push(char::from_u32(u32::from_str_radix(hex, 16).ok()?)?);
            rest = &rest[skip + width..];
        } else if c.is_ascii_alphanumeric() {
            out.push(c);
            rest = &rest[1..];
        } else {
            return None;
        }
    }
    Some(out)
}

pub const CONST_PREFIX: &str = "s_";
pub const VAR_PREFIX: &str = "V_";
pub const ROW_PREFIX: &str = "W_";
/// Host variable names for row variables carry this marker ahead of the SUMO name.
pub const ROW_MARK: char = '@';

pub fn const_name(sumo: &str) -> String {
    format!("{CONST_PREFIX}{}", escape(sumo))
}

/// Inverse of [`const_name`].
pub fn sumo_const(host: &str) -> Option<String> {
    unescape(host.strip_prefix(CONST_PREFIX)?)
}

/// TPTP variable for a host variable name.
pub fn var_name(host: &str) -> String {
    match host.strip_prefix(ROW_MARK) {
        Some(row) => format!("{ROW_PREFIX}{}", escape(row)),
        None => format!("{VAR_PREFIX}{}", escape(host)),
    }
}

/// Inverse of [`var_name`]; plain upper-case words are taken verbatim.
pub fn host_var(tptp: &str) -> Option<String> {
    if let Some(rest) = tptp.strip_prefix(ROW_PREFIX) {
        return unescape(rest).map(|n| format!("{ROW_MARK}{n}"));
    }
    if let Some(rest) = tptp.strip_prefix(VAR_PREFIX) {
        return unescape(rest);
    }
    let mut chars = tptp.chars();
    let first = chars.next()?;
    (first.is_ascii_uppercase() && chars.all(|c| c.is_ascii_alphanumeric() || c == '_'))
        .then(|| tptp.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("host name {host} would be shared by {first} and {second}")]
pub struct NameCollision {
    pub host: String,
    pub first: String,
    pub second: String,
}

/// SUMO constant to host constant, checked for injectivity.
#[derive(Debug, Clone, Default)]
pub struct NameMap {
    forward: BTreeMap<String, String>,
    reverse: BTreeMap<String, String>,
}

impl NameMap {
    pub fn host(&mut self, sumo: &str) -> Result<String, NameCollision> {
        if let Some(h) = self.forward.get(sumo) {
            return Ok(h.clone());
        }
        let h = const_name(sumo);
        if let Some(other) = self.reverse.get(&h) {
            return Err(NameCollision {
                host: h,
                first: other.clone(),
                second: sumo.to_string(),
            });
        }
        self.forward.insert(sumo.to_string(), h.clone());
        self.reverse.insert(h.clone(), sumo.to_string());
        Ok(h)
    }

    pub fn sumo(&self, host: &str) -> Option<&str> {
        self.reverse.get(host).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes() {
        assert_eq!(const_name("partition"), "s_partition");
        assert_eq!(const_name("Number3-1"), "s_Number3_2d1");
        assert_eq!(const_name("a_b"), "s_a_5fb");
        assert_eq!(escape("é"), "_e9");
        assert_eq!(escape("λ"), "_u0003bb");
    }

    #[test]
    fn unescape_inverts() {
        for s in ["Number3-1", "a_b", "x.y", "λ→", "", "plain"] {
            assert_eq!(unescape(&escape(s)).as_deref(), Some(s));
        }
        assert_eq!(unescape("_zz"), None);
        assert_eq!(unescape("_2"), None);
    }

    #[test]
    fn variables() {
        assert_eq!(var_name("REL1"), "V_REL1");
        assert_eq!(var_name("@ROW"), "W_ROW");
        assert_eq!(host_var("W_ROW").as_deref(), Some("@ROW"));
        assert_eq!(host_var("V_x").as_deref(), Some("x"));
        assert_eq!(host_var("X").as_deref(), Some("X"));
        assert_eq!(host_var("x"), None);
    }

    #[test]
    fn map_is_stable() {
        let mut m = NameMap::default();
        assert_eq!(m.host("Planet").unwrap(), "s_Planet");
        assert_eq!(m.host("Planet").unwrap(), "s_Planet");
        assert_eq!(m.sumo("s_Planet"), Some("Planet"));
        assert_eq!(m.len(), 1);
    }
}
