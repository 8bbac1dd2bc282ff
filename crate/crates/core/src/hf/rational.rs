//! Exact evaluation of numeric host terms over the rationals.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use thiserror::Error;

use crate::host::HostTerm;

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("not a numeric term: {0}")]
    NotNumeric(String),
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("overflow in {0}")]
    Overflow(String),
    #[error("ordinal operation on a non-natural value in {0}")]
    NotNatural(String),
}

fn natural(q: &Q, t: &HostTerm) -> Result<u32, RationalError> {
    if q.is_integer() && *q.numer() >= 0 {
        q.numer().to_u32().ok_or_else(|| RationalError::Overflow(t.to_string()))
    } else {
        Err(RationalError::NotNatural(t.to_string()))
    }
}

/// Numerals, ordinal and real operations, and `ap` of the arithmetic bridge
/// constants on two-element lists.
pub fn eval_rational(t: &HostTerm) -> Result<Q, RationalError> {
    let (head, args) = t.unapply();
    let name = match head {
        HostTerm::Const(c, _) => c.as_str(),
        _ => return Err(RationalError::NotNumeric(t.to_string())),
    };
    let overflow = || RationalError::Overflow(t.to_string());
    let vals = |k: usize| -> Result<Vec<Q>, RationalError> {
        if args.len() != k {
            return Err(RationalError::NotNumeric(t.to_string()));
        }
        args.iter().map(|a| eval_rational(a)).collect()
    };
    if let Some(k) = name.strip_prefix('n').and_then(|d| d.parse::<i128>().ok()) {
        if args.is_empty() && crate::host::catalog::is_catalog_name(name) {
            return Ok(Q::from_integer(k));
        }
    }
    Ok(match name {
        "emptyset" if args.is_empty() => Q::zero(),
        "ord_add" | "real_add" => {
            let v = vals(2)?;
            if name == "ord_add" {
                natural(&v[0], t)?;
                natural(&v[1], t)?;
            }
            v[0].checked_add(&v[1]).ok_or_else(overflow)?
        }
        "ord_mul" | "real_mul" => {
            let v = vals(2)?;
            if name == "ord_mul" {
                natural(&v[0], t)?;
                natural(&v[1], t)?;
            }
            v[0].checked_mul(&v[1]).ok_or_else(overflow)?
        }
        "ord_exp" => {
            let v = vals(2)?;
            let base = natural(&v[0], t)?;
            let e = natural(&v[1], t)?;
            Q::from_integer(i128::from(base).checked_pow(e).ok_or_else(overflow)?)
        }
        "ord_sub" => {
            let v = vals(2)?;
            let (a, b) = (natural(&v[0], t)?, natural(&v[1], t)?);
            Q::from_integer(i128::from(a.saturating_sub(b)))
        }
        "ordsucc" => {
            let v = vals(1)?;
            natural(&v[0], t)?;
            v[0].checked_add(&Q::from_integer(1)).ok_or_else(overflow)?
        }
        "real_sub" => {
            let v = vals(2)?;
            v[0].checked_sub(&v[1]).ok_or_else(overflow)?
        }
        "real_neg" => -vals(1)?[0],
        "real_div" => {
            let v = vals(2)?;
            if v[1].is_zero() {
                return Err(RationalError::DivisionByZero(t.to_string()));
            }
            v[0].checked_div(&v[1]).ok_or_else(overflow)?
        }
        "ap" if args.len() == 2 => {
            let op = match args[0] {
                HostTerm::Const(c, _) => c.as_str(),
                _ => return Err(RationalError::NotNumeric(t.to_string())),
            };
            let pair = list_pair(args[1]).ok_or_else(|| RationalError::NotNumeric(t.to_string()))?;
            let (a, b) = (eval_rational(pair.0)?, eval_rational(pair.1)?);
            match op {
                "c_add" => a.checked_add(&b).ok_or_else(overflow)?,
                "c_sub" => a.checked_sub(&b).ok_or_else(overflow)?,
                "c_mult" => a.checked_mul(&b).ok_or_else(overflow)?,
                "c_div" if b.is_zero() => return Err(RationalError::DivisionByZero(t.to_string())),
                "c_div" => a.checked_div(&b).ok_or_else(overflow)?,
                _ => return Err(RationalError::NotNumeric(t.to_string())),
            }
        }
        _ => return Err(RationalError::NotNumeric(t.to_string())),
    })
}

/// `listset (cons a (cons b nil))` to `(a, b)`.
fn list_pair(t: &HostTerm) -> Option<(&HostTerm, &HostTerm)> {
    let (h, args) = t.unapply();
    if !matches!(h, HostTerm::Const(c, _) if c == "listset") || args.len() != 1 {
        return None;
    }
    let (h, outer) = args[0].unapply();
    if !matches!(h, HostTerm::Const(c, _) if c == "cons") || outer.len() != 2 {
        return None;
    }
    let (h, inner) = outer[1].unapply();
    if !matches!(h, HostTerm::Const(c, _) if c == "cons") || inner.len() != 2 {
        return None;
    }
    matches!(inner[1], HostTerm::Const(c, _) if c == "nil").then_some((outer[0], inner[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Rat;
    use crate::host::{self, call, cst, encode_rational, mk_list};
    use proptest::prelude::*;

    fn exact(n: i128, s: u32) -> Q {
        Q::new(n, 10i128.pow(s))
    }

    #[test]
    fn literal_values() {
        for (n, s) in [(112, 1), (3, 0), (4, 0), (12, 0)] {
            assert_eq!(eval_rational(&encode_rational(Rat::new(n, s))), Ok(exact(n, s)));
        }
    }

    #[test]
    fn bridge_application() {
        let t = host::ap_list(cst("c_mult"), mk_list(vec![cst("n3"), cst("n4")]).unwrap());
        assert_eq!(eval_rational(&t), Ok(Q::from_integer(12)));
        let t = host::ap_list(cst("c_div"), mk_list(vec![cst("n3"), cst("n0")]).unwrap());
        assert!(matches!(eval_rational(&t), Err(RationalError::DivisionByZero(_))));
        assert!(eval_rational(&cst("univ1")).is_err());
        assert_eq!(eval_rational(&call("ord_sub", [cst("n2"), cst("n5")])), Ok(Q::zero()));
    }

    proptest! {
        #[test]
        fn encoding_value(n in -1_000_000i128..=1_000_000, s in 0u32..=4) {
            let q = Rat::new(n, s);
            let v = eval_rational(&encode_rational(q)).unwrap();
            prop_assert_eq!(v, exact(n, s));
        }
    }
}
