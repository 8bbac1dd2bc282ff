//! Finite ordinal numerals, decimal rationals and list literals.

use super::*;
use crate::ast::Rat;

/// The ordinal `k`: a catalog constant up to ten, a digit polynomial above.
pub fn numeral(k: u128) -> HostTerm {
    if k <= 10 {
        cst(&format!("n{k}"))
    } else {
        digit_polynomial(k)
    }
}

/// `d·10^p` for one nonzero digit.
fn digit_term(d: u128, p: u32) -> HostTerm {
    let digit = numeral(d);
    match p {
        0 => digit,
        1 => call("ord_mul", [digit, cst("n10")]),
        _ => call(
            "ord_mul",
            [digit, call("ord_exp", [cst("n10"), numeral(u128::from(p))])],
        ),
    }
}

/// Positional base-10 sum with zero digits omitted, leftmost digit first.
fn digit_polynomial(k: u128) -> HostTerm {
    let digits: Vec<u128> = k
        .to_string()
        .bytes()
        .map(|b| u128::from(b - b'0'))
        .collect();
    let top = digits.len() as u32 - 1;
    let mut terms = digits
        .iter()
        .enumerate()
        .filter(|(_, d)| **d != 0)
        .map(|(pos, d)| digit_term(*d, top - pos as u32));
    let first = match terms.next() {
        Some(t) => t,
        None => return cst("n0"),
    };
    terms.fold(first, |acc, t| call("ord_add", [acc, t]))
}

/// Digits of the magnitude as an ordinal term, without the small-numeral shortcut
/// for two-digit values so that `12` reads `1·10 + 2`.
fn magnitude(n: u128) -> HostTerm {
    if n < 10 {
        numeral(n)
    } else {
        digit_polynomial(n)
    }
}

pub fn encode_rational(q: Rat) -> HostTerm {
    let mag = magnitude(q.numerator.unsigned_abs());
    let signed = if q.numerator < 0 {
        call("real_neg", [mag])
    } else {
        mag
    };
    match q.scale {
        0 => signed,
        1 => call("real_div", [signed, cst("n10")]),
        s => call(
            "real_div",
            [signed, call("ord_exp", [cst("n10"), numeral(u128::from(s))])],
        ),
    }
}

/// Right fold of `cons` over `nil`.
pub fn mk_list(items: Vec<HostTerm>) -> Result<HostTerm, HostError> {
    for t in &items {
        let found = t.typecheck()?;
        if found != HostType::Iota {
            return Err(mismatch(t, HostType::Iota, found));
        }
    }
    Ok(items
        .into_iter()
        .rev()
        .fold(cst("nil"), |acc, t| call("cons", [t, acc])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_point_two() {
        let t = encode_rational(Rat::new(112, 1));
        let want = call(
            "real_div",
            [
                call(
                    "ord_add",
                    [
                        call(
                            "ord_add",
                            [
                                call("ord_mul", [cst("n1"), call("ord_exp", [cst("n10"), cst("n2")])]),
                                call("ord_mul", [cst("n1"), cst("n10")]),
                            ],
                        ),
                        cst("n2"),
                    ],
                ),
                cst("n10"),
            ],
        );
        assert_eq!(t, want);
    }

    #[test]
    fn twelve_and_zero() {
        assert_eq!(
            encode_rational(Rat::integer(12)),
            call("ord_add", [call("ord_mul", [cst("n1"), cst("n10")]), cst("n2")])
        );
        assert_eq!(encode_rational(Rat::integer(0)), cst("n0"));
        assert_eq!(encode_rational(Rat::integer(3)), cst("n3"));
        assert_eq!(encode_rational(Rat::integer(10)), call("ord_mul", [cst("n1"), cst("n10")]));
    }

    #[test]
    fn negative_and_scaled() {
        assert_eq!(
            encode_rational(Rat::new(-35, 2)),
            call(
                "real_div",
                [
                    call("real_neg", [call("ord_add", [call("ord_mul", [cst("n3"), cst("n10")]), cst("n5")])]),
                    call("ord_exp", [cst("n10"), cst("n2")]),
                ]
            )
        );
    }

    #[test]
    fn every_encoding_is_a_set() {
        for (n, s) in [(0, 0), (7, 3), (-1_000_000, 4), (123_456_789_012, 0)] {
            assert_eq!(encode_rational(Rat::new(n, s)).typecheck(), Ok(HostType::Iota));
        }
    }

    #[test]
    fn lists() {
        assert_eq!(mk_list(vec![]).unwrap(), cst("nil"));
        assert_eq!(
            mk_list(vec![ivar("x"), ivar("y")]).unwrap(),
            call("cons", [ivar("x"), call("cons", [ivar("y"), cst("nil")])])
        );
        assert!(mk_list(vec![HostTerm::Top]).is_err());
    }
}
