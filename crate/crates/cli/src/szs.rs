//! SZS status lines in prover output.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Theorem,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Theorem => "Theorem",
            Outcome::CounterSatisfiable => "CounterSatisfiable",
            Outcome::Timeout => "Timeout",
            Outcome::GaveUp => "GaveUp",
            Outcome::Error => "Error",
        }
    }

    /// Groups the SZS ontology into the outcomes the harness reports.
    pub fn from_status(word: &str) -> Outcome {
        match word {
            "Theorem" | "Unsatisfiable" | "ContradictoryAxioms" => Outcome::Theorem,
            "CounterSatisfiable" | "Satisfiable" | "CounterTheorem" => Outcome::CounterSatisfiable,
            "Timeout" | "ResourceOut" | "MemoryOut" => Outcome::Timeout,
            "Error" | "OSError" | "InputError" | "SyntaxError" | "SemanticError" | "TypeError" => Outcome::Error,
            _ => Outcome::GaveUp,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Outcome::Theorem,
            Outcome::CounterSatisfiable,
            Outcome::Timeout,
            Outcome::GaveUp,
            Outcome::Error,
        ]
        .into_iter()
        .find(|o| o.as_str() == s)
        .ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

/// The first line containing `SZS status <word>`, with the word.
pub fn first_status(output: &str) -> Option<(&str, &str)> {
    output.lines().find_map(|line| {
        let rest = &line[line.find("SZS status")? + "SZS status".len()..];
        let word = rest.split_whitespace().next()?;
        Some((line.trim(), word))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_line_wins() {
        let out = "hello\n% SZS status Theorem for p\n% SZS status GaveUp\n";
        assert_eq!(first_status(out), Some(("% SZS status Theorem for p", "Theorem")));
        assert_eq!(first_status("nothing here\nSZS status\n"), None);
    }

    #[test]
    fn grouping() {
        assert_eq!(Outcome::from_status("Unsatisfiable"), Outcome::Theorem);
        assert_eq!(Outcome::from_status("ResourceOut"), Outcome::Timeout);
        assert_eq!(Outcome::from_status("Unknown"), Outcome::GaveUp);
        assert_eq!(Outcome::from_status("InputError"), Outcome::Error);
        assert_eq!("Timeout".parse::<Outcome>(), Ok(Outcome::Timeout));
    }
}
