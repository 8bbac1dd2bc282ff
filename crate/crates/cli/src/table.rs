//! The aggregate results table: one row per problem group, one column per prover.

use std::collections::BTreeMap;

use crate::harness::RunRecord;
use crate::szs::Outcome;

/// A problem's group: the label up to the first `__`, so `wordex__sg12` counts
/// under `wordex`.
pub fn group_of(label: &str) -> &str {
    label.split_once("__").map_or(label, |(g, _)| g)
}

/// `proven/total` as a whole percentage, halves rounded up.
pub fn percent(proven: usize, total: usize) -> usize {
    if total == 0 {
        0
    } else {
        (200 * proven + total) / (2 * total)
    }
}

pub fn cell(proven: usize, total: usize) -> String {
    format!("{proven} ({}%)", percent(proven, total))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub group: String,
    pub problems: usize,
    /// Proven counts in prover order.
    pub proven: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub provers: Vec<String>,
    pub rows: Vec<Row>,
    pub total: Row,
}

impl Table {
    pub fn from_records(provers: &[String], records: &[RunRecord]) -> Table {
        let mut problems: BTreeMap<&str, BTreeMap<&str, ()>> = BTreeMap::new();
        let mut proven: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for r in records {
            let g = group_of(&r.problem);
            problems.entry(g).or_default().insert(&r.problem, ());
            let counts = proven.entry(g).or_insert_with(|| vec![0; provers.len()]);
            if r.outcome == Outcome::Theorem {
                if let Some(j) = provers.iter().position(|p| *p == r.prover) {
                    counts[j] += 1;
                }
            }
        }
        let rows: Vec<Row> = problems
            .iter()
            .map(|(g, ps)| Row {
                group: g.to_string(),
                problems: ps.len(),
                proven: proven[g].clone(),
            })
            .collect();
        let total = Row {
            group: "Total".into(),
            problems: rows.iter().map(|r| r.problems).sum(),
            proven: (0..provers.len()).map(|j| rows.iter().map(|r| r.proven[j]).sum()).collect(),
        };
        Table {
            provers: provers.to_vec(),
            rows,
            total,
        }
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let mut out = vec![[vec!["Problem".to_string(), "Subgoals".to_string()], self.provers.clone()].concat()];
        for r in self.rows.iter().chain([&self.total]) {
            let mut line = vec![r.group.clone(), r.problems.to_string()];
            line.extend(r.proven.iter().map(|p| cell(*p, r.problems)));
            out.push(line);
        }
        out
    }

    pub fn tsv(&self) -> String {
        self.cells().iter().map(|l| l.join("\t") + "\n").collect()
    }

    /// Space-aligned columns, with a rule above the totals.
    pub fn text(&self) -> String {
        let cells = self.cells();
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let fmt_line = |l: &Vec<String>| -> String {
            let parts: Vec<String> = l
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if c == 0 {
                        format!("{s:<w$}", w = widths[c])
                    } else {
                        format!("{s:>w$}", w = widths[c])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)) + "\n";
        let mut out = fmt_line(&cells[0]);
        out.push_str(&rule);
        for l in &cells[1..cells.len() - 1] {
            out.push_str(&fmt_line(l));
        }
        out.push_str(&rule);
        out.push_str(&fmt_line(&cells[cells.len() - 1]));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages() {
        assert_eq!(cell(3765, 4880), "3765 (77%)");
        assert_eq!(cell(14, 20), "14 (70%)");
        assert_eq!(cell(1, 8), "1 (13%)");
        assert_eq!(cell(0, 0), "0 (0%)");
        assert_eq!(percent(1, 3), 33);
        assert_eq!(percent(2, 3), 67);
    }

    fn rec(problem: &str, prover: &str, outcome: Outcome) -> RunRecord {
        RunRecord {
            problem: problem.into(),
            prover: prover.into(),
            wall: 0.0,
            cpu: 0.0,
            outcome,
            szs_line: String::new(),
        }
    }

    #[test]
    fn grouping_and_layout() {
        let provers = vec!["z".to_string(), "e".to_string()];
        let recs = vec![
            rec("b__1", "z", Outcome::Theorem),
            rec("b__1", "e", Outcome::Timeout),
            rec("b__2", "z", Outcome::Theorem),
            rec("b__2", "e", Outcome::Theorem),
            rec("a", "z", Outcome::GaveUp),
            rec("a", "e", Outcome::Theorem),
        ];
        let t = Table::from_records(&provers, &recs);
        assert_eq!(
            t.tsv(),
            "Problem\tSubgoals\tz\te\na\t1\t0 (0%)\t1 (100%)\nb\t2\t2 (100%)\t1 (50%)\nTotal\t3\t2 (67%)\t2 (67%)\n"
        );
        let text = t.text();
        assert!(text.lines().nth(1).unwrap().starts_with("----"));
        assert!(text.ends_with("Total           3   2 (67%)   2 (67%)\n"), "{text}");
    }
}
