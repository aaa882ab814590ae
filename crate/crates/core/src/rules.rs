//! Functional and conditional functional dependencies.
//!
//! Rule file grammar, one rule per line, `#` starts a comment:
//!
//! ```text
//! Work experience -> Salary
//! Position -> Allowance | manage => 1000
//! Work experience, Position -> Allowance | 1, _ => 1000
//! ```
//!
//! Attribute lists are comma separated. The optional pattern after `|` lists
//! one constant per LHS attribute, then `=>`, then one per RHS attribute; `_`
//! is the wildcard. A tableau with several pattern rows is written as several
//! lines sharing the same embedded dependency.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternCell {
    Wildcard,
    Constant(String),
}

impl PatternCell {
    fn parse(raw: &str) -> Self {
        match raw.trim() {
            "_" => PatternCell::Wildcard,
            other => PatternCell::Constant(other.to_owned()),
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, PatternCell::Wildcard)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfdRule {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub pattern: BTreeMap<usize, PatternCell>,
}

impl CfdRule {
    pub fn new(
        lhs: Vec<usize>,
        rhs: Vec<usize>,
        pattern: BTreeMap<usize, PatternCell>,
    ) -> std::result::Result<Self, String> {
        if lhs.is_empty() {
            return Err("left-hand side is empty".into());
        }
        if rhs.is_empty() {
            return Err("right-hand side is empty".into());
        }
        for (i, a) in lhs.iter().enumerate() {
            if lhs[..i].contains(a) {
                return Err(format!("attribute #{a} repeated on the left-hand side"));
            }
        }
        for (i, a) in rhs.iter().enumerate() {
            if rhs[..i].contains(a) {
                return Err(format!("attribute #{a} repeated on the right-hand side"));
            }
            if lhs.contains(a) {
                return Err(format!("attribute #{a} appears on both sides"));
            }
        }
        let mut full = pattern;
        for a in lhs.iter().chain(&rhs) {
            full.entry(*a).or_insert(PatternCell::Wildcard);
        }
        if full.len() != lhs.len() + rhs.len() {
            return Err("pattern binds attributes outside the rule".into());
        }
        Ok(CfdRule {
            lhs,
            rhs,
            pattern: full,
        })
    }

    /// Plain FD: every pattern cell is a wildcard.
    pub fn fd(lhs: Vec<usize>, rhs: Vec<usize>) -> std::result::Result<Self, String> {
        CfdRule::new(lhs, rhs, BTreeMap::new())
    }

    pub fn cell(&self, attr: usize) -> &PatternCell {
        &self.pattern[&attr]
    }

    pub fn is_plain_fd(&self) -> bool {
        self.pattern.values().all(PatternCell::is_wildcard)
    }

    pub fn lhs_key(&self) -> Vec<usize> {
        let mut key = self.lhs.clone();
        key.sort_unstable();
        key
    }

    pub fn display(&self, dataset: &Dataset) -> String {
        let names = |attrs: &[usize]| {
            attrs
                .iter()
                .map(|&a| dataset.attributes()[a].name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = format!("{} -> {}", names(&self.lhs), names(&self.rhs));
        if !self.is_plain_fd() {
            let consts = |attrs: &[usize]| {
                attrs
                    .iter()
                    .map(|a| match self.cell(*a) {
                        PatternCell::Wildcard => "_".to_owned(),
                        PatternCell::Constant(c) => c.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            out.push_str(&format!(" | {} => {}", consts(&self.lhs), consts(&self.rhs)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleGroup {
    pub lhs_key: Vec<usize>,
    pub rules: Vec<CfdRule>,
}

pub fn parse_rules(path: impl AsRef<Path>, dataset: &Dataset) -> Result<Vec<CfdRule>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rules_str(&text, dataset)
}

pub fn parse_rules_str(text: &str, dataset: &Dataset) -> Result<Vec<CfdRule>> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        rules.push(parse_line(line, i + 1, dataset)?);
    }
    Ok(rules)
}

fn parse_line(line: &str, line_no: usize, dataset: &Dataset) -> Result<CfdRule> {
    let syntax = |message: String| Error::RuleSyntax {
        line: line_no,
        message,
    };
    let (dependency, pattern) = match line.split_once('|') {
        Some((d, p)) => (d, Some(p)),
        None => (line, None),
    };
    let (lhs_raw, rhs_raw) = dependency
        .split_once("->")
        .ok_or_else(|| syntax("expected `->`".into()))?;

    let resolve = |list: &str| -> Result<Vec<usize>> {
        split_list(list)
            .into_iter()
            .map(|name| {
                dataset.attribute_index(name).ok_or_else(|| {
                    Error::Schema(format!("line {line_no}: unknown attribute {name:?}"))
                })
            })
            .collect()
    };
    let lhs = resolve(lhs_raw)?;
    let rhs = resolve(rhs_raw)?;
    if lhs.is_empty() {
        return Err(syntax("left-hand side is empty".into()));
    }
    if rhs.is_empty() {
        return Err(syntax("right-hand side is empty".into()));
    }

    let mut cells = BTreeMap::new();
    if let Some(pattern) = pattern {
        let (lp, rp) = pattern
            .split_once("=>")
            .ok_or_else(|| syntax("pattern needs `=>` between LHS and RHS constants".into()))?;
        let lp = split_list(lp);
        let rp = split_list(rp);
        if lp.len() != lhs.len() || rp.len() != rhs.len() {
            return Err(syntax(format!(
                "pattern has {}/{} cells, rule has {}/{} attributes",
                lp.len(),
                rp.len(),
                lhs.len(),
                rhs.len()
            )));
        }
        for (attr, raw) in lhs.iter().zip(lp).chain(rhs.iter().zip(rp)) {
            cells.insert(*attr, PatternCell::parse(raw));
        }
    }
    CfdRule::new(lhs, rhs, cells).map_err(syntax)
}

fn split_list(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Groups rules by their (sorted) left-hand side attribute set. Groups come
/// out ordered by key; rules keep their input order inside a group.
pub fn group_rules(rules: &[CfdRule]) -> Vec<RuleGroup> {
    let mut groups: BTreeMap<Vec<usize>, Vec<CfdRule>> = BTreeMap::new();
    for rule in rules {
        groups.entry(rule.lhs_key()).or_default().push(rule.clone());
    }
    groups
        .into_iter()
        .map(|(lhs_key, rules)| RuleGroup { lhs_key, rules })
        .collect()
}

/// `f_i`: how many times attribute `i` appears on either side of a rule.
pub fn attribute_cfd_frequency(rules: &[CfdRule], attr_count: usize) -> Vec<usize> {
    let mut freq = vec![0; attr_count];
    for rule in rules {
        for &a in rule.lhs.iter().chain(&rule.rhs) {
            freq[a] += 1;
        }
    }
    freq
}
