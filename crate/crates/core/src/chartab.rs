//! Character tables in a small line-oriented text format, and the kernel and
//! codegree computations on them.
//!
//! Only two facts about a character value matter here: whether it is a
//! rational integer, and if so which one. A kernel is the set of classes on
//! which χ takes the value χ(1), and χ(1) is a positive integer, so any
//! irrational value can be replaced by an opaque mark without affecting a
//! kernel.
//!
//! ```text
//! # comment
//! group A5
//! order 60
//! simple true
//! classes 1 15 20 12 12
//! labels 1a 2a 3a 5a 5b        (optional)
//! char 1 1 1 1 1
//! char 3 -1 0 * *
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::CodegreeSet;
use crate::factored_int::FactoredInteger;

/// A character value: an exact integer, or a mark for anything irrational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharValue {
    Int(i64),
    NonInteger,
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharValue::Int(v) => write!(f, "{v}"),
            CharValue::NonInteger => f.write_str("*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassData {
    pub size: u64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterRow {
    pub values: Vec<CharValue>,
}

impl CharacterRow {
    /// χ(1). Always a positive integer on a validated table.
    pub fn degree(&self) -> u64 {
        match self.values.first() {
            Some(CharValue::Int(d)) if *d > 0 => *d as u64,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    pub group_name: String,
    pub order: u64,
    /// Declared simplicity; used only to cross-check codegrees.
    pub simple: bool,
    pub classes: Vec<ClassData>,
    pub characters: Vec<CharacterRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartabError {
    /// Malformed input at a 1-based line number (0 for end of input).
    Syntax { line: usize, message: String },
    /// A structural invariant fails; the string names it.
    InvariantViolation(String),
    /// A kernel whose size does not divide the group order, or a kernel index
    /// not divisible by the degree (signals a corrupt table).
    NonIntegralIndex { row: usize },
}

impl fmt::Display for ChartabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartabError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            ChartabError::InvariantViolation(which) => write!(f, "invariant violated: {which}"),
            ChartabError::NonIntegralIndex { row } => write!(f, "character {row}: non-integral kernel index"),
        }
    }
}

/// Parses and validates a table from raw bytes (UTF-8).
pub fn parse_table(input: &[u8]) -> Result<CharacterTable, ChartabError> {
    let text = core::str::from_utf8(input)
        .map_err(|_| ChartabError::Syntax { line: 0, message: "input is not UTF-8".into() })?;
    CharacterTable::parse(text)
}

impl CharacterTable {
    /// Parses and validates a table.
    pub fn parse(text: &str) -> Result<CharacterTable, ChartabError> {
        let syntax = |line: usize, message: &str| ChartabError::Syntax { line, message: message.into() };
        let mut name = None;
        let mut order = None;
        let mut simple = None;
        let mut sizes: Option<Vec<u64>> = None;
        let mut labels: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let words: Vec<&str> = rest.split_whitespace().collect();
            let duplicate = |seen: bool| if seen { Err(syntax(ln, "duplicate header line")) } else { Ok(()) };
            match key {
                "group" => {
                    duplicate(name.is_some())?;
                    if words.is_empty() {
                        return Err(syntax(ln, "missing group name"));
                    }
                    name = Some(words.join(" "));
                }
                "order" => {
                    duplicate(order.is_some())?;
                    order = Some(match words.as_slice() {
                        [n] => n.parse::<u64>().map_err(|_| syntax(ln, "order must be a positive integer"))?,
                        _ => return Err(syntax(ln, "order takes one value")),
                    });
                }
                "simple" => {
                    duplicate(simple.is_some())?;
                    simple = Some(match words.as_slice() {
                        ["true"] => true,
                        ["false"] => false,
                        _ => return Err(syntax(ln, "simple must be true or false")),
                    });
                }
                "classes" => {
                    duplicate(sizes.is_some())?;
                    let parsed: Result<Vec<u64>, _> = words.iter().map(|w| w.parse::<u64>()).collect();
                    sizes = Some(parsed.map_err(|_| syntax(ln, "class sizes must be positive integers"))?);
                }
                "labels" => {
                    duplicate(labels.is_some())?;
                    labels = Some(words.iter().map(|w| w.to_string()).collect());
                }
                "char" => {
                    let values: Result<Vec<CharValue>, _> = words
                        .iter()
                        .map(|w| match *w {
                            "*" => Ok(CharValue::NonInteger),
                            v => v.parse::<i64>().map(CharValue::Int),
                        })
                        .collect();
                    rows.push(CharacterRow {
                        values: values.map_err(|_| syntax(ln, "values must be integers or `*`"))?,
                    });
                }
                other => return Err(syntax(ln, &format!("unknown line type `{other}`"))),
            }
        }
        let sizes = sizes.ok_or_else(|| syntax(0, "missing `classes` line"))?;
        let labels = match labels {
            Some(l) if l.len() != sizes.len() => {
                return Err(ChartabError::InvariantViolation("label count".into()))
            }
            Some(l) => l,
            None => (1..=sizes.len()).map(|i| format!("C{i}")).collect(),
        };
        let table = CharacterTable {
            group_name: name.ok_or_else(|| syntax(0, "missing `group` line"))?,
            order: order.ok_or_else(|| syntax(0, "missing `order` line"))?,
            simple: simple.unwrap_or(false),
            classes: sizes.into_iter().zip(labels).map(|(size, label)| ClassData { size, label }).collect(),
            characters: rows,
        };
        table.validate()?;
        Ok(table)
    }

    /// Checks the structural invariants: class sizes, row shapes, degrees,
    /// and Σ χ(1)² = |G|.
    pub fn validate(&self) -> Result<(), ChartabError> {
        let bad = |which: &str| Err(ChartabError::InvariantViolation(which.into()));
        if self.order == 0 {
            return bad("order");
        }
        if self.classes.first().map(|c| c.size) != Some(1) {
            return bad("identity class");
        }
        if self.classes.iter().any(|c| c.size == 0 || self.order % c.size != 0) {
            return bad("class size divides order");
        }
        let total: u128 = self.classes.iter().map(|c| u128::from(c.size)).sum();
        if total != u128::from(self.order) {
            return bad("class sizes");
        }
        if self.characters.len() != self.classes.len() {
            return bad("character count");
        }
        let mut degree_squares: u128 = 0;
        for row in &self.characters {
            if row.values.len() != self.classes.len() {
                return bad("row length");
            }
            let d = row.degree();
            if d == 0 {
                return bad("degree");
            }
            if self.order % d != 0 {
                return bad("degree divides order");
            }
            degree_squares += u128::from(d) * u128::from(d);
        }
        if degree_squares != u128::from(self.order) {
            return bad("sum of squared degrees");
        }
        Ok(())
    }

    /// Canonical text form; parsing it yields an identical table.
    pub fn serialize(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        out += &format!("group {}\n", self.group_name);
        out += &format!("order {}\n", self.order);
        out += &format!("simple {}\n", self.simple);
        out += &format!("classes {}\n", join(&mut self.classes.iter().map(|c| c.size.to_string())));
        out += &format!("labels {}\n", join(&mut self.classes.iter().map(|c| c.label.clone())));
        for row in &self.characters {
            out += &format!("char {}\n", join(&mut row.values.iter().map(|v| v.to_string())));
        }
        out
    }

    /// Indices of the classes on which the row takes the value χ(1).
    pub fn kernel_classes(&self, row: &CharacterRow) -> Vec<usize> {
        let degree = CharValue::Int(row.degree() as i64);
        row.values.iter().enumerate().filter(|(_, v)| **v == degree).map(|(i, _)| i).collect()
    }

    /// |G : ker χ|.
    pub fn kernel_index(&self, row: &CharacterRow) -> Result<FactoredInteger, ChartabError> {
        let row_no = self.characters.iter().position(|r| r == row).unwrap_or(usize::MAX);
        let kernel: u64 = self.kernel_classes(row).iter().map(|&i| self.classes[i].size).sum();
        if kernel == 0 || self.order % kernel != 0 {
            return Err(ChartabError::NonIntegralIndex { row: row_no });
        }
        Ok(FactoredInteger::of(self.order / kernel))
    }

    /// cod(χ) = |G : ker χ| / χ(1).
    pub fn codegree(&self, row: &CharacterRow) -> Result<FactoredInteger, ChartabError> {
        let row_no = self.characters.iter().position(|r| r == row).unwrap_or(usize::MAX);
        self.kernel_index(row)?
            .div_exact(&FactoredInteger::of(row.degree()))
            .map_err(|_| ChartabError::NonIntegralIndex { row: row_no })
    }
}

/// cod(G) computed row by row from the table.
pub fn codegrees_of_table(table: &CharacterTable) -> Result<CodegreeSet, ChartabError> {
    let mut s = CodegreeSet::new();
    for row in &table.characters {
        s.insert(table.codegree(row)?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A5: &str = include_str!("../data/tables/A5.tbl");
    const S3: &str = include_str!("../data/tables/S3.tbl");
    const TRIVIAL: &str = include_str!("../data/tables/trivial.tbl");

    fn ints(xs: &[u64]) -> CodegreeSet {
        CodegreeSet::from_elements(xs.iter().map(|&x| FactoredInteger::of(x)))
    }

    /// Character table of the cyclic group of order n: the value of the
    /// k-th character on the j-th class is ζ^(jk), an integer only when it
    /// is ±1.
    fn cyclic(n: u64) -> CharacterTable {
        let value = |j: u64, k: u64| {
            let e = (j * k) % n;
            if e == 0 {
                CharValue::Int(1)
            } else if 2 * e == n {
                CharValue::Int(-1)
            } else {
                CharValue::NonInteger
            }
        };
        CharacterTable {
            group_name: format!("C{n}"),
            order: n,
            simple: false,
            classes: (0..n).map(|j| ClassData { size: 1, label: format!("g{j}") }).collect(),
            characters: (0..n).map(|k| CharacterRow { values: (0..n).map(|j| value(j, k)).collect() }).collect(),
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn fixtures_parse() {
        let a5 = CharacterTable::parse(A5).unwrap();
        assert_eq!(a5.characters.len(), 5);
        assert!(a5.simple);
        assert!(CharacterTable::parse(S3).is_ok());
        let t = CharacterTable::parse(TRIVIAL).unwrap();
        assert_eq!(codegrees_of_table(&t).unwrap(), CodegreeSet::new());
    }

    #[test]
    fn codegree_fixtures() {
        let a5 = CharacterTable::parse(A5).unwrap();
        assert_eq!(codegrees_of_table(&a5).unwrap(), ints(&[12, 15, 20]));
        let s3 = CharacterTable::parse(S3).unwrap();
        assert_eq!(codegrees_of_table(&s3).unwrap(), ints(&[2, 3]));
    }

    #[test]
    fn kernel_indices() {
        let a5 = CharacterTable::parse(A5).unwrap();
        assert!(a5.kernel_index(&a5.characters[0]).unwrap().is_one());
        for row in &a5.characters[1..] {
            assert_eq!(a5.kernel_index(row).unwrap(), FactoredInteger::of(60));
        }
        let c7 = cyclic(7);
        assert_eq!(c7.kernel_index(&c7.characters[3]).unwrap(), FactoredInteger::of(7));
    }

    #[test]
    fn class_sizes_must_sum_to_order() {
        // Sizes 1 + 3 + 1 = |S3| - 1, each dividing the order.
        let broken = S3.replace("classes 1 3 2", "classes 1 3 1");
        assert_eq!(
            CharacterTable::parse(&broken),
            Err(ChartabError::InvariantViolation("class sizes".into()))
        );
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let broken = S3.replace("char 2 0 -1", "char 2 0 x");
        assert!(matches!(CharacterTable::parse(&broken), Err(ChartabError::Syntax { line: 9, .. })));
        assert!(matches!(parse_table(b"order 2\n"), Err(ChartabError::Syntax { .. })));
        assert!(matches!(parse_table(&[0xff, 0xfe]), Err(ChartabError::Syntax { line: 0, .. })));
    }

    #[test]
    fn other_invariants() {
        let wrong_count = S3.replace("char 2 0 -1\n", "");
        assert!(matches!(CharacterTable::parse(&wrong_count), Err(ChartabError::InvariantViolation(_))));
        let bad_degree = S3.replace("char 2 0 -1", "char 3 0 -1");
        assert!(matches!(CharacterTable::parse(&bad_degree), Err(ChartabError::InvariantViolation(_))));
        let no_identity = S3.replace("classes 1 3 2", "classes 3 1 2");
        assert_eq!(
            CharacterTable::parse(&no_identity),
            Err(ChartabError::InvariantViolation("identity class".into()))
        );
    }

    #[test]
    fn round_trip_is_exact() {
        for text in [A5, S3, TRIVIAL] {
            let t = CharacterTable::parse(text).unwrap();
            let s = t.serialize();
            let t2 = parse_table(s.as_bytes()).unwrap();
            assert_eq!(t, t2);
            assert_eq!(s, t2.serialize());
        }
    }

    #[test]
    fn simple_tables_give_order_over_degree() {
        let a5 = CharacterTable::parse(A5).unwrap();
        let degrees: Vec<FactoredInteger> = a5.characters.iter().map(|r| FactoredInteger::of(r.degree())).collect();
        let expected = CodegreeSet::of_simple_group(&FactoredInteger::of(a5.order), &degrees).unwrap();
        assert_eq!(codegrees_of_table(&a5).unwrap(), expected);
    }

    #[test]
    fn marks_never_join_kernels() {
        for t in [CharacterTable::parse(A5).unwrap(), cyclic(12), cyclic(15)] {
            let marked: Vec<usize> = (0..t.classes.len())
                .filter(|&j| t.characters.iter().any(|r| r.values[j] == CharValue::NonInteger))
                .collect();
            for &j in &marked {
                for row in &t.characters {
                    let before = t.kernel_classes(row);
                    let mut reduced = row.clone();
                    reduced.values.remove(j);
                    let after: Vec<usize> = t_kernel_without(&reduced, row.degree());
                    let expected: Vec<usize> =
                        before.iter().filter(|&&i| i != j).map(|&i| if i > j { i - 1 } else { i }).collect();
                    if row.values[j] == CharValue::NonInteger {
                        assert!(!before.contains(&j));
                    }
                    assert_eq!(after, expected);
                }
            }
        }
    }

    fn t_kernel_without(row: &CharacterRow, degree: u64) -> Vec<usize> {
        row.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == CharValue::Int(degree as i64))
            .map(|(i, _)| i)
            .collect()
    }

    proptest! {
        #[test]
        fn cyclic_codegrees_are_divisors(n in 1u64..80) {
            let t = cyclic(n);
            t.validate().unwrap();
            let want: Vec<u64> = (0..n).map(|k| n / gcd(n, k)).collect();
            let got = codegrees_of_table(&t).unwrap();
            prop_assert_eq!(got, ints(&want));
            for c in codegrees_of_table(&t).unwrap().iter() {
                prop_assert!(c.divides(&FactoredInteger::of(n)));
            }
        }

        #[test]
        fn cyclic_round_trip(n in 1u64..40) {
            let t = cyclic(n);
            let s = t.serialize();
            let back = CharacterTable::parse(&s).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(back.serialize(), s);
        }

        #[test]
        fn garbage_never_panics(lines in proptest::collection::vec("[a-z0-9 *#-]{0,20}", 0..8)) {
            let text = lines.join("\n");
            let _ = CharacterTable::parse(&text);
        }
    }

    #[test]
    fn prime_cyclic_indices() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let t = cyclic(p);
            for row in &t.characters[1..] {
                assert_eq!(t.kernel_index(row).unwrap(), FactoredInteger::of(p));
            }
            assert_eq!(codegrees_of_table(&t).unwrap(), ints(&[p]));
        }
    }
}
