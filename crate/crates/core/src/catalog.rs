//! Group data and formulas.
//!
//! * Fixed groups (the sixteen targets minus the parametric Sp4(q), plus the
//!   sporadic and small candidates) are shipped as text records under
//!   `data/groups/`, one per group, each carrying its order, ordinary character
//!   degrees, Schur multiplier and cross-check fixtures.
//! * Codegree sets of simple groups are `{1} ∪ {|S|/d : d a nontrivial degree}`,
//!   because every nontrivial irreducible character of a simple group is faithful.
//! * Parametric families carry closed-form element formulas. Only PSL(2,·) and
//!   Sp4(q even) have complete sets here; the rest are tagged `partial`.
//! * The maximal-subgroup tables for Sp4(q even) and PSL(4,3), and |GL(n,p)|.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::diophantine::{Congruence, ParamDomain, Parity, Shape};
use crate::factored_int::{prime_power_decomposition, ArithError, FactoredInteger};

/// Schema version every data file must declare.
pub const SCHEMA_VERSION: u32 = 1;

const GROUP_FILES: &[(&str, &str)] = &[
    ("A7", include_str!("../data/groups/A7.txt")),
    ("A9", include_str!("../data/groups/A9.txt")),
    ("G2_2_prime", include_str!("../data/groups/G2_2_prime.txt")),
    ("G2_3", include_str!("../data/groups/G2_3.txt")),
    ("G2_4", include_str!("../data/groups/G2_4.txt")),
    ("HS", include_str!("../data/groups/HS.txt")),
    ("J1", include_str!("../data/groups/J1.txt")),
    ("J2", include_str!("../data/groups/J2.txt")),
    ("J3", include_str!("../data/groups/J3.txt")),
    ("M11", include_str!("../data/groups/M11.txt")),
    ("M12", include_str!("../data/groups/M12.txt")),
    ("M22", include_str!("../data/groups/M22.txt")),
    ("M23", include_str!("../data/groups/M23.txt")),
    ("M24", include_str!("../data/groups/M24.txt")),
    ("McL", include_str!("../data/groups/McL.txt")),
    ("ON", include_str!("../data/groups/ON.txt")),
    ("PSL3_3", include_str!("../data/groups/PSL3_3.txt")),
    ("PSL3_4", include_str!("../data/groups/PSL3_4.txt")),
    ("PSL4_2", include_str!("../data/groups/PSL4_2.txt")),
    ("PSL4_3", include_str!("../data/groups/PSL4_3.txt")),
    ("Sp4_4", include_str!("../data/groups/Sp4_4.txt")),
    ("Sp4_5", include_str!("../data/groups/Sp4_5.txt")),
    ("TwoF4_2_prime", include_str!("../data/groups/TwoF4_2_prime.txt")),
    ("U4_2", include_str!("../data/groups/U4_2.txt")),
    ("U4_3", include_str!("../data/groups/U4_3.txt")),
];

const SP4_EVEN_MAXIMALS: &str = include_str!("../data/sp4_even_maximals.txt");

/// Errors from loading or querying the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    /// A data file line could not be parsed.
    Syntax { file: String, line: usize, message: String },
    /// A loaded record breaks one of its invariants.
    Invariant { file: String, message: String },
    /// A family parameter outside the family's domain.
    InadmissibleParameter { family: FamilyId, param: Option<u64> },
    /// A query that only makes sense for specific groups.
    UnsupportedGroup(String),
    /// A group tag with no record.
    UnknownGroup(String),
    Arith(ArithError),
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::Syntax { file, line, message } => write!(f, "{file}:{line}: {message}"),
            CatalogError::Invariant { file, message } => write!(f, "{file}: {message}"),
            CatalogError::InadmissibleParameter { family, param } => {
                write!(f, "parameter {param:?} is not admissible for {family}")
            }
            CatalogError::UnsupportedGroup(g) => write!(f, "operation not supported for {g}"),
            CatalogError::UnknownGroup(g) => write!(f, "no record for group {g}"),
            CatalogError::Arith(e) => write!(f, "{e}"),
        }
    }
}

impl From<ArithError> for CatalogError {
    fn from(e: ArithError) -> Self {
        CatalogError::Arith(e)
    }
}

// ---------------------------------------------------------------------------
// Codegree sets
// ---------------------------------------------------------------------------

/// A finite set of positive integers that always contains 1 (the codegree of
/// the trivial character). Iteration is in numeric order.
#[derive(Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CodegreeSet {
    elements: BTreeSet<FactoredInteger>,
}

impl Default for CodegreeSet {
    fn default() -> Self {
        Self::new()
    }
}

impl CodegreeSet {
    /// The set `{1}`.
    pub fn new() -> Self {
        let mut elements = BTreeSet::new();
        elements.insert(FactoredInteger::one());
        CodegreeSet { elements }
    }

    /// `{1} ∪ items`.
    pub fn from_elements<I: IntoIterator<Item = FactoredInteger>>(items: I) -> Self {
        let mut s = Self::new();
        s.elements.extend(items);
        s
    }

    /// `{1} ∪ {order/d : d ∈ degrees, d > 1}` for a simple group.
    pub fn of_simple_group(order: &FactoredInteger, degrees: &[FactoredInteger]) -> Result<Self, ArithError> {
        let mut s = Self::new();
        for d in degrees.iter().filter(|d| !d.is_one()) {
            s.elements.insert(order.div_exact(d)?);
        }
        Ok(s)
    }

    pub fn insert(&mut self, x: FactoredInteger) -> bool {
        self.elements.insert(x)
    }

    pub fn contains(&self, x: &FactoredInteger) -> bool {
        self.elements.contains(x)
    }

    /// Number of elements, including 1.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Never true: 1 is always present.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// All elements, ascending.
    pub fn iter(&self) -> impl Iterator<Item = &FactoredInteger> + '_ {
        self.elements.iter()
    }

    /// Elements other than 1, ascending.
    pub fn nontrivial(&self) -> impl Iterator<Item = &FactoredInteger> + '_ {
        self.elements.iter().filter(|x| !x.is_one())
    }

    pub fn is_subset(&self, other: &CodegreeSet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Largest 2-adic valuation over the elements.
    pub fn max_valuation(&self, p: u64) -> u32 {
        self.elements.iter().map(|x| x.valuation(p)).max().unwrap_or(0)
    }
}

impl fmt::Debug for CodegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements.iter()).finish()
    }
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// The sixteen groups whose codegree sets are shown to be characterizing.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupId {
    Sp4_4,
    U4_2,
    /// Sp4(q), q = 2^f with f ≥ 3.
    Sp4_q { f: u32 },
    U4_3,
    TwoF4_2_prime,
    J3,
    G2_3,
    A9,
    J2,
    PSL4_3,
    McL,
    Sp4_5,
    G2_4,
    HS,
    ON,
    M24,
}

impl GroupId {
    /// Targets in the order their case analyses are replayed. Sp4_q appears
    /// with the smallest admissible exponent; callers sample other q.
    pub const ORDERED: [GroupId; 16] = [
        GroupId::Sp4_4,
        GroupId::U4_2,
        GroupId::Sp4_q { f: 3 },
        GroupId::U4_3,
        GroupId::TwoF4_2_prime,
        GroupId::J3,
        GroupId::G2_3,
        GroupId::A9,
        GroupId::J2,
        GroupId::PSL4_3,
        GroupId::McL,
        GroupId::Sp4_5,
        GroupId::G2_4,
        GroupId::HS,
        GroupId::ON,
        GroupId::M24,
    ];

    /// The tag used in data files and on the command line (`Sp4_q` for the
    /// whole family).
    pub fn tag(&self) -> &'static str {
        match self {
            GroupId::Sp4_4 => "Sp4_4",
            GroupId::U4_2 => "U4_2",
            GroupId::Sp4_q { .. } => "Sp4_q",
            GroupId::U4_3 => "U4_3",
            GroupId::TwoF4_2_prime => "TwoF4_2_prime",
            GroupId::J3 => "J3",
            GroupId::G2_3 => "G2_3",
            GroupId::A9 => "A9",
            GroupId::J2 => "J2",
            GroupId::PSL4_3 => "PSL4_3",
            GroupId::McL => "McL",
            GroupId::Sp4_5 => "Sp4_5",
            GroupId::G2_4 => "G2_4",
            GroupId::HS => "HS",
            GroupId::ON => "ON",
            GroupId::M24 => "M24",
        }
    }

    /// Constructs `Sp4_q` from q itself.
    pub fn sp4_even(q: u64) -> Option<GroupId> {
        match prime_power_decomposition(q) {
            Some((2, f)) if f >= 3 => Some(GroupId::Sp4_q { f }),
            _ => None,
        }
    }

    /// q for `Sp4_q`.
    pub fn sp4_q(&self) -> Option<u64> {
        match self {
            GroupId::Sp4_q { f } => Some(1u64 << f),
            _ => None,
        }
    }

    /// The same group viewed as a candidate in the roster.
    pub fn as_family(&self) -> FamilyId {
        match self {
            GroupId::Sp4_4 => FamilyId::Sp4_4,
            GroupId::U4_2 => FamilyId::U4_2,
            GroupId::Sp4_q { .. } => FamilyId::Sp4_q,
            GroupId::U4_3 => FamilyId::U4_3,
            GroupId::TwoF4_2_prime => FamilyId::TwoF4_2_prime,
            GroupId::J3 => FamilyId::J3,
            GroupId::G2_3 => FamilyId::G2_3,
            GroupId::A9 => FamilyId::A9,
            GroupId::J2 => FamilyId::J2,
            GroupId::PSL4_3 => FamilyId::PSL4_3,
            GroupId::McL => FamilyId::McL,
            GroupId::Sp4_5 => FamilyId::Sp4_5,
            GroupId::G2_4 => FamilyId::G2_4,
            GroupId::HS => FamilyId::HS,
            GroupId::ON => FamilyId::ON,
            GroupId::M24 => FamilyId::M24,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sp4_q() {
            Some(q) => write!(f, "Sp4_q({q})"),
            None => f.write_str(self.tag()),
        }
    }
}

impl FromStr for GroupId {
    type Err = CatalogError;

    /// Accepts the fixed tags and `Sp4_q(<q>)` with q = 2^f > 4.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(inner) = s.strip_prefix("Sp4_q(").and_then(|r| r.strip_suffix(')')) {
            return inner
                .parse::<u64>()
                .ok()
                .and_then(GroupId::sp4_even)
                .ok_or_else(|| CatalogError::UnknownGroup(s.into()));
        }
        GroupId::ORDERED
            .iter()
            .find(|g| g.sp4_q().is_none() && g.tag() == s)
            .copied()
            .ok_or_else(|| CatalogError::UnknownGroup(s.into()))
    }
}

/// Every simple group (or family) with at most 20 codegrees, grouped by
/// codegree count. Fixed groups reuse their record tag.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum FamilyId {
    PSL2_even,
    PSL2_odd,
    PSL3_4,
    Suzuki,
    PSL3_3,
    A7,
    M11,
    J1,
    PSL3_odd,
    PSL3_even,
    PSU3_odd,
    PSU3_even,
    G2_2_prime,
    PSL3_third_odd,
    PSL3_third_even,
    PSU3_third_odd,
    PSU3_third_even,
    M22,
    PSL4_2,
    M12,
    M23,
    Ree,
    Sp4_4,
    U4_2,
    Sp4_q,
    U4_3,
    TwoF4_2_prime,
    J3,
    G2_3,
    A9,
    J2,
    PSL4_3,
    McL,
    Sp4_5,
    G2_4,
    HS,
    ON,
    M24,
    G2_q,
}

impl FamilyId {
    /// The full roster, in bucket order.
    pub const ALL: [FamilyId; 39] = [
        FamilyId::PSL2_even,
        FamilyId::PSL2_odd,
        FamilyId::PSL3_4,
        FamilyId::Suzuki,
        FamilyId::PSL3_3,
        FamilyId::A7,
        FamilyId::M11,
        FamilyId::J1,
        FamilyId::PSL3_odd,
        FamilyId::PSL3_even,
        FamilyId::PSU3_odd,
        FamilyId::PSU3_even,
        FamilyId::G2_2_prime,
        FamilyId::PSL3_third_odd,
        FamilyId::PSL3_third_even,
        FamilyId::PSU3_third_odd,
        FamilyId::PSU3_third_even,
        FamilyId::M22,
        FamilyId::PSL4_2,
        FamilyId::M12,
        FamilyId::M23,
        FamilyId::Ree,
        FamilyId::Sp4_4,
        FamilyId::U4_2,
        FamilyId::Sp4_q,
        FamilyId::U4_3,
        FamilyId::TwoF4_2_prime,
        FamilyId::J3,
        FamilyId::G2_3,
        FamilyId::A9,
        FamilyId::J2,
        FamilyId::PSL4_3,
        FamilyId::McL,
        FamilyId::Sp4_5,
        FamilyId::G2_4,
        FamilyId::HS,
        FamilyId::ON,
        FamilyId::M24,
        FamilyId::G2_q,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            FamilyId::PSL2_even => "PSL2_even",
            FamilyId::PSL2_odd => "PSL2_odd",
            FamilyId::PSL3_4 => "PSL3_4",
            FamilyId::Suzuki => "Suzuki",
            FamilyId::PSL3_3 => "PSL3_3",
            FamilyId::A7 => "A7",
            FamilyId::M11 => "M11",
            FamilyId::J1 => "J1",
            FamilyId::PSL3_odd => "PSL3_odd",
            FamilyId::PSL3_even => "PSL3_even",
            FamilyId::PSU3_odd => "PSU3_odd",
            FamilyId::PSU3_even => "PSU3_even",
            FamilyId::G2_2_prime => "G2_2_prime",
            FamilyId::PSL3_third_odd => "PSL3_third_odd",
            FamilyId::PSL3_third_even => "PSL3_third_even",
            FamilyId::PSU3_third_odd => "PSU3_third_odd",
            FamilyId::PSU3_third_even => "PSU3_third_even",
            FamilyId::M22 => "M22",
            FamilyId::PSL4_2 => "PSL4_2",
            FamilyId::M12 => "M12",
            FamilyId::M23 => "M23",
            FamilyId::Ree => "Ree",
            FamilyId::Sp4_4 => "Sp4_4",
            FamilyId::U4_2 => "U4_2",
            FamilyId::Sp4_q => "Sp4_q",
            FamilyId::U4_3 => "U4_3",
            FamilyId::TwoF4_2_prime => "TwoF4_2_prime",
            FamilyId::J3 => "J3",
            FamilyId::G2_3 => "G2_3",
            FamilyId::A9 => "A9",
            FamilyId::J2 => "J2",
            FamilyId::PSL4_3 => "PSL4_3",
            FamilyId::McL => "McL",
            FamilyId::Sp4_5 => "Sp4_5",
            FamilyId::G2_4 => "G2_4",
            FamilyId::HS => "HS",
            FamilyId::ON => "ON",
            FamilyId::M24 => "M24",
            FamilyId::G2_q => "G2_q",
        }
    }

    /// Number of codegrees of every member of the family.
    pub fn cod_size(&self) -> usize {
        use FamilyId::*;
        match self {
            PSL2_even => 4,
            PSL2_odd => 5,
            PSL3_4 | Suzuki => 6,
            PSL3_3 | A7 | M11 | J1 => 7,
            PSL3_odd | PSL3_even | PSU3_odd | PSU3_even | G2_2_prime => 8,
            PSL3_third_odd | PSL3_third_even | PSU3_third_odd | PSU3_third_even => 9,
            M22 => 10,
            PSL4_2 | M12 | M23 | Ree => 11,
            Sp4_4 => 12,
            U4_2 | Sp4_q => 13,
            U4_3 | TwoF4_2_prime | J3 => 14,
            G2_3 => 15,
            A9 | J2 => 16,
            PSL4_3 | McL => 17,
            Sp4_5 | G2_4 | HS => 18,
            ON => 19,
            M24 | G2_q => 20,
        }
    }

    /// Bucket letter: `a` for four codegrees through `q` for twenty.
    pub fn bucket(&self) -> char {
        (b'a' + (self.cod_size() - 4) as u8) as char
    }

    /// True for the infinite families.
    pub fn is_parametric(&self) -> bool {
        self.domain().is_some()
    }

    /// Admissible parameters (q, or k for PSL(2,k)) of a parametric family.
    pub fn domain(&self) -> Option<ParamDomain> {
        use FamilyId::*;
        let pp = |min, parity, congruence| ParamDomain {
            shape: Shape::PrimePower,
            min_exclusive: min,
            parity,
            congruence,
        };
        const ONE_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[1] });
        const TWO_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[2] });
        const NOT_ONE_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[0, 2] });
        const NOT_TWO_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[0, 1] });
        Some(match self {
            PSL2_even => ParamDomain { shape: Shape::PowerOfTwo, min_exclusive: 2, parity: None, congruence: None },
            PSL2_odd => pp(5, Some(Parity::Odd), None),
            Suzuki => ParamDomain { shape: Shape::OddPowerOfTwo, min_exclusive: 2, parity: None, congruence: None },
            PSL3_odd => pp(4, Some(Parity::Odd), NOT_ONE_MOD_3),
            PSL3_even => pp(4, Some(Parity::Even), NOT_ONE_MOD_3),
            PSU3_odd => pp(4, Some(Parity::Odd), NOT_TWO_MOD_3),
            PSU3_even => pp(4, Some(Parity::Even), NOT_TWO_MOD_3),
            PSL3_third_odd => pp(4, Some(Parity::Odd), ONE_MOD_3),
            PSL3_third_even => pp(4, Some(Parity::Even), ONE_MOD_3),
            PSU3_third_odd => pp(4, Some(Parity::Odd), TWO_MOD_3),
            PSU3_third_even => pp(4, Some(Parity::Even), TWO_MOD_3),
            Ree => ParamDomain { shape: Shape::OddPowerOfThree, min_exclusive: 3, parity: None, congruence: None },
            Sp4_q => ParamDomain { shape: Shape::PowerOfTwo, min_exclusive: 4, parity: None, congruence: None },
            G2_q => pp(6, None, Some(Congruence { modulus: 6, residues: &[2, 3, 4] })),
            _ => return None,
        })
    }

    /// Roster entries in bucket order whose bucket is at most `max_bucket`.
    pub fn up_to_bucket(max_bucket: char) -> impl Iterator<Item = FamilyId> {
        FamilyId::ALL.into_iter().filter(move |f| f.bucket() <= max_bucket)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FamilyId {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .iter()
            .find(|f| f.tag() == s)
            .copied()
            .ok_or_else(|| CatalogError::UnknownGroup(s.into()))
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// A faithful character degree of a proper cover `m.H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDegree {
    pub multiplier_part: u64,
    pub degree: u64,
}

/// A cover degree as quoted together with the codegree it is claimed to give.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CitedCover {
    pub multiplier_part: u64,
    pub degree: u64,
    pub claimed: FactoredInteger,
    /// The quotation names a cover of a different group than this record.
    pub foreign_group: bool,
}

/// One row of a maximal-subgroup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxSubgroupEntry {
    pub structure_label: String,
    pub order: FactoredInteger,
    /// |G : K|, exact.
    pub index: FactoredInteger,
    /// The admissibility note of the row (`-` when unconditional).
    pub constraint: String,
    /// Index stated as a closed form in the closing argument, where one is stated.
    pub claimed_index: Option<FactoredInteger>,
}

/// A fixed group: order, degrees and everything derived from them.
#[derive(Clone, Debug)]
pub struct GroupRecord {
    pub key: String,
    pub name: String,
    pub is_target: bool,
    pub order: FactoredInteger,
    /// Character degrees with multiplicity, trivial degree first.
    pub degrees: Vec<u64>,
    pub schur_multiplier: u64,
    pub cod: CodegreeSet,
    /// Codegrees quoted in the case analyses, kept as cross-check fixtures.
    pub codegrees_expected: Vec<FactoredInteger>,
    pub covers: Vec<CoverDegree>,
    pub cited_covers: Vec<CitedCover>,
    pub maximals: Vec<MaxSubgroupEntry>,
}

impl GroupRecord {
    /// Σ d² over the stored degree list.
    pub fn degree_square_sum(&self) -> u128 {
        self.degrees.iter().map(|&d| u128::from(d) * u128::from(d)).sum()
    }

    /// Parses one record file.
    pub fn parse(file: &str, text: &str) -> Result<GroupRecord, CatalogError> {
        let syntax = |line: usize, message: &str| CatalogError::Syntax {
            file: file.into(),
            line,
            message: message.into(),
        };
        let fi = |line: usize, s: &str| -> Result<FactoredInteger, CatalogError> {
            s.parse::<FactoredInteger>().map_err(|e| syntax(line, &e.to_string()))
        };
        let num = |line: usize, s: &str| -> Result<u64, CatalogError> {
            s.parse::<u64>().map_err(|_| syntax(line, "expected a decimal integer"))
        };
        let mut schema = None;
        let (mut key, mut name, mut is_target) = (None, None, false);
        let (mut order, mut schur, mut degrees) = (None, None, Vec::new());
        let mut expected = Vec::new();
        let (mut covers, mut cited, mut maximal_rows) = (Vec::new(), Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let field = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            match field {
                "schema" => schema = Some(num(ln, rest.first().copied().unwrap_or_default())?),
                "id" => key = rest.first().map(|s| s.to_string()),
                "name" => name = Some(rest.join(" ")),
                "target" => is_target = rest.first() == Some(&"yes"),
                "order" => order = Some(fi(ln, rest.first().copied().unwrap_or_default())?),
                "schur" => schur = Some(num(ln, rest.first().copied().unwrap_or_default())?),
                "degrees" => {
                    for tok in &rest {
                        let (d, m) = match tok.split_once('x') {
                            Some((d, m)) => (num(ln, d)?, num(ln, m)?),
                            None => (num(ln, tok)?, 1),
                        };
                        degrees.extend(core::iter::repeat_n(d, m as usize));
                    }
                }
                "codegrees_expected" => {
                    for tok in &rest {
                        expected.push(fi(ln, tok)?);
                    }
                }
                "cover" => {
                    if rest.len() < 2 {
                        return Err(syntax(ln, "cover needs multiplier part and degree"));
                    }
                    covers.push(CoverDegree { multiplier_part: num(ln, rest[0])?, degree: num(ln, rest[1])? });
                }
                "cover_cited" => {
                    if rest.len() < 3 {
                        return Err(syntax(ln, "cover_cited needs multiplier part, degree and claim"));
                    }
                    let claimed = if rest[2].contains(['^', '*']) {
                        fi(ln, rest[2])?
                    } else {
                        FactoredInteger::factorize(u128::from(num(ln, rest[2])?))?
                    };
                    cited.push(CitedCover {
                        multiplier_part: num(ln, rest[0])?,
                        degree: num(ln, rest[1])?,
                        claimed,
                        foreign_group: rest.get(3) == Some(&"mismatch"),
                    });
                }
                "maximal" => {
                    if rest.len() != 3 {
                        return Err(syntax(ln, "maximal needs label, order and index"));
                    }
                    maximal_rows.push((rest[0].to_string(), fi(ln, rest[1])?, num(ln, rest[2])?));
                }
                other => return Err(syntax(ln, &alloc::format!("unknown field `{other}`"))),
            }
        }
        if schema != Some(u64::from(SCHEMA_VERSION)) {
            return Err(syntax(0, "missing or unsupported schema version"));
        }
        let invariant = |message: String| CatalogError::Invariant { file: file.into(), message };
        let key = key.ok_or_else(|| syntax(0, "missing id"))?;
        let order = order.ok_or_else(|| syntax(0, "missing order"))?;
        let order_int = order.to_int()?;
        if degrees.first() != Some(&1) {
            return Err(invariant("degree list must start with the trivial degree 1".into()));
        }
        let degree_fis: Vec<FactoredInteger> = degrees.iter().map(|&d| FactoredInteger::of(d)).collect();
        for (d, dfi) in degrees.iter().zip(&degree_fis) {
            if !dfi.divides(&order) {
                return Err(invariant(alloc::format!("degree {d} does not divide the order")));
            }
        }
        let cod = CodegreeSet::of_simple_group(&order, &degree_fis)?;
        let mut maximals = Vec::new();
        for (label, ord, index) in maximal_rows {
            let idx = FactoredInteger::of(index);
            if ord.mul(&idx) != order {
                return Err(invariant(alloc::format!("maximal {label}: order x index != |G|")));
            }
            maximals.push(MaxSubgroupEntry {
                structure_label: label,
                order: ord,
                index: idx,
                constraint: "-".into(),
                claimed_index: None,
            });
        }
        let record = GroupRecord {
            name: name.unwrap_or_else(|| key.clone()),
            key,
            is_target,
            order,
            degrees,
            schur_multiplier: schur.ok_or_else(|| syntax(0, "missing schur"))?,
            cod,
            codegrees_expected: expected,
            covers,
            cited_covers: cited,
            maximals,
        };
        if record.degree_square_sum() != order_int {
            return Err(invariant("sum of squared degrees differs from the order".into()));
        }
        Ok(record)
    }
}

// ---------------------------------------------------------------------------
// Parametric formulas
// ---------------------------------------------------------------------------

fn fi(n: u64) -> FactoredInteger {
    FactoredInteger::of(n)
}

/// Exact product of small machine factors.
fn prod(parts: &[u64]) -> FactoredInteger {
    parts.iter().fold(FactoredInteger::one(), |acc, &p| acc.mul(&fi(p)))
}

/// Factored pieces of q = 2^f used by the Sp4(q) formulas.
struct Sp4Pieces {
    q: FactoredInteger,
    qm: FactoredInteger,
    qp: FactoredInteger,
    q2p: FactoredInteger,
}

impl Sp4Pieces {
    fn new(q: u64) -> Self {
        Sp4Pieces { q: fi(q), qm: fi(q - 1), qp: fi(q + 1), q2p: fi(q * q + 1) }
    }
}

/// |Sp4(q)| = q⁴(q²−1)(q⁴−1) for any q ≥ 2.
pub fn sp4_order(q: u64) -> FactoredInteger {
    let s = Sp4Pieces::new(q);
    s.q.pow(4).mul(&s.qm.pow(2)).mul(&s.qp.pow(2)).mul(&s.q2p)
}

/// Character degrees of Sp4(q), q = 2^f ≥ 4, as (degree, multiplicity),
/// trivial degree first. Generic Lusztig-series degrees; the list reproduces
/// the recorded degrees of Sp4(4) and Sp4(8) exactly.
pub fn sp4_even_degrees(q: u64) -> Vec<(FactoredInteger, u64)> {
    let s = Sp4Pieces::new(q);
    let half_q = fi(q / 2);
    let mut v = alloc::vec![
        (FactoredInteger::one(), 1),
        (half_q.mul(&s.qp.pow(2)), 1),
        (half_q.mul(&s.qm.pow(2)), 1),
        (half_q.mul(&s.q2p), 2),
        (s.q.pow(4), 1),
        (s.qp.mul(&s.q2p), q - 2),
        (s.q.mul(&s.qp).mul(&s.q2p), q - 2),
        (s.qm.mul(&s.q2p), q),
        (s.q.mul(&s.qm).mul(&s.q2p), q),
        (s.qp.pow(2).mul(&s.q2p), (q - 2) * (q - 4) / 8),
        (s.qm.pow(2).mul(&s.q2p), q * (q - 2) / 8),
        (s.qm.mul(&s.qp).mul(&s.q2p), q * (q - 2) / 2),
        (s.qm.pow(2).mul(&s.qp.pow(2)), q * q / 4),
    ];
    v.retain(|(_, m)| *m > 0);
    v
}

/// cod(Sp4(q)) for q = 2^f ≥ 4.
pub fn sp4_even_codegrees(q: u64) -> CodegreeSet {
    let order = sp4_order(q);
    let degrees: Vec<FactoredInteger> = sp4_even_degrees(q).into_iter().map(|(d, _)| d).collect();
    CodegreeSet::of_simple_group(&order, &degrees).expect("Sp4 degrees divide the order")
}

/// Named codegree-element formulas of Sp4(q) that the case analyses use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sp4Element {
    /// q⁴(q+1)(q−1)²
    Q4Qp1Qm1Sq,
    /// q⁴(q+1)²(q−1)
    Q4Qp1SqQm1,
    /// q⁴(q+1)(q−1)
    Q4Qp1Qm1,
    /// q⁴(q+1)²
    Q4Qp1Sq,
    /// q⁴(q−1)²
    Q4Qm1Sq,
    /// (q²+1)(q−1)²(q+1)², the unique nontrivial odd codegree
    Odd,
    /// 2q³(q−1)²(q+1)², the even codegree of least 2-adic valuation
    TwoQ3,
}

impl Sp4Element {
    pub const ALL: [Sp4Element; 7] = [
        Sp4Element::Q4Qp1Qm1Sq,
        Sp4Element::Q4Qp1SqQm1,
        Sp4Element::Q4Qp1Qm1,
        Sp4Element::Q4Qp1Sq,
        Sp4Element::Q4Qm1Sq,
        Sp4Element::Odd,
        Sp4Element::TwoQ3,
    ];

    pub fn formula(&self) -> &'static str {
        match self {
            Sp4Element::Q4Qp1Qm1Sq => "q^4(q+1)(q-1)^2",
            Sp4Element::Q4Qp1SqQm1 => "q^4(q+1)^2(q-1)",
            Sp4Element::Q4Qp1Qm1 => "q^4(q+1)(q-1)",
            Sp4Element::Q4Qp1Sq => "q^4(q+1)^2",
            Sp4Element::Q4Qm1Sq => "q^4(q-1)^2",
            Sp4Element::Odd => "(q^2+1)(q-1)^2(q+1)^2",
            Sp4Element::TwoQ3 => "2q^3(q-1)^2(q+1)^2",
        }
    }

    pub fn evaluate(&self, q: u64) -> FactoredInteger {
        let s = Sp4Pieces::new(q);
        let q4 = s.q.pow(4);
        match self {
            Sp4Element::Q4Qp1Qm1Sq => q4.mul(&s.qp).mul(&s.qm.pow(2)),
            Sp4Element::Q4Qp1SqQm1 => q4.mul(&s.qp.pow(2)).mul(&s.qm),
            Sp4Element::Q4Qp1Qm1 => q4.mul(&s.qp).mul(&s.qm),
            Sp4Element::Q4Qp1Sq => q4.mul(&s.qp.pow(2)),
            Sp4Element::Q4Qm1Sq => q4.mul(&s.qm.pow(2)),
            Sp4Element::Odd => s.q2p.mul(&s.qm.pow(2)).mul(&s.qp.pow(2)),
            Sp4Element::TwoQ3 => fi(2).mul(&s.q.pow(3)).mul(&s.qm.pow(2)).mul(&s.qp.pow(2)),
        }
    }
}

/// A family codegree set at one parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySet {
    pub elements: CodegreeSet,
    /// True when only the formulas the case analyses cite are stored.
    pub partial: bool,
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Context for [`Catalog::maximal_subgroup_orders`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxContext {
    Psl4_3,
    Sp4Even { q: u64 },
}

/// The loaded data: every fixed group record plus the Sp4(q even) maximal table.
#[derive(Clone, Debug)]
pub struct Catalog {
    records: Vec<GroupRecord>,
    sp4_maximal_rows: Vec<Sp4MaxRow>,
}

#[derive(Clone, Debug)]
struct Sp4MaxRow {
    label: String,
    order_formula: String,
    constraint: String,
    claimed_formula: Option<String>,
}

impl Catalog {
    /// Parses all embedded data files and checks every record invariant.
    pub fn load() -> Result<Catalog, CatalogError> {
        let mut records = Vec::new();
        for (file, text) in GROUP_FILES {
            let r = GroupRecord::parse(file, text)?;
            if r.key != *file {
                return Err(CatalogError::Invariant {
                    file: (*file).into(),
                    message: "id differs from file name".into(),
                });
            }
            records.push(r);
        }
        let mut rows = Vec::new();
        let mut schema = None;
        for (i, raw) in SP4_EVEN_MAXIMALS.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            match w.as_slice() {
                ["schema", v] => schema = v.parse::<u32>().ok(),
                ["row", label, order, constraint, claimed] => rows.push(Sp4MaxRow {
                    label: (*label).into(),
                    order_formula: (*order).into(),
                    constraint: (*constraint).into(),
                    claimed_formula: (*claimed != "-").then(|| (*claimed).into()),
                }),
                _ => {
                    return Err(CatalogError::Syntax {
                        file: "sp4_even_maximals".into(),
                        line: i + 1,
                        message: "expected `row <label> <order> <constraint> <claimed>`".into(),
                    })
                }
            }
        }
        if schema != Some(SCHEMA_VERSION) {
            return Err(CatalogError::Syntax {
                file: "sp4_even_maximals".into(),
                line: 0,
                message: "missing or unsupported schema version".into(),
            });
        }
        let cat = Catalog { records, sp4_maximal_rows: rows };
        // Validate every formula id once at a sample parameter.
        cat.maximal_subgroup_orders(MaxContext::Sp4Even { q: 8 })?;
        Ok(cat)
    }

    /// All fixed-group records.
    pub fn records(&self) -> &[GroupRecord] {
        &self.records
    }

    /// Record by tag (e.g. `"M22"`).
    pub fn record(&self, key: &str) -> Result<&GroupRecord, CatalogError> {
        self.records
            .iter()
            .find(|r| r.key == key)
            .ok_or_else(|| CatalogError::UnknownGroup(key.into()))
    }

    /// |H| for a target.
    pub fn group_order(&self, id: GroupId) -> FactoredInteger {
        match id.sp4_q() {
            Some(q) => sp4_order(q),
            None => self.record(id.tag()).expect("target record present").order.clone(),
        }
    }

    /// cod(H) for a target (the Sp4(q) member is computed from the generic
    /// degree formula).
    pub fn codegree_set(&self, id: GroupId) -> CodegreeSet {
        match id.sp4_q() {
            Some(q) => sp4_even_codegrees(q),
            None => self.record(id.tag()).expect("target record present").cod.clone(),
        }
    }

    /// Atlas Schur multiplier order (trivial for Sp4(2^f), f ≥ 3).
    pub fn schur_multiplier(&self, id: GroupId) -> u64 {
        match id {
            GroupId::Sp4_q { .. } => 1,
            _ => self.record(id.tag()).expect("target record present").schur_multiplier,
        }
    }

    /// Codegrees of a roster entry at a parameter. Fixed entries take `None`.
    pub fn family_codegrees(&self, fam: FamilyId, param: Option<u64>) -> Result<FamilySet, CatalogError> {
        let bad = || CatalogError::InadmissibleParameter { family: fam, param };
        let Some(domain) = fam.domain() else {
            if param.is_some() {
                return Err(bad());
            }
            return Ok(FamilySet { elements: self.record(fam.tag())?.cod.clone(), partial: false });
        };
        let q = param.filter(|&q| domain.admits(q)).ok_or_else(bad)?;
        use FamilyId::*;
        let set = |xs: Vec<FactoredInteger>, partial| FamilySet { elements: CodegreeSet::from_elements(xs), partial };
        let third = |x: FactoredInteger| x.div_exact(&fi(3)).expect("divisible by 3 on the domain");
        Ok(match fam {
            PSL2_even => set(alloc::vec![prod(&[q, q - 1]), prod(&[q, q + 1]), prod(&[q - 1, q + 1])], false),
            PSL2_odd => {
                let eps_minus = if q % 4 == 1 { q - 1 } else { q + 1 };
                set(
                    alloc::vec![
                        prod(&[q, q - 1]).div_exact(&fi(2))?,
                        prod(&[q, q + 1]).div_exact(&fi(2))?,
                        prod(&[q - 1, q + 1]).div_exact(&fi(2))?,
                        prod(&[q, eps_minus]),
                    ],
                    false,
                )
            }
            Suzuki => set(alloc::vec![prod(&[q - 1, q * q + 1])], true),
            PSL3_odd | PSL3_even => set(psl3_cited(q), true),
            PSU3_odd | PSU3_even => set(psu3_cited(q), true),
            PSL3_third_odd | PSL3_third_even => set(psl3_cited(q).into_iter().map(third).collect(), true),
            PSU3_third_odd | PSU3_third_even => set(psu3_cited(q).into_iter().map(third).collect(), true),
            Ree => {
                let f = (prime_power_decomposition(q).expect("power of 3").1 - 1) / 2;
                let m = 3u64.pow(f);
                let q3 = fi(q).pow(3);
                set(
                    alloc::vec![
                        fi(3).pow(5 * f + 3).mul(&fi(q * q - q + 1)),
                        q3.mul(&fi(q + 1 - 3 * m)),
                        q3.mul(&fi(q + 1 + 3 * m)),
                        prod(&[q - 1, q + 1, q * q - q + 1]),
                    ],
                    true,
                )
            }
            Sp4_q => FamilySet { elements: sp4_even_codegrees(q), partial: false },
            G2_q => set(alloc::vec![prod(&[q - 1, q + 1]).mul(&g2_q6m1(q))], true),
            _ => unreachable!("fixed families handled above"),
        })
    }

    /// Rows of the maximal-subgroup table admissible at the context, with
    /// orders and indices evaluated exactly.
    pub fn maximal_subgroup_orders(&self, ctx: MaxContext) -> Result<Vec<MaxSubgroupEntry>, CatalogError> {
        match ctx {
            MaxContext::Psl4_3 => Ok(self.record("PSL4_3")?.maximals.clone()),
            MaxContext::Sp4Even { q } => {
                let f = match prime_power_decomposition(q) {
                    Some((2, f)) if f >= 3 => f,
                    _ => return Err(CatalogError::UnsupportedGroup(alloc::format!("Sp4({q})"))),
                };
                let g = sp4_order(q);
                let mut out = Vec::new();
                for row in &self.sp4_maximal_rows {
                    let q0s: Vec<Option<u64>> = match row.constraint.as_str() {
                        "-" => alloc::vec![None],
                        "q!=4" => alloc::vec![None],
                        "f-odd,f>=3" if f % 2 == 1 => alloc::vec![None],
                        "f-odd,f>=3" => Vec::new(),
                        // q = q0^r for a prime r: one row per prime divisor r of f.
                        "q=q0^r,r-prime" => fi(u64::from(f)).primes().map(|r| Some(1u64 << (f / r as u32))).collect(),
                        other => {
                            return Err(CatalogError::Syntax {
                                file: "sp4_even_maximals".into(),
                                line: 0,
                                message: alloc::format!("unknown constraint `{other}`"),
                            })
                        }
                    };
                    for q0 in q0s {
                        let order = eval_sp4_formula(&row.order_formula, q, q0)?;
                        let index = g.div_exact(&order)?;
                        let claimed_index = match &row.claimed_formula {
                            Some(id) => Some(eval_sp4_formula(id, q, q0)?),
                            None => None,
                        };
                        let structure_label = match q0 {
                            Some(q0) => alloc::format!("{}[q0={q0}]", row.label),
                            None => row.label.clone(),
                        };
                        out.push(MaxSubgroupEntry {
                            structure_label,
                            order,
                            index,
                            constraint: row.constraint.clone(),
                            claimed_index,
                        });
                    }
                }
                Ok(out)
            }
        }
    }
}

fn psl3_cited(q: u64) -> Vec<FactoredInteger> {
    alloc::vec![
        fi(q).pow(3).mul(&fi(q * q + q + 1)),
        prod(&[q * q + q + 1, q - 1, q + 1, q - 1]),
    ]
}

fn psu3_cited(q: u64) -> Vec<FactoredInteger> {
    alloc::vec![
        fi(q).pow(3).mul(&fi(q * q - q + 1)),
        prod(&[q * q - q + 1, q + 1, q + 1, q - 1]),
    ]
}

/// q⁶ − 1 = (q−1)(q+1)(q²+q+1)(q²−q+1), factored piecewise.
fn g2_q6m1(q: u64) -> FactoredInteger {
    prod(&[q - 1, q + 1, q * q + q + 1, q * q - q + 1])
}

/// Evaluates a formula id of the Sp4(q even) maximal table.
fn eval_sp4_formula(id: &str, q: u64, q0: Option<u64>) -> Result<FactoredInteger, CatalogError> {
    let s = Sp4Pieces::new(q);
    let two = fi(2);
    let halve = |x: FactoredInteger, d: u64| x.div_exact(&fi(d));
    Ok(match id {
        "q^3(q^2-1)(q^2-q)" => s.q.pow(4).mul(&s.qm.pow(2)).mul(&s.qp),
        "q^4(q-1)^2" => s.q.pow(4).mul(&s.qm.pow(2)),
        "2q^2(q-1)^2(q+1)^2" => two.mul(&s.q.pow(2)).mul(&s.qm.pow(2)).mul(&s.qp.pow(2)),
        "2q^2(q^4-1)" => two.mul(&s.q.pow(2)).mul(&s.qm).mul(&s.qp).mul(&s.q2p),
        "8(q-1)^2" => fi(8).mul(&s.qm.pow(2)),
        "8(q+1)^2" => fi(8).mul(&s.qp.pow(2)),
        "4(q^2+1)" => fi(4).mul(&s.q2p),
        "q0^4(q0^4-1)(q0^2-1)" => {
            let q0 = q0.ok_or_else(|| CatalogError::UnsupportedGroup("Sp4(q0) without q0".into()))?;
            sp4_order(q0)
        }
        "q^2(q^2-1)/2" => halve(s.q.pow(2).mul(&s.qm).mul(&s.qp), 2)?,
        "q^2(q^2+1)(q^2-1)" => s.q.pow(2).mul(&s.q2p).mul(&s.qm).mul(&s.qp),
        "q^2(q^2+1)(q-1)" => s.q.pow(2).mul(&s.q2p).mul(&s.qm),
        "q^4(q^2+1)(q+1)^2/8" => halve(s.q.pow(4).mul(&s.q2p).mul(&s.qp.pow(2)), 8)?,
        "q^4(q^2+1)(q-1)^2/8" => halve(s.q.pow(4).mul(&s.q2p).mul(&s.qm.pow(2)), 8)?,
        "q^4(q+1)^2(q-1)^2/4" => halve(s.q.pow(4).mul(&s.qp.pow(2)).mul(&s.qm.pow(2)), 4)?,
        "2q^2(q^2+1)(q+1)(q-1)" => two.mul(&s.q.pow(2)).mul(&s.q2p).mul(&s.qp).mul(&s.qm),
        "q^2(q+1)^2(q-1)" => s.q.pow(2).mul(&s.qp.pow(2)).mul(&s.qm),
        other => {
            return Err(CatalogError::Syntax {
                file: "sp4_even_maximals".into(),
                line: 0,
                message: alloc::format!("unknown formula id `{other}`"),
            })
        }
    })
}

/// |GL(n, p)| = p^{n(n−1)/2} ∏_{i=1..n} (pⁱ − 1), factored piecewise.
pub fn gl_order(n: u32, p: u64) -> FactoredInteger {
    let mut acc = FactoredInteger::prime_power(p, n * (n - 1) / 2).expect("p prime");
    let mut pi: u128 = 1;
    for _ in 1..=n {
        pi *= u128::from(p);
        acc = acc.mul(&FactoredInteger::factorize(pi - 1).expect("p^i - 1 in range"));
    }
    acc
}
