//! The per-target case analysis: for a target H, every simple group S with
//! |cod(S)| ≤ |cod(H)| is a candidate for a simple quotient G/N of a group G
//! with cod(G) = cod(H), and each candidate other than H is ruled out by an
//! exact check.
//!
//! Which check applies to which (target, candidate) pair is data
//! (`data/recipes.txt`); the engine re-derives every witness from the catalog
//! rather than trusting the table, and falls back to the least missing
//! element when a cited element does not do the job.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::{Catalog, CodegreeSet, FamilyId, GroupId};
use crate::diophantine::{
    exists_half_pair, odd_elements, residue_search, solve_in, two_adic_profile, ExprFamily, ResiduePoly,
};
use crate::factored_int::{prime_power_decomposition, FactoredInteger};

const RECIPES: &str = include_str!("../data/recipes.txt");

/// Sampled q for the parametric target Sp4(q), q = 2^f > 4.
pub const DEFAULT_SP4_SAMPLES: [u64; 5] = [8, 16, 32, 64, 128];

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

/// The check a recipe line prescribes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    /// The candidate is the target.
    SelfMatch,
    /// Named candidate codegrees that are absent from cod(H) (possibly none
    /// named, in which case the least missing element is used).
    Missing(Vec<FactoredInteger>),
    /// Every listed expression must hit a codegree of H at the same parameter.
    NoRoot(Vec<ExprFamily>),
    /// PSL(2,k), k odd: k(k−ε)/2 and k(k−ε) are both codegrees.
    HalfPair,
    /// poly ≢ 0 (mod 9), so the expression's value is prime to 3.
    Residue(ResiduePoly, ExprFamily),
    /// ν₂ of the expression exceeds every ν₂ in cod(H).
    Valuation(ExprFamily),
    /// The prime does not divide the candidate's order, but divides every odd
    /// nontrivial codegree of H.
    Coprime(u64, ExprFamily),
    /// The prime divides a candidate codegree but no codegree of H.
    PrimeAbsent(u64),
    /// The candidate has more nontrivial odd codegrees than H.
    OddCount,
    /// Sp4(q) target: an odd candidate codegree is not the unique odd
    /// codegree of Sp4(q).
    TargetEq(ExprFamily),
    /// Every even codegree of H has larger 2-adic valuation than any
    /// candidate codegree.
    TwoAdicGap,
}

impl RecipeKind {
    pub fn reason(&self) -> ReasonKind {
        match self {
            RecipeKind::SelfMatch => ReasonKind::SelfMatch,
            RecipeKind::Missing(_) => ReasonKind::ElementNotInTarget,
            RecipeKind::NoRoot(_) | RecipeKind::TargetEq(_) => ReasonKind::OddCodegreeNoRoot,
            RecipeKind::HalfPair => ReasonKind::HalfPairObstruction,
            RecipeKind::Residue(..) => ReasonKind::ResidueObstruction,
            RecipeKind::Valuation(_) | RecipeKind::TwoAdicGap => ReasonKind::ValuationBound,
            RecipeKind::Coprime(..) | RecipeKind::PrimeAbsent(_) => ReasonKind::PrimeNotDividing,
            RecipeKind::OddCount => ReasonKind::CountMismatch,
        }
    }
}

/// One recipe line: `<target> <bucket> <candidate> <kind> [args]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    /// Target tag (`Sp4_q` covers every sampled q).
    pub target: String,
    pub bucket: char,
    pub candidate: FamilyId,
    pub kind: RecipeKind,
}

impl Recipe {
    pub fn case_label(&self) -> String {
        format!("{}({})", self.target, self.bucket)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EliminationError {
    /// A recipe line failed to parse.
    Syntax { line: usize, message: String },
    /// No recipe and no generic check for the pair.
    UnknownCase { target: GroupId, candidate: FamilyId },
}

impl fmt::Display for EliminationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EliminationError::Syntax { line, message } => write!(f, "recipes:{line}: {message}"),
            EliminationError::UnknownCase { target, candidate } => {
                write!(f, "no recipe or generic check for {candidate} against {target}")
            }
        }
    }
}

/// Parses a recipe table.
pub fn parse_recipes(text: &str) -> Result<Vec<Recipe>, EliminationError> {
    let mut out = Vec::new();
    let mut schema_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| EliminationError::Syntax { line: i + 1, message };
        let w: Vec<&str> = line.split_whitespace().collect();
        if w[0] == "schema" {
            if w.get(1) != Some(&"1") {
                return Err(err("unsupported schema".into()));
            }
            schema_seen = true;
            continue;
        }
        if w.len() < 4 {
            return Err(err("expected `<target> <bucket> <candidate> <kind> [args]`".into()));
        }
        let bucket = match w[1].as_bytes() {
            [b @ b'a'..=b'q'] => *b as char,
            _ => return Err(err(format!("bad bucket `{}`", w[1]))),
        };
        let candidate: FamilyId = w[2].parse().map_err(|_| err(format!("unknown candidate `{}`", w[2])))?;
        let args = &w[4..];
        let expr = |s: &str| s.parse::<ExprFamily>().map_err(|_| err(format!("unknown expression `{s}`")));
        let prime = |s: &str| s.parse::<u64>().map_err(|_| err(format!("bad prime `{s}`")));
        let kind = match (w[3], args) {
            ("self", []) => RecipeKind::SelfMatch,
            ("missing", xs) => {
                let parsed: Result<Vec<FactoredInteger>, _> = xs.iter().map(|x| x.parse()).collect();
                RecipeKind::Missing(parsed.map_err(|e| err(format!("bad element: {e}")))?)
            }
            ("no_root", xs) if !xs.is_empty() => {
                RecipeKind::NoRoot(xs.iter().map(|x| expr(x)).collect::<Result<_, _>>()?)
            }
            ("half_pair", []) => RecipeKind::HalfPair,
            ("residue", [poly, e]) => RecipeKind::Residue(
                poly.parse().map_err(|_| err(format!("unknown polynomial `{poly}`")))?,
                expr(e)?,
            ),
            ("valuation", [e]) => RecipeKind::Valuation(expr(e)?),
            ("coprime", [p, e]) => RecipeKind::Coprime(prime(p)?, expr(e)?),
            ("prime_absent", [p]) => RecipeKind::PrimeAbsent(prime(p)?),
            ("odd_count", []) => RecipeKind::OddCount,
            ("target_eq", [e]) => RecipeKind::TargetEq(expr(e)?),
            ("two_adic_gap", []) => RecipeKind::TwoAdicGap,
            (k, _) => return Err(err(format!("unknown kind or arity `{k}`"))),
        };
        if bucket != candidate.bucket() {
            return Err(err(format!("{candidate} belongs to bucket {}", candidate.bucket())));
        }
        out.push(Recipe { target: w[0].to_string(), bucket, candidate, kind });
    }
    if !schema_seen {
        return Err(EliminationError::Syntax { line: 0, message: "missing schema line".into() });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

/// The pattern of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ReasonKind {
    OddCodegreeNoRoot,
    ElementNotInTarget,
    HalfPairObstruction,
    ResidueObstruction,
    ValuationBound,
    PrimeNotDividing,
    CountMismatch,
    SelfMatch,
}

impl ReasonKind {
    /// A neutral description of the check.
    pub fn citation(&self) -> &'static str {
        match self {
            ReasonKind::OddCodegreeNoRoot => {
                "the candidate's codegree formula has no admissible root among the target's codegrees"
            }
            ReasonKind::ElementNotInTarget => "a codegree of the candidate is not a codegree of the target",
            ReasonKind::HalfPairObstruction => {
                "PSL(2,k), k odd, has a codegree that is twice another; the target has no matching pair"
            }
            ReasonKind::ResidueObstruction => {
                "q^2 +- q + 1 is never divisible by 9, so the candidate codegree is prime to 3 and must match one"
            }
            ReasonKind::ValuationBound => "2-adic valuations of the candidate and the target cannot match",
            ReasonKind::PrimeNotDividing => "a prime divides codegrees on one side only",
            ReasonKind::CountMismatch => "the candidate has more nontrivial odd codegrees than the target",
            ReasonKind::SelfMatch => "the candidate is the target itself",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Verdict {
    Eliminated,
    Survives,
    Unresolved,
}

/// Overall result of a replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Status {
    Verified,
    Failed,
    Unresolved,
}

/// A parameter at which an expression equals a target codegree.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootHit {
    pub element: FactoredInteger,
    pub param: u64,
    /// For q³(q+1∓3m): m and the sign (`true` for +).
    pub ree_m: Option<(u64, bool)>,
}

/// Roots of one expression over the target's nontrivial codegrees.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExprRoots {
    pub expr: ExprFamily,
    pub equations_checked: usize,
    pub hits: Vec<RootHit>,
}

/// Structured evidence behind a verdict; every variant can be rechecked.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Witness {
    SelfMatch,
    /// `element ∈ cod(candidate)`, `element ∉ cod(target)`.
    MissingElement { element: FactoredInteger, cited: bool },
    /// No parameter is a root of every expression.
    NoCommonRoot { roots: Vec<ExprRoots> },
    /// Half-pairs of the target, the PSL(2,k) roots found for them, and for
    /// each root a codegree of PSL(2,k) missing from the target.
    HalfPair {
        pairs: Vec<(FactoredInteger, FactoredInteger)>,
        roots: Vec<(FactoredInteger, u64, Option<FactoredInteger>)>,
    },
    Residue { poly: &'static str, modulus: u64, zeros: Vec<u64>, roots: ExprRoots },
    Valuation { expr: ExprFamily, least_valuation: u32, target_max_valuation: u32 },
    TwoAdicGap { candidate_max: u32, target_even_min: u32 },
    /// `prime` divides no candidate codegree; the listed target elements are
    /// the ones the candidate's odd codegree would have to equal.
    PrimeDividesAllOdd { prime: u64, odd_target_elements: Vec<FactoredInteger> },
    /// `element ∈ cod(candidate)` is divisible by `prime`; no target codegree is.
    PrimeAbsent { prime: u64, element: FactoredInteger },
    OddCount { candidate: usize, target: usize },
    /// Odd candidate codegrees and whether each solves the expression.
    TargetEquation { expr: ExprFamily, rejected: FactoredInteger },
    /// The check did not go through; the string says why.
    Open(String),
}

/// One replayed case.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CaseVerdict {
    pub target: String,
    /// q when the target is a sampled member of Sp4(q).
    pub sample_q: Option<u64>,
    pub candidate: FamilyId,
    #[cfg_attr(feature = "serde", serde(rename = "lemma_case"))]
    pub case_label: String,
    pub reason: ReasonKind,
    pub witness: Witness,
    pub verdict: Verdict,
    pub citation: &'static str,
    /// Divergence between the recipe's cited data and what the engine found.
    pub divergence: Option<String>,
    /// Extra remark (e.g. how a witness was chosen).
    pub note: Option<String>,
}

/// All cases of one target.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LemmaReport {
    pub target: String,
    /// The sampled q when the target is Sp4(q).
    pub samples: Vec<u64>,
    /// No nontrivial codegree of the target is a prime power.
    pub perfect: bool,
    pub cases: Vec<CaseVerdict>,
    pub overall: Status,
    /// Roster candidates without a recipe line, and recipe lines outside the
    /// roster range.
    pub coverage_gaps: Vec<String>,
}

impl LemmaReport {
    pub fn eliminated(&self) -> usize {
        self.cases.iter().filter(|c| c.verdict == Verdict::Eliminated).count()
    }

    pub fn divergences(&self) -> impl Iterator<Item = &CaseVerdict> {
        self.cases.iter().filter(|c| c.divergence.is_some())
    }
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// True when no nontrivial element is a prime power; such a group is perfect.
pub fn perfect_check(s: &CodegreeSet) -> bool {
    s.nontrivial().all(|x| !x.is_prime_power())
}

/// Sort key for witness choice: 2-adic valuation first, then value.
fn witness_key(x: &FactoredInteger) -> (u32, FactoredInteger) {
    (x.valuation(2), x.clone())
}

/// The least candidate element missing from the target, in (ν₂, value)
/// order; `None` when the candidate set is contained in the target.
pub fn subset_check(candidate: &CodegreeSet, target: &CodegreeSet) -> Option<FactoredInteger> {
    candidate.iter().filter(|x| !target.contains(x)).min_by_key(|x| witness_key(x)).cloned()
}

/// Replay options.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayConfig {
    pub sp4_samples: Vec<u64>,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig { sp4_samples: DEFAULT_SP4_SAMPLES.to_vec() }
    }
}

/// The recipe table bound to a catalog.
pub struct Engine<'a> {
    catalog: &'a Catalog,
    recipes: Vec<Recipe>,
}

struct Outcome {
    witness: Witness,
    verdict: Verdict,
    divergence: Option<String>,
    note: Option<String>,
}

impl Outcome {
    fn eliminated(witness: Witness) -> Self {
        Outcome { witness, verdict: Verdict::Eliminated, divergence: None, note: None }
    }
    fn open(why: String) -> Self {
        Outcome { witness: Witness::Open(why), verdict: Verdict::Unresolved, divergence: None, note: None }
    }
}

impl<'a> Engine<'a> {
    /// Engine over the shipped recipe table.
    pub fn new(catalog: &'a Catalog) -> Result<Self, EliminationError> {
        Ok(Engine { catalog, recipes: parse_recipes(RECIPES)? })
    }

    /// Engine over an explicit recipe table.
    pub fn with_recipes(catalog: &'a Catalog, recipes: Vec<Recipe>) -> Self {
        Engine { catalog, recipes }
    }

    pub fn recipes(&self) -> &[Recipe] {
        &self.recipes
    }

    fn recipe_for(&self, target: GroupId, candidate: FamilyId) -> Option<&Recipe> {
        self.recipes.iter().find(|r| r.target == target.tag() && r.candidate == candidate)
    }

    /// Runs the check for one (target, candidate) pair.
    pub fn eliminate_candidate(&self, target: GroupId, candidate: FamilyId) -> Result<CaseVerdict, EliminationError> {
        let target_cod = self.catalog.codegree_set(target);
        let (label, kind, recipe_based) = match self.recipe_for(target, candidate) {
            Some(r) => (r.case_label(), r.kind.clone(), true),
            None if candidate == target.as_family() => {
                (format!("{}({})", target.tag(), candidate.bucket()), RecipeKind::SelfMatch, false)
            }
            None if !candidate.is_parametric() => {
                (format!("{}({})", target.tag(), candidate.bucket()), RecipeKind::Missing(Vec::new()), false)
            }
            None => return Err(EliminationError::UnknownCase { target, candidate }),
        };
        let mut outcome = self.run(target, candidate, &kind, &target_cod);
        if !recipe_based {
            outcome.note = Some("no recipe line; generic check applied".into());
        }
        Ok(CaseVerdict {
            target: target.tag().into(),
            sample_q: target.sp4_q(),
            candidate,
            case_label: label,
            reason: kind.reason(),
            witness: outcome.witness,
            verdict: outcome.verdict,
            citation: kind.reason().citation(),
            divergence: outcome.divergence,
            note: outcome.note,
        })
    }

    fn fixed_cod(&self, candidate: FamilyId) -> Option<CodegreeSet> {
        self.catalog.family_codegrees(candidate, None).ok().map(|s| s.elements)
    }

    fn run(&self, target: GroupId, candidate: FamilyId, kind: &RecipeKind, tc: &CodegreeSet) -> Outcome {
        match kind {
            RecipeKind::SelfMatch => {
                if candidate == target.as_family() {
                    Outcome { witness: Witness::SelfMatch, verdict: Verdict::Survives, divergence: None, note: None }
                } else {
                    Outcome::open(format!("{candidate} is not the target"))
                }
            }
            RecipeKind::Missing(cites) => self.check_missing(candidate, cites, tc),
            RecipeKind::NoRoot(exprs) => self.check_no_root(candidate, exprs, tc),
            RecipeKind::HalfPair => self.check_half_pair(candidate, tc),
            RecipeKind::Residue(poly, expr) => self.check_residue(candidate, *poly, *expr, tc),
            RecipeKind::Valuation(expr) => {
                let Some(domain) = candidate.domain() else {
                    return Outcome::open("valuation check needs a parametric candidate".into());
                };
                // The least admissible q = 2^f gives the least valuation,
                // which grows with f for every 2-power expression.
                let f0 = match domain.iter().next().and_then(prime_power_decomposition) {
                    Some((2, f)) => f,
                    _ => return Outcome::open("valuation check needs q a power of 2".into()),
                };
                let least = two_adic_profile(*expr, f0).unwrap_or(0);
                let next = two_adic_profile(*expr, f0 + 1).unwrap_or(0);
                let max = tc.max_valuation(2);
                if next > least && least > max {
                    Outcome::eliminated(Witness::Valuation {
                        expr: *expr,
                        least_valuation: least,
                        target_max_valuation: max,
                    })
                } else {
                    Outcome::open(format!("valuation {least} does not exceed target maximum {max}"))
                }
            }
            RecipeKind::Coprime(p, expr) => self.check_coprime(candidate, *p, *expr, tc),
            RecipeKind::PrimeAbsent(p) => {
                let Some(cc) = self.fixed_cod(candidate) else {
                    return Outcome::open("prime check needs a fixed candidate".into());
                };
                let element = cc.iter().filter(|x| x.valuation(*p) > 0).min_by_key(|x| witness_key(x)).cloned();
                match element {
                    Some(e) if tc.iter().all(|x| x.valuation(*p) == 0) => {
                        Outcome::eliminated(Witness::PrimeAbsent { prime: *p, element: e })
                    }
                    _ => Outcome::open(format!("{p} does not separate the sets")),
                }
            }
            RecipeKind::OddCount => {
                let cand = match self.fixed_cod(candidate) {
                    Some(cc) => Some(odd_elements(&cc).len()),
                    None => guaranteed_odd_codegrees(candidate),
                };
                let tgt = odd_elements(tc).len();
                match cand {
                    Some(c) if c > tgt => Outcome::eliminated(Witness::OddCount { candidate: c, target: tgt }),
                    _ => Outcome::open(format!("odd counts {cand:?} vs {tgt} do not separate")),
                }
            }
            RecipeKind::TargetEq(expr) => {
                let Some(cc) = self.fixed_cod(candidate) else {
                    return Outcome::open("target equation check needs a fixed candidate".into());
                };
                let rejected = odd_elements(&cc).into_iter().find(|x| {
                    solve_in(*expr, &expr.domain(), x).map(|s| s.root.is_none()).unwrap_or(false)
                });
                match rejected {
                    Some(x) => Outcome::eliminated(Witness::TargetEquation { expr: *expr, rejected: x }),
                    None => Outcome::open("every odd candidate codegree solves the equation".into()),
                }
            }
            RecipeKind::TwoAdicGap => {
                let Some(cc) = self.fixed_cod(candidate) else {
                    return Outcome::open("2-adic gap check needs a fixed candidate".into());
                };
                let cand_max = cc.max_valuation(2);
                let tgt_min = tc.nontrivial().map(|x| x.valuation(2)).filter(|&v| v > 0).min();
                match tgt_min {
                    Some(m) if cand_max > 0 && cand_max < m => Outcome::eliminated(Witness::TwoAdicGap {
                        candidate_max: cand_max,
                        target_even_min: m,
                    }),
                    _ => Outcome::open("2-adic valuations overlap".into()),
                }
            }
        }
    }

    fn check_missing(&self, candidate: FamilyId, cites: &[FactoredInteger], tc: &CodegreeSet) -> Outcome {
        let Some(cc) = self.fixed_cod(candidate) else {
            return Outcome::open("element check needs a fixed candidate".into());
        };
        let mut bad = Vec::new();
        let mut good = None;
        for c in cites {
            if !cc.contains(c) {
                bad.push(format!("{c} is not a codegree of {candidate}"));
            } else if tc.contains(c) {
                bad.push(format!("{c} is a codegree of the target"));
            } else if good.is_none() {
                good = Some(c.clone());
            }
        }
        let divergence = (!bad.is_empty()).then(|| bad.join("; "));
        if let Some(element) = good {
            return Outcome {
                witness: Witness::MissingElement { element, cited: true },
                verdict: Verdict::Eliminated,
                divergence,
                note: None,
            };
        }
        match subset_check(&cc, tc) {
            Some(element) => {
                let note = cites.is_empty().then(|| "no element named; least missing element chosen".to_string());
                Outcome {
                    witness: Witness::MissingElement { element: element.clone(), cited: false },
                    verdict: Verdict::Eliminated,
                    divergence: divergence.map(|d| format!("{d}; least missing element {element} used instead")),
                    note,
                }
            }
            None => Outcome::open(format!("cod({candidate}) is contained in the target set")),
        }
    }

    fn roots(&self, candidate: FamilyId, expr: ExprFamily, elements: &[FactoredInteger]) -> ExprRoots {
        let domain = candidate.domain().unwrap_or_else(|| expr.domain());
        let hits = elements
            .iter()
            .filter_map(|x| {
                let s = solve_in(expr, &domain, x).ok()?;
                s.root.map(|param| RootHit { element: x.clone(), param, ree_m: s.ree_m })
            })
            .collect();
        ExprRoots { expr, equations_checked: elements.len(), hits }
    }

    fn check_no_root(&self, candidate: FamilyId, exprs: &[ExprFamily], tc: &CodegreeSet) -> Outcome {
        if !candidate.is_parametric() {
            return Outcome::open("root check needs a parametric candidate".into());
        }
        let elements: Vec<FactoredInteger> = tc.nontrivial().cloned().collect();
        let roots: Vec<ExprRoots> = exprs.iter().map(|e| self.roots(candidate, *e, &elements)).collect();
        let mut common: Option<BTreeSet<u64>> = None;
        for r in &roots {
            let params: BTreeSet<u64> = r.hits.iter().map(|h| h.param).collect();
            common = Some(match common {
                None => params,
                Some(c) => c.intersection(&params).copied().collect(),
            });
        }
        let common = common.unwrap_or_default();
        if common.is_empty() {
            let partial: Vec<String> = roots
                .iter()
                .filter(|r| !r.hits.is_empty())
                .flat_map(|r| r.hits.iter().map(move |h| format!("{} = {} at q = {}", r.expr, h.element, h.param)))
                .collect();
            let divergence = (!partial.is_empty()).then(|| {
                format!("single-expression root(s) exist ({}); no parameter solves all listed equations", partial.join(", "))
            });
            Outcome { witness: Witness::NoCommonRoot { roots }, verdict: Verdict::Eliminated, divergence, note: None }
        } else {
            Outcome::open(format!("common root(s) {common:?}"))
        }
    }

    fn check_half_pair(&self, candidate: FamilyId, tc: &CodegreeSet) -> Outcome {
        if candidate != FamilyId::PSL2_odd {
            return Outcome::open("half-pair check applies to PSL(2,k), k odd".into());
        }
        let pairs: Vec<_> = exists_half_pair(tc).into_iter().filter(|(a, _)| !a.is_one()).collect();
        let mut roots = Vec::new();
        for (a, _) in &pairs {
            let Ok(s) = solve_in(ExprFamily::Psl2Half, &ExprFamily::Psl2Half.domain(), a) else {
                return Outcome::open("half-pair target out of range".into());
            };
            if let Some(k) = s.root {
                let missing = self
                    .catalog
                    .family_codegrees(FamilyId::PSL2_odd, Some(k))
                    .ok()
                    .and_then(|fs| subset_check(&fs.elements, tc));
                if missing.is_none() {
                    return Outcome::open(format!("PSL(2,{k}) has all its codegrees in the target"));
                }
                roots.push((a.clone(), k, missing));
            }
        }
        Outcome::eliminated(Witness::HalfPair { pairs, roots })
    }

    fn check_residue(&self, candidate: FamilyId, poly: ResiduePoly, expr: ExprFamily, tc: &CodegreeSet) -> Outcome {
        let zeros = residue_search(poly, 9);
        if !zeros.is_empty() {
            return Outcome::open(format!("{} vanishes mod 9 at {zeros:?}", poly.tag()));
        }
        let prime_to_3: Vec<FactoredInteger> = tc.nontrivial().filter(|x| x.valuation(3) == 0).cloned().collect();
        let roots = self.roots(candidate, expr, &prime_to_3);
        if roots.hits.is_empty() {
            Outcome::eliminated(Witness::Residue { poly: poly.tag(), modulus: 9, zeros, roots })
        } else {
            Outcome::open(format!("{expr} has a root among the target codegrees prime to 3"))
        }
    }

    fn check_coprime(&self, candidate: FamilyId, p: u64, expr: ExprFamily, tc: &CodegreeSet) -> Outcome {
        // The prime must divide no codegree of the candidate: for Sz(q),
        // q = 2^(2f+1) ≡ 2 (mod 3), so |Sz(q)| = q²(q²+1)(q−1) ≡ 4·5·1 ≢ 0.
        let Some(domain) = candidate.domain() else {
            return Outcome::open("coprime check needs a parametric candidate".into());
        };
        let residues: BTreeSet<u64> = domain.iter().take(8).map(|q| q % p).collect();
        let order_mod_p = |r: u64| (r * r % p) * ((r * r + 1) % p) % p * ((r + p - 1) % p) % p;
        if candidate != FamilyId::Suzuki || residues.iter().any(|&r| order_mod_p(r) == 0) {
            return Outcome::open(format!("{p} may divide the order of {candidate}"));
        }
        let odd = odd_elements(tc);
        if odd.iter().all(|x| x.valuation(p) > 0) {
            let _ = expr;
            Outcome::eliminated(Witness::PrimeDividesAllOdd { prime: p, odd_target_elements: odd })
        } else {
            Outcome::open(format!("an odd target codegree is prime to {p}"))
        }
    }

    /// Every candidate of the roster in buckets up to the target's, checked in
    /// roster order. Sp4(q) is replayed at each configured sample.
    pub fn replay_lemma(&self, target: GroupId, config: &ReplayConfig) -> LemmaReport {
        let members: Vec<GroupId> = match target {
            GroupId::Sp4_q { .. } => config.sp4_samples.iter().filter_map(|&q| GroupId::sp4_even(q)).collect(),
            g => alloc::vec![g],
        };
        let max_bucket = target.as_family().bucket();
        let mut cases = Vec::new();
        let mut perfect = true;
        for &member in &members {
            perfect &= perfect_check(&self.catalog.codegree_set(member));
            for candidate in FamilyId::up_to_bucket(max_bucket) {
                match self.eliminate_candidate(member, candidate) {
                    Ok(v) => cases.push(v),
                    Err(e) => cases.push(CaseVerdict {
                        target: target.tag().into(),
                        sample_q: member.sp4_q(),
                        candidate,
                        case_label: format!("{}({})", target.tag(), candidate.bucket()),
                        reason: ReasonKind::ElementNotInTarget,
                        witness: Witness::Open(e.to_string()),
                        verdict: Verdict::Unresolved,
                        citation: "",
                        divergence: None,
                        note: None,
                    }),
                }
            }
        }
        let roster: BTreeSet<FamilyId> = FamilyId::up_to_bucket(max_bucket).collect();
        let mut coverage_gaps = Vec::new();
        for c in &roster {
            if self.recipe_for(target, *c).is_none() {
                coverage_gaps.push(format!("no recipe for {c}"));
            }
        }
        for r in self.recipes.iter().filter(|r| r.target == target.tag()) {
            if !roster.contains(&r.candidate) {
                coverage_gaps.push(format!("recipe for {} outside the roster range", r.candidate));
            }
        }
        let per_member_ok = members.iter().all(|m| {
            let mine: Vec<&CaseVerdict> = cases.iter().filter(|c| c.sample_q == m.sp4_q()).collect();
            let survivors: Vec<&&CaseVerdict> = mine.iter().filter(|c| c.verdict == Verdict::Survives).collect();
            survivors.len() == 1 && survivors[0].candidate == target.as_family()
        });
        let overall = if cases.iter().any(|c| c.verdict == Verdict::Unresolved) {
            Status::Unresolved
        } else if per_member_ok && perfect && !members.is_empty() {
            Status::Verified
        } else {
            Status::Failed
        };
        LemmaReport {
            target: target.tag().into(),
            samples: members.iter().filter_map(|m| m.sp4_q()).collect(),
            perfect,
            cases,
            overall,
            coverage_gaps,
        }
    }
}

/// Lower bound on the number of nontrivial odd codegrees of a parametric
/// family, where one of its cited formulas is odd for every parameter.
pub fn guaranteed_odd_codegrees(fam: FamilyId) -> Option<usize> {
    match fam {
        // k² − 1 with k even; (q − 1)(q² + 1) with q even.
        FamilyId::PSL2_even | FamilyId::Suzuki => Some(1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(s: &str) -> FactoredInteger {
        s.parse().unwrap()
    }

    fn setup() -> Catalog {
        Catalog::load().unwrap()
    }

    #[test]
    fn recipes_parse_and_cover_every_bucket() {
        let r = parse_recipes(RECIPES).unwrap();
        assert_eq!(r.len(), 498);
        for g in GroupId::ORDERED {
            let n = r.iter().filter(|x| x.target == g.tag()).count();
            assert_eq!(n, FamilyId::up_to_bucket(g.as_family().bucket()).count(), "{g}");
        }
    }

    #[test]
    fn recipe_syntax_errors() {
        assert!(parse_recipes("Sp4_4 a PSL2_even no_root K2M1\n").is_err());
        assert!(parse_recipes("schema 1\nSp4_4 b PSL2_even no_root K2M1\n").is_err());
        assert!(parse_recipes("schema 1\nSp4_4 a PSL2_even frobnicate\n").is_err());
        assert!(parse_recipes("schema 1\nSp4_4 a PSL2_even no_root NOPE\n").is_err());
    }

    #[test]
    fn perfect_examples() {
        let c = setup();
        assert!(perfect_check(&c.codegree_set(GroupId::Sp4_4)));
        assert!(!perfect_check(&CodegreeSet::from_elements([FactoredInteger::of(8)])));
        assert!(!perfect_check(&CodegreeSet::from_elements([FactoredInteger::of(7)])));
        for g in GroupId::ORDERED {
            assert!(perfect_check(&c.codegree_set(g)), "{g}");
        }
    }

    #[test]
    fn subset_examples() {
        let c = setup();
        let l34 = c.family_codegrees(FamilyId::PSL3_4, None).unwrap().elements;
        assert_eq!(subset_check(&l34, &c.codegree_set(GroupId::U4_3)), Some(fi("3^2*5*7")));
        let s = c.codegree_set(GroupId::HS);
        assert_eq!(subset_check(&s, &s), None);
        // Least in (valuation, value) order, not the element quoted in prose.
        let m22 = c.family_codegrees(FamilyId::M22, None).unwrap().elements;
        let w = subset_check(&m22, &c.codegree_set(GroupId::Sp4_4)).unwrap();
        assert_eq!(w, fi("2^4*3^2*11"));
        assert!(m22.contains(&fi("2^7*7*11")) && !c.codegree_set(GroupId::Sp4_4).contains(&fi("2^7*7*11")));
    }

    #[test]
    fn sample_cases() {
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let v = e.eliminate_candidate(GroupId::Sp4_4, FamilyId::PSL2_even).unwrap();
        assert_eq!(v.verdict, Verdict::Eliminated);
        assert_eq!(v.reason, ReasonKind::OddCodegreeNoRoot);
        assert_eq!(v.case_label, "Sp4_4(a)");
        let v = e.eliminate_candidate(GroupId::A9, FamilyId::PSL2_even).unwrap();
        assert_eq!(v.reason, ReasonKind::CountMismatch);
        assert_eq!(v.witness, Witness::OddCount { candidate: 1, target: 0 });
        let v = e.eliminate_candidate(GroupId::U4_2, FamilyId::U4_2).unwrap();
        assert_eq!((v.verdict, v.reason), (Verdict::Survives, ReasonKind::SelfMatch));
        let v = e.eliminate_candidate(GroupId::HS, FamilyId::Sp4_5).unwrap();
        assert_eq!(v.witness, Witness::MissingElement { element: fi("5^4*13"), cited: true });
        let v = e.eliminate_candidate(GroupId::HS, FamilyId::G2_4).unwrap();
        assert_eq!(v.witness, Witness::MissingElement { element: fi("2^12*3^3*5*7"), cited: true });
    }

    #[test]
    fn g2_of_three_unitary_case_has_a_single_root() {
        // q = 9 solves q³(q²+q+1) = 3⁶·7·13, but the companion even formula has
        // no root, so the pair of equations has none in common.
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let v = e.eliminate_candidate(GroupId::G2_3, FamilyId::PSL3_odd).unwrap();
        assert_eq!(v.verdict, Verdict::Eliminated);
        let Witness::NoCommonRoot { roots } = &v.witness else { panic!() };
        assert_eq!(roots[0].hits.len(), 1);
        assert_eq!(roots[0].hits[0].param, 9);
        assert!(roots[1].hits.is_empty());
        assert!(v.divergence.is_some());
    }

    #[test]
    fn half_pair_on_u42() {
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let v = e.eliminate_candidate(GroupId::U4_2, FamilyId::PSL2_odd).unwrap();
        let Witness::HalfPair { pairs, .. } = &v.witness else { panic!() };
        assert!(pairs.contains(&(fi("2^3*3^4"), fi("2^4*3^4"))));
        assert_eq!(pairs.len(), 5);
        assert_eq!(v.verdict, Verdict::Eliminated);
    }

    #[test]
    fn unknown_case_for_unlisted_parametric_pair() {
        let c = setup();
        let e = Engine::with_recipes(&c, Vec::new());
        assert!(matches!(
            e.eliminate_candidate(GroupId::Sp4_4, FamilyId::PSL2_even),
            Err(EliminationError::UnknownCase { .. })
        ));
        // Fixed candidates fall back to the generic subset check.
        let v = e.eliminate_candidate(GroupId::Sp4_4, FamilyId::M22).unwrap();
        assert_eq!(v.verdict, Verdict::Eliminated);
        let r = e.replay_lemma(GroupId::Sp4_4, &ReplayConfig::default());
        assert_eq!(r.overall, Status::Unresolved);
    }

    #[test]
    fn every_target_replays_verified() {
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let mut total = 0;
        for g in GroupId::ORDERED {
            let r = e.replay_lemma(g, &ReplayConfig::default());
            assert_eq!(r.overall, Status::Verified, "{g}: {:?}", r.cases.iter().find(|c| c.verdict != Verdict::Eliminated && c.verdict != Verdict::Survives));
            assert!(r.coverage_gaps.is_empty(), "{g}: {:?}", r.coverage_gaps);
            for case in &r.cases {
                assert_eq!(case.verdict == Verdict::Survives, case.candidate == g.as_family());
            }
            total += r.eliminated();
        }
        assert!(total >= 150);
    }

    #[test]
    fn sp4_bucket_count() {
        // Candidates with at most 12 codegrees fill nine buckets.
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let r = e.replay_lemma(GroupId::Sp4_4, &ReplayConfig::default());
        let buckets: BTreeSet<char> = r.cases.iter().map(|c| c.candidate.bucket()).collect();
        assert_eq!(buckets.len(), 9);
        assert_eq!(r.cases.len(), 23);
    }

    #[test]
    fn m24_eliminates_g2q() {
        let c = setup();
        let e = Engine::new(&c).unwrap();
        let v = e.eliminate_candidate(GroupId::M24, FamilyId::G2_q).unwrap();
        assert_eq!(v.verdict, Verdict::Eliminated);
        assert_eq!(v.reason, ReasonKind::OddCodegreeNoRoot);
    }
}
