use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{case_seed, estimate_orbit_count, find_witnesses, OracleConfig, OrbitEstimate};
use crate::branching::{branch_multiplicity, GroupPair};
use crate::cg::{cg_multiplicity, CGValue};
use crate::error::{Error, Result};
use crate::weights::{enumerate_weights, is_strongly_dominant, HalfInt, SpinClass, Weight};

/// Largest admissible |entry| for a sweep, doubled (9/2).
pub const DESK_MAX_ENTRY_TWICE: i64 = 9;
/// Largest admissible ambient dimension n for a sweep.
pub const DESK_MAX_N: usize = 9;

fn weight_str<S: Serializer>(w: &Weight, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(w)
}

/// Annotation for ν = (α,…,α), λ ≠ ν, where n ≠ 1 has been asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualEntriesNote {
    pub claim: String,
    pub exact: CGValue,
    /// Oracle orbit-count estimate (`None` when no witness was found).
    pub estimate: Option<usize>,
    pub consistent_with_claim: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub index: usize,
    pub class: SpinClass,
    #[serde(serialize_with = "weight_str")]
    pub nu: Weight,
    #[serde(serialize_with = "weight_str")]
    pub lambda: Weight,
    pub m: u8,
    pub exact: CGValue,
    pub strongly_dominant: bool,
    pub witnesses: usize,
    pub oracle_feasible: bool,
    /// n ≠ 0 as decided by the exact layer, or by the witness search when
    /// the exact layer is undetermined.
    pub n_nonzero: bool,
    pub orbit_estimate: Option<OrbitEstimate>,
    pub equal_entries: Option<EqualEntriesNote>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// [n ≠ 0] ⇔ [m ≠ 0] fails.
    Nonvanishing,
    /// Strongly dominant case with n ∉ {0, 1} or n ≠ m.
    StronglyDominant,
    /// Witness existence contradicts a determined exact value.
    OracleDisagreement,
    /// Computed orbit count equals 1 where n ≠ 1 has been asserted.
    EqualEntries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub index: usize,
    #[serde(serialize_with = "weight_str")]
    pub nu: Weight,
    #[serde(serialize_with = "weight_str")]
    pub lambda: Weight,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TheoremSummary {
    pub cases: usize,
    pub strongly_dominant_cases: usize,
    pub m_nonzero: usize,
    pub exact_zero: usize,
    pub exact_one: usize,
    pub exact_undetermined: usize,
    pub nonvanishing_violations: usize,
    pub strongly_dominant_violations: usize,
    pub oracle_disagreements: usize,
    pub equal_entries_cases: usize,
    pub equal_entries_discrepancies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub pair: GroupPair,
    pub max_entry: HalfInt,
    pub classes: Vec<SpinClass>,
    pub config: OracleConfig,
    pub cases: Vec<CaseRecord>,
    pub summary: TheoremSummary,
    pub discrepancies: Vec<Discrepancy>,
}

impl TheoremReport {
    /// A nonvanishing or strongly dominant violation somewhere in the sweep.
    pub fn has_violation(&self) -> bool {
        self.summary.nonvanishing_violations + self.summary.strongly_dominant_violations > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.summary;
        let classes: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "pair {}  max entry {}  classes {}  seed {}", self.pair, self.max_entry, classes.join(","), self.config.seed);
        let _ = writeln!(out, "{:>5}  {:<5} {:<16} {:<20} {:>2} {:<18} {:>3} {:>4} {:>8}", "#", "class", "nu", "lambda", "m", "exact", "sd", "wit", "orbits");
        for c in &self.cases {
            let est = c.orbit_estimate.as_ref().map_or("-".to_string(), |e| e.clusters.to_string());
            let _ = writeln!(
                out,
                "{:>5}  {:<5} {:<16} {:<20} {:>2} {:<18} {:>3} {:>4} {:>8}",
                c.index,
                c.class.to_string(),
                c.nu.to_string(),
                c.lambda.to_string(),
                c.m,
                c.exact.to_string(),
                if c.strongly_dominant { "yes" } else { "no" },
                c.witnesses,
                est
            );
        }
        let _ = writeln!(
            out,
            "cases {}  strongly dominant {}  m!=0 {}  exact zero/one/undetermined {}/{}/{}",
            s.cases, s.strongly_dominant_cases, s.m_nonzero, s.exact_zero, s.exact_one, s.exact_undetermined
        );
        let _ = writeln!(
            out,
            "nonvanishing violations {}  strongly dominant violations {}  oracle disagreements {}  equal-entries cases {} (discrepancies {})",
            s.nonvanishing_violations, s.strongly_dominant_violations, s.oracle_disagreements, s.equal_entries_cases, s.equal_entries_discrepancies
        );
        for d in &self.discrepancies {
            let _ = writeln!(out, "discrepancy {:?} #{} nu={} lambda={}: {}", d.kind, d.index, d.nu, d.lambda, d.detail);
        }
        out
    }
}

fn is_equal_entries_case(pair: GroupPair, nu: &Weight, lambda: &Weight) -> bool {
    let e = nu.entries();
    if pair.d() < 2 || e[0] <= HalfInt::ZERO || e.iter().any(|x| *x != e[0]) {
        return false;
    }
    // λ ≠ ν as weights of K (ν padded with zeros)
    let padded = lambda.entries().iter().enumerate().all(|(i, l)| *l == e.get(i).copied().unwrap_or(HalfInt::ZERO));
    !padded
}

fn run_case(
    index: usize,
    class: SpinClass,
    nu: &Weight,
    lambda: &Weight,
    pair: GroupPair,
    cfg: &OracleConfig,
) -> Result<CaseRecord> {
    let m = branch_multiplicity(pair, lambda, nu)?;
    let (exact, cert) = cg_multiplicity(nu, lambda, pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(cfg.seed, index as u64));
    let ws = find_witnesses(nu, lambda, pair, cfg, &mut rng)?;
    let equal_entries_case = is_equal_entries_case(pair, nu, lambda) && m != 0;
    let undetermined = matches!(exact, CGValue::Undetermined { .. });
    let orbit_estimate = if (undetermined || equal_entries_case) && !ws.is_empty() {
        Some(estimate_orbit_count(&ws, &cert.stabilizer, nu, lambda, pair, cfg, &mut rng)?)
    } else {
        None
    };
    let n_nonzero = if undetermined { !ws.is_empty() } else { !exact.is_zero() };
    let equal_entries = equal_entries_case.then(|| {
        let estimate = orbit_estimate.as_ref().map(|e| e.clusters);
        let consistent = estimate.map(|k| k != 1);
        let note = match estimate {
            Some(1) => "oracle finds a single H_nu-orbit: the unitary-type stabilizer block acts transitively on the solution sphere".into(),
            Some(k) => format!("oracle finds {k} clusters"),
            None => "no witness found".into(),
        };
        EqualEntriesNote { claim: "n != 1".into(), exact, estimate, consistent_with_claim: consistent, note }
    });
    Ok(CaseRecord {
        index,
        class,
        nu: nu.clone(),
        lambda: lambda.clone(),
        m,
        exact,
        strongly_dominant: is_strongly_dominant(nu) && is_strongly_dominant(lambda),
        witnesses: ws.len(),
        oracle_feasible: !ws.is_empty(),
        n_nonzero,
        orbit_estimate,
        equal_entries,
    })
}

fn discrepancies(c: &CaseRecord) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let mut push = |kind, detail: String| {
        out.push(Discrepancy { kind, index: c.index, nu: c.nu.clone(), lambda: c.lambda.clone(), detail });
    };
    if c.n_nonzero != (c.m != 0) {
        push(DiscrepancyKind::Nonvanishing, format!("m = {} but n {} 0 (exact {})", c.m, if c.n_nonzero { "!=" } else { "=" }, c.exact));
    }
    if c.strongly_dominant {
        let n = match c.exact {
            CGValue::Zero => Some(0),
            CGValue::One => Some(1),
            _ => None,
        };
        if n != Some(c.m) {
            push(DiscrepancyKind::StronglyDominant, format!("strongly dominant with m = {} and exact {}", c.m, c.exact));
        }
    }
    let oracle_bad = match c.exact {
        CGValue::Zero => c.oracle_feasible,
        _ => !c.oracle_feasible,
    };
    if oracle_bad {
        push(DiscrepancyKind::OracleDisagreement, format!("exact {} but oracle found {} witness(es)", c.exact, c.witnesses));
    }
    if let Some(t) = &c.equal_entries {
        if t.consistent_with_claim == Some(false) {
            push(DiscrepancyKind::EqualEntries, format!("claim {}; exact {}; oracle estimate 1. {}", t.claim, t.exact, t.note));
        }
    }
    out
}

/// Sweeps all dominant (ν, λ) with |entries| ≤ `max_entry` in the given
/// spin classes, comparing branching, the exact layer and the oracle.
pub fn check_theorems(pair: GroupPair, max_entry: HalfInt, classes: &[SpinClass], cfg: &OracleConfig) -> Result<TheoremReport> {
    cfg.validate()?;
    if max_entry.twice() > DESK_MAX_ENTRY_TWICE {
        return Err(Error::RangeTooLarge(format!("max entry {max_entry} exceeds the desk-scale bound {}/2", DESK_MAX_ENTRY_TWICE)));
    }
    if pair.n() > DESK_MAX_N {
        return Err(Error::RangeTooLarge(format!("pair {pair} exceeds the desk-scale bound n <= {DESK_MAX_N}")));
    }
    let mut classes_seen: Vec<SpinClass> = Vec::new();
    for c in classes {
        if !classes_seen.contains(c) {
            classes_seen.push(*c);
        }
    }
    let mut jobs: Vec<(SpinClass, Weight, Weight)> = Vec::new();
    for &class in &classes_seen {
        let lambdas = enumerate_weights(pair.k(), max_entry, class);
        let nus = enumerate_weights(pair.h(), max_entry, class);
        for nu in &nus {
            for lambda in &lambdas {
                jobs.push((class, nu.clone(), lambda.clone()));
            }
        }
    }
    let cases: Vec<CaseRecord> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (class, nu, lambda))| run_case(i, *class, nu, lambda, pair, cfg))
        .collect::<Result<_>>()?;

    let discrepancies: Vec<Discrepancy> = cases.iter().flat_map(discrepancies).collect();
    let count = |k: DiscrepancyKind| discrepancies.iter().filter(|d| d.kind == k).count();
    let summary = TheoremSummary {
        cases: cases.len(),
        strongly_dominant_cases: cases.iter().filter(|c| c.strongly_dominant).count(),
        m_nonzero: cases.iter().filter(|c| c.m != 0).count(),
        exact_zero: cases.iter().filter(|c| c.exact == CGValue::Zero).count(),
        exact_one: cases.iter().filter(|c| c.exact == CGValue::One).count(),
        exact_undetermined: cases.iter().filter(|c| matches!(c.exact, CGValue::Undetermined { .. })).count(),
        nonvanishing_violations: count(DiscrepancyKind::Nonvanishing),
        strongly_dominant_violations: count(DiscrepancyKind::StronglyDominant),
        oracle_disagreements: count(DiscrepancyKind::OracleDisagreement),
        equal_entries_cases: cases.iter().filter(|c| c.equal_entries.is_some()).count(),
        equal_entries_discrepancies: count(DiscrepancyKind::EqualEntries),
    };
    Ok(TheoremReport { pair, max_entry, classes: classes_seen, config: *cfg, cases, summary, discrepancies })
}
