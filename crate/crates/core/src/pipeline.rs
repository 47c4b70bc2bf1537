//! End-to-end drivers: the three classification stages with caching,
//! deterministic table emission, and the summary counts they must hit.

use crate::cache::{Cache, SigmaOrbitFile, StabFile, StrongFile};
use crate::chambers::{enumerate_s, orbit_of_sigma, sigma_type, SigmaOrbit, SigmaSet};
use crate::embed::{classify_configurations, EmbedContext, EmbeddingClass};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::realize::{enumerate_strong_classes, StrongClass};
use crate::roots::AdeType;
use crate::stabilizers::{stab_phi_f, ConfStabilizer};
use num_bigint::BigInt;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Stage 1: walk every admissible subset and group them into equivalence
/// classes; the classes must coincide with the ADE-type classes.
pub struct NnClassification {
    /// One entry per ADE type: the subsets carrying it, which the walks
    /// confirm to be exactly one equivalence class each.
    pub classes: BTreeMap<AdeType, Vec<SigmaSet>>,
}

pub fn classify_nn(ctx: &EmbedContext, cache: Option<&Cache>) -> Result<NnClassification> {
    let all = enumerate_s();
    let orbits: Result<Vec<SigmaOrbit>> = all
        .par_iter()
        .map(|&s| -> Result<SigmaOrbit> {
            if let Some(c) = cache {
                if let Some(f) = c.load_sigma(s.0) {
                    return Ok(SigmaOrbit {
                        sigma: s,
                        class: f.class.iter().map(|&m| SigmaSet(m)).collect(),
                        gammas: Vec::new(),
                        gens: f.gens,
                    });
                }
            }
            let orbit = orbit_of_sigma(&ctx.e10, &ctx.longest, s)?;
            if let Some(c) = cache {
                c.store_sigma(&SigmaOrbitFile::from(&orbit))?;
            }
            Ok(orbit)
        })
        .collect();
    let orbits = orbits?;
    let mut classes: BTreeMap<AdeType, Vec<SigmaSet>> = BTreeMap::new();
    for orbit in &orbits {
        let t = sigma_type(&ctx.e10, orbit.sigma)?;
        let mut sorted_class: Vec<u16> = orbit.class.iter().map(|s| s.0).collect();
        sorted_class.sort_unstable();
        let mut expected: Vec<u16> =
            ctx.types.by_type[&t].iter().map(|s| s.0).collect();
        expected.sort_unstable();
        if sorted_class != expected {
            return Err(Error::Invalid(format!(
                "walk class of {} does not match its type class",
                orbit.sigma.describe()
            )));
        }
        classes.entry(t).or_default().push(orbit.sigma);
    }
    for v in classes.values_mut() {
        v.sort();
        v.dedup();
    }
    Ok(NnClassification { classes })
}

/// Stage 3 result for one configuration class.
pub struct ClassOutcome {
    pub class: EmbeddingClass,
    pub stab_order: Option<BigInt>,
    pub stab_gens: usize,
    pub strong: Vec<StrongClass>,
}

/// Run the stabilizer and strong-class stages for every configuration
/// class, reusing cached results where present. Classes whose budget is
/// exhausted are reported as errors carrying the partial state.
pub fn classify_strong_all(
    ctx: &EmbedContext,
    classes: &[EmbeddingClass],
    cache: Option<&Cache>,
    budget_per_class: Option<Duration>,
) -> Result<Vec<ClassOutcome>> {
    let outcomes: Result<Vec<ClassOutcome>> = classes
        .par_iter()
        .map(|class| classify_strong_one(ctx, class, cache, budget_per_class))
        .collect();
    outcomes
}

pub fn classify_strong_one(
    ctx: &EmbedContext,
    class: &EmbeddingClass,
    cache: Option<&Cache>,
    budget: Option<Duration>,
) -> Result<ClassOutcome> {
    let key = class.key();
    if let Some(c) = cache {
        if let (Some(stab_f), Some(strong_f)) = (c.load_stab(&key), c.load_strong(&key)) {
            let strong = strong_f
                .q_labels
                .iter()
                .zip(&strong_f.grams)
                .map(|(q, g)| StrongClass {
                    subgroup_order: 0,
                    q_divisors: parse_q_label(q),
                    mbar_gram: g.clone(),
                })
                .collect();
            return Ok(ClassOutcome {
                class: class.clone(),
                stab_order: stab_f
                    .order_if_finite
                    .as_ref()
                    .and_then(|s| s.parse::<BigInt>().ok()),
                stab_gens: stab_f.gens.len(),
                strong,
            });
        }
    }
    let deadline = budget.map(|b| Instant::now() + b);
    let stab = stab_phi_f(ctx, class, deadline)?;
    let strong = enumerate_strong_classes(ctx, class, &stab, deadline)?;
    if let Some(c) = cache {
        c.store_stab(&StabFile {
            class_key: key.clone(),
            order_if_finite: stab.order_if_finite.as_ref().map(|o| o.to_string()),
            gens: stab.gens.clone(),
        })?;
        c.store_strong(&StrongFile {
            class_key: key.clone(),
            q_labels: strong.iter().map(|s| s.q_label()).collect(),
            grams: strong.iter().map(|s| s.mbar_gram.clone()).collect(),
        })?;
    }
    Ok(ClassOutcome {
        class: class.clone(),
        stab_order: stab.order_if_finite,
        stab_gens: stab.gens.len(),
        strong,
    })
}

fn parse_q_label(label: &str) -> Vec<i64> {
    if label == "0" {
        Vec::new()
    } else {
        label.bytes().map(|b| (b - b'0') as i64).collect()
    }
}

/// Summary counts of the full classification.
pub struct StrongSummary {
    pub total_classes: usize,
    pub total_strong: usize,
    pub realizable_classes: usize,
    pub realizable_rank9_types: usize,
}

pub fn summarize(outcomes: &[ClassOutcome]) -> StrongSummary {
    let total_strong = outcomes.iter().map(|o| o.strong.len()).sum();
    let realizable_classes = outcomes.iter().filter(|o| !o.strong.is_empty()).count();
    let realizable_rank9_types = outcomes
        .iter()
        .filter(|o| o.class.rank() == 9 && !o.strong.is_empty())
        .map(|o| o.class.tau_phi.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    StrongSummary {
        total_classes: outcomes.len(),
        total_strong,
        realizable_classes,
        realizable_rank9_types,
    }
}

/// The final table as CSV: `no,tau_phi,tau_rbar,Q` with the quotient
/// labels space-separated, `-` when the row is not realized.
pub fn table_csv(outcomes: &[ClassOutcome]) -> String {
    let mut out = String::from("no,tau_phi,tau_rbar,Q\n");
    for (i, o) in outcomes.iter().enumerate() {
        let q = if o.strong.is_empty() {
            "-".to_string()
        } else {
            o.strong.iter().map(|s| s.q_label()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("{},{},{},{}\n", i + 1, o.class.tau_phi, o.class.tau_rbar, q));
    }
    out
}

#[derive(serde::Serialize)]
struct TableRowJson {
    no: usize,
    tau_phi: String,
    tau_rbar: String,
    q: Vec<String>,
    strong: Vec<StrongJson>,
}

#[derive(serde::Serialize)]
struct StrongJson {
    q: String,
    mbar_gram: Mat,
}

/// The final table as JSON, including the explicit overlattice Gram of
/// every strong class.
pub fn table_json(outcomes: &[ClassOutcome]) -> String {
    let rows: Vec<TableRowJson> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| TableRowJson {
            no: i + 1,
            tau_phi: o.class.tau_phi.to_string(),
            tau_rbar: o.class.tau_rbar.to_string(),
            q: o.strong.iter().map(|s| s.q_label()).collect(),
            strong: o
                .strong
                .iter()
                .map(|s| StrongJson { q: s.q_label(), mbar_gram: s.mbar_gram.clone() })
                .collect(),
        })
        .collect();
    let doc = serde_json::json!({
        "format_version": crate::cache::FORMAT_VERSION,
        "fingerprint": crate::cache::fingerprint(),
        "rows": rows,
    });
    serde_json::to_string(&doc).expect("serialize table")
}

/// Convenience: build everything and return outcomes in canonical order.
pub fn run_full(
    cache: Option<&Cache>,
    budget_per_class: Option<Duration>,
) -> Result<(EmbedContext, Vec<ClassOutcome>)> {
    let ctx = EmbedContext::build()?;
    let classes = classify_configurations(&ctx)?;
    let outcomes = classify_strong_all(&ctx, &classes, cache, budget_per_class)?;
    Ok((ctx, outcomes))
}
