//! Fairlet decompositions: partitions of the rows into small groups whose
//! balance already meets the threshold `t`.
//!
//! Only thresholds `t = 1/m` are supported. Every fairlet then holds exactly
//! one minority-group row plus between 1 and `m` majority-group rows.

mod flow;

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::balance::{balance_of, BalanceRatio, Threshold};
use crate::clustering::medoid;
use crate::dataset::{count_groups, Dataset};
use crate::distance::l2;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

pub use flow::{solve_min_cost_flow, FlowArc, FlowNetwork, FlowSolution};

/// How a fairlet's center row is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CenterRule {
    /// Uniformly at random from the members, from the seeded stream.
    #[default]
    Random,
    /// The member with the smallest summed distance to the others.
    Medoid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fairlet {
    members: Vec<usize>,
    center: usize,
}

impl Fairlet {
    /// Members are stored sorted. The center must be a member.
    pub fn new(mut members: Vec<usize>, center: usize) -> Result<Self> {
        members.sort_unstable();
        if members.is_empty() {
            return Err(Error::InvalidParameter("fairlet has no members".into()));
        }
        if members.binary_search(&center).is_err() {
            return Err(Error::InvalidParameter(format!(
                "center {center} is not a fairlet member"
            )));
        }
        Ok(Self { members, center })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn balance(&self, data: &Dataset) -> BalanceRatio {
        let [a, b] = count_groups(data.protected(), self.members.iter().copied());
        balance_of(a, b)
    }
}

/// A partition of all rows into fairlets, with the row-to-fairlet map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairletDecomposition {
    fairlets: Vec<Fairlet>,
    gamma: Vec<usize>,
    threshold: Threshold,
}

impl FairletDecomposition {
    /// Errors unless `fairlets` partition `0..n`. Balance and size are not
    /// checked here; see [`validate`].
    pub fn new(fairlets: Vec<Fairlet>, n: usize, threshold: Threshold) -> Result<Self> {
        let mut gamma = vec![usize::MAX; n];
        for (j, f) in fairlets.iter().enumerate() {
            for &row in f.members() {
                if row >= n {
                    return Err(Error::InvalidParameter(format!(
                        "fairlet {j} references row {row} outside 0..{n}"
                    )));
                }
                if gamma[row] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "row {row} is in fairlets {} and {j}",
                        gamma[row]
                    )));
                }
                gamma[row] = j;
            }
        }
        if let Some(row) = gamma.iter().position(|&g| g == usize::MAX) {
            return Err(Error::InvalidParameter(format!(
                "row {row} is in no fairlet"
            )));
        }
        Ok(Self {
            fairlets,
            gamma,
            threshold,
        })
    }

    pub fn fairlets(&self) -> &[Fairlet] {
        &self.fairlets
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    pub fn weights(&self) -> Vec<usize> {
        self.fairlets.iter().map(Fairlet::weight).collect()
    }

    /// Audit export: one entry per fairlet, rows named by their external ids.
    pub fn export(&self, data: &Dataset) -> Vec<FairletRecord> {
        self.fairlets
            .iter()
            .enumerate()
            .map(|(j, f)| FairletRecord {
                fairlet_id: j,
                center_row_id: data.row_ids()[f.center()].clone(),
                member_row_ids: f
                    .members()
                    .iter()
                    .map(|&r| data.row_ids()[r].clone())
                    .collect(),
            })
            .collect()
    }

    pub fn to_json(&self, data: &Dataset) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.export(data))?)
    }
}

/// JSON form of one fairlet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairletRecord {
    pub fairlet_id: usize,
    pub center_row_id: String,
    pub member_row_ids: Vec<String>,
}

/// Resolves exported records back to row indices. Fails on unknown row ids
/// or a center outside its fairlet; partition violations are left for
/// [`validate_fairlets`] to report.
pub fn import_fairlets(records: &[FairletRecord], data: &Dataset) -> Result<Vec<Fairlet>> {
    let index: HashMap<&str, usize> = data
        .row_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("unknown row id {id:?}")))
    };
    records
        .iter()
        .map(|r| {
            let members = r
                .member_row_ids
                .iter()
                .map(|id| lookup(id))
                .collect::<Result<Vec<_>>>()?;
            Fairlet::new(members, lookup(&r.center_row_id)?)
        })
        .collect()
}

struct Groups {
    minority: Vec<usize>,
    majority: Vec<usize>,
}

/// Checks the threshold form and dataset feasibility, and splits rows by group.
fn prepare(data: &Dataset, t: Threshold) -> Result<Groups> {
    if t.f() != 1 {
        return Err(Error::UnsupportedThreshold { f: t.f(), m: t.m() });
    }
    let balance = data.balance()?;
    if !balance.meets(t) {
        return Err(Error::BalanceBelowThreshold {
            achieved: balance,
            required: t,
        });
    }
    let [c0, c1] = data.group_counts();
    let minority_label = u8::from(c1 <= c0);
    let (minority, majority) = (0..data.len()).partition(|&r| data.label(r) == minority_label);
    Ok(Groups { minority, majority })
}

fn pick_center(
    members: &[usize],
    rule: CenterRule,
    data: &Dataset,
    rng: &mut impl Rng,
) -> usize {
    match rule {
        CenterRule::Random => members[rng.random_range(0..members.len())],
        CenterRule::Medoid => medoid(data, members),
    }
}

fn finish(
    groups: Vec<Vec<usize>>,
    data: &Dataset,
    t: Threshold,
    rule: CenterRule,
    seed: u64,
) -> Result<FairletDecomposition> {
    let mut rng = SeedStream::new(seed).rng("fairlet-centers");
    let fairlets = groups
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let center = pick_center(&members, rule, data, &mut rng);
            Fairlet::new(members, center)
        })
        .collect::<Result<Vec<_>>>()?;
    FairletDecomposition::new(fairlets, data.len(), t)
}

/// Cost-agnostic decomposition with random fairlet centers.
pub fn vanilla_decompose(data: &Dataset, t: Threshold, seed: u64) -> Result<FairletDecomposition> {
    vanilla_decompose_with(data, t, seed, CenterRule::Random)
}

/// Cost-agnostic decomposition: the `i`-th minority row (in row order) takes
/// the `i`-th contiguous block of a seed-shuffled majority order. Block sizes
/// differ by at most one.
pub fn vanilla_decompose_with(
    data: &Dataset,
    t: Threshold,
    seed: u64,
    rule: CenterRule,
) -> Result<FairletDecomposition> {
    let Groups {
        minority,
        mut majority,
    } = prepare(data, t)?;
    majority.shuffle(&mut SeedStream::new(seed).rng("vanilla-fairlets"));

    let (beta, rho) = (minority.len(), majority.len());
    let (base, extra) = (rho / beta, rho % beta);
    let mut groups = Vec::with_capacity(beta);
    let mut start = 0;
    for (i, &blue) in minority.iter().enumerate() {
        let size = base + usize::from(i < extra);
        let mut members = vec![blue];
        members.extend_from_slice(&majority[start..start + size]);
        start += size;
        groups.push(members);
    }
    finish(groups, data, t, rule, seed)
}

/// Cost-aware decomposition with medoid fairlet centers.
///
/// The flow objective is the cost measured at each minority row; a medoid
/// center never exceeds it, so the result is no costlier than the optimum
/// grouping evaluated at those rows.
pub fn mcf_decompose(data: &Dataset, t: Threshold, seed: u64) -> Result<FairletDecomposition> {
    mcf_decompose_with(data, t, seed, CenterRule::Medoid)
}

/// Cost-aware decomposition from a minimum-cost flow: every minority row
/// receives between 1 and `m` majority rows, minimizing the summed
/// minority-to-majority distance.
///
/// Network: source -> minority row (capacity `m`, at least 1 enforced by
/// moving the lower bound into node supplies), minority -> majority
/// (capacity 1, cost = distance), majority -> sink (capacity 1).
pub fn mcf_decompose_with(
    data: &Dataset,
    t: Threshold,
    seed: u64,
    rule: CenterRule,
) -> Result<FairletDecomposition> {
    let Groups { minority, majority } = prepare(data, t)?;
    let (beta, rho) = (minority.len(), majority.len());
    let m = t.m() as i64;

    let source = 0;
    let blue_node = |i: usize| 1 + i;
    let red_node = |j: usize| 1 + beta + j;
    let sink = 1 + beta + rho;
    let mut net = FlowNetwork::new(sink + 1);
    net.set_supply(source, (rho - beta) as i64);
    net.set_supply(sink, -(rho as i64));
    for i in 0..beta {
        net.set_supply(blue_node(i), 1);
        if m > 1 {
            net.add_arc(source, blue_node(i), m - 1, 0.0);
        }
    }
    let mut pair_arcs = Vec::with_capacity(beta * rho);
    for (i, &b) in minority.iter().enumerate() {
        for (j, &r) in majority.iter().enumerate() {
            let arc = net.add_arc(blue_node(i), red_node(j), 1, l2(data.row(b), data.row(r)));
            pair_arcs.push((arc, i, j));
        }
    }
    for j in 0..rho {
        net.add_arc(red_node(j), sink, 1, 0.0);
    }

    let solution = solve_min_cost_flow(&net)?;
    let mut groups: Vec<Vec<usize>> = minority.iter().map(|&b| vec![b]).collect();
    for &(arc, i, j) in &pair_arcs {
        if solution.flows[arc] > 0 {
            groups[i].push(majority[j]);
        }
    }
    finish(groups, data, t, rule, seed)
}

/// Summed distance from every row to its fairlet's center.
pub fn fairlet_cost(decomp: &FairletDecomposition, data: &Dataset) -> f64 {
    decomp
        .fairlets()
        .iter()
        .map(|f| {
            f.members()
                .iter()
                .map(|&r| l2(data.row(r), data.row(f.center())))
                .sum::<f64>()
        })
        .sum()
}

/// One broken fairlet-decomposition property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UncoveredRow { row: usize },
    DuplicateRow { row: usize, fairlets: Vec<usize> },
    RowOutOfRange { fairlet: usize, row: usize },
    Oversized { fairlet: usize, size: usize, max: usize },
    Unbalanced { fairlet: usize, balance: BalanceRatio },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UncoveredRow { row } => write!(f, "row {row} is in no fairlet"),
            Violation::DuplicateRow { row, fairlets } => {
                write!(f, "row {row} is in several fairlets {fairlets:?}")
            }
            Violation::RowOutOfRange { fairlet, row } => {
                write!(f, "fairlet {fairlet} references missing row {row}")
            }
            Violation::Oversized { fairlet, size, max } => {
                write!(f, "fairlet {fairlet} has {size} members, max {max}")
            }
            Violation::Unbalanced { fairlet, balance } => {
                write!(f, "fairlet {fairlet} has balance {balance}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub fairlets: usize,
    pub rows: usize,
    pub threshold: Threshold,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(decomp: &FairletDecomposition, data: &Dataset, t: Threshold) -> ValidationReport {
    validate_fairlets(decomp.fairlets(), data, t)
}

/// Checks the partition property, the size bound `f + m` and per-fairlet
/// balance, listing every violation found.
pub fn validate_fairlets(fairlets: &[Fairlet], data: &Dataset, t: Threshold) -> ValidationReport {
    let n = data.len();
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut violations = Vec::new();
    let max = t.max_fairlet_size();
    for (j, f) in fairlets.iter().enumerate() {
        let mut in_range = true;
        for &row in f.members() {
            if row < n {
                owners[row].push(j);
            } else {
                in_range = false;
                violations.push(Violation::RowOutOfRange { fairlet: j, row });
            }
        }
        if f.weight() > max {
            violations.push(Violation::Oversized {
                fairlet: j,
                size: f.weight(),
                max,
            });
        }
        if in_range {
            let balance = f.balance(data);
            if !balance.meets(t) {
                violations.push(Violation::Unbalanced {
                    fairlet: j,
                    balance,
                });
            }
        }
    }
    for (row, o) in owners.into_iter().enumerate() {
        match o.len() {
            0 => violations.push(Violation::UncoveredRow { row }),
            1 => {}
            _ => violations.push(Violation::DuplicateRow { row, fairlets: o }),
        }
    }
    ValidationReport {
        fairlets: fairlets.len(),
        rows: n,
        threshold: t,
        violations,
    }
}
