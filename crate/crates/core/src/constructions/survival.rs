//! Which physical labels can appear next to each other after contraction.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{role_axes, ConstructionError, Result};
use crate::netgraph::Port;
use crate::tensor::{contract_pair, int, role_label, Axis, Label, SparseTensor};

pub const SURVIVAL_LETTERS: [char; 4] = ['A', 'B', 'C', 'D'];

/// Allowed neighbour labels per physical label, as indices into the
/// physical basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalTable {
    pub right: Vec<BTreeSet<usize>>,
    pub left: Vec<BTreeSet<usize>>,
    pub above: Vec<BTreeSet<usize>>,
    pub below: Vec<BTreeSet<usize>>,
    /// Above and below at once, as on a 2-row torus where both vertical
    /// edges join the same pair of vertices.
    pub collapsed: Vec<BTreeSet<usize>>,
}

fn letter(i: usize) -> String {
    SURVIVAL_LETTERS
        .get(i)
        .map_or_else(|| format!("#{i}"), |c| c.to_string())
}

fn set_str(s: &BTreeSet<usize>) -> String {
    if s.is_empty() {
        return "-".into();
    }
    s.iter().map(|&i| letter(i)).collect::<Vec<_>>().join(",")
}

impl SurvivalTable {
    fn directions(&self) -> [(&'static str, &Vec<BTreeSet<usize>>); 5] {
        [
            ("above", &self.above),
            ("left", &self.left),
            ("right", &self.right),
            ("below", &self.below),
            ("collapsed", &self.collapsed),
        ]
    }

    /// One line per disagreeing cell.
    pub fn diff(&self, other: &SurvivalTable) -> Vec<String> {
        let mut out = Vec::new();
        for ((name, mine), (_, theirs)) in self.directions().iter().zip(other.directions()) {
            let n = mine.len().max(theirs.len());
            let empty = BTreeSet::new();
            for x in 0..n {
                let a = mine.get(x).unwrap_or(&empty);
                let b = theirs.get(x).unwrap_or(&empty);
                if a != b {
                    out.push(format!(
                        "{name} of {}: {} vs {}",
                        letter(x),
                        set_str(a),
                        set_str(b)
                    ));
                }
            }
        }
        out
    }

    fn mismatches(&self, other: &SurvivalTable) -> usize {
        self.diff(other).len()
    }
}

impl fmt::Display for SurvivalTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.right.len() {
            writeln!(
                f,
                "{}: above {}  left {}  right {}  below {}  collapsed {}",
                letter(x),
                set_str(&self.above[x]),
                set_str(&self.left[x]),
                set_str(&self.right[x]),
                set_str(&self.below[x]),
                set_str(&self.collapsed[x])
            )?;
        }
        Ok(())
    }
}

fn sets(rows: &[&[usize]]) -> Vec<BTreeSet<usize>> {
    rows.iter().map(|r| r.iter().copied().collect()).collect()
}

/// Target tables for the `k = 4` example tensor.
pub fn reference_survival_table() -> SurvivalTable {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    SurvivalTable {
        above: sets(&[&[B, D], &[B, D], &[A, C], &[A, C]]),
        left: sets(&[&[A, C], &[A, C], &[B, D], &[B, D]]),
        right: sets(&[&[A, B], &[C, D], &[A, B], &[C, D]]),
        below: sets(&[&[C, D], &[A, B], &[C, D], &[A, B]]),
        collapsed: sets(&[&[D], &[B], &[C], &[A]]),
    }
}

fn copy(t: &SparseTensor, prefix: &str, dual: &[Port]) -> Result<SparseTensor> {
    let renamed = t.relabeled(|l| Some(Label::name(format!("{prefix}.{l}"))))?;
    let duals: Vec<Label> = dual
        .iter()
        .map(|p| Label::name(format!("{prefix}.{}", role_label(*p))))
        .collect();
    let axes: Vec<Axis> = renamed
        .axes()
        .iter()
        .map(|a| Axis {
            dual: duals.contains(&a.label),
            ..a.clone()
        })
        .collect();
    Ok(renamed.conform_to(&axes)?)
}

/// Pairs `(X, Y)` of physical labels with a nonzero coefficient after
/// contracting `X`'s ports `xs` with `Y`'s ports `ys`.
fn allowed(t: &SparseTensor, xs: &[Port], ys: &[Port]) -> Result<Vec<BTreeSet<usize>>> {
    let x = copy(t, "x", &[])?;
    let y = copy(t, "y", ys)?;
    let pairs: Vec<(Label, Label)> = xs
        .iter()
        .zip(ys)
        .map(|(a, b)| {
            (
                Label::name(format!("x.{}", role_label(*a))),
                Label::name(format!("y.{}", role_label(*b))),
            )
        })
        .collect();
    let c = contract_pair(&x, &y, &pairs)?;
    let xp = c
        .axis_position(&Label::name("x.phys"))
        .expect("physical axis");
    let yp = c
        .axis_position(&Label::name("y.phys"))
        .expect("physical axis");
    let k = t
        .axis(&role_label(Port::Physical))
        .expect("physical axis")
        .dim;
    let mut out = vec![BTreeSet::new(); k];
    for (idx, _) in c.entries() {
        out[idx[xp] as usize].insert(idx[yp] as usize);
    }
    Ok(out)
}

fn check_shape(t: &SparseTensor) -> Result<()> {
    for p in super::ROLE_ORDER {
        if t.axis(&role_label(p)).is_none() {
            return Err(ConstructionError::Invalid(format!(
                "vertex tensor needs a `{}` axis",
                role_label(p)
            )));
        }
    }
    if t.order() != 5 {
        return Err(ConstructionError::Invalid(format!(
            "vertex tensor has {} axes, expected 5",
            t.order()
        )));
    }
    Ok(())
}

/// Survival tables of a role-labelled vertex tensor, by contracting two
/// copies along the edge(s) joining neighbours in each direction.
pub fn survival_tables(t: &SparseTensor) -> Result<SurvivalTable> {
    check_shape(t)?;
    use Port::*;
    Ok(SurvivalTable {
        right: allowed(t, &[Right], &[Left])?,
        left: allowed(t, &[Left], &[Right])?,
        above: allowed(t, &[Up], &[Down])?,
        below: allowed(t, &[Down], &[Up])?,
        collapsed: allowed(t, &[Up, Down], &[Down, Up])?,
    })
}

fn bonds(pattern: u8) -> [u32; 4] {
    [0, 1, 2, 3].map(|b| u32::from(pattern >> (3 - b) & 1))
}

fn build(labels: &[Vec<u8>]) -> Result<SparseTensor> {
    let mut t = SparseTensor::new(role_axes([labels.len(), 2, 2, 2, 2]))?;
    for (x, patterns) in labels.iter().enumerate() {
        for &p in patterns {
            let [u, r, d, l] = bonds(p);
            t.add_entry(vec![x as u32, u, r, d, l], int(1))?;
        }
    }
    Ok(t)
}

/// Tables of a tensor with exactly one bond pattern per physical label,
/// read off the patterns directly.
fn single_pattern_tables(choice: &[Option<u8>]) -> SurvivalTable {
    let k = choice.len();
    let rule = |a: usize, b: usize| -> Vec<BTreeSet<usize>> {
        (0..k)
            .map(|x| match choice[x] {
                None => BTreeSet::new(),
                Some(px) => (0..k)
                    .filter(|&y| matches!(choice[y], Some(py) if bonds(px)[a] == bonds(py)[b]))
                    .collect(),
            })
            .collect()
    };
    let above = rule(0, 2);
    let below = rule(2, 0);
    let collapsed = (0..k)
        .map(|x| above[x].intersection(&below[x]).copied().collect())
        .collect();
    SurvivalTable {
        right: rule(1, 3),
        left: rule(3, 1),
        above,
        below,
        collapsed,
    }
}

/// Searches `{0,1}` tensors in `C^4 (x) (C^2)^4` with at most two bond
/// patterns per physical label for one whose survival tables equal
/// `target`. Tensors with one pattern per label are enumerated first, then
/// random two-pattern tensors drawn from `seed`. `budget` caps the number
/// of candidates examined. Returns the hit, or the closest miss.
pub fn survival_search(target: &SurvivalTable, budget: u64, seed: u64) -> Result<SearchOutcome> {
    let k = target.right.len();
    let mut outcome = SearchOutcome {
        found: None,
        nearest: None,
        examined: 0,
    };
    if k == 0 || budget == 0 {
        return Ok(outcome);
    }
    let note_miss = |outcome: &mut SearchOutcome, t: SparseTensor, table: SurvivalTable| {
        let score = table.mismatches(target);
        if outcome.nearest.as_ref().is_none_or(|(_, _, s)| score < *s) {
            outcome.nearest = Some((t, table, score));
        }
    };

    // one pattern (or none) per label; 17^k choices
    let total = 17u64.checked_pow(k as u32).unwrap_or(u64::MAX);
    let mut choice = vec![None; k];
    for code in 0..total {
        if outcome.examined >= budget {
            return Ok(outcome);
        }
        outcome.examined += 1;
        let mut c = code;
        for slot in choice.iter_mut() {
            let digit = (c % 17) as u8;
            *slot = (digit < 16).then_some(digit);
            c /= 17;
        }
        let predicted = single_pattern_tables(&choice);
        let score = predicted.mismatches(target);
        if score > 0
            && outcome
                .nearest
                .as_ref()
                .is_some_and(|(_, _, s)| *s <= score)
        {
            continue;
        }
        let labels: Vec<Vec<u8>> = choice.iter().map(|c| c.iter().copied().collect()).collect();
        let t = build(&labels)?;
        let table = survival_tables(&t)?;
        if table == *target {
            outcome.found = Some(t);
            return Ok(outcome);
        }
        note_miss(&mut outcome, t, table);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while outcome.examined < budget {
        outcome.examined += 1;
        let labels: Vec<Vec<u8>> = (0..k)
            .map(|_| {
                let first = rng.gen_range(0..16u8);
                let second = rng.gen_range(0..16u8);
                if rng.gen_bool(0.5) && first != second {
                    vec![first, second]
                } else {
                    vec![first]
                }
            })
            .collect();
        let t = build(&labels)?;
        let table = survival_tables(&t)?;
        if table == *target {
            outcome.found = Some(t);
            return Ok(outcome);
        }
        note_miss(&mut outcome, t, table);
    }
    Ok(outcome)
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<SparseTensor>,
    /// Best non-matching candidate with its tables and the number of
    /// disagreeing cells.
    pub nearest: Option<(SparseTensor, SurvivalTable, usize)>,
    pub examined: u64,
}
