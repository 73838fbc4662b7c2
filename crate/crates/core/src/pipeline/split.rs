use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::chemio::{parse_smiles, MoleculeTable};
use crate::molgraph::scaffold_key;
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMethod {
    #[serde(rename = "random_4_1_then_4_1")]
    Random,
    #[serde(rename = "scaffold_8_1_1")]
    Scaffold,
    #[serde(rename = "kfold")]
    KFold,
}

/// Disjoint, covering train/valid/test index lists (each ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub method: SplitMethod,
    pub seed: u64,
    /// Fold used as test for k-fold plans.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fold: Option<usize>,
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Valid,
    Test,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Valid => "valid",
            Partition::Test => "test",
        }
    }
}

impl SplitPlan {
    pub fn len(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Partition of every index in `0..n`; `None` for indices the plan
    /// does not mention.
    pub fn assignments(&self, n: usize) -> Vec<Option<Partition>> {
        let mut out = vec![None; n];
        for (list, p) in [
            (&self.train, Partition::Train),
            (&self.valid, Partition::Valid),
            (&self.test, Partition::Test),
        ] {
            for &i in list {
                if i < n {
                    out[i] = Some(p);
                }
            }
        }
        out
    }

    /// Checks that the partitions are disjoint and cover exactly `0..n`.
    pub fn validate(&self, n: usize) -> Result<(), PipelineError> {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.valid).chain(&self.test) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(PipelineError::PlanMismatch { n });
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(PipelineError::PlanMismatch { n })
        }
    }
}

/// (train, valid, test) sizes: test = ⌈n/5⌉, valid = ⌈(n − test)/5⌉.
pub fn random_split_sizes(n: usize) -> (usize, usize, usize) {
    let test = n.div_ceil(5);
    let valid = (n - test).div_ceil(5);
    (n - test - valid, valid, test)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Seeded 4:1 train/test then 4:1 train/valid split.
pub fn random_split(n: usize, seed: u64) -> Result<SplitPlan, PipelineError> {
    if n < 5 {
        return Err(PipelineError::TooFewRecords(n));
    }
    let (_, valid, test) = random_split_sizes(n);
    let perm = RngState::new(seed).permutation(n);
    Ok(SplitPlan {
        method: SplitMethod::Random,
        seed,
        fold: None,
        test: sorted(perm[..test].to_vec()),
        valid: sorted(perm[test..test + valid].to_vec()),
        train: sorted(perm[test + valid..].to_vec()),
    })
}

/// Greedy whole-group fill over scaffold keys: groups by size descending
/// (ties by key), each to train while train < f₀·n, else valid while
/// valid < f₁·n, else test.
pub fn scaffold_split_keys(keys: &[String], fractions: [f64; 3]) -> Result<SplitPlan, PipelineError> {
    if keys.is_empty() {
        return Err(PipelineError::EmptyTable);
    }
    if fractions.iter().any(|&f| !(f > 0.0)) || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(PipelineError::BadFractions(fractions));
    }
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        groups.entry(k.as_str()).or_default().push(i);
    }
    let mut ordered: Vec<(&str, Vec<usize>)> = groups.into_iter().collect();
    ordered.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
    let n = keys.len() as f64;
    let (mut train, mut valid, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (_, members) in ordered {
        if (train.len() as f64) < fractions[0] * n {
            train.extend(members);
        } else if (valid.len() as f64) < fractions[1] * n {
            valid.extend(members);
        } else {
            test.extend(members);
        }
    }
    Ok(SplitPlan {
        method: SplitMethod::Scaffold,
        seed: 0,
        fold: None,
        train: sorted(train),
        valid: sorted(valid),
        test: sorted(test),
    })
}

/// Scaffold key of every record (records are known to parse).
pub fn scaffold_keys(table: &MoleculeTable) -> Vec<String> {
    table
        .records
        .iter()
        .map(|r| scaffold_key(&parse_smiles(&r.smiles).expect("table rows hold parseable SMILES")))
        .collect()
}

pub fn scaffold_split(table: &MoleculeTable, fractions: [f64; 3]) -> Result<SplitPlan, PipelineError> {
    if table.is_empty() {
        return Err(PipelineError::EmptyTable);
    }
    scaffold_split_keys(&scaffold_keys(table), fractions)
}

/// Sizes of k near-equal folds; the first `n mod k` get one extra.
pub fn fold_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|f| n / k + usize::from(f < n % k)).collect()
}

/// k plans over one seeded permutation: plan i tests on fold i and
/// validates on fold (i + 1) mod k.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<SplitPlan>, PipelineError> {
    if k < 2 || n < k {
        return Err(PipelineError::BadK { k, n });
    }
    let perm = RngState::new(seed).permutation(n);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for size in fold_sizes(n, k) {
        folds.push(perm[start..start + size].to_vec());
        start += size;
    }
    Ok((0..k)
        .map(|i| {
            let v = (i + 1) % k;
            let train = (0..k).filter(|&f| f != i && f != v).flat_map(|f| folds[f].iter().copied()).collect();
            SplitPlan {
                method: SplitMethod::KFold,
                seed,
                fold: Some(i),
                train: sorted(train),
                valid: sorted(folds[v].clone()),
                test: sorted(folds[i].clone()),
            }
        })
        .collect())
}
