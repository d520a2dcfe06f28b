use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::network::Path;

/// Pure profile of a symmetric congestion game as a multiset of paths.
/// Entries are kept canonical: sorted by path, merged, without zero counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    entries: Vec<(usize, Path)>,
}

impl StrategyProfile {
    pub fn new(entries: impl IntoIterator<Item = (usize, Path)>) -> Self {
        let mut merged: BTreeMap<Path, usize> = BTreeMap::new();
        for (count, path) in entries {
            if count > 0 {
                *merged.entry(path).or_default() += count;
            }
        }
        Self { entries: merged.into_iter().map(|(p, c)| (c, p)).collect() }
    }

    /// Profile with `loads[i]` players on link `i` of a parallel-links game.
    pub fn from_link_loads(loads: &[usize]) -> Self {
        Self::new(loads.iter().enumerate().map(|(i, &c)| (c, Path(vec![i]))))
    }

    pub fn entries(&self) -> &[(usize, Path)] {
        &self.entries
    }

    pub fn players(&self) -> usize {
        self.entries.iter().map(|(c, _)| c).sum()
    }

    pub fn count_of(&self, path: &Path) -> usize {
        self.entries.iter().find(|(_, p)| p == path).map_or(0, |(c, _)| *c)
    }

    pub fn to_assignment(&self) -> LoadAssignment {
        LoadAssignment::new(self.entries.iter().map(|(c, p)| (p.clone(), *c)))
    }

    /// Link loads for a profile over `m` parallel links (paths of one edge).
    pub fn link_loads(&self, m: usize) -> Result<Vec<usize>> {
        let mut loads = vec![0; m];
        for (c, p) in &self.entries {
            match p.edges() {
                [e] if *e < m => loads[*e] += c,
                _ => return Err(Error::InvalidProfile(format!("{p} is not a link of {m}"))),
            }
        }
        Ok(loads)
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(c, p)| format!("{c} ↦ {p}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl FromStr for StrategyProfile {
    type Err = Error;

    /// Parses `(1 ↦ 0·2, 3 ↦ 1·3)`; `->` is accepted in place of `↦`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("profile {s:?} must be parenthesised")))?;
        if body.trim().is_empty() {
            return Ok(Self::default());
        }
        let mut entries = Vec::new();
        for item in body.split(',') {
            let (count, path) = item
                .split_once('↦')
                .or_else(|| item.split_once("->"))
                .ok_or_else(|| Error::Parse(format!("missing ↦ in {item:?}")))?;
            let count = count.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad count in {item:?}")))?;
            entries.push((count, path.parse::<Path>()?));
        }
        Ok(Self::new(entries))
    }
}

/// Payload of a congestion query: how many players to put on each path.
/// Zero loads are dropped, so every key is a strategy actually probed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LoadAssignment(BTreeMap<Path, usize>);

impl LoadAssignment {
    pub fn new(loads: impl IntoIterator<Item = (Path, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, c) in loads {
            if c > 0 {
                *map.entry(p).or_default() += c;
            }
        }
        Self(map)
    }

    /// One query probing link `i` at load `loads[i]`, for every link at once.
    pub fn links(loads: &[usize]) -> Self {
        Self::new(loads.iter().enumerate().map(|(i, &c)| (Path(vec![i]), c)))
    }

    pub fn loads(&self) -> &BTreeMap<Path, usize> {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn max_load(&self) -> usize {
        self.0.values().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_profile(&self) -> StrategyProfile {
        StrategyProfile::new(self.0.iter().map(|(p, c)| (*c, p.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notation_round_trips() {
        let s: StrategyProfile = "(1 ↦ 0·2, 3 ↦ 1·3)".parse().unwrap();
        assert_eq!(s.players(), 4);
        assert_eq!(s.to_string(), "(1 ↦ 0·2, 3 ↦ 1·3)");
        assert_eq!(s.to_string().parse::<StrategyProfile>().unwrap(), s);
        let ascii: StrategyProfile = "(3 -> 1.3, 1 -> 0.2)".parse().unwrap();
        assert_eq!(ascii, s);
    }

    #[test]
    fn duplicate_paths_merge() {
        let s = StrategyProfile::new([(1, Path(vec![0])), (2, Path(vec![0])), (0, Path(vec![1]))]);
        assert_eq!(s.entries(), &[(3, Path(vec![0]))]);
        assert_eq!(s.link_loads(2).unwrap(), vec![3, 0]);
    }

    #[test]
    fn empty_profile() {
        let s: StrategyProfile = "()".parse().unwrap();
        assert_eq!(s.players(), 0);
        assert_eq!(s.to_string(), "()");
    }

    #[test]
    fn link_assignment_drops_zeros() {
        let q = LoadAssignment::links(&[2, 0, 1]);
        assert_eq!(q.loads().len(), 2);
        assert_eq!(q.max_load(), 2);
        assert_eq!(q.to_profile(), StrategyProfile::from_link_loads(&[2, 0, 1]));
    }
}
