//! JSON files for games, profiles and load assignments.
//!
//! Values are strings in the scalar's text form (`"p/q"` or `"p"` for
//! rationals), so exact games survive a round trip unchanged. The layouts
//! are described in `docs/formats.md`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    BimatrixGame, CongestionGame, GraphicalGame, LoadAssignment, MixedProfile, Network, Path, StrategyProfile,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameFile {
    Bimatrix {
        row: Vec<Vec<String>>,
        col: Vec<Vec<String>>,
    },
    Graphical {
        strategies: usize,
        in_neighbors: Vec<Vec<usize>>,
        tables: Vec<Vec<String>>,
    },
    Congestion {
        vertices: usize,
        origin: usize,
        dest: usize,
        edges: Vec<[usize; 2]>,
        players: usize,
        costs: Vec<Vec<String>>,
    },
    /// Shorthand for a two-vertex congestion game with one edge per link.
    ParallelLinks {
        players: usize,
        costs: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathLoad {
    pub path: Vec<usize>,
    pub load: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileFile {
    Mixed { row: Vec<String>, col: Vec<String> },
    Pure { strategies: Vec<usize> },
    Congestion { entries: Vec<PathLoad> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "load-assignment")]
pub struct LoadAssignmentFile {
    pub loads: Vec<PathLoad>,
}

/// A game of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGame<S> {
    Bimatrix(BimatrixGame<S>),
    Graphical(GraphicalGame<S>),
    Congestion(CongestionGame<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyProfile<S> {
    Mixed(MixedProfile<S>),
    Pure(Vec<usize>),
    Congestion(StrategyProfile),
}

pub fn scalar_text<S: Scalar>(v: &S) -> String {
    v.to_text()
}

pub fn parse_scalar<S: Scalar>(s: &str) -> Result<S> {
    S::parse_text(s).ok_or_else(|| Error::Parse(format!("bad number {s:?}")))
}

fn texts<S: Scalar>(row: &[S]) -> Vec<String> {
    row.iter().map(S::to_text).collect()
}

fn parse_row<S: Scalar>(row: &[String]) -> Result<Vec<S>> {
    row.iter().map(|s| parse_scalar(s)).collect()
}

fn parse_rows<S: Scalar>(rows: &[Vec<String>]) -> Result<Vec<Vec<S>>> {
    rows.iter().map(|r| parse_row(r)).collect()
}

fn path_loads(pairs: impl IntoIterator<Item = (Path, usize)>) -> Vec<PathLoad> {
    pairs.into_iter().map(|(p, load)| PathLoad { path: p.0, load }).collect()
}

impl<S: Scalar> AnyGame<S> {
    pub fn to_file(&self) -> GameFile {
        match self {
            AnyGame::Bimatrix(g) => GameFile::Bimatrix {
                row: g.row_table().iter().map(|r| texts(r)).collect(),
                col: g.col_table().iter().map(|r| texts(r)).collect(),
            },
            AnyGame::Graphical(g) => GameFile::Graphical {
                strategies: g.strategies(),
                in_neighbors: (0..g.players()).map(|p| g.in_neighbors(p).to_vec()).collect(),
                tables: (0..g.players()).map(|p| texts(g.table(p))).collect(),
            },
            AnyGame::Congestion(g) => {
                let net = g.network();
                GameFile::Congestion {
                    vertices: net.num_vertices(),
                    origin: net.origin(),
                    dest: net.dest(),
                    edges: net.arcs().into_iter().map(|(t, h)| [t, h]).collect(),
                    players: g.players(),
                    costs: g.cost_tables().iter().map(|r| texts(r)).collect(),
                }
            }
        }
    }

    pub fn from_file(file: &GameFile) -> Result<Self> {
        Ok(match file {
            GameFile::Bimatrix { row, col } => {
                AnyGame::Bimatrix(BimatrixGame::new(parse_rows(row)?, parse_rows(col)?)?)
            }
            GameFile::Graphical { strategies, in_neighbors, tables } => {
                AnyGame::Graphical(GraphicalGame::new(*strategies, in_neighbors.clone(), parse_rows(tables)?)?)
            }
            GameFile::Congestion { vertices, origin, dest, edges, players, costs } => {
                let arcs: Vec<(usize, usize)> = edges.iter().map(|[t, h]| (*t, *h)).collect();
                let net = Network::new(*vertices, &arcs, *origin, *dest)?;
                AnyGame::Congestion(CongestionGame::new(net, *players, parse_rows(costs)?)?)
            }
            GameFile::ParallelLinks { players, costs } => {
                AnyGame::Congestion(CongestionGame::parallel_links(*players, parse_rows(costs)?)?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("game files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

impl<S: Scalar> AnyProfile<S> {
    pub fn to_file(&self) -> ProfileFile {
        match self {
            AnyProfile::Mixed(p) => ProfileFile::Mixed { row: texts(&p.row), col: texts(&p.col) },
            AnyProfile::Pure(s) => ProfileFile::Pure { strategies: s.clone() },
            AnyProfile::Congestion(s) => {
                ProfileFile::Congestion { entries: path_loads(s.entries().iter().map(|(c, p)| (p.clone(), *c))) }
            }
        }
    }

    pub fn from_file(file: &ProfileFile) -> Result<Self> {
        Ok(match file {
            ProfileFile::Mixed { row, col } => AnyProfile::Mixed(MixedProfile::new(parse_row(row)?, parse_row(col)?)?),
            ProfileFile::Pure { strategies } => AnyProfile::Pure(strategies.clone()),
            ProfileFile::Congestion { entries } => {
                AnyProfile::Congestion(StrategyProfile::new(entries.iter().map(|e| (e.load, Path(e.path.clone())))))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("profile files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

pub fn load_assignment_to_json(q: &LoadAssignment) -> String {
    let file = LoadAssignmentFile { loads: path_loads(q.loads().iter().map(|(p, c)| (p.clone(), *c))) };
    serde_json::to_string_pretty(&file).expect("load assignments serialize")
}

pub fn load_assignment_from_json(text: &str) -> Result<LoadAssignment> {
    let file: LoadAssignmentFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(LoadAssignment::new(file.loads.into_iter().map(|e| (Path(e.path), e.load))))
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::instances::{matching_pennies, random_dag, random_graphical};

    type Q = Ratio<i64>;

    #[test]
    fn games_round_trip() {
        let games: Vec<AnyGame<Q>> = vec![
            AnyGame::Bimatrix(matching_pennies(3).unwrap()),
            AnyGame::Graphical(random_graphical(4, 2, 2, 5).unwrap()),
            AnyGame::Congestion(random_dag(5, 8, 3, 2).unwrap()),
        ];
        for g in games {
            let text = g.to_json();
            let back = AnyGame::<Q>::from_json(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rationals_are_strings() {
        let g = AnyGame::Congestion(CongestionGame::parallel_links(1, vec![vec![Q::new(0, 1), Q::new(3, 4)]]).unwrap());
        assert!(g.to_json().contains("\"3/4\""));
    }

    #[test]
    fn parallel_links_shorthand() {
        let text = r#"{"type":"parallel-links","players":2,"costs":[["0","1","2"],["0","1/2","5"]]}"#;
        let AnyGame::Congestion(g) = AnyGame::<Q>::from_json(text).unwrap() else { panic!() };
        assert!(g.network().is_parallel_links());
        assert_eq!(g.cost(1, 1), &Q::new(1, 2));
    }

    #[test]
    fn profiles_round_trip() {
        let profiles: Vec<AnyProfile<Q>> = vec![
            AnyProfile::Mixed(MixedProfile::uniform(3, 2)),
            AnyProfile::Pure(vec![0, 2, 1]),
            AnyProfile::Congestion(StrategyProfile::new([(2, Path(vec![0, 2])), (1, Path(vec![1, 3]))])),
        ];
        for p in profiles {
            let text = p.to_json();
            assert_eq!(AnyProfile::<Q>::from_json(&text).unwrap(), p);
        }
        let q = LoadAssignment::new([(Path(vec![0]), 3), (Path(vec![1, 2]), 1)]);
        assert_eq!(load_assignment_from_json(&load_assignment_to_json(&q)).unwrap(), q);
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(AnyGame::<Q>::from_json("{\"type\":\"bimatrix\"}"), Err(Error::Parse(_))));
        let bad = r#"{"type":"bimatrix","row":[["x"]],"col":[["0"]]}"#;
        assert!(matches!(AnyGame::<Q>::from_json(bad), Err(Error::Parse(_))));
    }
}
