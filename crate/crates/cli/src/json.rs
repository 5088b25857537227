//! JSON documents: equilibria, decomposition trees, and solve reports.
//!
//! Rationals are always written as strings in the game-file entry syntax.

use bimatrix_core::compose::{ProductLayout, SumLayout};
use bimatrix_core::decompose::{DecompositionTree, EliminationRecord, Removal};
use bimatrix_core::solver::SolveReport;
use bimatrix_core::{BimatrixGame, Equilibrium, Matrix, MixedStrategy, Player, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Content(String),
}

fn content(message: impl Into<String>) -> JsonError {
    JsonError::Content(message.into())
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(Rational::to_string).collect()
}

fn rationals(values: &[String], what: &str) -> Result<Vec<Rational>, JsonError> {
    values
        .iter()
        .map(|s| s.parse().map_err(|e| content(format!("{what}: bad rational `{s}`: {e}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumJson {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub p1_payoff: String,
    pub p2_payoff: String,
}

impl From<&Equilibrium> for EquilibriumJson {
    fn from(eq: &Equilibrium) -> Self {
        EquilibriumJson {
            x: strings(eq.x().probs()),
            y: strings(eq.y().probs()),
            p1_payoff: eq.p1_payoff().to_string(),
            p2_payoff: eq.p2_payoff().to_string(),
        }
    }
}

/// An equilibrium as read from disk; nothing about it is checked yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimedEquilibrium {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub p1_payoff: Rational,
    pub p2_payoff: Rational,
}

pub fn equilibrium_to_json(eq: &Equilibrium) -> String {
    serde_json::to_string(&EquilibriumJson::from(eq)).expect("plain data serialises")
}

pub fn parse_equilibrium(text: &str) -> Result<ClaimedEquilibrium, JsonError> {
    let raw: EquilibriumJson = serde_json::from_str(text)?;
    Ok(ClaimedEquilibrium {
        x: rationals(&raw.x, "x")?,
        y: rationals(&raw.y, "y")?,
        p1_payoff: rationals(std::slice::from_ref(&raw.p1_payoff), "p1_payoff")?.remove(0),
        p2_payoff: rationals(std::slice::from_ref(&raw.p2_payoff), "p2_payoff")?.remove(0),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJson {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
}

impl From<&BimatrixGame> for GameJson {
    fn from(g: &BimatrixGame) -> Self {
        let rows = |m: &Matrix| (0..m.rows()).map(|i| strings(m.row(i))).collect();
        GameJson {
            n: g.rows(),
            m: g.cols(),
            a: rows(g.a()),
            b: rows(g.b()),
        }
    }
}

impl GameJson {
    fn to_game(&self) -> Result<BimatrixGame, JsonError> {
        let matrix = |rows: &[Vec<String>], name: &str| -> Result<Matrix, JsonError> {
            if rows.len() != self.n || rows.iter().any(|r| r.len() != self.m) {
                return Err(content(format!("{name} is not {}x{}", self.n, self.m)));
            }
            let parsed = rows.iter().map(|r| rationals(r, name)).collect::<Result<Vec<_>, _>>()?;
            Matrix::from_rows(parsed).map_err(|e| content(e.to_string()))
        };
        BimatrixGame::new(matrix(&self.a, "A")?, matrix(&self.b, "B")?).map_err(|e| content(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemovalJson {
    pub player: u8,
    /// 1-based, in the game as it was when this strategy was removed.
    pub index: usize,
    pub dominated_by: usize,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TreeJson {
    Leaf {
        game: GameJson,
    },
    Sum {
        #[serde(rename = "K")]
        k: String,
        n1: usize,
        m1: usize,
        left: Box<TreeJson>,
        right: Box<TreeJson>,
    },
    Product {
        n1: usize,
        m1: usize,
        n2: usize,
        m2: usize,
        left: Box<TreeJson>,
        right: Box<TreeJson>,
    },
    Elim {
        removals: Vec<RemovalJson>,
        child: Box<TreeJson>,
    },
}

impl From<&DecompositionTree> for TreeJson {
    fn from(tree: &DecompositionTree) -> Self {
        match tree {
            DecompositionTree::Leaf(g) => TreeJson::Leaf { game: g.into() },
            DecompositionTree::Sum { layout, left, right } => TreeJson::Sum {
                k: layout.k.to_string(),
                n1: layout.n1,
                m1: layout.m1,
                left: Box::new(left.as_ref().into()),
                right: Box::new(right.as_ref().into()),
            },
            DecompositionTree::Product { layout, left, right } => TreeJson::Product {
                n1: layout.n1,
                m1: layout.m1,
                n2: layout.n2,
                m2: layout.m2,
                left: Box::new(left.as_ref().into()),
                right: Box::new(right.as_ref().into()),
            },
            DecompositionTree::Elim { record, child } => TreeJson::Elim {
                removals: record
                    .removals
                    .iter()
                    .map(|r| RemovalJson {
                        player: r.player.number(),
                        index: r.index + 1,
                        dominated_by: r.dominated_by + 1,
                        a: strings(&r.a),
                        b: strings(&r.b),
                    })
                    .collect(),
                child: Box::new(child.as_ref().into()),
            },
        }
    }
}

impl TreeJson {
    pub fn to_tree(&self) -> Result<DecompositionTree, JsonError> {
        Ok(match self {
            TreeJson::Leaf { game } => DecompositionTree::Leaf(game.to_game()?),
            TreeJson::Sum { k, n1, m1, left, right } => {
                let (left, right) = (left.to_tree()?, right.to_tree()?);
                if left.dims() != (*n1, *m1) {
                    return Err(content(format!("sum split {n1}x{m1} does not match its left child")));
                }
                let k = rationals(std::slice::from_ref(k), "K")?.remove(0);
                DecompositionTree::Sum {
                    layout: SumLayout { n1: *n1, m1: *m1, k },
                    left: Box::new(left),
                    right: Box::new(right),
                }
            }
            TreeJson::Product { n1, m1, n2, m2, left, right } => {
                let (left, right) = (left.to_tree()?, right.to_tree()?);
                if left.dims() != (*n1, *m1) || right.dims() != (*n2, *m2) {
                    return Err(content("product layout does not match its children"));
                }
                DecompositionTree::Product {
                    layout: ProductLayout::new(*n1, *m1, *n2, *m2).map_err(|e| content(e.to_string()))?,
                    left: Box::new(left),
                    right: Box::new(right),
                }
            }
            TreeJson::Elim { removals, child } => {
                let child = child.to_tree()?;
                let mut parsed = Vec::with_capacity(removals.len());
                for r in removals {
                    let player = Player::from_number(r.player).ok_or_else(|| content(format!("player {} is not 1 or 2", r.player)))?;
                    if r.index == 0 || r.dominated_by == 0 {
                        return Err(content("removal indices are 1-based"));
                    }
                    parsed.push(Removal {
                        player,
                        index: r.index - 1,
                        dominated_by: r.dominated_by - 1,
                        a: rationals(&r.a, "removal a")?,
                        b: rationals(&r.b, "removal b")?,
                    });
                }
                let (n, m) = child.dims();
                let count = |p| parsed.iter().filter(|r| r.player == p).count();
                let (rows, cols) = (n + count(Player::One), m + count(Player::Two));
                let record = EliminationRecord::from_removals(rows, cols, parsed).map_err(|e| content(e.to_string()))?;
                DecompositionTree::Elim {
                    record,
                    child: Box::new(child),
                }
            }
        })
    }
}

pub fn tree_to_json(tree: &DecompositionTree) -> String {
    serde_json::to_string(&TreeJson::from(tree)).expect("plain data serialises")
}

pub fn parse_tree(text: &str) -> Result<DecompositionTree, JsonError> {
    let mut de = serde_json::Deserializer::from_str(text);
    // generated trees nest deeper than serde_json's default limit
    de.disable_recursion_limit();
    let raw = TreeJson::deserialize(&mut de)?;
    de.end()?;
    raw.to_tree()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCountsJson {
    pub sum: usize,
    pub product: usize,
    pub elim: usize,
    pub leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingsJson {
    pub decompose: f64,
    pub base_solve: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    #[serde(rename = "S")]
    pub size: usize,
    pub lambda: usize,
    pub node_counts: NodeCountsJson,
    pub leaf_sizes: Vec<usize>,
    pub timings_ms: TimingsJson,
}

impl From<&SolveReport> for ReportJson {
    fn from(r: &SolveReport) -> Self {
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        ReportJson {
            size: r.size,
            lambda: r.lambda,
            node_counts: NodeCountsJson {
                sum: r.node_counts.sum,
                product: r.node_counts.product,
                elim: r.node_counts.elim,
                leaf: r.node_counts.leaf,
            },
            leaf_sizes: r.leaf_sizes.clone(),
            timings_ms: TimingsJson {
                decompose: ms(r.timings.decompose),
                base_solve: ms(r.timings.base_solve),
                lift: ms(r.timings.lift),
            },
        }
    }
}

pub fn report_to_json(report: &SolveReport) -> String {
    serde_json::to_string_pretty(&ReportJson::from(report)).expect("plain data serialises")
}

/// The claimed strategies, if they are probability vectors.
pub fn strategies(claim: &ClaimedEquilibrium) -> Option<(MixedStrategy, MixedStrategy)> {
    Some((MixedStrategy::new(claim.x.clone()).ok()?, MixedStrategy::new(claim.y.clone()).ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bimatrix_core::compose::{product, sum};
    use bimatrix_core::decompose::decompose_tree;

    fn pennies() -> BimatrixGame {
        BimatrixGame::from_integers(&[&[1, -1], &[-1, 1]], &[&[-1, 1], &[1, -1]]).unwrap()
    }

    #[test]
    fn equilibrium_schema() {
        let half = MixedStrategy::uniform(2).unwrap();
        let eq = Equilibrium::evaluate(&pennies(), half.clone(), half).unwrap();
        let text = equilibrium_to_json(&eq);
        assert_eq!(text, r#"{"x":["1/2","1/2"],"y":["1/2","1/2"],"p1_payoff":"0","p2_payoff":"0"}"#);
        let back = parse_equilibrium(&text).unwrap();
        assert_eq!(back.x, eq.x().probs());
        assert!(parse_equilibrium(r#"{"x":["1/0"],"y":[],"p1_payoff":"0","p2_payoff":"0"}"#).is_err());
        assert!(parse_equilibrium(r#"{"x":[0.5],"y":[],"p1_payoff":"0","p2_payoff":"0"}"#).is_err());
    }

    #[test]
    fn tree_schema_round_trips() {
        let pd = BimatrixGame::from_integers(&[&[3, 0], &[5, 1]], &[&[3, 5], &[0, 1]]).unwrap();
        let zero = BimatrixGame::constant(Rational::zero(), Rational::zero());
        let g = sum(&product(&pd, &pennies()), &zero, &Rational::from_integer(9)).unwrap();
        let tree = decompose_tree(&g, true);
        let text = tree_to_json(&tree);
        assert!(text.starts_with(r#"{"kind":"sum","K":"9","n1":4,"m1":4,"left":{"kind":"elim","removals":[{"player":1,"index":1,"dominated_by":3,"#));
        assert_eq!(parse_tree(&text).unwrap(), tree);
    }

    #[test]
    fn leaf_game_schema() {
        let text = tree_to_json(&DecompositionTree::Leaf(BimatrixGame::from_integers(&[&[1, 2]], &[&[3, -4]]).unwrap()));
        assert_eq!(text, r#"{"kind":"leaf","game":{"n":1,"m":2,"A":[["1","2"]],"B":[["3","-4"]]}}"#);
    }

    #[test]
    fn inconsistent_trees_are_rejected() {
        let bad = r#"{"kind":"product","n1":2,"m1":2,"n2":1,"m2":1,
            "left":{"kind":"leaf","game":{"n":1,"m":1,"A":[["0"]],"B":[["0"]]}},
            "right":{"kind":"leaf","game":{"n":1,"m":1,"A":[["0"]],"B":[["0"]]}}}"#;
        assert!(matches!(parse_tree(bad), Err(JsonError::Content(_))));
        assert!(matches!(parse_tree("{"), Err(JsonError::Syntax(_))));
    }
}
