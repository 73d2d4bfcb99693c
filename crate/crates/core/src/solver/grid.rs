use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{solve_with, SolveBudget, Verdict};
use crate::graph::{Family, GraphSpec};
use crate::par::Parallelism;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFamily {
    /// Subdivided complete graphs, parameters `n` and `m`.
    Kn,
    /// Subdivided complete bipartite graphs, parameters `a`, `b` and `m`.
    Kab,
}

impl std::str::FromStr for GridFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kn" => Ok(GridFamily::Kn),
            "kab" => Ok(GridFamily::Kab),
            other => Err(format!("unknown grid family {other:?} (expected kn or kab)")),
        }
    }
}

impl GridFamily {
    pub fn name(self) -> &'static str {
        match self {
            GridFamily::Kn => "kn",
            GridFamily::Kab => "kab",
        }
    }
}

/// Inclusive parameter ranges. `n` is used by `kn`; `a` and `b` by `kab`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRequest {
    pub family: GridFamily,
    #[serde(default)]
    pub n: Option<(u32, u32)>,
    #[serde(default)]
    pub a: Option<(u32, u32)>,
    #[serde(default)]
    pub b: Option<(u32, u32)>,
    pub m: (u32, u32),
    #[serde(default)]
    pub budget: SolveBudget,
}

impl GridRequest {
    /// Every parameter assignment with its graph spec, in row-major order.
    pub fn cells(&self) -> Vec<(BTreeMap<String, u32>, GraphSpec)> {
        let range = |r: Option<(u32, u32)>| r.map(|(lo, hi)| lo..=hi).into_iter().flatten();
        let mut out = Vec::new();
        match self.family {
            GridFamily::Kn => {
                for n in range(self.n) {
                    for m in self.m.0..=self.m.1 {
                        let params = BTreeMap::from([("n".to_string(), n), ("m".to_string(), m)]);
                        out.push((params, GraphSpec::subdivided(Family::Complete { n }, m)));
                    }
                }
            }
            GridFamily::Kab => {
                for a in range(self.a) {
                    for b in range(self.b) {
                        for m in self.m.0..=self.m.1 {
                            let params = BTreeMap::from([
                                ("a".to_string(), a),
                                ("b".to_string(), b),
                                ("m".to_string(), m),
                            ]);
                            out.push((
                                params,
                                GraphSpec::subdivided(Family::CompleteBipartite { a, b }, m),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub params: BTreeMap<String, u32>,
    pub verdict: Verdict,
    pub bound: Option<u32>,
    #[serde(default)]
    pub states: usize,
    #[serde(default)]
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub family: String,
    pub cells: Vec<GridCell>,
}

impl Grid {
    pub fn cell(&self, params: &[(&str, u32)]) -> Option<&GridCell> {
        self.cells.iter().find(|c| {
            params
                .iter()
                .all(|(k, v)| c.params.get(*k) == Some(v))
        })
    }

    /// Aligned table: one row per non-`m` parameter combination, one column per `m`.
    pub fn to_text(&self) -> String {
        let mut rows: BTreeMap<Vec<(String, u32)>, BTreeMap<u32, String>> = BTreeMap::new();
        let mut ms = std::collections::BTreeSet::new();
        for c in &self.cells {
            let key: Vec<(String, u32)> = c
                .params
                .iter()
                .filter(|(k, _)| k.as_str() != "m")
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            let m = c.params.get("m").copied().unwrap_or(0);
            ms.insert(m);
            let text = match (c.verdict, c.bound) {
                (Verdict::CopWins, Some(b)) => format!("cop({b})"),
                (Verdict::CopWins, None) => "cop".to_string(),
                (Verdict::RobberWins, _) => "robber".to_string(),
                (Verdict::Unknown, _) => "unknown".to_string(),
            };
            rows.entry(key).or_default().insert(m, text);
        }
        let row_label = |k: &[(String, u32)]| {
            k.iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let first = rows
            .keys()
            .map(|k| row_label(k).len())
            .max()
            .unwrap_or(0)
            .max(self.family.len());
        let width = rows
            .values()
            .flat_map(|r| r.values().map(String::len))
            .max()
            .unwrap_or(0)
            .max(4);
        let mut out = String::new();
        let _ = write!(out, "{:<first$}", self.family);
        for m in &ms {
            let _ = write!(out, "  {:>width$}", format!("m={m}"));
        }
        out.push('\n');
        for (k, r) in &rows {
            let _ = write!(out, "{:<first$}", row_label(k));
            for m in &ms {
                let t = r.get(m).map_or("-", String::as_str);
                let _ = write!(out, "  {t:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

/// Solves every cell of the request. Cells that exhaust the budget are
/// reported as `Unknown`, never dropped.
pub fn locatability_grid(req: &GridRequest, par: Parallelism) -> Grid {
    let cells = req
        .cells()
        .into_iter()
        .map(|(params, spec)| match spec.build() {
            Ok(built) => {
                let r = solve_with(&built.graph, &req.budget, par);
                GridCell {
                    params,
                    verdict: r.verdict,
                    bound: r.capture_bound,
                    states: r.stats.states_explored,
                    seconds: r.stats.wall_seconds,
                    note: r.exhausted,
                }
            }
            Err(e) => GridCell {
                params,
                verdict: Verdict::Unknown,
                bound: None,
                states: 0,
                seconds: 0.0,
                note: Some(e.to_string()),
            },
        })
        .collect();
    Grid {
        family: req.family.name().to_string(),
        cells,
    }
}
