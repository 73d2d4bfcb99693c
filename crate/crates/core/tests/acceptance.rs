//! Acceptance run: one PASS/FAIL line per criterion, each under a fixed time
//! limit. Exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::graph;
use robloc_core::graph::Graph;
use robloc_core::solver::{locatability_grid, GridFamily, GridRequest};
use robloc_core::strategies::{
    robber_policy_girth6, robber_policy_ka3_half, robber_policy_kab, robber_policy_kn_small_m,
    strategy_h, strategy_k2b_half, strategy_kab, strategy_kn, verify_cop_strategy,
    verify_evasion_family, verify_robber_policy, CopStrategy, EvasionFamily, RobberAnswerPolicy,
};
use robloc_core::{solve, Parallelism, SolveBudget, Verdict};

const STRATEGY_CAP: u32 = 400;

type Outcome = Result<String, String>;

fn solve_default(spec: &str) -> (Graph, robloc_core::SolveResult) {
    let g = graph(spec);
    let r = solve(&g, &SolveBudget::default());
    (g, r)
}

fn expect_verdict(spec: &str, want: Verdict) -> Outcome {
    let (_, r) = solve_default(spec);
    if r.verdict == want {
        Ok(format!("{spec} {:?}", r.verdict))
    } else {
        Err(format!("{spec}: {:?}, expected {want:?}", r.verdict))
    }
}

fn cop_wins<S: CopStrategy>(spec: &str, g: &Graph, s: &S) -> Result<u32, String> {
    let report = verify_cop_strategy(g, s, STRATEGY_CAP);
    report
        .capture_bound()
        .ok_or_else(|| format!("{spec}: {} loses: {:?}", report.strategy, report.check.failure))
}

fn family_accepted<P: RobberAnswerPolicy>(spec: &str, g: &Graph, p: &P, family: EvasionFamily) -> Outcome {
    let check = verify_evasion_family(g, &family);
    if !check.accepted {
        return Err(format!("{spec}: family rejected: {:?}", check.reason));
    }
    let play = verify_robber_policy(g, p);
    if !play.survives {
        return Err(format!("{spec}: {} caught: {:?}", p.name(), play.failure));
    }
    let (_, r) = solve_default(spec);
    if r.verdict == Verdict::CopWins {
        return Err(format!("{spec}: solver says CopWins"));
    }
    Ok(format!("{spec} {} states, lookahead {}", family.len(), family.lookahead))
}

/// Runs every check of one criterion, failing if any check fails or the
/// criterion exceeds `limit` (or any single check exceeds `each`).
fn criterion(name: &str, limit: Duration, each: Option<Duration>, checks: Vec<Box<dyn FnOnce() -> Outcome>>) -> bool {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut error = None;
    for check in checks {
        let t = Instant::now();
        let out = check();
        let dt = t.elapsed();
        match out {
            Ok(note) => notes.push(format!("{note} ({:.2}s)", dt.as_secs_f64())),
            Err(e) => {
                error = Some(e);
                break;
            }
        }
        if let Some(each) = each.filter(|&e| dt > e) {
            error = Some(format!("{} took {:.1}s, limit {:.0}s", notes.last().unwrap(), dt.as_secs_f64(), each.as_secs_f64()));
            break;
        }
    }
    let total = start.elapsed();
    if error.is_none() && total > limit {
        error = Some(format!("took {:.1}s, limit {:.0}s", total.as_secs_f64(), limit.as_secs_f64()));
    }
    match error {
        None => {
            println!("PASS  {name}  [{:.2}s]  {}", total.as_secs_f64(), notes.join("; "));
            true
        }
        Some(e) => {
            println!("FAIL  {name}  [{:.2}s]  {e}", total.as_secs_f64());
            false
        }
    }
}

macro_rules! checks {
    ($($e:expr),* $(,)?) => { vec![$(Box::new(move || $e) as Box<dyn FnOnce() -> Outcome>),*] };
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn strategy_h_check() -> Outcome {
    let (g, r) = solve_default("H");
    let bound = cop_wins("H", &g, &strategy_h(&g).map_err(|e| e.to_string())?)?;
    let solver = r.capture_bound.ok_or("solver found no bound on H")?;
    if bound < solver {
        return Err(format!("strategy bound {bound} below solver bound {solver}"));
    }
    Ok(format!("strategy bound {bound} >= solver bound {solver}"))
}

fn is_six_cycle(g: &Graph) -> bool {
    g.vertex_count() == 6
        && g.vertices().all(|v| g.degree(v) == 2)
        && g.vertices().all(|v| g.eccentricity(v) == 3)
}

fn kn_grid() -> Outcome {
    let req = GridRequest {
        family: GridFamily::Kn,
        n: Some((3, 6)),
        a: None,
        b: None,
        m: (1, 5),
        budget: SolveBudget::default(),
    };
    let grid = locatability_grid(&req, Parallelism::Auto);
    let mut covered = Vec::new();
    for cell in &grid.cells {
        let (n, m) = (cell.params["n"], cell.params["m"]);
        let exceptional = matches!((n, m), (3, 2) | (4, 2) | (6, 3));
        let want = if 2 * m >= n && !exceptional { Verdict::CopWins } else { Verdict::RobberWins };
        match cell.verdict {
            Verdict::Unknown if want == Verdict::CopWins => {
                let spec = format!("K:{n}^{m}");
                let g = graph(&spec);
                let s = strategy_kn(&g, n, m).map_err(|e| format!("{spec} over budget and {e}"))?;
                let bound = cop_wins(&spec, &g, &s)?;
                covered.push(format!("{spec} by strategy, bound {bound}"));
            }
            v if v == want => {}
            v => return Err(format!("K:{n}^{m}: {v:?}, expected {want:?}")),
        }
    }
    let k32 = graph("K:3^2");
    if !is_six_cycle(&k32) {
        return Err("K:3^2 is not a 6-cycle".into());
    }
    let c6 = solve_default("C:6").1.verdict;
    if grid.cell(&[("n", 3), ("m", 2)]).map(|c| c.verdict) != Some(c6) {
        return Err("K:3^2 and C:6 disagree".into());
    }
    println!("{}", grid.to_text());
    let cover = if covered.is_empty() { String::new() } else { format!(", {}", covered.join(", ")) };
    Ok(format!("{} cells, K:3^2 is C6{cover}", grid.cells.len()))
}

fn kn_strategy(n: u32, m: u32) -> Outcome {
    let spec = format!("K:{n}^{m}");
    let g = graph(&spec);
    let s = strategy_kn(&g, n, m).map_err(|e| e.to_string())?;
    Ok(format!("{spec} bound {}", cop_wins(&spec, &g, &s)?))
}

fn kab_grid() -> Outcome {
    let req = GridRequest {
        family: GridFamily::Kab,
        n: None,
        a: Some((2, 4)),
        b: Some((2, 4)),
        m: (1, 3),
        budget: SolveBudget::default(),
    };
    let grid = locatability_grid(&req, Parallelism::Auto);
    for cell in &grid.cells {
        let (a, b, m) = (cell.params["a"], cell.params["b"], cell.params["m"]);
        let lo = a.min(b);
        let threshold = if lo >= 4 { lo - 1 } else { lo };
        let want = if m >= threshold { Verdict::CopWins } else { Verdict::RobberWins };
        if cell.verdict != want {
            return Err(format!("Kab:{a},{b}^{m}: {:?}, expected {want:?}", cell.verdict));
        }
    }
    println!("{}", grid.to_text());
    Ok(format!("{} cells", grid.cells.len()))
}

fn kab_strategies() -> Outcome {
    let mut notes = Vec::new();
    let g = graph("Kab:2,3^2");
    let s = strategy_k2b_half(&g, 3).map_err(|e| e.to_string())?;
    notes.push(format!("k2b-half on Kab:2,3^2 bound {}", cop_wins("Kab:2,3^2", &g, &s)?));
    for (a, b) in [(3, 3), (4, 4)] {
        let spec = format!("Kab:{a},{b}^3");
        let g = graph(&spec);
        let s = strategy_kab(&g, a, b, 3).map_err(|e| e.to_string())?;
        notes.push(format!("kab on {spec} bound {}", cop_wins(&spec, &g, &s)?));
    }
    Ok(notes.join(", "))
}

fn main() {
    let mut results = Vec::new();

    results.push(criterion(
        "verdicts: C:6 RobberWins, H CopWins, Hprime RobberWins",
        secs(15),
        Some(secs(5)),
        checks![
            expect_verdict("C:6", Verdict::RobberWins),
            expect_verdict("H", Verdict::CopWins),
            expect_verdict("Hprime", Verdict::RobberWins),
        ],
    ));

    results.push(criterion(
        "strategy H wins on H with bound at least the solver's",
        secs(5),
        None,
        checks![strategy_h_check()],
    ));

    results.push(criterion(
        "girth 3, 4, 5 graphs are RobberWins: K:3, C:4, C:5, K:4, Petersen",
        secs(150),
        Some(secs(30)),
        checks![
            expect_verdict("K:3", Verdict::RobberWins),
            expect_verdict("C:4", Verdict::RobberWins),
            expect_verdict("C:5", Verdict::RobberWins),
            expect_verdict("K:4", Verdict::RobberWins),
            expect_verdict("Petersen", Verdict::RobberWins),
        ],
    ));

    results.push(criterion(
        "K_n^m grid n 3..6, m 1..5: CopWins iff 2m >= n except (3,2), (4,2), (6,3)",
        secs(600),
        None,
        checks![kn_grid()],
    ));

    results.push(criterion(
        "strategy kn wins on K:5^4, K:6^4, K:7^5, K:8^5, K:6^5",
        secs(1500),
        Some(secs(300)),
        checks![
            kn_strategy(5, 4),
            kn_strategy(6, 4),
            kn_strategy(7, 5),
            kn_strategy(8, 5),
            kn_strategy(6, 5),
        ],
    ));

    results.push(criterion(
        "evasion families accepted: K:5^2, C:6, Heawood, Kab:3,3, Kab:3,3^2, Kab:3,4^2",
        secs(360),
        Some(secs(60)),
        checks![
            {
                let g = graph("K:5^2");
                let p = robber_policy_kn_small_m(&g, 5, 2).map_err(|e| e.to_string())?;
                family_accepted("K:5^2", &g, &p, p.family(&g))
            },
            {
                let g = graph("C:6");
                let p = robber_policy_girth6(&g, None).map_err(|e| e.to_string())?;
                family_accepted("C:6", &g, &p, p.family(&g))
            },
            {
                let g = graph("Heawood");
                let p = robber_policy_girth6(&g, None).map_err(|e| e.to_string())?;
                family_accepted("Heawood", &g, &p, p.family(&g))
            },
            {
                let g = graph("Kab:3,3");
                let p = robber_policy_kab(&g, 3, 3, 1).map_err(|e| e.to_string())?;
                family_accepted("Kab:3,3", &g, &p, p.family(&g))
            },
            {
                let g = graph("Kab:3,3^2");
                let p = robber_policy_ka3_half(&g, 3, 3).map_err(|e| e.to_string())?;
                let fam = p.family(&g);
                if fam.lookahead != 2 {
                    return Err(format!("Kab:3,3^2 family has lookahead {}", fam.lookahead));
                }
                family_accepted("Kab:3,3^2", &g, &p, fam)
            },
            {
                let g = graph("Kab:3,4^2");
                let p = robber_policy_ka3_half(&g, 3, 4).map_err(|e| e.to_string())?;
                let fam = p.family(&g);
                if fam.lookahead != 2 {
                    return Err(format!("Kab:3,4^2 family has lookahead {}", fam.lookahead));
                }
                family_accepted("Kab:3,4^2", &g, &p, fam)
            },
        ],
    ));

    results.push(criterion(
        "K_a,b^m grid a,b 2..4, m 1..3 matches the threshold; k2b-half and kab strategies win",
        secs(600),
        None,
        checks![kab_grid(), kab_strategies()],
    ));

    results.push(criterion(
        "properties: partitions, subset monotonicity, naive oracle, thread determinism",
        secs(300),
        None,
        checks![
            common::partition_triples(1000, 11).map(|_| "1000 partition triples".into()),
            common::subset_monotone().map(|_| format!("monotone on {} graphs", common::SMALL.len() + common::MEDIUM.len())),
            common::naive_agreement().map(|_| format!("naive oracle on {} graphs", common::SMALL.len())),
            common::thread_independent().map(|_| format!("1 vs 4 threads on {} graphs", common::THREADED.len())),
            common::duality().map(|_| "policies and certificates verified".into()),
        ],
    ));

    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
