//! Command-line entry points: scenario ingestion, table reproduction,
//! property checks, planning, and graph export.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::aggregate::Aggregator;
use crate::model::TransitionSystem;
use crate::plan::{best_sequence, PlanQuery};
use crate::properties::search::SearchMode;
use crate::properties::{
    satisfaction_matrix, search_counterexample, LossesVariant, Matrix, PropertyId, SearchConfig,
    Variants,
};
use crate::report::{
    decimal2, dot_graph, metadata, rational_str, rational_value, render_table, verdict_mark,
    verdict_to_value, Report,
};
use crate::scalar::Rational;
use crate::scenario::{parse_decimal, parse_scenario, Scenario};

/// The sequence rows of the published aggregated-values table.
pub const TABLE1_SEQUENCES: [&[&str]; 8] = [
    &["w2"],
    &["w2", "w4"],
    &["w2", "w1"],
    &["w2", "w1", "w3"],
    &["w2", "w1", "w2"],
    &["w2", "w1", "w2", "w4"],
    &["w2", "w1", "w2", "w1"],
    &["w2", "w1", "w2", "w1", "w2"],
];

#[derive(Parser)]
#[command(
    name = "worldseq",
    version,
    about = "Possible-worlds sequences, blame-aware aggregation, property search, and planning"
)]
struct Cli {
    /// Write the structured report to this path as JSON.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure of a set of worlds under the scenario's actions.
    Closure {
        scenario: PathBuf,
        /// Seed worlds (repeatable); defaults to the initial world.
        #[arg(long = "from")]
        from: Vec<String>,
    },
    /// Arcs and maximal-action labels of the scenario's transition system.
    Transitions {
        scenario: PathBuf,
        /// Write a DOT rendering of the graph to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Fill negative-utility worlds gray in the DOT output.
        #[arg(long)]
        shade: bool,
    },
    /// Evaluate one aggregator on one sequence.
    Eval {
        scenario: PathBuf,
        /// Comma-separated world ids, e.g. w2,w1,w2.
        #[arg(long)]
        seq: String,
        #[arg(long)]
        agg: String,
    },
    /// Reproduce the aggregated-values table on the scenario.
    Table1 { scenario: PathBuf },
    /// Verdict matrix for all nine properties against the published claims.
    Table2 {
        scenario: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
        /// Exit with code 2 when any verdict contradicts a published claim.
        #[arg(long)]
        fail_on_discrepancy: bool,
    },
    /// Rank sequences from the initial world by aggregated score.
    Plan {
        scenario: PathBuf,
        #[arg(long)]
        agg: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        top: usize,
    },
    /// Search one (property, aggregator) cell for a counterexample.
    Check {
        scenario: Option<PathBuf>,
        #[arg(long)]
        property: String,
        #[arg(long)]
        agg: String,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    max_worlds: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    /// Utility grid as comma-separated decimals or fractions, e.g.
    /// -1,-0.3,0,1/5,1.
    #[arg(long)]
    grid: Option<String>,
    /// Switch from exhaustive to randomized search with this many samples.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which reading of the increasing-losses conclusion to check.
    #[arg(long, value_parser = ["printed", "prose"], default_value = "printed")]
    losses_variant: String,
    /// Require sigma(S1) != sigma(S1+S2) before redundancy's inequality.
    #[arg(long)]
    redundancy_precondition: bool,
}

impl SearchArgs {
    fn to_config(&self) -> Result<SearchConfig<Rational>, String> {
        let mut config = SearchConfig {
            max_worlds: self.max_worlds,
            max_seq_len: self.max_len,
            seed: self.seed,
            ..SearchConfig::default()
        };
        if let Some(samples) = self.samples {
            config.mode = SearchMode::Randomized { samples };
        }
        if let Some(grid) = &self.grid {
            config.utility_grid = parse_grid(grid)?;
        }
        config.variants = Variants {
            losses: if self.losses_variant == "prose" {
                LossesVariant::Prose
            } else {
                LossesVariant::Printed
            },
            redundancy_precondition: self.redundancy_precondition,
        };
        Ok(config)
    }
}

fn parse_grid(text: &str) -> Result<Vec<Rational>, String> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            if let Some((n, d)) = item.split_once('/') {
                let n: i64 = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad fraction '{item}'"))?;
                let d: i64 = d
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad fraction '{item}'"))?;
                if d <= 0 {
                    return Err(format!("bad fraction '{item}'"));
                }
                Ok(Rational::new(n, d))
            } else {
                parse_decimal(item).map_err(|e| format!("bad grid value '{item}': {e}"))
            }
        })
        .collect()
}

/// Outcome of one CLI invocation.
pub struct CliResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn failure(message: String) -> CliResult {
    CliResult {
        code: 1,
        stdout: String::new(),
        stderr: message + "\n",
    }
}

fn load_scenario(path: &PathBuf) -> Result<(Scenario, TransitionSystem), String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read scenario '{}': {e}", path.display()))?;
    let scenario = parse_scenario(&text).map_err(|errors| {
        errors
            .iter()
            .map(|e| format!("error: {e}"))
            .collect::<Vec<_>>()
            .join("\n")
    })?;
    let system = scenario.system().map_err(|e| e.to_string())?;
    Ok((scenario, system))
}

/// Parses `argv` (without the program name) and runs the command.
pub fn run(args: &[String]) -> CliResult {
    let mut full = vec!["worldseq".to_string()];
    full.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&full) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the same error path
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                failure(rendered.trim_end().to_string())
            } else {
                CliResult {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };

    let mut out = String::new();
    let mut warnings = String::new();
    let report = match dispatch(&cli.command, &mut out, &mut warnings) {
        Ok(report) => report,
        Err(message) => return failure(message),
    };
    if let Some(path) = &cli.json {
        if let Err(e) = fs::write(path, report.report.to_json_string()) {
            return failure(format!("cannot write report '{}': {e}", path.display()));
        }
    }
    CliResult {
        code: report.code,
        stdout: out,
        stderr: warnings,
    }
}

struct CommandOutput {
    report: Report,
    code: i32,
}

fn ok(report: Report) -> Result<CommandOutput, String> {
    Ok(CommandOutput { report, code: 0 })
}

fn dispatch(
    command: &Command,
    out: &mut String,
    warnings: &mut String,
) -> Result<CommandOutput, String> {
    match command {
        Command::Closure { scenario, from } => {
            let (sc, ts) = load_scenario(scenario)?;
            push_warnings(&sc, warnings);
            let seeds: Vec<String> = if from.is_empty() {
                vec![ts.initial().to_string()]
            } else {
                from.clone()
            };
            let seed_worlds = seeds
                .iter()
                .map(|id| {
                    ts.world(id)
                        .ok_or_else(|| format!("error: unknown world '{id}'"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let closed = crate::model::closure(&seed_worlds, ts.actions(), ts.worlds());
            let ids: Vec<String> = closed.into_iter().collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
            ok(Report::new(
                "closure",
                metadata(json!({ "scenario": scenario.display().to_string(), "seed": seeds })),
                vec![json!({ "worlds": ids })],
            ))
        }
        Command::Transitions {
            scenario,
            dot,
            shade,
        } => {
            let (sc, ts) = load_scenario(scenario)?;
            push_warnings(&sc, warnings);
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for (f, t, a) in ts.arcs() {
                rows.push(json!({ "from": f, "to": t, "action": a.name }));
                table.push(vec![f.to_string(), t.to_string(), a.name.clone()]);
            }
            out.push_str(&render_table(
                &["from".into(), "to".into(), "action".into()],
                &table,
            ));
            if let Some(path) = dot {
                let rendered = dot_graph(&ts, &sc.utilities, *shade);
                fs::write(path, rendered)
                    .map_err(|e| format!("cannot write DOT file '{}': {e}", path.display()))?;
                out.push_str(&format!("wrote {}\n", path.display()));
            }
            ok(Report::new(
                "transitions",
                metadata(json!({ "scenario": scenario.display().to_string() })),
                rows,
            ))
        }
        Command::Eval { scenario, seq, agg } => {
            let (sc, ts) = load_scenario(scenario)?;
            push_warnings(&sc, warnings);
            let aggregator = parse_aggregator(agg)?;
            let ids: Vec<String> = seq.split(',').map(|s| s.trim().to_string()).collect();
            let sequence = ts
                .validate_sequence(&ids)
                .map_err(|e| format!("error: {e}"))?;
            let value = aggregator
                .evaluate(&sequence, &sc.utilities)
                .map_err(|e| format!("error: {e}"))?;
            out.push_str(&format!(
                "{} {} = {} (exact {})\n",
                aggregator,
                sequence,
                decimal2(&value),
                rational_str(&value)
            ));
            if aggregator == Aggregator::Sum {
                out.push_str("note: sum is a naive baseline, not a bounded aggregation function\n");
            }
            ok(Report::new(
                "check",
                metadata(json!({ "scenario": scenario.display().to_string() })),
                vec![json!({
                    "sequence": sequence.ids(),
                    "aggregator": aggregator.name(),
                    "value": rational_value(&value),
                })],
            ))
        }
        Command::Table1 { scenario } => {
            let (sc, ts) = load_scenario(scenario)?;
            push_warnings(&sc, warnings);
            let aggs = [Aggregator::Mean, Aggregator::Blame, Aggregator::Occ];
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for ids in TABLE1_SEQUENCES {
                let ids: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
                let sequence = ts
                    .validate_sequence(&ids)
                    .map_err(|e| format!("error: table row {ids:?}: {e}"))?;
                let values: Vec<Rational> = aggs
                    .iter()
                    .map(|a| a.evaluate(&sequence, &sc.utilities))
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("error: {e}"))?;
                let mut row = vec![sequence.to_string()];
                row.extend(values.iter().map(decimal2));
                table.push(row);
                rows.push(json!({
                    "sequence": sequence.ids(),
                    "mean": rational_value(&values[0]),
                    "blame": rational_value(&values[1]),
                    "occ": rational_value(&values[2]),
                }));
            }
            out.push_str(&render_table(
                &[
                    "sequence".into(),
                    "sigma_mean".into(),
                    "sigma_blame".into(),
                    "sigma_occ".into(),
                ],
                &table,
            ));
            ok(Report::new(
                "table1",
                metadata(json!({ "scenario": scenario.display().to_string() })),
                rows,
            ))
        }
        Command::Table2 {
            scenario,
            search,
            fail_on_discrepancy,
        } => {
            let config = search.to_config().map_err(|e| format!("error: {e}"))?;
            let loaded = scenario.as_ref().map(load_scenario).transpose()?;
            if let Some((sc, _)) = &loaded {
                push_warnings(sc, warnings);
            }
            let scenario_ref = loaded.as_ref().map(|(sc, ts)| (ts, &sc.utilities));
            let matrix = satisfaction_matrix(&Aggregator::ALL, &config, scenario_ref);
            render_matrix(&matrix, out);
            let discrepancies = matrix.discrepancies().count();
            let rows: Vec<_> = matrix.verdicts.iter().map(verdict_to_value).collect();
            let footnotes: Vec<_> = matrix
                .losses_alternative
                .iter()
                .map(verdict_to_value)
                .collect();
            let report = Report::new(
                "table2",
                metadata(json!({
                    "seed": config.seed,
                    "claims_version": crate::properties::claims::CLAIMS_VERSION,
                    "discrepancies": discrepancies,
                    "losses_alternative": footnotes,
                })),
                rows,
            );
            let code = if *fail_on_discrepancy && discrepancies > 0 {
                2
            } else {
                0
            };
            Ok(CommandOutput { report, code })
        }
        Command::Plan {
            scenario,
            agg,
            horizon,
            top,
        } => {
            let (sc, ts) = load_scenario(scenario)?;
            push_warnings(&sc, warnings);
            let aggregator = parse_aggregator(agg)?;
            let plans = best_sequence(
                &ts,
                &PlanQuery {
                    aggregator,
                    u: sc.utilities.clone(),
                    horizon: *horizon,
                    top_k: *top,
                },
            )
            .map_err(|e| format!("error: {e}"))?;
            let mut table = Vec::new();
            let mut rows = Vec::new();
            for plan in &plans {
                table.push(vec![
                    plan.rank.to_string(),
                    plan.sequence.to_string(),
                    plan.actions.join(", "),
                    decimal2(&plan.score),
                    rational_str(&plan.score),
                ]);
                rows.push(json!({
                    "rank": plan.rank,
                    "sequence": plan.sequence.ids(),
                    "actions": plan.actions,
                    "score": rational_value(&plan.score),
                }));
            }
            out.push_str(&render_table(
                &[
                    "rank".into(),
                    "sequence".into(),
                    "actions".into(),
                    "score".into(),
                    "exact".into(),
                ],
                &table,
            ));
            if aggregator == Aggregator::Sum {
                out.push_str("note: sum is a naive baseline, not a bounded aggregation function\n");
            }
            ok(Report::new(
                "plan",
                metadata(json!({
                    "scenario": scenario.display().to_string(),
                    "aggregator": aggregator.name(),
                    "horizon": horizon,
                })),
                rows,
            ))
        }
        Command::Check {
            scenario,
            property,
            agg,
            search,
        } => {
            let config = search.to_config().map_err(|e| format!("error: {e}"))?;
            let property = PropertyId::parse(property).ok_or_else(|| {
                format!(
                    "error: unknown property '{property}' (expected one of: {})",
                    PropertyId::ALL.map(|p| p.name()).join(", ")
                )
            })?;
            let aggregator = parse_aggregator(agg)?;
            let loaded = scenario.as_ref().map(load_scenario).transpose()?;
            if let Some((sc, _)) = &loaded {
                push_warnings(sc, warnings);
            }
            let scenario_ref = loaded.as_ref().map(|(sc, ts)| (ts, &sc.utilities));
            let verdict = search_counterexample(property, aggregator, &config, scenario_ref);
            out.push_str(&format!(
                "{} x {}: {}\n",
                property.name(),
                verdict.aggregator,
                verdict_mark(&verdict)
            ));
            if let crate::properties::search::VerdictStatus::Refuted { witness, details } =
                &verdict.status
            {
                out.push_str(&format!(
                    "counterexample: {}\n  {}\n",
                    witness.describe(property),
                    details
                ));
            } else {
                out.push_str("confirmed within bounds (no counterexample found)\n");
            }
            ok(Report::new(
                "check",
                metadata(json!({ "seed": config.seed })),
                vec![verdict_to_value(&verdict)],
            ))
        }
    }
}

fn parse_aggregator(name: &str) -> Result<Aggregator, String> {
    Aggregator::parse(name).ok_or_else(|| {
        format!(
            "error: unknown aggregator '{name}' (expected one of: {})",
            Aggregator::ALL.map(|a| a.name()).join(", ")
        )
    })
}

fn push_warnings(scenario: &Scenario, warnings: &mut String) {
    for w in &scenario.warnings {
        warnings.push_str(&format!("warning: {w}\n"));
    }
}

fn render_matrix(matrix: &Matrix<Rational>, out: &mut String) {
    let headers: Vec<String> = std::iter::once("property".to_string())
        .chain(Aggregator::ALL.iter().map(|a| a.to_string()))
        .collect();
    let mut table = Vec::new();
    for property in PropertyId::ALL {
        let mut row = vec![property.label().to_string()];
        for aggregator in Aggregator::ALL {
            let verdict = matrix
                .cell(property, aggregator)
                .expect("matrix covers every cell");
            row.push(verdict_mark(verdict));
        }
        table.push(row);
    }
    out.push_str(&render_table(&headers, &table));
    out.push('\n');
    for verdict in matrix.verdicts.iter().filter(|v| v.is_refuted()) {
        if let crate::properties::search::VerdictStatus::Refuted { witness, details } =
            &verdict.status
        {
            out.push_str(&format!(
                "{} x {}: {}\n  {}\n",
                verdict.property.name(),
                verdict.aggregator,
                witness.describe(verdict.property),
                details
            ));
        }
    }
    out.push('\n');
    out.push_str("footnote: increasing-losses under the alternative reading:\n");
    for verdict in &matrix.losses_alternative {
        out.push_str(&format!(
            "  {} ({:?}): {}\n",
            verdict.aggregator,
            verdict.bounds.losses_variant,
            verdict_mark(verdict)
        ));
    }
    let discrepancies: Vec<_> = matrix.discrepancies().collect();
    if discrepancies.is_empty() {
        out.push_str("\nno discrepancies against the published claims\n");
    } else {
        out.push_str(&format!(
            "\n{} cell(s) disagree with the published claims (see ⚠ marks)\n",
            discrepancies.len()
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let grid = parse_grid("-1,-9/10,0.5,1").unwrap();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[1], Rational::new(-9, 10));
        assert!(parse_grid("1,x").is_err());
        assert!(parse_grid("1/0").is_err());
    }
}
