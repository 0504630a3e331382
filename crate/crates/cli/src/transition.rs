use std::path::PathBuf;

use adelion::place::{places_above, Base, FinitePlace};
use adelion::transition::{build_transition, verify_td, TdReport, TransitionDiagram};
use clap::Subcommand;
use serde_json::json;

use crate::{emit, parse_tower, read, CliError, CliResult, OutArg};

#[derive(Subcommand)]
pub enum TransitionOp {
    /// Build the diagram above a base place and write it as "td/1".
    Build {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        depth: usize,
        /// Base place such as p:3@n:1#1; defaults to the first place above the prime.
        #[arg(long)]
        place: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check (TD.1)-(TD.3) and level containment for a "td/1" file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

pub fn run(op: TransitionOp, json: bool) -> CliResult<()> {
    match op {
        TransitionOp::Build { tower, prime, depth, place, out } => {
            let tower = parse_tower(&tower)?;
            let base = Base::prime(prime)?;
            let v: FinitePlace = match place {
                Some(s) => s.parse()?,
                None => places_above(tower.conductor(0), base)[0],
            };
            if v.base() != base {
                return Err(CliError::Usage(format!("place {v} does not lie above {prime}")));
            }
            let diagram = build_transition(&tower, &v, depth)?;
            emit(&out, &diagram.to_json())
        }
        TransitionOp::Verify { input } => {
            let diagram = TransitionDiagram::from_json(&read(&input)?)?;
            let report = verify_td(&diagram);
            print_report(&diagram, &report, json);
            match &report.violation {
                None => Ok(()),
                Some(v) => Err(CliError::Failed(format!("transition diagram violates {v}"))),
            }
        }
    }
}

fn print_report(diagram: &TransitionDiagram, report: &TdReport, json: bool) {
    if json {
        let violation = report.violation.as_ref().map(|v| {
            json!({ "axiom": v.axiom.to_string(), "places": v.places, "level": v.level })
        });
        let doc = json!({
            "tower": diagram.tower().spec_string(),
            "v": diagram.v().to_string(),
            "depth": diagram.depth(),
            "places": diagram.places().len(),
            "passed": report.passed(),
            "pairs": report.pairs,
            "triples": report.triples,
            "containment_pairs": report.containment_pairs,
            "violation": violation,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
        return;
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "{verdict} td above {} on {} to depth {}: {} places, {} pairs, {} triples, {} containment pairs",
        diagram.v(),
        diagram.tower().spec_string(),
        diagram.depth(),
        diagram.places().len(),
        report.pairs,
        report.triples,
        report.containment_pairs,
    );
    if let Some(v) = &report.violation {
        println!("counterexample: {v}");
    }
}
