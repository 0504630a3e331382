use std::path::PathBuf;

use adelion::cyclotomic::tower_data::{export_cyclotomic, GaloisTowerData, ValidationReport};
use adelion::place::{places_above, splitting_profile, Base};
use clap::Args;
use serde_json::json;

use crate::{emit, parse_tower, read, CliError, CliResult, OutArg};

#[derive(Args)]
pub struct TowerArgs {
    /// Conductor chain such as 1,5,20.
    #[arg(long, conflicts_with = "validate", required_unless_present = "validate")]
    tower: Option<String>,
    /// Base places to record fibers for: a prime, or `inf`.
    #[arg(long = "base", value_delimiter = ',')]
    bases: Vec<String>,
    /// Check a "gtower/1" file instead of exporting one.
    #[arg(long)]
    validate: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("base").required(true))]
pub struct PlacesArgs {
    #[arg(long)]
    tower: String,
    #[arg(long, group = "base")]
    prime: Option<u64>,
    /// Archimedean places.
    #[arg(long, group = "base")]
    arch: bool,
    /// Only list representatives at this level.
    #[arg(long)]
    level: Option<usize>,
}

pub fn parse_base(s: &str) -> CliResult<Base> {
    match s {
        "inf" | "arch" => Ok(Base::Arch),
        _ => {
            let p = s.parse().map_err(|_| CliError::Usage(format!("bad base place {s:?}")))?;
            Ok(Base::prime(p)?)
        }
    }
}

pub fn tower(args: TowerArgs) -> CliResult<()> {
    if let Some(path) = args.validate {
        let data = GaloisTowerData::from_json(&read(&path)?)?;
        return match data.validate() {
            ValidationReport::Pass => {
                println!("PASS: {} levels", data.depth() + 1);
                Ok(())
            }
            ValidationReport::Fail(v) => Err(CliError::Failed(format!("FAIL: {v}"))),
        };
    }
    let tower = parse_tower(args.tower.as_deref().unwrap_or_default())?;
    let bases = args.bases.iter().map(|s| parse_base(s)).collect::<CliResult<Vec<_>>>()?;
    emit(&args.out, &export_cyclotomic(&tower, &bases).to_json())
}

pub fn places(args: PlacesArgs, json: bool) -> CliResult<()> {
    let tower = parse_tower(&args.tower)?;
    let base = match args.prime {
        Some(p) => Base::prime(p)?,
        None => Base::Arch,
    };
    if let Some(level) = args.level {
        if level > tower.depth() {
            return Err(adelion::Error::InvalidDepth { depth: level, max: tower.depth() }.into());
        }
    }
    let profile = splitting_profile(base, &tower);
    let levels: Vec<usize> = match args.level {
        Some(l) => vec![l],
        None => (0..=tower.depth()).collect(),
    };
    let rows: Vec<_> = levels
        .iter()
        .map(|&i| {
            let n = tower.conductor(i);
            let places = places_above(n, base);
            let degree = places.first().map_or(1, |y| y.local_degree());
            (i, n, places.iter().map(|y| y.rep()).collect::<Vec<_>>(), degree)
        })
        .collect();
    if json {
        let levels: Vec<_> = rows
            .iter()
            .map(|(i, n, reps, f)| json!({ "level": i, "conductor": n, "count": reps.len(), "local_degree": f, "reps": reps }))
            .collect();
        let doc = json!({ "tower": tower.spec_string(), "base": base.to_string(), "profile": profile, "levels": levels });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
        return Ok(());
    }
    println!("tower {}  base {}", tower.spec_string(), base);
    println!("{:>5}  {:>9}  {:>6}  {:>6}  reps", "level", "conductor", "places", "degree");
    for (i, n, reps, f) in &rows {
        let reps: Vec<String> = reps.iter().map(u64::to_string).collect();
        println!("{i:>5}  {n:>9}  {:>6}  {f:>6}  {}", reps.len(), reps.join(","));
    }
    let profile: Vec<String> = profile.iter().map(u64::to_string).collect();
    println!("profile [{}]", profile.join(","));
    Ok(())
}
