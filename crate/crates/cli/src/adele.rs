use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use adelion::adele::{
    cantor_adele, cantor_truncations, densify, is_cauchy, limit_local, Adele, BasicOpen, ClassicalAdele, NeighborhoodBaseElement,
};
use adelion::local::Membership;
use clap::Subcommand;
use serde_json::{json, Value};

use crate::{emit, parse_tower, read, write, CliError, CliResult, OutArg};

#[derive(Subcommand)]
pub enum AdeleOp {
    /// Sum of two "adele/1" documents.
    Add {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        with: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Product of two "adele/1" documents.
    Mul {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        with: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Image of a classical adele ("cadele/1") in the layer of the given depth.
    Conorm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        to_depth: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Membership in a conorm image (--level) or in a basic open set (--open).
    #[command(group = clap::ArgGroup::new("target").required(true))]
    Member {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, group = "target")]
        level: Option<usize>,
        #[arg(long, group = "target")]
        open: Option<PathBuf>,
        /// Where to write the witness of a conorm-image membership.
        #[command(flatten)]
        out: OutArg,
    },
    /// A classical adele whose conorm lies in the open set around the input.
    Densify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        open: PathBuf,
        /// Where to write the witness b.
        #[command(flatten)]
        out: OutArg,
    },
    /// The digit-map adele above an inert-then-split prime.
    Cantor {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        depth: usize,
        /// Also write the digit truncations as a0.json, a1.json, ... into this directory.
        #[arg(long)]
        truncations: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Cauchy indices of a sequence against the neighbourhoods phi(S, n).
    Cauchy {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// The finite primes S.
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Radii 1/n, coarse to fine.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        radii: Vec<u64>,
        /// Also compute the local limit above this prime.
        #[arg(long)]
        limit_prime: Option<u64>,
        #[arg(long, default_value_t = 6, requires = "limit_prime")]
        precision: u32,
    },
}

fn load_adele(path: &Path) -> CliResult<Adele> {
    Ok(Adele::from_json(&read(path)?)?)
}

fn as_value(doc: &str) -> Value {
    serde_json::from_str(doc).expect("documents are valid JSON")
}

fn print_json(doc: &Value) {
    println!("{}", serde_json::to_string_pretty(doc).expect("report serializes"));
}

fn membership_name(m: Membership) -> &'static str {
    match m {
        Membership::In => "in",
        Membership::Out => "out",
        Membership::Undecided => "undecided",
    }
}

pub fn run(op: AdeleOp, json: bool) -> CliResult<()> {
    match op {
        AdeleOp::Add { input, with, out } => emit(&out, &load_adele(&input)?.add(&load_adele(&with)?)?.to_json()),
        AdeleOp::Mul { input, with, out } => emit(&out, &load_adele(&input)?.mul(&load_adele(&with)?)?.to_json()),
        AdeleOp::Conorm { input, to_depth, out } => {
            let c = ClassicalAdele::from_json(&read(&input)?)?;
            emit(&out, &c.conorm_adele(to_depth)?.to_json())
        }
        AdeleOp::Member { input, level, open, out } => {
            let a = load_adele(&input)?;
            if let Some(path) = open {
                let u = BasicOpen::from_json(&read(&path)?)?;
                let m = membership_name(u.contains(&a)?);
                if json {
                    print_json(&json!({ "membership": m }));
                } else {
                    println!("{m}");
                }
                return Ok(());
            }
            let level = level.expect("clap requires a target");
            if level > a.depth() {
                return Err(adelion::Error::InvalidDepth { depth: level, max: a.depth() }.into());
            }
            let witness = a.in_conorm_image(level);
            if let (Some(w), Some(path)) = (&witness, &out.out) {
                write(path, &w.to_json())?;
            }
            let inline = out.out.is_none();
            if json {
                let w = witness.as_ref().filter(|_| inline).map(|w| as_value(&w.to_json()));
                print_json(&json!({ "level": level, "member": witness.is_some(), "witness": w }));
            } else {
                println!("{}", witness.is_some());
                if let Some(w) = witness.filter(|_| inline) {
                    println!("{}", w.to_json());
                }
            }
            Ok(())
        }
        AdeleOp::Densify { input, open, out } => {
            let a = load_adele(&input)?;
            let u = BasicOpen::from_json(&read(&open)?)?;
            let d = densify(&a, &u)?;
            let recheck = u.contains(&d.witness.conorm_adele(a.depth())?)?;
            if let Some(path) = &out.out {
                write(path, &d.witness.to_json())?;
            }
            let inline = out.out.is_none();
            if json {
                let epsilon = json!({
                    "padic": d.epsilon.padic,
                    "arch": d.epsilon.arch.as_ref().map(|r| r.to_string()),
                });
                let w = inline.then(|| as_value(&d.witness.to_json()));
                print_json(&json!({ "level": d.level, "recheck": membership_name(recheck), "epsilon": epsilon, "witness": w }));
            } else {
                println!("L = {}", d.level);
                println!("recheck: {}", membership_name(recheck));
                if inline {
                    println!("{}", d.witness.to_json());
                }
            }
            match recheck {
                Membership::In => Ok(()),
                m => Err(CliError::Failed(format!("conorm of the witness is {} the open set", membership_name(m)))),
            }
        }
        AdeleOp::Cantor { tower, prime, depth, truncations, out } => {
            let tower = parse_tower(&tower)?;
            if let Some(dir) = truncations {
                std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
                for (j, a) in cantor_truncations(&tower, prime, depth)?.iter().enumerate() {
                    write(&dir.join(format!("a{j}.json")), &a.to_json())?;
                }
            }
            emit(&out, &cantor_adele(&tower, prime, depth)?.to_json())
        }
        AdeleOp::Cauchy { inputs, primes, radii, limit_prime, precision } => {
            let seq = inputs.iter().map(|p| load_adele(p)).collect::<CliResult<Vec<_>>>()?;
            let primes: BTreeSet<u64> = primes.into_iter().collect();
            let base = radii
                .iter()
                .map(|&n| NeighborhoodBaseElement::new(primes.clone(), n))
                .collect::<adelion::Result<Vec<_>>>()?;
            let report = is_cauchy(&seq, &base)?;
            let limit = limit_prime.map(|p| limit_local(&seq, p, precision)).transpose()?;
            if json {
                let indices: Vec<_> = report.indices.iter().map(|(b, i)| json!({ "n": b.n, "index": i })).collect();
                let limit = limit.as_ref().map(|l| {
                    let values: serde_json::Map<String, Value> =
                        l.values.iter().map(|(y, x)| (y.to_string(), Value::String(x.to_string()))).collect();
                    json!({
                        "p": l.p,
                        "precision": l.precision,
                        "stable_from": l.stable_from,
                        "constant_depth": l.constant_depth,
                        "values": values,
                    })
                });
                print_json(&json!({
                    "length": report.len,
                    "primes": primes,
                    "cauchy": report.cauchy(),
                    "undecided": report.undecided,
                    "indices": indices,
                    "limit": limit,
                }));
            } else {
                let s: Vec<String> = primes.iter().map(u64::to_string).collect();
                println!("sequence of {} against phi({{{}}}, n):", report.len, s.join(","));
                for (b, i) in &report.indices {
                    println!("  n = {:>6}  index {i}", b.n);
                }
                println!("cauchy: {} ({} undecided)", report.cauchy(), report.undecided);
                if let Some(l) = &limit {
                    println!(
                        "limit above {} at precision {}: stable from {}, constant on level-{} cylinders",
                        l.p, l.precision, l.stable_from, l.constant_depth
                    );
                    for (y, x) in &l.values {
                        println!("  {y}  {x}");
                    }
                }
            }
            if report.cauchy() {
                Ok(())
            } else {
                Err(CliError::Failed("sequence is not Cauchy on the given base".into()))
            }
        }
    }
}
