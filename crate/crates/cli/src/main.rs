use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use qde_core::harness::{parse_curves, validate, validate_parallel, Format};
use qde_core::{
    cf_expand, class_group_structure, class_number_order, companions, crossed_product_k0, distinguished_index,
    endomorphism_ring, form_class_group, fundamental_unit, order_fundamental_unit, parse_theta, predict_order,
    unit_index, AbelianGroupStructure, DiscBound, Error, QuadraticIrrational, QuadraticOrder,
};

/// Class groups, K-theory and rank predictions for real quadratic irrationals.
#[derive(Parser)]
#[command(name = "qde", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest discriminant the class-group routines accept.
    #[arg(long, global = true, env = "QDE_MAX_DISC", value_name = "INT", value_parser = parse_bound)]
    max_disc: Option<DiscBound>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion of theta.
    Cf(ThetaArg),
    /// Fundamental unit of Q(sqrt(D)), or of End(Z + theta Z) with --theta.
    Unit(Target),
    /// Endomorphism order of Z + theta Z, or the order of conductor f in Q(sqrt(D)).
    Order(Target),
    /// Ideal class group of the order.
    Classgroup(Target),
    /// One companion torus per ideal class of the order.
    Companions(Target),
    /// K-theory descriptor of the crossed product for theta.
    K0(ThetaArg),
    /// Predicted rank and Shafarevich-Tate group.
    Predict(Target),
    /// Check |Sha| = (1 + rank)^2 over a curve dataset.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ThetaArg {
    /// Quadratic irrational, e.g. "(1+sqrt(5))/2".
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    theta: String,
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct Target {
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true, conflicts_with_all = ["d", "f"])]
    theta: Option<String>,
    /// Squarefree part of the field, Q(sqrt(D)).
    #[arg(long = "D", id = "d", value_name = "INT", value_parser = parse_bigint, allow_negative_numbers = true)]
    d: Option<BigInt>,
    /// Conductor of the order (default 1).
    #[arg(long = "f", id = "f", value_name = "INT", value_parser = parse_bigint, requires = "d", allow_negative_numbers = true)]
    f: Option<BigInt>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Input format; guessed from the extension when absent.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker threads (1 = serial).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.parse().map_err(|_| format!("`{s}` is not a base-10 integer"))
}

fn parse_bound(s: &str) -> Result<DiscBound, String> {
    let n: u64 = s.parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
    DiscBound::new(n).map_err(|e| e.to_string())
}

enum Resolved {
    Theta(QuadraticIrrational, QuadraticOrder),
    Order(QuadraticOrder),
}

impl Resolved {
    fn order(&self) -> &QuadraticOrder {
        match self {
            Self::Theta(_, o) | Self::Order(o) => o,
        }
    }
}

fn resolve(t: &Target) -> Result<Resolved, Error> {
    if let Some(expr) = &t.theta {
        let theta = parse_theta(expr)?;
        let order = endomorphism_ring(&theta);
        return Ok(Resolved::Theta(theta, order));
    }
    let d = t.d.clone().expect("clap enforces --theta or --D");
    let f = t.f.clone().unwrap_or_else(|| 1.into());
    Ok(Resolved::Order(QuadraticOrder::new(d, f)?))
}

fn int_json(n: &BigInt) -> serde_json::Value {
    i64::try_from(n).map_or_else(|_| n.to_string().into(), Into::into)
}

fn group_json(g: &AbelianGroupStructure) -> serde_json::Value {
    json!({ "invariant_factors": g.invariant_factors(), "order": g.order() })
}

fn emit(json: bool, value: &impl Serialize, text: String) {
    if json {
        println!("{}", serde_json::to_string(value).expect("output serializes"));
    } else {
        println!("{text}");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let bound = cli.max_disc.unwrap_or_default();
    let json = cli.json;
    match cli.command {
        Command::Cf(arg) => {
            let theta = parse_theta(&arg.theta)?;
            let cf = cf_expand(&theta);
            emit(json, &cf, cf.to_string());
        }
        Command::Unit(t) => match resolve(&t)? {
            Resolved::Theta(theta, order) => {
                let eta = order_fundamental_unit(&theta);
                let norm = eta.norm();
                let value = json!({ "theta": theta.to_string(), "order": order, "unit": eta.to_string(), "norm": int_json(&norm.to_integer()) });
                emit(json, &value, format!("order: {order}\nunit: {eta}\nnorm: {norm}"));
            }
            Resolved::Order(order) => {
                let e = unit_index(&order)?;
                let eps = fundamental_unit(order.d());
                let eps_text = eps.unit.to_number().to_string();
                let value = json!({
                    "order": order,
                    "fundamental_unit": eps_text,
                    "norm": eps.norm,
                    "unit_index": int_json(&e),
                });
                emit(
                    json,
                    &value,
                    format!("field unit: {eps_text}\nnorm: {}\nunit index of {order}: {e}", eps.norm),
                );
            }
        },
        Command::Order(t) => {
            let r = resolve(&t)?;
            let order = r.order();
            let e = unit_index(order)?;
            let value = json!({ "order": order, "unit_index": int_json(&e) });
            let mut text = format!(
                "{order}\nD = {}\nf = {}\ndiscriminant = {}\nfield discriminant = {}\nunit index = {e}",
                order.d(),
                order.conductor(),
                order.discriminant(),
                order.field_discriminant()
            );
            if let Resolved::Theta(theta, _) = &r {
                text = format!("End(Z + ({theta})Z) = {text}");
            }
            emit(json, &value, text);
        }
        Command::Classgroup(t) => {
            let r = resolve(&t)?;
            let order = r.order();
            let structure = class_group_structure(order, bound)?;
            let h = class_number_order(order, bound)?;
            let forms = form_class_group(order, bound)?;
            let reps: Vec<_> = companions(order, bound)?.into_iter().map(|c| c.form).collect();
            let value = json!({
                "order": order,
                "h": h,
                "narrow_h": forms.narrow_class_number(),
                "unit_index": int_json(&unit_index(order)?),
                "structure": group_json(&structure),
                "representatives": reps,
            });
            let reps_text: Vec<String> = reps.iter().map(ToString::to_string).collect();
            emit(
                json,
                &value,
                format!(
                    "Cl({order}) = {structure}\nh = {h}\nnarrow h = {}\nreduced form representatives: {}",
                    forms.narrow_class_number(),
                    reps_text.join(" ")
                ),
            );
        }
        Command::Companions(t) => {
            let r = resolve(&t)?;
            let cs = companions(r.order(), bound)?;
            let distinguished = match &r {
                Resolved::Theta(theta, _) => Some(distinguished_index(theta, &cs)?),
                Resolved::Order(_) => None,
            };
            let value = json!({ "order": r.order(), "companions": cs, "distinguished": distinguished });
            let lines: Vec<String> = cs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mark = if Some(i) == distinguished { "  *" } else { "" };
                    format!("{}  form {}  theta = {}{mark}", i + 1, c.form, c.theta)
                })
                .collect();
            emit(json, &value, lines.join("\n"));
        }
        Command::K0(arg) => {
            let theta = parse_theta(&arg.theta)?;
            let k = crossed_product_k0(&theta, bound)?;
            let gens: Vec<String> = k.trace_generators.iter().map(ToString::to_string).collect();
            emit(
                json,
                &k,
                format!(
                    "order: {}\nK0 rank: {}\ntrace image: Z{{{}}}\nGal(K_ab|k) = {}",
                    k.order,
                    k.k0_rank,
                    gens.join(", "),
                    k.galois_group
                ),
            );
        }
        Command::Predict(t) => {
            let r = resolve(&t)?;
            let p = predict_order(r.order(), bound)?;
            emit(
                json,
                &p,
                format!(
                    "order: {}\nh = {}\nrank = {}\nSha = {} (order {})\nK0 rank = {}",
                    p.order, p.h_lambda, p.rank, p.sha_structure, p.sha_order, p.k0_rank
                ),
            );
        }
        Command::Validate(args) => {
            let format = match args.format.as_deref() {
                Some(f) => f.parse::<Format>().expect("clap restricts the format"),
                None => Format::from_path(&args.input),
            };
            let set = parse_curves(&args.input, format)?;
            for w in &set.warnings {
                eprintln!("warning: {w}");
            }
            let report = if args.jobs > 1 {
                validate_parallel(&set.records, args.jobs.into())?
            } else {
                validate(&set.records)
            };
            if json {
                println!("{}", report.to_json());
            } else {
                println!("total: {}\nconsistent: {}\nviolations: {}", report.total, report.consistent, report.violations);
                for (rank, t) in &report.by_rank {
                    println!("rank {rank}: {} of {} consistent", t.consistent, t.total);
                }
                for v in &report.violation_rows {
                    println!(
                        "violation {}: rank {}, sha {}, predicted {}",
                        v.label, v.rank, v.sha_order, v.predicted
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
