mod output;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use staircase_core::cremona::{cremona_reduce, BlowupClass, Termination};
use staircase_core::echindex::{
    ech_index_e, ech_index_x, fredholm_index_e, fredholm_index_x, index_residual,
    stabilized_index, CurveData, StabilizedEndData, StabilizedKind,
};
use staircase_core::exactnum::{decimal, fmt_rational, parse_rational};
use staircase_core::ghostverify::{find_check, registry, run_check};
use staircase_core::lattice::{
    area_from_partition, cap_sequence_with_sets, orbit_grading, orbit_grading_lattice,
    partition_neg, partition_pos, twice_area, OrbitSet,
};
use staircase_core::numberseq::{
    best_approx_below, check_identity_str, convergents, ghost_sequences,
    weight_sequence,
};
use staircase_core::report::Status;
use staircase_core::{PerturbedRational, Rational};

use output::{emit, emit_reports, Format, Table};

#[derive(Parser)]
#[command(name = "staircase", version, about = "Exact arithmetic for the ghost staircase")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Worker threads for sweeps (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ghost sequences h, g, Q, P, l, t, b, mu; or check a named identity.
    ///
    /// Identities: fib1_g, fib1_h, fibt, fibq, fib2, fibh, basic_recursion, recurrel,
    /// recurrel_ell, recurrel_p, pntn, lnbn, fineq, nine_ell.
    Seq(SeqArgs),
    /// Weight sequence W(p/q) with its block structure.
    ///
    /// Exercises: eq:weight, cor:weight.
    Weights { value: String },
    /// Convergents, or best approximations from below, of a perturbed value.
    ///
    /// Exercises: eq:convgt, lem:partcond, ex:partit.
    Approx {
        value: String,
        #[arg(long, default_value_t = 1000)]
        max_den: u64,
        /// List best approximations from below instead of convergents.
        #[arg(long)]
        below: bool,
    },
    /// Capacity sequence N_k(a, b) with the orbit set of each entry.
    ///
    /// Exercises: le:comb, rmk:uniqueness, lem:actconsid.
    Caps {
        a: String,
        b: String,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
    /// Grading of the orbit set {(beta_1, m1), (beta_2, m2)} on E(a, b).
    ///
    /// Exercises: eq:gr, eqn:agrading.
    Grade {
        m1: u64,
        m2: u64,
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long)]
        b: String,
        /// Also count lattice points directly.
        #[arg(long)]
        lattice: bool,
    },
    /// ECH partition p+ or p- of m at angle theta.
    ///
    /// Exercises: eqn:partitionequation, lem:partcond.
    Partition {
        #[arg(value_enum)]
        sign: SignArg,
        theta: String,
        m: u64,
    },
    /// 2A(theta, t) with the Pick's theorem breakdown.
    ///
    /// Exercises: eqn:area, eq:ka, ex:n=1.
    Area { theta: String, t: u64 },
    /// Index formulas for curve data given as JSON (inline or a file path).
    ///
    /// Exercises: eqn:Xind, eqn:Eei, eqn:indEE, eqn:highdimindexformula, eq:Fredkind.
    Index(IndexArgs),
    /// Greedy Cremona reduction of "d;m1,m2,...".
    ///
    /// Exercises: eqn:selfintersection.
    Cremona {
        class: String,
        /// Replace two entries equal to 1 by a 2 before reducing.
        #[arg(long)]
        merge_two_ones: bool,
    },
    /// Run named verification checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SeqArgs {
    /// Largest n to list.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Check this identity instead of listing.
    #[arg(long)]
    identity: Option<String>,
    /// Parameter for --identity.
    #[arg(long, default_value_t = 1)]
    n: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexLevel {
    X,
    E,
    Stab,
}

#[derive(Clone, Copy, ValueEnum)]
enum StabKindArg {
    TopLevel,
    SymplectizationNoNeg,
    NeckComponent,
    CobordismNoGamma,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(value_enum)]
    level: IndexLevel,
    /// Curve data as JSON, or a path to a JSON file.
    #[arg(long)]
    json: String,
    /// Formula for the stabilized level.
    #[arg(long, value_enum, default_value_t = StabKindArg::TopLevel)]
    kind: StabKindArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check ids to run.
    ids: Vec<String>,
    /// Run every registered check.
    #[arg(long)]
    all: bool,
    /// Parameter range "a..b" (or a single n) overriding the defaults.
    #[arg(long)]
    n: Option<String>,
    /// List check ids and exit.
    #[arg(long)]
    list: bool,
    /// Report 0 ms for every check so output is byte-stable.
    #[arg(long)]
    no_timing: bool,
}

/// Exit codes: 0 success, 1 a check or inequality fails, 2 usage error.
enum Outcome {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(j).build_global().is_err() {
            eprintln!("warning: could not configure the worker pool");
        }
    }
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn pr(s: &str) -> anyhow::Result<PerturbedRational> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn rational(s: &str) -> anyhow::Result<Rational> {
    parse_rational(s).map_err(|e| anyhow!("{e}"))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let f = cli.format;
    match &cli.cmd {
        Cmd::Seq(a) => seq(a, f),
        Cmd::Weights { value } => {
            let w = weight_sequence(&rational(value)?)?;
            let mut t = Table::new(["value", "count"]);
            for b in &w.blocks {
                t.push([b.value.to_string(), b.count.to_string()]);
            }
            let j = json!({
                "target": fmt_rational(&w.target),
                "blocks": w.blocks.iter().map(|b| json!({"value": b.value.to_string(), "count": b.count.to_string()})).collect::<Vec<_>>(),
                "continued_fraction": w.run_lengths().to_string(),
                "sum": w.sum().to_string(),
                "sum_squares": w.sum_squares().to_string(),
                "invariants_hold": w.invariants_hold(),
            });
            emit(f, &j, &t)?;
            Ok(Outcome::Ok)
        }
        Cmd::Approx { value, max_den, below } => {
            let x = pr(value)?;
            let md = BigInt::from(*max_den);
            let mut t = Table::new(["p", "q", "value", "decimal"]);
            let mut rows = Vec::new();
            if *below {
                for r in best_approx_below(&x, &md)? {
                    t.push([r.numer().to_string(), r.denom().to_string(), fmt_rational(&r), decimal(&r, 10)]);
                    rows.push(json!({"p": r.numer().to_string(), "q": r.denom().to_string()}));
                }
            } else {
                t = Table::new(["index", "quotient", "p", "q", "parity"]);
                for c in convergents(&x, &md)? {
                    t.push([
                        c.index.to_string(),
                        c.quotient.to_string(),
                        c.p.to_string(),
                        c.q.to_string(),
                        format!("{:?}", c.parity).to_lowercase(),
                    ]);
                    rows.push(serde_json::to_value(&c)?);
                }
            }
            emit(f, &Value::Array(rows), &t)?;
            Ok(Outcome::Ok)
        }
        Cmd::Caps { a, b, k_max } => {
            let seq = cap_sequence_with_sets(&rational(a)?, &pr(b)?, *k_max)?;
            let mut t = Table::new(["k", "value", "decimal", "m1", "m2"]);
            for (k, e) in seq.iter().enumerate() {
                t.push([k.to_string(), e.value.to_string(), decimal(&e.value.base, 6), e.ell.to_string(), e.m.to_string()]);
            }
            emit(f, &serde_json::to_value(&seq)?, &t)?;
            Ok(Outcome::Ok)
        }
        Cmd::Grade { m1, m2, a, b, lattice } => {
            let set = OrbitSet::new(*m1, *m2, rational(a)?, pr(b)?);
            let gr = orbit_grading(&set);
            let mut j = json!({"m1": m1, "m2": m2, "grading": gr.to_string(), "action": set.action().to_string()});
            let mut t = Table::new(["m1", "m2", "action", "grading"]);
            t.push([m1.to_string(), m2.to_string(), set.action().to_string(), gr.to_string()]);
            let mut outcome = Outcome::Ok;
            if *lattice {
                let slow = orbit_grading_lattice(&set);
                j["lattice"] = json!(slow.to_string());
                t.push(["lattice".into(), String::new(), String::new(), slow.to_string()]);
                if slow != gr {
                    outcome = Outcome::Violation;
                }
            }
            emit(f, &j, &t)?;
            Ok(outcome)
        }
        Cmd::Partition { sign, theta, m } => {
            let th = pr(theta)?;
            let p = match sign {
                SignArg::Pos => partition_pos(&th, *m)?,
                SignArg::Neg => partition_neg(&th, *m)?,
            };
            let mut t = Table::new(["dx", "dy"]);
            for (dx, dy) in &p.path.edges {
                t.push([dx.to_string(), dy.to_string()]);
            }
            let j = json!({
                "theta": th.to_string(),
                "parts": p.parts,
                "path": p.path.edges.iter().map(|(dx, dy)| json!([dx, dy.to_string()])).collect::<Vec<_>>(),
            });
            emit(f, &j, &t)?;
            Ok(Outcome::Ok)
        }
        Cmd::Area { theta, t } => {
            let th = pr(theta)?;
            let v = twice_area(&th, *t)?;
            let parts = staircase_core::lattice::partition_pos_recursive(&th, *t)?;
            let pa = area_from_partition(&th, &parts)?;
            let j = json!({
                "theta": th.to_string(),
                "t": t,
                "two_area": v.to_string(),
                "decimal": decimal(&v.base, 10),
                "parts": parts,
                "lattice_count": pa.lattice_count.to_string(),
                "pick_holds": pa.pick_holds(),
            });
            let mut tab = Table::new(["t", "2A", "decimal", "parts"]);
            tab.push([t.to_string(), v.to_string(), decimal(&v.base, 10), format!("{parts:?}")]);
            emit(f, &j, &tab)?;
            Ok(Outcome::Ok)
        }
        Cmd::Index(a) => index(a, f),
        Cmd::Cremona { class, merge_two_ones } => {
            let mut v: BlowupClass = class.parse().map_err(|e| anyhow!("{e}"))?;
            if *merge_two_ones {
                v = v.merge_two_ones()?;
            }
            let log = cremona_reduce(&v)?;
            let mut t = Table::new(["step", "before", "after", "c1", "self_intersection"]);
            for (i, s) in log.steps.iter().enumerate() {
                t.push([(i + 1).to_string(), s.before.clone(), s.after.clone(), s.c1.to_string(), s.self_intersection.to_string()]);
            }
            t.push(["result".into(), String::new(), log.reduced.to_string(), log.reduced.c1().to_string(), log.reduced.self_intersection().to_string()]);
            let mut j = serde_json::to_value(&log)?;
            j["reduced"] = json!(log.reduced.to_string());
            emit(f, &j, &t)?;
            Ok(if log.invariants_hold && log.termination != Termination::NegativeMultiplicity {
                Outcome::Ok
            } else {
                Outcome::Violation
            })
        }
        Cmd::Verify(a) => verify(a, f),
    }
}

fn seq(a: &SeqArgs, f: Format) -> anyhow::Result<Outcome> {
    if let Some(id) = &a.identity {
        let c = check_identity_str(id, a.n)?;
        let mut t = Table::new(["id", "n", "holds", "lhs", "rhs"]);
        t.push([c.id.clone(), c.n.to_string(), c.holds.to_string(), c.lhs.join(" "), c.rhs.join(" ")]);
        emit(f, &serde_json::to_value(&c)?, &t)?;
        return Ok(if c.holds { Outcome::Ok } else { Outcome::Violation });
    }
    let rows = ghost_sequences(a.n_max).rows();
    let mut t = Table::new(["n", "h", "g", "Q", "P", "l", "t", "b", "mu"]);
    for r in &rows {
        t.push([
            r.n.to_string(),
            r.h.to_string(),
            r.g.to_string(),
            r.q.to_string(),
            r.p.to_string(),
            r.ell.to_string(),
            r.t.to_string(),
            fmt_rational(&r.b),
            fmt_rational(&r.mu),
        ]);
    }
    emit(f, &serde_json::to_value(&rows)?, &t)?;
    Ok(Outcome::Ok)
}

fn read_json(arg: &str) -> anyhow::Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn index(a: &IndexArgs, f: Format) -> anyhow::Result<Outcome> {
    let text = read_json(&a.json)?;
    let mut t = Table::new(["quantity", "value"]);
    let j = match a.level {
        IndexLevel::X => {
            let c: CurveData = serde_json::from_str(&text).context("parsing curve data")?;
            let ind = fredholm_index_x(&c)?;
            let set = c.negative.orbit_set(&c.x);
            let i = ech_index_x(c.degree, &set);
            t.push(["fredholm_index".into(), ind.to_string()]);
            t.push(["ech_index".into(), i.to_string()]);
            json!({"fredholm_index": ind.to_string(), "ech_index": i.to_string()})
        }
        IndexLevel::E => {
            let c: CurveData = serde_json::from_str(&text).context("parsing curve data")?;
            let set = c.positive.orbit_set(&c.x);
            let i = ech_index_e(&c, &set)?;
            let ind = fredholm_index_e(&c)?;
            let res = index_residual(&c, &set)?;
            t.push(["fredholm_index".into(), ind.to_string()]);
            t.push(["ech_index".into(), i.to_string()]);
            t.push(["residual".into(), fmt_rational(&res.residual)]);
            json!({"fredholm_index": ind.to_string(), "ech_index": i.to_string(),
                "residual": serde_json::to_value(&res)?})
        }
        IndexLevel::Stab => {
            let e: StabilizedEndData = serde_json::from_str(&text).context("parsing end data")?;
            let kind = match a.kind {
                StabKindArg::TopLevel => StabilizedKind::TopLevel,
                StabKindArg::SymplectizationNoNeg => StabilizedKind::SymplectizationNoNeg,
                StabKindArg::NeckComponent => StabilizedKind::NeckComponent,
                StabKindArg::CobordismNoGamma => StabilizedKind::CobordismNoGamma,
            };
            let r = stabilized_index(&e, kind)?;
            t.push(["index".into(), r.index.to_string()]);
            t.push(["below_threshold".into(), r.below_threshold.to_string()]);
            serde_json::to_value(&r)?
        }
    };
    emit(f, &j, &t)?;
    Ok(Outcome::Ok)
}

fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse()?, b.trim().trim_start_matches('=').parse()?),
        None => {
            let v = s.trim().parse()?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty range {s}");
    }
    Ok((lo, hi))
}

fn verify(a: &VerifyArgs, f: Format) -> anyhow::Result<Outcome> {
    if a.list {
        let mut t = Table::new(["check", "default", "summary"]);
        for c in registry() {
            let r = c.range.map(|(lo, hi)| format!("n={lo}..{hi}")).unwrap_or("-".into());
            t.push([c.id.clone(), r, c.summary.to_string()]);
        }
        emit(f, &Value::Array(registry().iter().map(|c| json!(c.id)).collect()), &t)?;
        return Ok(Outcome::Ok);
    }
    let range = a.n.as_deref().map(parse_range).transpose()?;
    let checks = if a.all {
        if !a.ids.is_empty() {
            bail!("--all takes no check ids");
        }
        registry()
    } else {
        if a.ids.is_empty() {
            bail!("give check ids or --all (see --list)");
        }
        a.ids
            .iter()
            .map(|id| find_check(id).ok_or_else(|| anyhow!("unknown check {id:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?
    };
    let mut reports: Vec<_> = checks.iter().map(|c| run_check(c, range)).collect();
    reports.sort_by(|x, y| x.check.cmp(&y.check).then(x.params.cmp(&y.params)));
    if a.no_timing {
        for r in &mut reports {
            r.millis = 0;
        }
    }
    emit_reports(f, &reports)?;
    Ok(if reports.iter().any(|r| r.status == Status::Fail) {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}
