//! `localp2` command-line front end.
//!
//! Every command emits one or more named tables. JSON output is
//! `{"schema": 1, "command": ..., "tables": {name: {"columns": [...], "rows": [[...]]}}}`;
//! CSV output writes each table as a `# table: name` line, a header and rows,
//! with tables separated by a blank line. Floats are written identically in
//! both formats (shortest round-trip form); exact rationals are strings `p/q`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use localp2::chamber::{
    central_charge, exceptional_class, gamma_path_point_with, in_stab_g, support_constant, wall_test, ChamberVerdict,
    ChargeParams, GeometricChamber, DEFAULT_GRID,
};
use localp2::exceptional::{enumerate_exceptional, DpBoundary, ExceptionalSlope};
use localp2::ktheory::{braid_act, braid_orbit, BraidWord, ChernClass, CollectionTriple};
use localp2::mirror::verify::{
    chart_glue, conifold_b_ode, conifold_b_series, conifold_loop, large_volume_loop, series_constants,
    verify_appendix_c,
};
use localp2::mirror::{build_series, Mirror, MirrorPoint, OdeOptions};
use localp2::Error;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "localp2",
    version,
    about = "Exceptional slopes, the geometric chamber of local P² and its mirror map"
)]
#[command(
    after_help = "Complex numbers are written re,im (e.g. --a 0,1 for i). Rationals are written num/den.\n\
Exit status: 0 success, 1 negative verdict or failed check, 2 usage error, 3 runtime failure."
)]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Debug)]
struct RunConfig {
    /// Dyadic depth of exceptional-slope enumeration.
    #[arg(long, global = true, default_value_t = 12)]
    depth: u32,
    /// Series truncation order N (at least 2).
    #[arg(long, global = true, default_value_t = 500)]
    order: usize,
    /// Numerical tolerance (positive).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Number of random samples for sweeps.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Seed of the sampling RNG.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Samples δ^DP on [mu-lo, mu-hi] and lists the exceptional slopes in the window.
    DpCurve {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        mu_lo: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        mu_hi: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Lists exceptional slopes in [lo, hi] with rank, discriminant and ε-preimage.
    ExcList {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        lo: BigRational,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        hi: BigRational,
    },
    /// Geometric-chamber membership of (a, b); exit 0 member, 1 non-member.
    ChamberTest {
        #[command(flatten)]
        ab: AbArgs,
    },
    /// Membership in Stab_G together with S_min and the support constant; exit 0 member, 1 non-member.
    StabgTest {
        #[command(flatten)]
        ab: AbArgs,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Samples the boundary path γ_{a,b}(t) and the normalised charges Z(E)/r_E.
    GammaPath {
        #[command(flatten)]
        ab: AbArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
        t_lo: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        t_hi: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Wall test along the segment from b-from to b-to at fixed a.
    WallScan {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        b_from: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        b_to: Complex64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Applies a braid word (letters t0 t1 t2, inverses t0', and r) to the standard collection.
    Mutate {
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        word: String,
    },
    /// Semicircle (C, ρ) of a mutated collection, or of every collection reachable in max-length steps.
    Semicircle {
        #[arg(long, default_value = "")]
        word: String,
        /// Enumerate the orbit up to this word length instead of a single word.
        #[arg(long)]
        max_length: Option<usize>,
        /// Point (t, m) to test for membership in the semicircle.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        point: Option<Complex64>,
    },
    /// Evaluates the mirror map at a point of the z- or ψ-chart.
    MirrorEval {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, conflicts_with = "psi", required_unless_present = "psi")]
        z: Option<Complex64>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        psi: Option<Complex64>,
        /// Branch of log z.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        sheet: i32,
    },
    /// Random sweep of the chamber inequalities plus the series constants and b(−1/27); exit 0 iff all pass.
    MirrorVerify,
    /// The two series constants at the configured order.
    Constants,
    /// ODE transport around z = −1/27 and z = 0 and across the chart overlap; exit 0 iff all pass.
    MonodromyCheck {
        #[arg(long, default_value_t = 64)]
        segments: usize,
    },
}

#[derive(Args, Clone, Copy, Debug)]
struct AbArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    a: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    b: Complex64,
}

impl AbArgs {
    fn params(&self) -> ChargeParams {
        ChargeParams::new(self.a, self.b)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part {re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("imaginary part {im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    BigRational::from_str(s.trim()).map_err(|e| format!("expected num/den, got {s:?}: {e}"))
}

#[derive(Clone, Debug)]
enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
    Null,
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x + 0.0),
            Cell::F(_) | Cell::Null => Value::Null,
            Cell::I(n) => json!(n),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
        }
    }

    fn csv(&self) -> String {
        match self.json() {
            Value::Null => String::new(),
            Value::String(s) => s,
            v => v.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}
impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

struct Table {
    name: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

struct Report {
    command: &'static str,
    tables: Vec<Table>,
    status: u8,
}

impl Report {
    fn new(command: &'static str, tables: Vec<Table>) -> Self {
        Report {
            command,
            tables,
            status: 0,
        }
    }

    fn with_status(mut self, ok: bool) -> Self {
        self.status = if ok { 0 } else { 1 };
        self
    }

    fn render(&self, format: Format) -> anyhow::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut tables = serde_json::Map::new();
                for t in &self.tables {
                    let rows: Vec<Value> = t
                        .rows
                        .iter()
                        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                        .collect();
                    tables.insert(t.name.to_string(), json!({ "columns": t.columns, "rows": rows }));
                }
                let doc = json!({ "schema": SCHEMA, "command": self.command, "tables": tables });
                let mut out = serde_json::to_vec_pretty(&doc)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = Vec::new();
                for (k, t) in self.tables.iter().enumerate() {
                    if k > 0 {
                        out.push(b'\n');
                    }
                    writeln!(out, "# table: {}", t.name)?;
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&t.columns)?;
                    for r in &t.rows {
                        w.write_record(r.iter().map(Cell::csv))?;
                    }
                    w.flush()?;
                }
                Ok(out)
            }
        }
    }
}

fn rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn class_str(x: ChernClass) -> String {
    let c = x.c();
    if *c.denom() == 1 {
        format!("{},{},{}", x.r, x.d, c.numer())
    } else {
        format!("{},{},{}/{}", x.r, x.d, c.numer(), c.denom())
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Error::InvalidArgument(msg.into()))
}

fn check_range(lo: f64, hi: f64, points: usize, what: &str) -> anyhow::Result<()> {
    if !(lo < hi) {
        return Err(usage(format!("{what}: lower end must be below upper end")));
    }
    if points < 2 {
        return Err(usage("points must be at least 2"));
    }
    Ok(())
}

fn slope_columns() -> [&'static str; 6] {
    ["slope", "slope_f64", "rank", "disc", "disc_f64", "index"]
}

fn slope_row(e: &ExceptionalSlope) -> Vec<Cell> {
    vec![
        rat(&e.alpha).into(),
        e.alpha_f64().into(),
        e.rank.to_string().into(),
        rat(&e.disc).into(),
        e.disc_f64().into(),
        format!("{}/2^{}", e.index.p, e.index.q).into(),
    ]
}

fn exceptional_between(lo: f64, hi: f64, depth: u32) -> anyhow::Result<Vec<ExceptionalSlope>> {
    let lo = BigRational::from_float(lo).ok_or_else(|| usage("non-finite bound"))?;
    let hi = BigRational::from_float(hi).ok_or_else(|| usage("non-finite bound"))?;
    Ok(enumerate_exceptional(&lo, &hi, depth)?)
}

fn dp_curve(cfg: &RunConfig, lo: f64, hi: f64, points: usize) -> anyhow::Result<Report> {
    check_range(lo, hi, points, "mu")?;
    let dp = DpBoundary::new(cfg.depth);
    let values: Vec<_> = grid(lo, hi, points)
        .into_par_iter()
        .map(|mu| (mu, dp.eval(mu)))
        .collect();
    let mut curve = Table::new("curve", &["mu", "delta", "witness_slope_num", "witness_slope_den"]);
    for (mu, v) in values {
        curve.push(vec![
            mu.into(),
            v.value.into(),
            v.witness.alpha.numer().to_string().into(),
            v.witness.alpha.denom().to_string().into(),
        ]);
    }
    let mut exc = Table::new("exceptional", &slope_columns());
    for e in exceptional_between(lo, hi, cfg.depth)? {
        exc.push(slope_row(&e));
    }
    Ok(Report::new("dp-curve", vec![curve, exc]))
}

fn exc_list(cfg: &RunConfig, lo: &BigRational, hi: &BigRational) -> anyhow::Result<Report> {
    let mut t = Table::new("exceptional", &slope_columns());
    for e in enumerate_exceptional(lo, hi, cfg.depth)? {
        t.push(slope_row(&e));
    }
    Ok(Report::new("exc-list", vec![t]))
}

fn verdict_columns() -> [&'static str; 8] {
    [
        "member",
        "failed_rule",
        "witness_slope",
        "witness_rank",
        "margin",
        "undecided",
        "nearest_exceptional_margin",
        "big_b",
    ]
}

fn verdict_row(v: &ChamberVerdict, p: &ChargeParams) -> Vec<Cell> {
    let rule = serde_json::to_value(v.failed_rule)
        .ok()
        .and_then(|r| r.as_str().map(str::to_string));
    vec![
        v.member.into(),
        rule.into(),
        v.witness.as_ref().map(|w| rat(&w.alpha)).into(),
        v.witness.as_ref().map(|w| w.rank.to_string()).into(),
        v.margin.into(),
        v.undecided.into(),
        v.nearest_exceptional_margin.into(),
        p.big_b().into(),
    ]
}

fn chamber_test(cfg: &RunConfig, ab: &AbArgs) -> anyhow::Result<Report> {
    let p = ab.params();
    let v = GeometricChamber::new(cfg.depth, cfg.tol).verdict(&p);
    let mut t = Table::new("verdict", &verdict_columns());
    t.push(verdict_row(&v, &p));
    Ok(Report::new("chamber-test", vec![t]).with_status(v.member))
}

fn stabg_test(cfg: &RunConfig, ab: &AbArgs, grid_n: usize) -> anyhow::Result<Report> {
    let p = ab.params();
    let member = in_stab_g(&p);
    let chamber = GeometricChamber::new(cfg.depth, cfg.tol).verdict(&p);
    let mut t = Table::new(
        "stab-g",
        &[
            "member",
            "geometric_chamber",
            "s_min",
            "gamma_min",
            "t_star",
            "e_min",
            "norm_n",
            "support_constant",
            "deformation_radius",
        ],
    );
    let mut row: Vec<Cell> = vec![member.into(), chamber.member.into()];
    if chamber.member {
        let sc = support_constant(&p, cfg.depth, grid_n)?;
        row.extend([
            sc.s_min.value.into(),
            sc.s_min.gamma_min.into(),
            sc.s_min.t_star.into(),
            sc.s_min.e_min.into(),
            sc.norm.into(),
            sc.constant.into(),
            sc.deformation_radius.into(),
        ]);
    } else {
        row.extend(std::iter::repeat_with(|| Cell::Null).take(7));
    }
    t.push(row);
    Ok(Report::new("stabg-test", vec![t]).with_status(member))
}

fn gamma_path(cfg: &RunConfig, ab: &AbArgs, lo: f64, hi: f64, points: usize) -> anyhow::Result<Report> {
    check_range(lo, hi, points, "t")?;
    let p = ab.params();
    let dp = DpBoundary::new(cfg.depth);
    let pts: Vec<_> = grid(lo, hi, points)
        .into_par_iter()
        .map(|t| (t, gamma_path_point_with(&p, t, &dp)))
        .collect();
    let mut path = Table::new("path", &["t", "re", "im"]);
    for (t, g) in pts {
        path.push(vec![t.into(), g.re.into(), g.im.into()]);
    }
    let mut charges = Table::new("charges", &["slope", "rank", "re", "im"]);
    for e in exceptional_between(lo, hi, cfg.depth)? {
        let Ok(class) = exceptional_class(&e) else { continue };
        let z = central_charge(&p, class) / class.r as f64;
        charges.push(vec![
            rat(&e.alpha).into(),
            e.rank.to_string().into(),
            z.re.into(),
            z.im.into(),
        ]);
    }
    Ok(Report::new("gamma-path", vec![path, charges]))
}

fn wall_scan(cfg: &RunConfig, a: Complex64, from: Complex64, to: Complex64, points: usize) -> anyhow::Result<Report> {
    if points < 2 {
        return Err(usage("points must be at least 2"));
    }
    let rows: Vec<anyhow::Result<Vec<Cell>>> = grid(0.0, 1.0, points)
        .into_par_iter()
        .map(|s| {
            let b = from + (to - from) * s;
            let p = ChargeParams::new(a, b);
            let w = wall_test(&p, cfg.depth, cfg.tol)?;
            let side = w
                .side
                .and_then(|x| serde_json::to_value(x).ok())
                .and_then(|v| v.as_str().map(str::to_string));
            Ok(vec![
                b.re.into(),
                b.im.into(),
                p.big_b().into(),
                w.on_wall.into(),
                w.slope.as_ref().map(|e| rat(&e.alpha)).into(),
                side.into(),
                w.jh_sub.map(class_str).into(),
                w.jh_quot.map(class_str).into(),
                w.value.into(),
                w.lower.into(),
                w.upper.into(),
            ])
        })
        .collect();
    let mut t = Table::new(
        "walls",
        &[
            "re_b", "im_b", "big_b", "on_wall", "slope", "side", "jh_sub", "jh_quot", "value", "lower", "upper",
        ],
    );
    for r in rows {
        t.push(r?);
    }
    Ok(Report::new("wall-scan", vec![t]))
}

fn parse_word(word: &str) -> anyhow::Result<BraidWord> {
    BraidWord::from_str(word).map_err(anyhow::Error::new)
}

fn semicircle_row(word: &BraidWord, coll: &CollectionTriple, point: Option<Complex64>) -> Vec<Cell> {
    match localp2::chamber::semicircle(coll) {
        Ok(sc) => {
            vec![
                word.to_string().into(),
                rat(&sc.center).into(),
                rat(&sc.rho).into(),
                sc.center_f64().into(),
                sc.radius().into(),
                point.map(|z| sc.contains(z.re, z.im)).into(),
            ]
        }
        Err(_) => vec![
            word.to_string().into(),
            Cell::Null,
            Cell::Null,
            Cell::Null,
            Cell::Null,
            Cell::Null,
        ],
    }
}

const SEMICIRCLE_COLUMNS: [&str; 6] = ["word", "center", "rho", "center_f64", "radius", "contains"];

fn mutate(word: &str) -> anyhow::Result<Report> {
    let w = parse_word(word)?;
    let coll = braid_act(&w, &CollectionTriple::standard());
    let mut classes = Table::new("classes", &["index", "r", "d", "c"]);
    for (k, x) in coll.classes.iter().enumerate() {
        classes.push(vec![(k as i64).into(), x.r.into(), x.d.into(), rat_small(x.c()).into()]);
    }
    let mut bundles = Table::new("bundles", &["index", "r", "d", "c", "slope", "disc"]);
    if let Some(e) = coll.bundle_data {
        for (k, x) in e.iter().enumerate() {
            bundles.push(vec![
                (k as i64).into(),
                x.r.into(),
                x.d.into(),
                rat_small(x.c()).into(),
                x.slope().map(rat_small).into(),
                x.discriminant().map(rat_small).into(),
            ]);
        }
    }
    let mut semi = Table::new("semicircle", &SEMICIRCLE_COLUMNS);
    if coll.bundle_data.is_some() {
        semi.push(semicircle_row(&w, &coll, None));
    }
    Ok(Report::new("mutate", vec![classes, bundles, semi]))
}

fn rat_small(x: num_rational::Rational64) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn semicircle_cmd(word: &str, max_length: Option<usize>, point: Option<Complex64>) -> anyhow::Result<Report> {
    let mut t = Table::new("semicircle", &SEMICIRCLE_COLUMNS);
    let start = CollectionTriple::standard();
    match max_length {
        Some(len) => {
            for (w, coll) in braid_orbit(&start, len) {
                if coll.bundle_data.is_some() {
                    t.push(semicircle_row(&w, &coll, point));
                }
            }
        }
        None => {
            let w = parse_word(word)?;
            let coll = braid_act(&w, &start);
            if coll.bundle_data.is_none() {
                return Err(usage("the mutated triple carries no bundle data"));
            }
            t.push(semicircle_row(&w, &coll, point));
        }
    }
    Ok(Report::new("semicircle", vec![t]))
}

fn mirror_eval(cfg: &RunConfig, z: Option<Complex64>, psi: Option<Complex64>, sheet: i32) -> anyhow::Result<Report> {
    let m = Mirror::new(cfg.order)?;
    let pt = match (z, psi) {
        (Some(z), None) => MirrorPoint::z(z).with_sheet(sheet),
        (None, Some(psi)) => MirrorPoint::psi(psi),
        _ => return Err(usage("give exactly one of --z and --psi")),
    };
    let p = m.mirror_ab(&pt)?;
    let v = GeometricChamber::new(cfg.depth, cfg.tol).verdict(&p);
    let mut t = Table::new("mirror", &["re_a", "im_a", "re_b", "im_b"]);
    t.push(vec![p.a.re.into(), p.a.im.into(), p.b.re.into(), p.b.im.into()]);
    let mut vt = Table::new("verdict", &verdict_columns());
    vt.push(verdict_row(&v, &p));
    Ok(Report::new("mirror-eval", vec![t, vt]))
}

struct Checks(Table);

impl Checks {
    fn new() -> Self {
        Checks(Table::new("checks", &["check", "value", "bound", "margin", "pass"]))
    }

    /// Records `value < bound`.
    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.0.push(vec![
            name.into(),
            value.into(),
            bound.into(),
            (bound - value).into(),
            (value < bound).into(),
        ]);
    }

    /// Records `value ≥ bound`.
    fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.0.push(vec![
            name.into(),
            value.into(),
            bound.into(),
            (value - bound).into(),
            (value >= bound).into(),
        ]);
    }

    fn all_pass(&self) -> bool {
        self.0.rows.iter().all(|r| matches!(r[4], Cell::B(true)))
    }
}

fn mirror_verify(cfg: &RunConfig) -> anyhow::Result<Report> {
    let m = Mirror::new(cfg.order)?;
    let rep = verify_appendix_c(cfg.samples, cfg.seed, cfg.depth, &m)?;
    let c = series_constants(&build_series(2000)?);
    let b_series = conifold_b_series(&build_series(4000)?).norm();
    let b_ode = conifold_b_ode(&m, &OdeOptions::default())?.norm();
    let mut checks = Checks::new();
    let bound = 1.0 / (PI * 3f64.sqrt());
    checks.below("sum_c_deviation_from_0.129", (c.sum_c - 0.129).abs(), 1e-3);
    checks.below("sum_c_vs_1/(pi*sqrt3)", c.sum_c, bound);
    checks.below("sum_abs_l_deviation_from_1.558", (c.sum_abs_l - 1.558).abs(), 1e-3);
    checks.below("sum_abs_l_vs_3", c.sum_abs_l, 3.0);
    checks.below("b_conifold_series", b_series, 1e-3);
    checks.below("b_conifold_ode", b_ode, 1e-6);
    checks.at_least("sweep_im_a", rep.im_a_pass as f64, rep.samples as f64);
    checks.at_least("sweep_b_range", rep.b_range_pass as f64, rep.samples as f64);
    checks.at_least(
        "sweep_step3_upper",
        rep.step3_pass_upper as f64,
        rep.step3_total_upper as f64,
    );
    checks.at_least(
        "sweep_step3_lower",
        rep.step3_pass_lower as f64,
        rep.step3_total_lower as f64,
    );
    checks.at_least("sweep_chamber", rep.chamber_pass as f64, rep.samples as f64);
    let mut margins = Table::new(
        "sweep",
        &[
            "samples",
            "seed",
            "depth",
            "worst_im_a",
            "worst_step3_upper",
            "worst_step3_lower",
            "worst_chamber_margin",
        ],
    );
    margins.push(vec![
        (rep.samples as i64).into(),
        (rep.seed as i64).into(),
        (rep.depth as i64).into(),
        rep.worst_im_a.into(),
        rep.worst_step3_upper.into(),
        rep.worst_step3_lower.into(),
        rep.worst_chamber_margin.into(),
    ]);
    let mut fails = Table::new(
        "failures",
        &["chart", "re", "im", "im_a", "b_range", "step3", "chamber"],
    );
    for f in &rep.failures {
        let chart = serde_json::to_value(f.chart)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string));
        fails.push(vec![
            chart.into(),
            f.coord.re.into(),
            f.coord.im.into(),
            f.im_a.into(),
            f.b_range.into(),
            f.step3.into(),
            f.chamber.into(),
        ]);
    }
    let ok = checks.all_pass();
    Ok(Report::new("mirror-verify", vec![checks.0, margins, fails]).with_status(ok))
}

fn constants(cfg: &RunConfig) -> anyhow::Result<Report> {
    let tbl = build_series(cfg.order)?;
    let c = series_constants(&tbl);
    let mut t = Table::new(
        "constants",
        &[
            "order",
            "sum_c",
            "sum_c_bound",
            "sum_abs_l",
            "sum_abs_l_implied",
            "b_conifold_series",
        ],
    );
    t.push(vec![
        (c.order as i64).into(),
        c.sum_c.into(),
        (1.0 / (PI * 3f64.sqrt())).into(),
        c.sum_abs_l.into(),
        c.sum_abs_l_implied.into(),
        conifold_b_series(&tbl).norm().into(),
    ]);
    Ok(Report::new("constants", vec![t]))
}

fn monodromy_check(cfg: &RunConfig, segments: usize) -> anyhow::Result<Report> {
    if segments < 3 {
        return Err(usage("segments must be at least 3"));
    }
    let m = Mirror::new(cfg.order)?;
    let opts = OdeOptions::default();
    let con = conifold_loop(&m, segments, &opts)?;
    let lv = large_volume_loop(&m, segments, &opts)?;
    let glue = chart_glue(
        &m,
        Complex64::new(0.0, 0.5 / 27.0),
        Complex64::new(0.0, 2.0 / 27.0),
        &opts,
    )?;
    let mut checks = Checks::new();
    checks.below("conifold_loop", con.error, 1e-6);
    checks.below("large_volume_loop", lv.error, 1e-8);
    checks.below("chart_glue", glue.error, 1e-6);
    let ok = checks.all_pass();
    Ok(Report::new("monodromy-check", vec![checks.0]).with_status(ok))
}

fn validate(cfg: &RunConfig) -> anyhow::Result<()> {
    if cfg.order < 2 {
        return Err(usage("order must be at least 2"));
    }
    if !(cfg.tol > 0.0) {
        return Err(usage("tol must be positive"));
    }
    if cfg.samples < 1 {
        return Err(usage("samples must be at least 1"));
    }
    if cfg.threads == Some(0) {
        return Err(usage("threads must be at least 1"));
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let cfg = &cli.cfg;
    validate(cfg)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool")?;
    }
    match &cli.cmd {
        Command::DpCurve { mu_lo, mu_hi, points } => dp_curve(cfg, *mu_lo, *mu_hi, *points),
        Command::ExcList { lo, hi } => exc_list(cfg, lo, hi),
        Command::ChamberTest { ab } => chamber_test(cfg, ab),
        Command::StabgTest { ab, grid } => stabg_test(cfg, ab, *grid),
        Command::GammaPath { ab, t_lo, t_hi, points } => gamma_path(cfg, ab, *t_lo, *t_hi, *points),
        Command::WallScan {
            a,
            b_from,
            b_to,
            points,
        } => wall_scan(cfg, *a, *b_from, *b_to, *points),
        Command::Mutate { word } => mutate(word),
        Command::Semicircle {
            word,
            max_length,
            point,
        } => semicircle_cmd(word, *max_length, *point),
        Command::MirrorEval { z, psi, sheet } => mirror_eval(cfg, *z, *psi, *sheet),
        Command::MirrorVerify => mirror_verify(cfg),
        Command::Constants => constants(cfg),
        Command::MonodromyCheck { segments } => monodromy_check(cfg, *segments),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_) | Error::Parse(_) | Error::Domain(_)) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = report.render(cli.cfg.format).and_then(|bytes| match &cli.cfg.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(&bytes).map_err(|e| anyhow!(e)),
    });
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(3);
    }
    ExitCode::from(report.status)
}
