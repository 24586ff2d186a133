//! One function per subcommand, each returning a finished [`Doc`].

use alphacf::cf::{convergents, digits_from_str, expand, Expansion};
use alphacf::domain::{build_domain, fundamental_interval, Rect, RectUnion};
use alphacf::ergodic::{
    entropy_estimate, invariance_check, orbit, random_start, theta_distribution, OrbitStream, SimConfig,
};
use alphacf::exact::{render_f64, render_surd, render_tower, QuadSurd, MAX_PRECISION_BITS};
use alphacf::legendre::{empirical_legendre, legendre_bounds, legendre_piece, LegendreBounds};
use alphacf::rewrite::{rewrite_to_alpha, ConvergentChange, RewriteKind};
use alphacf::{parse_surd, Error, Result};
use clap::Args;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{Doc, Manifest};
use crate::{Command, Global};

#[derive(Args, Debug, Serialize)]
pub struct ExpandArgs {
    /// The number to expand, e.g. `quad:(-3,1,4,17)` or `0.3`.
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// Digit budget before giving up on termination or periodicity.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Convergents to list for a non-terminating expansion.
    #[arg(long, default_value_t = 20)]
    pub convergents: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RewriteArgs {
    /// Text form `[0; 3, -2]`, an expansion JSON, or the output of `expand`.
    #[arg(long)]
    pub expansion: String,
    /// The target alpha.
    #[arg(long)]
    pub alpha: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DomainArgs {
    #[arg(long)]
    pub alpha: String,
    /// Members kept from each infinite family.
    #[arg(long = "K", default_value_t = 8)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    pub alpha: String,
    /// Start point; a seeded uniform draw when absent.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub burn_in: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SimArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ThetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    /// CDF evaluated at `i / grid` for `i = 1..=grid`.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct LegendreArgs {
    #[arg(long)]
    pub alpha: String,
    /// Largest denominator scanned.
    #[arg(long = "Q", default_value_t = 300)]
    pub q: u64,
    /// Number of random quadratic x.
    #[arg(long, default_value_t = 100)]
    pub nx: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct MeasureArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub t_lo: String,
    #[arg(long)]
    pub t_hi: String,
    #[arg(long)]
    pub v_lo: String,
    #[arg(long)]
    pub v_hi: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: u64,
    /// Truncation depth of the domain the rectangle must lie in.
    #[arg(long = "K", default_value_t = 32)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FundamentalArgs {
    /// Digits such as `3, -2`.
    #[arg(long)]
    pub prefix: String,
}

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

/// Rounds every non-integer number in `v` to `digits` decimal places.
fn round_floats(v: &mut Value, digits: u32) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(f) = n.as_f64() {
                let r: f64 = render_f64(f, digits).parse().unwrap_or(f);
                *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(m) => m.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

fn sim_config(global: &Global, alpha: QuadSurd, n: u64, burn_in: u64) -> Result<SimConfig> {
    let cfg = SimConfig::new(alpha).with_iters(n, burn_in).with_seed(global.seed).with_precision(global.precision_bits);
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(global: &Global, cmd: &Command, manifest: Manifest) -> Result<Doc> {
    if global.precision_bits > MAX_PRECISION_BITS {
        return Err(Error::PrecisionExhausted { bits: global.precision_bits });
    }
    if global.precision_bits < 16 {
        return Err(Error::Domain("--precision-bits must be at least 16".into()));
    }
    let mut doc = match cmd {
        Command::Expand(a) => cmd_expand(global, a, manifest),
        Command::Rewrite(a) => cmd_rewrite(a, manifest),
        Command::Domain(a) => cmd_domain(global, a, manifest),
        Command::Orbit(a) => cmd_orbit(global, a, manifest),
        Command::Entropy(a) => cmd_entropy(global, a, manifest),
        Command::ThetaDist(a) => cmd_theta(global, a, manifest),
        Command::Legendre(a) => cmd_legendre(global, a, manifest),
        Command::MeasureCheck(a) => cmd_measure(global, a, manifest),
        Command::FundamentalInterval(a) => cmd_fundamental(global, a, manifest),
    }?;
    round_floats(&mut doc.json, global.digits);
    Ok(doc)
}

fn cmd_expand(global: &Global, a: &ExpandArgs, m: Manifest) -> Result<Doc> {
    let x = parse_surd(&a.x)?;
    let alpha = parse_surd(&a.alpha)?;
    let e = expand(&x, &alpha, a.n)?;
    let k = e.available().map_or(a.convergents, |n| n.min(a.convergents.max(n)));
    let cs = convergents(&e, k)?;
    let digits: Vec<String> =
        std::iter::once(e.int_part.to_string()).chain(e.take(k).iter().map(|d| d.to_string())).collect();
    let rows = cs
        .iter()
        .skip(1)
        .zip(&digits)
        .enumerate()
        .map(|(i, (c, d))| vec![i.to_string(), d.clone(), c.p.to_string(), c.q.to_string()])
        .collect();
    let json = json!({
        "x": x,
        "x_decimal": render_surd(&x, global.digits),
        "alpha": alpha,
        "expansion": e,
        "text": e.to_string(),
        "convergents": cs.iter().skip(1).map(|c| json!({"p": big(&c.p), "q": big(&c.q)})).collect::<Vec<_>>(),
    });
    Ok(Doc::new(m, json).table(vec!["n", "digit", "p", "q"], rows))
}

fn read_expansion(s: &str) -> Result<Expansion> {
    let t = s.trim();
    if !t.starts_with('{') {
        return t.parse();
    }
    let v: Value = serde_json::from_str(t).map_err(|e| Error::Parse(format!("expansion JSON: {e}")))?;
    let inner = v.get("expansion").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| Error::Parse(format!("expansion JSON: {e}")))
}

fn change_json(c: &ConvergentChange) -> Value {
    match c {
        ConvergentChange::Lost { index, p, q } => json!({"change": "lost", "index": index, "p": big(p), "q": big(q)}),
        ConvergentChange::Shifted { from, to } => json!({"change": "shifted", "from": from, "to": to}),
        ConvergentChange::Mediant { index, p, q, of, sign } => {
            json!({"change": "mediant", "index": index, "p": big(p), "q": big(q), "of": of, "sign": sign})
        }
        ConvergentChange::New { index, p, q } => json!({"change": "new", "index": index, "p": big(p), "q": big(q)}),
    }
}

fn kind_parts(k: RewriteKind) -> (&'static str, Option<usize>) {
    match k {
        RewriteKind::Singularise => ("singularise", None),
        RewriteKind::Insert => ("insert", None),
        RewriteKind::Compensated => ("compensated", None),
        RewriteKind::Block(k) => ("block", Some(k)),
        RewriteKind::DoubleCompensated => ("double_compensated", None),
    }
}

fn cmd_rewrite(a: &RewriteArgs, m: Manifest) -> Result<Doc> {
    let e = read_expansion(&a.expansion)?;
    let alpha = parse_surd(&a.alpha)?;
    let (out, log) = rewrite_to_alpha(&e, &alpha)?;
    let steps: Vec<Value> = log
        .iter()
        .map(|tr| {
            let (kind, k) = kind_parts(tr.kind);
            json!({
                "site": tr.site,
                "kind": kind,
                "k": k,
                "after": tr.after.to_string(),
                "convergent_delta": tr.convergent_delta.iter().map(change_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let rows = log
        .iter()
        .enumerate()
        .map(|(i, tr)| {
            let (kind, k) = kind_parts(tr.kind);
            vec![
                (i + 1).to_string(),
                tr.site.to_string(),
                kind.into(),
                k.map(|k| k.to_string()).unwrap_or_default(),
                format!("\"{}\"", tr.after),
            ]
        })
        .collect();
    let json = json!({
        "alpha": alpha,
        "before": e,
        "expansion": out,
        "text": out.to_string(),
        "trace": steps,
    });
    Ok(Doc::new(m, json).table(vec!["step", "site", "kind", "k", "after"], rows))
}

fn rect_row(r: &Rect, d: u32) -> Vec<String> {
    vec![
        render_surd(&r.t_lo, d),
        render_surd(&r.t_hi, d),
        render_surd(&r.v_lo, d),
        render_surd(&r.v_hi, d),
        r.edges.to_string(),
        r.k.map(|k| k.to_string()).unwrap_or_default(),
        r.family.clone(),
    ]
}

fn cmd_domain(global: &Global, a: &DomainArgs, m: Manifest) -> Result<Doc> {
    let alpha = parse_surd(&a.alpha)?;
    let dom: RectUnion = build_domain(&alpha, a.k)?;
    let rows = dom.rects.iter().map(|r| rect_row(r, global.digits)).collect();
    let json = json!({ "regime": dom.regime.to_string(), "domain": dom });
    Ok(Doc::new(m, json).table(vec!["t_lo", "t_hi", "v_lo", "v_hi", "edges", "k", "family"], rows))
}

fn cmd_orbit(global: &Global, a: &OrbitArgs, m: Manifest) -> Result<Doc> {
    let alpha = parse_surd(&a.alpha)?;
    let cfg = sim_config(global, alpha, a.n, a.burn_in)?;
    let stream: OrbitStream = match &a.x {
        Some(x) => orbit(&parse_surd(x)?, &cfg)?,
        None => random_start(&cfg, 0),
    };
    let mode = stream.mode;
    let samples: Vec<_> = stream.skip(a.burn_in as usize).collect();
    let d = global.digits;
    let rows = samples
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                render_f64(s.t, d),
                render_f64(s.v, d),
                s.digit.eps.to_string(),
                s.digit.a.to_string(),
                render_f64(s.theta_prev, d),
            ]
        })
        .collect();
    let json = json!({
        "summary": { "alpha": cfg.alpha, "n": samples.len(), "mode": mode },
        "samples": samples,
    });
    Ok(Doc::new(m, json).table(vec!["n", "t", "v", "eps", "a", "theta_prev"], rows))
}

fn cmd_entropy(global: &Global, a: &SimArgs, m: Manifest) -> Result<Doc> {
    let cfg = sim_config(global, parse_surd(&a.alpha)?, a.n, a.burn_in)?;
    let rep = entropy_estimate(&cfg)?;
    let d = global.digits;
    let opt = |x: Option<f64>| x.map(|x| render_f64(x, d)).unwrap_or_default();
    let row = vec![
        render_f64(rep.alpha, d),
        rep.n.to_string(),
        render_f64(rep.estimate, d),
        render_f64(rep.stderr, d),
        opt(rep.expected),
        opt(rep.sigma_distance),
    ];
    let json = serde_json::to_value(&rep).expect("report serializes");
    Ok(Doc::new(m, json).table(vec!["alpha", "n", "estimate", "stderr", "expected", "sigma_distance"], vec![row]))
}

fn cmd_theta(global: &Global, a: &ThetaArgs, m: Manifest) -> Result<Doc> {
    if a.grid == 0 {
        return Err(Error::Domain("--grid must be positive".into()));
    }
    let cfg = sim_config(global, parse_surd(&a.sim.alpha)?, a.sim.n, a.sim.burn_in)?;
    let grid: Vec<f64> = (1..=a.grid).map(|i| i as f64 / a.grid as f64).collect();
    let rep = theta_distribution(&cfg, &grid)?;
    let d = global.digits;
    let rows = rep
        .grid
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let exp = rep.expected.as_ref().map(|e| render_f64(e[i], d)).unwrap_or_default();
            vec![render_f64(*t, d), render_f64(rep.empirical[i], d), exp]
        })
        .collect();
    let json = serde_json::to_value(&rep).expect("report serializes");
    Ok(Doc::new(m, json).table(vec!["t", "empirical", "expected"], rows))
}

fn cmd_legendre(global: &Global, a: &LegendreArgs, m: Manifest) -> Result<Doc> {
    let alpha = parse_surd(&a.alpha)?;
    let d = global.digits;
    let closed = match legendre_piece(&alpha) {
        Ok(f) => Some((f, f.eval(&alpha)?)),
        Err(Error::UnsupportedAlpha(_)) => None,
        Err(e) => return Err(e),
    };
    let bounds = match (closed.is_none(), legendre_bounds(&alpha)) {
        (true, Ok(LegendreBounds::Bracket { r, proved, conjectured })) => json!({
            "r": r,
            "proved": [render_surd(&proved.0, d), render_surd(&proved.1, d)],
            "conjectured": [render_surd(&conjectured.0, d), render_surd(&conjectured.1, d)],
        }),
        _ => Value::Null,
    };
    let rep = empirical_legendre(&alpha, a.q, a.nx, global.seed)?;
    let l = closed.as_ref().map(|(_, v)| v.to_f64());
    let violations = l.map(|l| rep.violations(l - 1e-9));
    let witness = rep
        .witness
        .as_ref()
        .map(|w| json!({"p": big(&w.p), "q": big(&w.q), "x": w.x, "theta": render_surd(&w.theta, d)}));
    let json = json!({
        "alpha": alpha,
        "L_closed_form": l,
        "L_exact": closed.as_ref().map(|(_, v)| v.to_string()),
        "L_decimal": closed.as_ref().map(|(_, v)| render_tower(v, d)),
        "formula": closed.as_ref().map(|(f, _)| *f),
        "bounds": bounds,
        "empirical_min": rep.min_theta,
        "witness": witness,
        "violations": violations,
        "q_max": a.q,
        "n_x": a.nx,
    });
    let row = vec![
        render_surd(&alpha, d),
        l.map(|l| render_f64(l, d)).unwrap_or_default(),
        render_f64(rep.min_theta, d),
        violations.map(|v| v.to_string()).unwrap_or_default(),
    ];
    Ok(Doc::new(m, json).table(vec!["alpha", "L_closed_form", "empirical_min", "violations"], vec![row]))
}

fn cmd_measure(global: &Global, a: &MeasureArgs, m: Manifest) -> Result<Doc> {
    let alpha = parse_surd(&a.alpha)?;
    let mut cfg = sim_config(global, alpha, a.n, a.burn_in)?;
    cfg.domain_k = a.k;
    let r = Rect::new(
        parse_surd(&a.t_lo)?,
        parse_surd(&a.t_hi)?,
        parse_surd(&a.v_lo)?,
        parse_surd(&a.v_hi)?,
        "[)[)",
        "probe",
    );
    if r.is_degenerate() {
        return Err(Error::Domain("rectangle is empty".into()));
    }
    let rep = invariance_check(&cfg, &r)?;
    let d = global.digits;
    let row = vec![
        render_f64(rep.measure.mid(), d),
        render_f64(rep.image_measure.mid(), d),
        rep.exact_equal.map(|b| b.to_string()).unwrap_or_default(),
        render_f64(rep.mu, d),
        render_f64(rep.frequency, d),
        render_f64(rep.z, d),
    ];
    let json = serde_json::to_value(&rep).expect("report serializes");
    Ok(Doc::new(m, json).table(vec!["measure", "image_measure", "exact_equal", "mu", "frequency", "z"], vec![row]))
}

fn cmd_fundamental(global: &Global, a: &FundamentalArgs, m: Manifest) -> Result<Doc> {
    let prefix = digits_from_str(&a.prefix)?;
    let iv = fundamental_interval(&prefix)?;
    let d = global.digits;
    let json = json!({
        "prefix": prefix.iter().map(|x| x.signed()).collect::<Vec<_>>(),
        "interval": iv.to_string(),
        "lo": iv.lo,
        "hi": iv.hi,
        "lo_closed": iv.lo_closed,
        "hi_closed": iv.hi_closed,
        "lo_decimal": render_surd(&iv.lo, d),
        "hi_decimal": render_surd(&iv.hi, d),
    });
    let row = vec![render_surd(&iv.lo, d), render_surd(&iv.hi, d), iv.lo_closed.to_string(), iv.hi_closed.to_string()];
    Ok(Doc::new(m, json).table(vec!["lo", "hi", "lo_closed", "hi_closed"], vec![row]))
}
