use std::cmp::Ordering;
use std::str::FromStr;

use cxo_core::exact::{parse_rational, to_fraction_string, truncate_decimal};
use cxo_core::robustness::{hamming_sweep, run_length_pattern, PerturbationReport};
use cxo_core::run_option::{run_option_report, RunOptionRow};
use cxo_core::{
    simulate_policy, BitString, ComplexityEngine, Error, MarketParams, OptionStyle, Policy, Pricer,
    Result,
};
use num_rational::BigRational;
use serde_json::json;

use crate::output::{self, short_decimal};
use crate::{Command, Config, Format, MarketArgs};

/// Longest horizon the run-option command accepts; the exact DP is quadratic.
pub const MAX_RUN_HORIZON: usize = 1 << 16;

pub fn run(command: &Command, config: &Config, engine: &ComplexityEngine) -> Result<String> {
    match command {
        Command::An { string } => an(string, config, engine),
        Command::Price {
            style,
            n,
            market,
            tree,
        } => price(
            (*style).into(),
            *n,
            &market_params(market)?,
            *tree,
            config,
            engine,
        ),
        Command::Table { max_n, all, market } => {
            table(*max_n, *all, &market_params(market)?, config, engine)
        }
        Command::Trend { max_n, market } => trend(*max_n, &market_params(market)?, config, engine),
        Command::Simulate {
            policy,
            horizon,
            samples,
            market,
        } => {
            let policy = Policy::from_str(policy)?;
            let params = market_params(market)?;
            simulate(policy, *horizon, *samples, &params, config, engine)
        }
        Command::RunOption {
            horizon,
            t,
            samples,
            market,
        } => run_option(*horizon, t, *samples, &market_params(market)?, config),
        Command::Perturb {
            string,
            measure,
            radius,
        } => {
            let x = BitString::parse(string)?;
            let report = hamming_sweep(engine, &x, (*measure).into(), *radius)?;
            Ok(perturb(&report, config))
        }
    }
}

pub fn market_params(m: &MarketArgs) -> Result<MarketParams> {
    let rate = parse_rational(&m.rate)?;
    match (&m.up, &m.down) {
        (Some(u), Some(d)) => {
            MarketParams::from_factors(rate, parse_rational(u)?, parse_rational(d)?)
        }
        _ => match &m.p {
            Some(p) => MarketParams::new(rate, parse_rational(p)?),
            None => MarketParams::fair(rate),
        },
    }
}

fn an(string: &str, config: &Config, engine: &ComplexityEngine) -> Result<String> {
    let x = BitString::parse(string)?;
    let result = engine.an_complexity(&x)?;
    let d = engine.deficiency(&x)?;
    let witness = result
        .witness
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    let automaton = result.witness_automaton.to_text();
    Ok(match config.format {
        Format::Json => output::json(&json!({
            "string": x.to_string(),
            "length": x.len(),
            "complexity": result.complexity,
            "b_n": d.b_n,
            "deficiency": d.deficiency,
            "witness": result.witness,
            "automaton": result.witness_automaton,
            "automaton_text": automaton,
        })),
        Format::Csv => output::csv(
            &[
                "string",
                "length",
                "complexity",
                "b_n",
                "deficiency",
                "witness",
                "automaton",
            ],
            &[vec![
                x.to_string(),
                x.len().to_string(),
                result.complexity.to_string(),
                d.b_n.to_string(),
                d.deficiency.to_string(),
                witness,
                automaton,
            ]],
        ),
        Format::Table => output::fields(&[
            ("string", x.to_string()),
            ("length", x.len().to_string()),
            ("complexity", result.complexity.to_string()),
            ("b_n", d.b_n.to_string()),
            ("deficiency", d.deficiency.to_string()),
            ("witness", witness),
            ("automaton", automaton),
        ]),
    })
}

fn price(
    style: OptionStyle,
    n: usize,
    params: &MarketParams,
    tree: bool,
    config: &Config,
    engine: &ComplexityEngine,
) -> Result<String> {
    let pricer = Pricer::new(engine).with_limit(config.limit);
    let precision = config.precision;
    if tree {
        let tree = pricer.price_tree(n, params, style)?;
        if config.format == Format::Json {
            return Ok(output::json(&tree.to_json(precision as usize)));
        }
        let mut rows = Vec::new();
        for len in 0..=n {
            for (i, node) in tree.level(len).iter().enumerate() {
                let prefix = BitString::from_index(i as u64, len).to_string();
                rows.push(vec![
                    if prefix.is_empty() {
                        "root".to_string()
                    } else {
                        prefix
                    },
                    node.payoff.to_string(),
                    node.continuation
                        .as_ref()
                        .map(|c| short_decimal(c, precision))
                        .unwrap_or_else(|| "-".to_string()),
                    short_decimal(&node.value, precision),
                    node.exercise.to_string(),
                ]);
            }
        }
        let headers = ["prefix", "payoff", "continuation", "value", "exercise"];
        return Ok(match config.format {
            Format::Csv => output::csv(&headers, &rows),
            _ => output::table(&headers, &rows),
        });
    }
    let value = match style {
        OptionStyle::European => pricer.european_price(n, params)?,
        OptionStyle::American => pricer.american_price(n, params)?.value().clone(),
    };
    let style_name = match style {
        OptionStyle::European => "european",
        OptionStyle::American => "american",
    };
    let shown = short_decimal(&value, precision);
    let exact = to_fraction_string(&value);
    Ok(match config.format {
        Format::Json => output::json(&json!({
            "style": style_name,
            "n": n,
            "params": params,
            "value": shown,
            "exact": exact,
        })),
        Format::Csv => output::csv(
            &["style", "n", "value", "exact"],
            &[vec![style_name.to_string(), n.to_string(), shown, exact]],
        ),
        Format::Table => format!("{shown}\n"),
    })
}

fn relation(a: &BigRational, b: &BigRational) -> &'static str {
    match a.cmp(b) {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    }
}

fn table(
    max_n: usize,
    all: bool,
    params: &MarketParams,
    config: &Config,
    engine: &ComplexityEngine,
) -> Result<String> {
    let pricer = Pricer::new(engine).with_limit(config.limit);
    let digits = config.precision as usize;
    let rows: Vec<_> = pricer
        .summary(max_n, params)?
        .into_iter()
        .filter(|r| all || r.n % 2 == 0)
        .collect();
    Ok(match config.format {
        Format::Json => output::json(&json!(rows
            .iter()
            .map(|r| json!({
                "n": r.n,
                "expected_deficiency": truncate_decimal(&r.expected_deficiency, digits),
                "european": truncate_decimal(&r.european, digits),
                "american": truncate_decimal(&r.american, digits),
                "exact": {
                    "expected_deficiency": to_fraction_string(&r.expected_deficiency),
                    "european": to_fraction_string(&r.european),
                    "american": to_fraction_string(&r.american),
                },
            }))
            .collect::<Vec<_>>())),
        Format::Csv => output::csv(
            &["n", "expected_deficiency", "european", "american"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        truncate_decimal(&r.expected_deficiency, digits),
                        truncate_decimal(&r.european, digits),
                        truncate_decimal(&r.american, digits),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => output::table(
            &["n", "E D_n", "", "V_n"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        truncate_decimal(&r.expected_deficiency, digits),
                        relation(&r.expected_deficiency, &r.american).to_string(),
                        truncate_decimal(&r.american, digits),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

fn trend(
    max_n: usize,
    params: &MarketParams,
    config: &Config,
    engine: &ComplexityEngine,
) -> Result<String> {
    let pricer = Pricer::new(engine).with_limit(config.limit);
    let rows = pricer.perpetual_trend_report(max_n, params)?;
    let digits = config.precision as usize;
    Ok(match config.format {
        Format::Json => output::json(&json!(rows
            .iter()
            .map(|(n, v)| json!({
                "n": n,
                "american": truncate_decimal(v, digits),
                "exact": to_fraction_string(v),
            }))
            .collect::<Vec<_>>())),
        format => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|(n, v)| vec![n.to_string(), truncate_decimal(v, digits)])
                .collect();
            if format == Format::Csv {
                output::csv(&["n", "american"], &rows)
            } else {
                output::table(&["n", "V_n"], &rows)
            }
        }
    })
}

fn simulate(
    policy: Policy,
    horizon: usize,
    samples: u64,
    params: &MarketParams,
    config: &Config,
    engine: &ComplexityEngine,
) -> Result<String> {
    let result = simulate_policy(engine, policy, horizon, params, samples, config.seed)?;
    let p = config.precision as usize;
    Ok(match config.format {
        Format::Json => output::json(&json!(result)),
        Format::Csv => output::csv(
            &[
                "policy",
                "horizon",
                "samples",
                "estimate",
                "std_error",
                "never_exercised",
            ],
            &[vec![
                result.policy.clone(),
                result.horizon.to_string(),
                result.samples.to_string(),
                format!("{:.p$}", result.estimate),
                format!("{:.p$}", result.std_error),
                result.never_exercised.to_string(),
            ]],
        ),
        Format::Table => {
            let mut out = output::fields(&[
                ("policy", result.policy.clone()),
                ("horizon", result.horizon.to_string()),
                ("samples", result.samples.to_string()),
                ("estimate", format!("{:.p$}", result.estimate)),
                ("std_error", format!("{:.p$}", result.std_error)),
                ("never", result.never_exercised.to_string()),
            ]);
            let rows: Vec<Vec<String>> = result
                .histogram
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(m, c)| vec![m.to_string(), c.to_string()])
                .collect();
            out.push('\n');
            out.push_str(&output::table(&["time", "exercised"], &rows));
            out
        }
    })
}

fn run_option(
    horizon: usize,
    t: &str,
    samples: u64,
    params: &MarketParams,
    config: &Config,
) -> Result<String> {
    if horizon > MAX_RUN_HORIZON {
        return Err(Error::LimitExceeded {
            what: "run-option horizon",
            requested: horizon,
            limit: MAX_RUN_HORIZON,
        });
    }
    let t = match t.trim() {
        "auto" => None,
        other => Some(other.parse::<usize>().map_err(|_| {
            Error::InvalidInput(format!("--t must be `auto` or an integer, got `{other}`"))
        })?),
    };
    let row = run_option_report(horizon, t, params, samples, config.seed)?;
    Ok(match config.format {
        Format::Json => output::json(&json!(row)),
        _ => format!("{}\n{}\n", RunOptionRow::CSV_HEADER, row.to_csv()),
    })
}

fn perturb(report: &PerturbationReport, config: &Config) -> String {
    match config.format {
        Format::Json => output::json(&json!(report)),
        Format::Csv => report.to_csv(),
        Format::Table => {
            let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.position.to_string(),
                        e.string.to_string(),
                        run_length_pattern(&e.string),
                        opt(e.complexity),
                        opt(e.deficiency),
                        e.longest_run.to_string(),
                        e.run_complexity.to_string(),
                    ]
                })
                .collect();
            let mut out = output::fields(&[
                ("base", report.base.to_string()),
                ("measure", report.measure.to_string()),
                ("value", report.base_value.to_string()),
                ("min", report.min.to_string()),
                ("max", report.max.to_string()),
                ("mean", format!("{:.4}", report.mean)),
            ]);
            out.push('\n');
            out.push_str(&output::table(
                &[
                    "flip",
                    "string",
                    "pattern",
                    "A_N",
                    "deficiency",
                    "longest_run",
                    "run",
                ],
                &rows,
            ));
            out
        }
    }
}
