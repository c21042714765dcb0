//! `koszul`: basis enumeration, cohomology, v-actions, Bockstein first
//! pages, stability comparisons, Adem normalization on both sides of the
//! Koszul duality, Dyer-Lashof expression evaluation, chart emission, and
//! the bundled self-test.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use koszul_core::chart::{
    chart_to_json, emit_basis_chart, emit_bockstein_chart, emit_cohomology_chart, render_svg,
};
use koszul_core::cohomology::{
    annotate_structure, bockstein_d1, cohomology, compute_v_actions, critical_group,
    critical_window, stability_check_with_module,
};
use koszul_core::complex::{assemble, bp_preset_for_window, Window};
use koszul_core::dyer_lashof::{
    parse_expression, q_apply, render_qpolynomial, verify_big_relation, QPolynomial,
};
use koszul_core::ops::{
    filter_unstable_words, normalize_r_word, render_element, render_monomial, RewriteStrategy,
};
use koszul_core::presentation::{bp_preset, parse_module, ModulePresentation};
use koszul_core::selftest::{all_passed, run_selftest};

const CONFIG_HELP: &str = "CONFIGURATION:\n  --config <FILE> reads a JSON object whose keys mirror the long flags\n  (n, x_min, x_max, s_max, weight_max, module, format, out). Precedence:\n  flags > config file > built-in defaults.";

#[derive(Parser)]
#[command(
    name = "koszul",
    version,
    about = "Koszul cochain complexes for Dyer-Lashof module algebras over F2",
    after_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    #[value(alias = "R")]
    R,
    #[value(alias = "Q")]
    Q,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChartMode {
    Basis,
    Cohomology,
    Bockstein,
}

/// Flags shared by the window-driven subcommands. All optional so a
/// config file can fill them in.
#[derive(Args, Clone)]
struct CommonArgs {
    /// Truncation level n >= -1
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<i32>,
    #[arg(long)]
    s_max: Option<u32>,
    /// Drop basis monomials with more than this many R-operators
    #[arg(long)]
    weight_max: Option<u32>,
    /// `bp` or a path to a module JSON document
    #[arg(long)]
    module: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// JSON file with the same keys as the flags
    #[arg(long)]
    config: Option<String>,
}

#[derive(Deserialize, Default)]
struct ConfigDoc {
    n: Option<i32>,
    x_min: Option<i32>,
    x_max: Option<i32>,
    s_max: Option<u32>,
    weight_max: Option<u32>,
    module: Option<String>,
    format: Option<String>,
    out: Option<String>,
}

struct Resolved {
    window: Window,
    module: ModulePresentation,
    format: Format,
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the admissible-monomial basis over a window
    Basis(CommonArgs),
    /// Cohomology dimensions and canonical representative cycles
    Cohomology(CommonArgs),
    /// Induced v_i-action matrices on cohomology, with structure lines
    Vaction {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to one v-index
        #[arg(long)]
        vi: Option<u32>,
    },
    /// The first obstruction group: cohomology at (x, s) = (-2, 3)
    Critical(CommonArgs),
    /// First differentials of the v_n-Bockstein spectral sequence
    BocksteinD1(CommonArgs),
    /// Compare weight-truncated cohomology across truncation levels
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_negative_numbers = true)]
        n_lo: i32,
        #[arg(long, allow_negative_numbers = true)]
        n_hi: i32,
    },
    /// Normalize an operator word by the Adem relations
    Adem {
        #[arg(long, value_enum)]
        side: Side,
        /// Comma-separated exponents, outermost first, e.g. 8,5
        #[arg(long)]
        word: String,
        /// Apply instability over a generator of this degree
        #[arg(long, allow_negative_numbers = true)]
        gen_degree: Option<i32>,
    },
    /// Evaluate a Dyer-Lashof expression like "Q20(Q8(x) + x^2*Q4(x))"
    Qeval {
        #[arg(long)]
        expr: String,
        /// Degree assigned to every generator identifier
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        gen_degree: i32,
    },
    /// Verify the ten-term degree-30 relation on a degree-2 class
    VerifyBigrelation,
    /// Emit an Adams chart (JSON or SVG)
    Chart {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "cohomology")]
        mode: ChartMode,
    },
    /// Run the bundled consistency and golden-value suite
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e.downcast_ref::<koszul_core::Error>() {
                // verification-level faults
                Some(koszul_core::Error::CompletenessFault { .. }) => ExitCode::from(2),
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(2),
            }
        }
    }
}

fn load_config(common: &CommonArgs) -> anyhow::Result<ConfigDoc> {
    match &common.config {
        None => Ok(ConfigDoc::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("config {path}: {e}"))?;
            Ok(serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("config {path}: {e}"))?)
        }
    }
}

fn parse_format(s: &str) -> anyhow::Result<Format> {
    match s {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        "svg" => Ok(Format::Svg),
        other => anyhow::bail!("unknown format `{other}`"),
    }
}

fn resolve(common: &CommonArgs) -> anyhow::Result<Resolved> {
    let cfg = load_config(common)?;
    let n = common.n.or(cfg.n).unwrap_or(-1);
    if n < -1 {
        anyhow::bail!("--n must be at least -1");
    }
    let x_min = common.x_min.or(cfg.x_min).unwrap_or(-20);
    let x_max = common.x_max.or(cfg.x_max).unwrap_or(-2);
    if x_min > x_max {
        anyhow::bail!("--x-min must not exceed --x-max");
    }
    let s_max = common.s_max.or(cfg.s_max).unwrap_or(4);
    let mut window = Window::new(x_min, x_max, s_max, n);
    if let Some(wm) = common.weight_max.or(cfg.weight_max) {
        window = window.with_weight_max(wm);
    }
    let module = resolve_module(
        common.module.as_deref().or(cfg.module.as_deref()),
        &window,
    )?;
    let format = match (&common.format, &cfg.format) {
        (Some(f), _) => *f,
        (None, Some(s)) => parse_format(s)?,
        (None, None) => Format::Text,
    };
    Ok(Resolved {
        window,
        module,
        format,
        out: common.out.clone().or(cfg.out),
    })
}

fn resolve_module(
    spec: Option<&str>,
    window: &Window,
) -> anyhow::Result<ModulePresentation> {
    match spec.unwrap_or("bp") {
        "bp" => Ok(bp_preset_for_window(window)),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("module {path}: {e}"))?;
            Ok(parse_module(&text)?)
        }
    }
}

fn emit(out: &Option<String>, content: &str) -> anyhow::Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Basis(common) => {
            let r = resolve(&common)?;
            let slice = assemble(&r.window, &r.module)?;
            let content = match r.format {
                Format::Json => {
                    let cells: Vec<serde_json::Value> = slice
                        .cells()
                        .filter(|(&(x, s), _)| r.window.contains(x, s))
                        .map(|(&(x, s), ms)| {
                            serde_json::json!({
                                "x": x, "s": s,
                                "monomials": ms.iter()
                                    .map(|m| render_monomial(m, &r.module))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "n": r.window.n, "module": r.module.name(), "cells": cells,
                    }))?
                }
                _ => {
                    let mut lines = Vec::new();
                    for (&(x, s), ms) in slice.cells() {
                        if !r.window.contains(x, s) || ms.is_empty() {
                            continue;
                        }
                        let names: Vec<String> =
                            ms.iter().map(|m| render_monomial(m, &r.module)).collect();
                        lines.push(format!("({x}, {s}): {}", names.join(", ")));
                    }
                    lines.join("\n")
                }
            };
            emit(&r.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cohomology(common) => {
            let r = resolve(&common)?;
            let slice = assemble(&r.window, &r.module)?;
            let report = cohomology(&slice)?;
            let content = match r.format {
                Format::Json => {
                    let cells: Vec<serde_json::Value> = report
                        .cells
                        .iter()
                        .filter(|(_, c)| c.dimension > 0)
                        .map(|(&(x, s), c)| {
                            serde_json::json!({
                                "x": x, "s": s, "dimension": c.dimension,
                                "classes": c.representatives.iter()
                                    .map(|rep| render_element(rep, &r.module))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "n": r.window.n, "module": r.module.name(), "cells": cells,
                    }))?
                }
                _ => {
                    let mut lines = Vec::new();
                    for (&(x, s), c) in &report.cells {
                        if c.dimension == 0 {
                            continue;
                        }
                        let labels: Vec<String> = (0..c.dimension)
                            .map(|i| report.class_label(x, s, i, &r.module))
                            .collect();
                        lines.push(format!(
                            "({x}, {s}): dim {} — {}",
                            c.dimension,
                            labels.join(", ")
                        ));
                    }
                    lines.join("\n")
                }
            };
            emit(&r.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Vaction { common, vi } => {
            let r = resolve(&common)?;
            let slice = assemble(&r.window, &r.module)?;
            let mut report = cohomology(&slice)?;
            compute_v_actions(&mut report, &slice)?;
            let content = match r.format {
                Format::Json => {
                    let mut actions = Vec::new();
                    for (&i, per_cell) in &report.v_actions {
                        if vi.is_some_and(|want| want != i) {
                            continue;
                        }
                        for (&(x, s), m) in per_cell {
                            let entries: Vec<(usize, usize)> = (0..m.cols())
                                .flat_map(|j| {
                                    m.column(j).support().into_iter().map(move |r| (r, j))
                                })
                                .collect();
                            actions.push(serde_json::json!({
                                "v": i, "x": x, "s": s,
                                "rows": m.rows(), "cols": m.cols(),
                                "entries": entries,
                            }));
                        }
                    }
                    serde_json::to_string_pretty(&serde_json::json!({
                        "n": r.window.n,
                        "actions": actions,
                        "structure": annotate_structure(&report, &r.module),
                    }))?
                }
                _ => {
                    let mut lines = Vec::new();
                    for (&i, per_cell) in &report.v_actions {
                        if vi.is_some_and(|want| want != i) {
                            continue;
                        }
                        for (&(x, s), m) in per_cell {
                            for j in 0..m.cols() {
                                let img = m.column(j);
                                let target = if img.is_zero() {
                                    "0".to_string()
                                } else {
                                    img.support()
                                        .iter()
                                        .map(|&row| {
                                            report.class_label(
                                                x + koszul_core::ops::v_degree(i),
                                                s + 1,
                                                row,
                                                &r.module,
                                            )
                                        })
                                        .collect::<Vec<_>>()
                                        .join(" + ")
                                };
                                lines.push(format!(
                                    "v{i} [{}] = {target}",
                                    report.class_label(x, s, j, &r.module)
                                ));
                            }
                        }
                    }
                    lines.push(String::new());
                    lines.push("structure:".into());
                    for l in annotate_structure(&report, &r.module) {
                        lines.push(format!("  {l}"));
                    }
                    lines.join("\n")
                }
            };
            emit(&r.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Critical(common) => {
            let cfg = load_config(&common)?;
            let n = common.n.or(cfg.n).unwrap_or(4);
            let window = critical_window(n);
            let module = resolve_module(
                common.module.as_deref().or(cfg.module.as_deref()),
                &window,
            )?;
            let classes = critical_group(n, &module)?;
            let format = common.format.unwrap_or(Format::Text);
            let content = match format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "n": n, "x": -2, "s": 3,
                    "classes": classes.iter().map(|c| serde_json::json!({
                        "leading": render_monomial(&c.leading, &module),
                        "weight": c.weight,
                        "exact": c.exact,
                        "representative": render_element(&c.representative, &module),
                    })).collect::<Vec<_>>(),
                }))?,
                _ => {
                    let mut lines = vec![format!(
                        "first obstruction group at (x, s) = (-2, 3), n = {n}: dim {}",
                        classes.len()
                    )];
                    for c in &classes {
                        lines.push(format!(
                            "  {}{}  [weight {}]",
                            render_monomial(&c.leading, &module),
                            if c.exact { "" } else { " (+ corrections)" },
                            c.weight
                        ));
                    }
                    lines.join("\n")
                }
            };
            emit(&common.out.or(cfg.out), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BocksteinD1(common) => {
            let r = resolve(&common)?;
            let n = r.window.n;
            if n < 0 {
                anyhow::bail!("bockstein-d1 needs --n >= 0");
            }
            let entries = bockstein_d1(n, &r.window, &r.module)?;
            let content = match r.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "n": n,
                    "entries": entries.iter().map(|e| serde_json::json!({
                        "source": e.source_label,
                        "source_cell": e.source_cell,
                        "target": e.target_label,
                        "target_cell": e.target_cell,
                        "v": e.v_index,
                    })).collect::<Vec<_>>(),
                }))?,
                _ => entries
                    .iter()
                    .map(|e| {
                        format!(
                            "d1[{}] = v{} [{}]   ({:?} -> {:?})",
                            e.source_label, e.v_index, e.target_label, e.source_cell,
                            e.target_cell
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(&r.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability { common, n_lo, n_hi } => {
            let r = resolve(&common)?;
            let weight_max = r.window.weight_max.unwrap_or(2);
            let module = match common.module.as_deref() {
                None | Some("bp") => None,
                Some(_) => Some(&r.module),
            };
            let report =
                stability_check_with_module(n_lo, n_hi, &r.window, weight_max, module)?;
            let content = match r.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "n_lo": n_lo, "n_hi": n_hi, "weight_max": weight_max,
                    "equal_everywhere": report.all_equal(),
                    "cells": report.cells.iter().map(|(&(x, s), c)| serde_json::json!({
                        "x": x, "s": s,
                        "computed": c.computed, "predicted": c.predicted,
                        "lo_raw": c.lo_raw,
                    })).collect::<Vec<_>>(),
                }))?,
                _ => {
                    let mut lines = vec![format!(
                        "stability n_lo={n_lo} n_hi={n_hi} weight<={weight_max}: {}",
                        if report.all_equal() {
                            "equal everywhere"
                        } else {
                            "MISMATCH"
                        }
                    )];
                    for ((x, s), c) in report.mismatches() {
                        lines.push(format!(
                            "  ({x}, {s}): computed {} vs predicted {}",
                            c.computed, c.predicted
                        ));
                    }
                    lines.join("\n")
                }
            };
            emit(&r.out, &content)?;
            Ok(if report.all_equal() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Adem {
            side,
            word,
            gen_degree,
        } => {
            let word: Vec<u32> = word
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow::anyhow!("bad --word: {e}"))?;
            if word.is_empty() {
                anyhow::bail!("--word needs at least one exponent");
            }
            let content = match side {
                Side::R => {
                    let words = normalize_r_word(&word, RewriteStrategy::LeftmostFirst);
                    match gen_degree {
                        Some(d) => {
                            let module = bp_preset(1)?;
                            let e = filter_unstable_words(&words, 0, d);
                            render_element(&e, &module)
                        }
                        None => render_word_sum(&words, "R"),
                    }
                }
                Side::Q => match gen_degree {
                    Some(d) => {
                        let mut p = QPolynomial::generator("x", d);
                        for &s in word.iter().rev() {
                            p = q_apply(s, &p);
                        }
                        render_qpolynomial(&p)
                    }
                    None => {
                        let words =
                            koszul_core::dyer_lashof::normalize_q_word(&word, RewriteStrategy::LeftmostFirst);
                        render_word_sum(&words, "Q")
                    }
                },
            };
            emit(&None, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Qeval { expr, gen_degree } => {
            let p = parse_expression(&expr, gen_degree)?;
            let degree = p.homogeneous_degree();
            println!("{}", render_qpolynomial(&p));
            if let Some(d) = degree {
                println!("degree: {d}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyBigrelation => {
            let residual = verify_big_relation()?;
            if residual.is_zero() {
                println!("OK residual=0");
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "FAIL residual has {} terms: {}",
                    residual.len(),
                    render_qpolynomial(&residual)
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Chart { common, mode } => {
            let r = resolve(&common)?;
            let slice = assemble(&r.window, &r.module)?;
            let doc = match mode {
                ChartMode::Basis => emit_basis_chart(&slice),
                ChartMode::Cohomology => {
                    let mut report = cohomology(&slice)?;
                    compute_v_actions(&mut report, &slice)?;
                    emit_cohomology_chart(&report, &slice)
                }
                ChartMode::Bockstein => {
                    let n = r.window.n;
                    if n < 0 {
                        anyhow::bail!("bockstein chart needs --n >= 0");
                    }
                    let w_lo = Window { n: n - 1, ..r.window };
                    let slice_lo = assemble(&w_lo, &r.module)?;
                    let mut report_lo = cohomology(&slice_lo)?;
                    compute_v_actions(&mut report_lo, &slice_lo)?;
                    let entries = bockstein_d1(n, &r.window, &r.module)?;
                    emit_bockstein_chart(&report_lo, &slice_lo, &entries)
                }
            };
            let content = match r.format {
                Format::Svg => render_svg(&doc),
                _ => chart_to_json(&doc),
            };
            emit(&r.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!(
                    "{} {} ({} ms): {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.millis,
                    c.detail
                );
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            println!("{passed}/{} checks passed", checks.len());
            Ok(if all_passed(&checks) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn render_word_sum(words: &[Vec<u32>], op: &str) -> String {
    if words.is_empty() {
        return "0".into();
    }
    words
        .iter()
        .map(|w| {
            w.iter()
                .map(|a| format!("{op}{a}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
