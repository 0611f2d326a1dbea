//! Report builders for the subcommands. Each returns a `Report`; the
//! binary renders it to stdout and maps its verdicts to the exit code.
//! Reports are deterministic in the config, so two runs with the same
//! flags produce identical bytes.

use hahnlog_core::{
    enumerate_segments, exponential_rank, principal_exponential_rank, principal_rank, rat, rat_i,
    GroupElement, IndexPoint, Series, StageElement, StageTower, ZetaMap,
};

use crate::config::RunConfig;
use crate::exprtext::Evaluator;
use crate::report::{Report, Section};
use crate::suites;

fn config_section(config: &RunConfig) -> Section {
    let mut s = Section::new("configuration");
    for (k, v) in config.echo() {
        s.push(k, v);
    }
    s
}

/// The canonical genuinely-stage-n spine: a two-direction ground leaf under
/// a chain of singleton lifts, so nothing unembeds early.
fn spine(config: &RunConfig) -> Result<Vec<StageElement>, String> {
    let u = config.universe()?;
    let half = rat(-1, 2);
    let second = if u.len() > 1 {
        IndexPoint::new(&u, 1, 0).map_err(|e| e.to_string())?
    } else {
        IndexPoint::new(&u, 0, 1).map_err(|e| e.to_string())?
    };
    let leaf = GroupElement::from_terms(
        &u,
        [
            (IndexPoint::new(&u, 0, 0).map_err(|e| e.to_string())?, half.clone()),
            (second, half),
        ],
    )
    .map_err(|e| e.to_string())?;
    let mut out = vec![StageElement::ground(leaf)];
    for stage in 1..=config.depth {
        let prev = out[stage - 1].clone();
        out.push(
            StageElement::lift_from_terms(&u, stage, [(prev, rat_i(-1))])
                .map_err(|e| e.to_string())?,
        );
    }
    Ok(out)
}

/// Constructs every layer of the engine from the config and reports what
/// was built: the chain, the contraction with its quotient, and the tower.
pub fn cmd_build(config: &RunConfig) -> Result<Report, String> {
    let u = config.universe()?;
    let mut report = Report::new();
    report.add(config_section(config));
    let mut ok = true;

    let mut chain = Section::new("chain");
    chain.push("labels", u.labels().join(","));
    chain.push("length", u.len().to_string());
    chain.push(
        "order",
        "labels ascending, integer offsets within each; smaller points are larger classes",
    );
    report.add(chain);

    let zeta = ZetaMap::new(&u);
    let mut contraction = Section::new("contraction");
    let p = IndexPoint::new(&u, 0, 0).map_err(|e| e.to_string())?;
    let q = zeta.apply(p).map_err(|e| e.to_string())?;
    contraction.push(
        "successor_example",
        format!("({}) -> ({})", p.rendered(&u), q.rendered(&u)),
    );
    let quotient = zeta.quotient_order_type();
    contraction.push("quotient_labels", quotient.labels().join(","));
    ok &= quotient.labels() == u.labels();
    let principal = principal_exponential_rank(&u);
    contraction.push("principal_rank_labels", principal.labels().join(","));
    ok &= principal.labels() == u.labels();
    report.add(contraction);

    let tower = StageTower::build(&u, config.depth).map_err(|e| e.to_string())?;
    let mut stages = Section::new("tower");
    stages.push("depth", tower.depth().to_string());
    for (stage, x) in spine(config)?.iter().enumerate() {
        let lifted = tower
            .section(stage)
            .and_then(|s| hahnlog_core::CrossSection::lift(&s, x))
            .map_err(|e| e.to_string())?;
        stages.push(format!("stage_{stage}_spine"), format!("{x}"));
        stages.push(format!("stage_{stage}_lift_leading"), leading_of(&lifted));
        ok &= tower.check27(x).map_err(|e| e.to_string())?;
    }
    stages.verdict(ok);
    report.add(stages);
    Ok(report)
}

fn leading_of(s: &Series<StageElement>) -> String {
    match s.leading() {
        Ok((e, q)) if *q == rat_i(1) => format!("t^{{ {e} }}"),
        Ok((e, q)) if *q == rat_i(-1) => format!("-t^{{ {e} }}"),
        Ok((e, q)) => format!("{q}*t^{{ {e} }}"),
        Err(_) => "0".to_string(),
    }
}

/// Evaluates one expression in the ambient field and reports the value; an
/// evaluation error becomes a failing report rather than a usage error.
pub fn cmd_eval(config: &RunConfig, expr: &str) -> Result<Report, String> {
    let u = config.universe()?;
    let ev = Evaluator::new(&u, config)?;
    let mut report = Report::new();
    report.add(config_section(config));
    let mut section = Section::new("evaluation");
    section.push("expr", expr);
    match ev.eval(expr) {
        Ok(v) => {
            section.push("value", ev.render(&v));
            section.verdict(true);
        }
        Err(e) => {
            section.push("error", e);
            section.verdict(false);
        }
    }
    report.add(section);
    Ok(report)
}

/// Runs one named check suite.
pub fn cmd_check(config: &RunConfig, suite: &str) -> Result<Report, String> {
    let sections = suites::run_suite(suite, config)?;
    let mut report = Report::new();
    report.add(config_section(config));
    for s in sections {
        report.add(s);
    }
    Ok(report)
}

/// Reports the rank structures of the configured chain.
pub fn cmd_rank(config: &RunConfig) -> Result<Report, String> {
    let u = config.universe()?;
    let mut report = Report::new();
    report.add(config_section(config));

    let mut rank = Section::new("exponential rank");
    for (i, q) in exponential_rank(&u).iter().enumerate() {
        rank.push(
            format!("class_{i}"),
            format!("{q} (least label {})", u.label(q.min_label())),
        );
    }
    report.add(rank);

    let mut principal = Section::new("principal exponential rank");
    let pr = principal_exponential_rank(&u);
    principal.push("labels", pr.labels().join(","));
    principal.verdict(pr.labels() == u.labels());
    report.add(principal);

    let mut prank = Section::new("principal rank");
    let p = principal_rank(&u);
    prank.push("cuts_by_inclusion", p.labels_in_rank_order().join(" < "));
    match p.reversal_check(config.window_range()) {
        Ok(ok) => prank.verdict(ok),
        Err(e) => {
            prank.push("error", e.to_string());
            prank.verdict(false);
        }
    }
    report.add(prank);

    let mut compat = Section::new("compatibility");
    let mut closed = 0usize;
    let mut cuts = 0usize;
    let mut ok = true;
    let mut witness_line: Option<String> = None;
    for seg in enumerate_segments(&u, config.window_range()).map_err(|e| e.to_string())? {
        let compatible = seg.is_compatible(config.window_range()).map_err(|e| e.to_string())?;
        ok &= compatible == seg.is_zeta_closed();
        if compatible {
            closed += 1;
        } else {
            cuts += 1;
            if witness_line.is_none() {
                if let Some(w) = seg.violation_witness().map_err(|e| e.to_string())? {
                    witness_line = Some(format!(
                        "{seg} is violated by {w}: its class sits below the cut, its image inside"
                    ));
                }
            }
        }
    }
    compat.push("compatible_segments", closed.to_string());
    compat.push("incompatible_cuts", cuts.to_string());
    if let Some(w) = witness_line {
        compat.push("witness", w);
    }
    compat.verdict(ok);
    report.add(compat);
    Ok(report)
}

/// Reports the stage ladder: the canonical spine, its lifts, and how many
/// logarithms each stage needs to descend to the ground.
pub fn cmd_tower(config: &RunConfig) -> Result<Report, String> {
    let u = config.universe()?;
    let tower = StageTower::build(&u, config.depth).map_err(|e| e.to_string())?;
    let mode = match config.mode {
        crate::config::ModeChoice::Monic => hahnlog_core::ResidueLogMode::Monic,
        crate::config::ModeChoice::Interval => hahnlog_core::ResidueLogMode::Interval {
            width: config.interval_width.clone(),
        },
    };
    let policy = hahnlog_core::PrecisionPolicy::new(config.taylor_order).map_err(|e| e.to_string())?;
    let mut report = Report::new();
    report.add(config_section(config));

    let mut section = Section::new("stage ladder");
    section.push("depth", config.depth.to_string());
    let mut ok = true;
    for (stage, x) in spine(config)?.iter().enumerate() {
        section.push(format!("stage_{stage}_spine"), format!("{x}"));
        ok &= tower.check27(x).map_err(|e| e.to_string())?;
        let a = Series::monomial(x.clone(), rat_i(1));
        match tower.log_descends(&a, &mode, &policy) {
            Ok(k) => {
                section.push(
                    format!("stage_{stage}_descends"),
                    format!("t^{{ {x} }} grounds after {k} logs"),
                );
                ok &= k == stage;
            }
            Err(e) => {
                section.push(format!("stage_{stage}_descends"), format!("error: {e}"));
                ok = false;
            }
        }
    }
    section.verdict(ok);
    report.add(section);
    Ok(report)
}
