use std::fmt::Write as _;

use super::frame::score_column;
use super::{Family, FitResult, ModelSpec, RobustSe, Term, Transform, INTERCEPT};

/// Coefficient rows of the regression table: design column and display label.
pub const COEFFICIENT_ROWS: [(&str, &str); 10] = [
    ("crowdfunded", "Is Crowdfunded"),
    ("team_size", "Team Size"),
    ("debut", "Debut"),
    ("complexity", "Avg. Complexity Rating"),
    ("log1p(playing_time)", "Playing Time (Log Mins)"),
    ("min_players", "Min. # of Players"),
    ("max_players", "Max. # of Players"),
    ("min_age", "Min. Age"),
    ("is_expansion", "Is Expansion"),
    ("is_adult", "Is Adult/Mature"),
];

fn control_terms() -> Vec<Term> {
    COEFFICIENT_ROWS
        .iter()
        .map(|(name, _)| match name.strip_prefix("log1p(").and_then(|s| s.strip_suffix(')')) {
            Some(col) => Term::new(col, Transform::Log1p),
            None => Term::new(*name, Transform::Identity),
        })
        .collect()
}

fn model(outcome: String, family: Family) -> ModelSpec {
    ModelSpec {
        outcome,
        family,
        terms: control_terms(),
        fixed_effects: vec!["year".into(), "genre".into()],
        robust_se: RobustSe::Hc1,
    }
}

/// Distinctiveness (OLS), binary novelty (logistic) and resonance (OLS) for
/// one window span, with year and genre fixed effects.
pub fn primary_models(span: u32) -> Vec<ModelSpec> {
    vec![
        model(score_column("distinctiveness", span), Family::Ols),
        model(score_column("novelty_binary", span), Family::Logistic),
        model(score_column("resonance", span), Family::Ols),
    ]
}

/// The primary model triple for each span, concatenated.
pub fn robustness_models(spans: &[u32]) -> Vec<ModelSpec> {
    spans.iter().flat_map(|&s| primary_models(s)).collect()
}

/// Count novelty (Poisson), one model per span.
pub fn poisson_models(spans: &[u32]) -> Vec<ModelSpec> {
    spans.iter().map(|&s| model(score_column("novelty_count", s), Family::Poisson)).collect()
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// One model column of the regression table.
#[derive(Debug, Clone)]
pub struct ReportColumn {
    pub header: String,
    pub spec: ModelSpec,
    /// The fit, or the reason it failed.
    pub fit: Result<FitResult, String>,
    /// Published crowdfunded coefficient for this model, shown for comparison.
    pub reference: Option<f64>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if v != 0.0 && (s == "0.000" || s == "-0.000") {
        format!("{v:.4}")
    } else {
        s
    }
}

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn fe_label(column: &str) -> String {
    let mut c = column.chars();
    match c.next() {
        Some(first) => format!("{}{} FE", first.to_uppercase(), c.as_str()),
        None => "FE".into(),
    }
}

/// Plain-text regression table: coefficients with stars and robust standard
/// errors in parentheses, fixed-effect markers, R² rows labelled by family,
/// observation counts and reference values.
pub fn regression_table(title: &str, columns: &[ReportColumn]) -> String {
    const LABEL: usize = 30;
    let header = |i: usize, c: &ReportColumn| format!("({}) {}", i + 1, c.header);
    let cell = columns.iter().enumerate().map(|(i, c)| header(i, c).len() + 2).max().unwrap_or(0).max(16);
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let line = LABEL + cell * columns.len();

    rows.push((String::new(), columns.iter().enumerate().map(|(i, c)| header(i, c)).collect()));
    rows.push((String::new(), columns.iter().map(|c| c.spec.family.as_str().to_string()).collect()));
    rows.push(("-".repeat(line), vec![]));

    let coef_rows = COEFFICIENT_ROWS.iter().copied().chain(std::iter::once((INTERCEPT, "Constant")));
    for (term, label) in coef_rows {
        let (mut est, mut se) = (Vec::new(), Vec::new());
        for c in columns {
            match c.fit.as_ref().ok().and_then(|f| f.index(term).ok().map(|j| (f, j))) {
                Some((f, j)) => {
                    est.push(format!("{}{}", num(f.coefficients[j]), significance_stars(f.p_values[j])));
                    se.push(format!("({})", num(f.robust_se[j])));
                }
                None => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        rows.push((label.to_string(), est));
        rows.push((String::new(), se));
    }
    rows.push(("-".repeat(line), vec![]));

    let mut fes: Vec<&str> = Vec::new();
    for c in columns {
        for fe in &c.spec.fixed_effects {
            if !fes.contains(&fe.as_str()) {
                fes.push(fe);
            }
        }
    }
    for fe in fes {
        rows.push((
            fe_label(fe),
            columns
                .iter()
                .map(|c| if c.spec.fixed_effects.iter().any(|f| f == fe) { "Yes" } else { "No" }.to_string())
                .collect(),
        ));
    }
    let r2_row = |label: &str, glm: bool| {
        (
            label.to_string(),
            columns
                .iter()
                .map(|c| match &c.fit {
                    Ok(f) if (f.family != Family::Ols) == glm => format!("{:.2}", f.r_squared),
                    _ => String::new(),
                })
                .collect::<Vec<_>>(),
        )
    };
    if columns.iter().any(|c| c.spec.family == Family::Ols) {
        rows.push(r2_row("R-squared (OLS)", false));
    }
    if columns.iter().any(|c| c.spec.family != Family::Ols) {
        rows.push(r2_row("McFadden pseudo R-squared", true));
    }
    rows.push((
        "Observations".into(),
        columns
            .iter()
            .map(|c| match &c.fit {
                Ok(f) => thousands(f.n_obs),
                Err(_) => "failed".into(),
            })
            .collect(),
    ));
    rows.push(("-".repeat(line), vec![]));

    let mut s = format!("{title}\n");
    for (label, cells) in rows {
        let mut l = format!("{label:<LABEL$}");
        for c in cells {
            let _ = write!(l, "{c:>cell$}");
        }
        s.push_str(l.trim_end());
        s.push('\n');
    }
    s.push_str("* p<0.05; ** p<0.01; *** p<0.001\n");
    let kinds: Vec<&str> = columns
        .iter()
        .map(|c| match c.spec.robust_se {
            RobustSe::Hc0 => "HC0",
            RobustSe::Hc1 => "HC1",
        })
        .collect();
    let mut uniq = kinds;
    uniq.sort_unstable();
    uniq.dedup();
    let _ = writeln!(s, "Robust ({}) standard errors in parentheses.", uniq.join("/"));
    if columns.iter().any(|c| c.reference.is_some()) {
        s.push_str("Reference \"Is Crowdfunded\" values (not asserted):");
        for (i, c) in columns.iter().enumerate() {
            if let Some(r) = c.reference {
                let yours = match &c.fit {
                    Ok(f) => f.coef("crowdfunded").map(num).unwrap_or_else(|_| "NA".into()),
                    Err(_) => "failed".into(),
                };
                let _ = write!(s, " ({}) {} vs {yours};", i + 1, num(r));
            }
        }
        s.pop();
        s.push('\n');
    }
    for (i, c) in columns.iter().enumerate() {
        match &c.fit {
            Err(e) => {
                let _ = writeln!(s, "({}) failed: {e}", i + 1);
            }
            Ok(f) if !f.converged => {
                let _ = writeln!(s, "({}) did not converge after {} iterations", i + 1, f.iterations);
            }
            Ok(_) => {}
        }
    }
    s
}

/// `term,coef,se,stat,p` rows in design order.
pub fn coefficient_csv(fit: &FitResult) -> String {
    let stat = if fit.family == Family::Ols { "t" } else { "z" };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["term", "coef", "se", stat, "p"]).expect("in-memory write");
    for j in 0..fit.terms.len() {
        w.write_record([
            fit.terms[j].clone(),
            format!("{}", fit.coefficients[j]),
            format!("{}", fit.robust_se[j]),
            format!("{}", fit.z_or_t[j]),
            format!("{}", fit.p_values[j]),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
