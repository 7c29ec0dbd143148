//! Machine-readable renderings: one CSV schema shared by every
//! experiment, JSON documents per report, and JSONL trajectory traces.
//! Nothing here includes wall times or anything else that varies between
//! reruns, so equal seeds give byte-identical files.

use crate::analysis::GroupClassification;
use crate::estimate::{
    series_value, ChainExperimentReport, GenerationReport, OrderGrowthReport, WordIdentityReport,
};
use crate::exact::{ExactGenerationReport, ExactWordReport};
use crate::query::{ChainRun, ChoiceKind};

pub const CSV_HEADER: &str =
    "experiment,n,parameters,trials,successes,p_hat,ci_low,ci_high,bound_or_series,seed";

/// One CSV record. Fields are pre-rendered strings so exact decimals and
/// floats share the schema; `line` refuses separators inside fields
/// rather than quoting them away.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub experiment: &'static str,
    pub n: usize,
    pub parameters: String,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: String,
    pub ci_low: String,
    pub ci_high: String,
    pub bound_or_series: String,
    pub seed: Option<u64>,
}

impl CsvRow {
    pub fn line(&self) -> String {
        assert!(
            !self.parameters.contains([',', '\n', '"']),
            "parameter fields use ';' separators and stay comma-free"
        );
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.n,
            self.parameters,
            self.trials,
            self.successes,
            self.p_hat,
            self.ci_low,
            self.ci_high,
            self.bound_or_series,
            self.seed.map(|s| s.to_string()).unwrap_or_default()
        )
    }
}

/// Shortest decimal that round-trips, via the standard float formatter.
pub fn float_field(x: f64) -> String {
    format!("{x}")
}

fn join_params(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.line());
        out.push('\n');
    }
    out
}

pub fn generation_rows(report: &GenerationReport, series_order: usize) -> Vec<CsvRow> {
    let series = series_value(report.degree, series_order).ok();
    let e = &report.estimate;
    vec![CsvRow {
        experiment: "generate",
        n: report.degree,
        parameters: join_params(&[("series_order", series_order.to_string())]),
        trials: e.trials,
        successes: e.successes,
        p_hat: float_field(e.p_hat),
        ci_low: float_field(e.ci_low),
        ci_high: float_field(e.ci_high),
        bound_or_series: series.map(float_field).unwrap_or_default(),
        seed: Some(e.seed),
    }]
}

pub fn word_rows(report: &WordIdentityReport) -> Vec<CsvRow> {
    let e = &report.estimate;
    vec![CsvRow {
        experiment: "word",
        n: report.degree,
        parameters: join_params(&[
            ("u", report.u.clone()),
            ("v", report.v.clone()),
            ("ell", report.ell.to_string()),
        ]),
        trials: e.trials,
        successes: e.successes,
        p_hat: float_field(e.p_hat),
        ci_low: float_field(e.ci_low),
        ci_high: float_field(e.ci_high),
        bound_or_series: float_field(report.bound),
        seed: Some(e.seed),
    }]
}

/// One row per chain step plus a final row for the whole chain.
pub fn chain_rows(report: &ChainExperimentReport) -> Vec<CsvRow> {
    let base = [
        ("u", report.u.clone()),
        ("v", report.v.clone()),
        ("ell", report.ell.to_string()),
        ("k", report.k.to_string()),
    ];
    let mut rows: Vec<CsvRow> = report
        .steps
        .iter()
        .map(|s| {
            let mut params = base.to_vec();
            params.push(("i", s.index.to_string()));
            CsvRow {
                experiment: "chain-step",
                n: report.degree,
                parameters: join_params(&params),
                trials: s.conditioning_trials,
                successes: s.held,
                p_hat: float_field(s.p_hat),
                ci_low: float_field(s.ci_low),
                ci_high: float_field(s.ci_high),
                bound_or_series: float_field(s.bound),
                seed: Some(report.full_chain.seed),
            }
        })
        .collect();
    let e = &report.full_chain;
    rows.push(CsvRow {
        experiment: "chain",
        n: report.degree,
        parameters: join_params(&base),
        trials: e.trials,
        successes: e.successes,
        p_hat: float_field(e.p_hat),
        ci_low: float_field(e.ci_low),
        ci_high: float_field(e.ci_high),
        bound_or_series: float_field(report.product_bound),
        seed: Some(e.seed),
    });
    rows
}

pub fn orders_rows(report: &OrderGrowthReport) -> Vec<CsvRow> {
    let e = &report.collision_estimate;
    vec![CsvRow {
        experiment: "orders",
        n: report.degree,
        parameters: join_params(&[
            ("r", report.r.to_string()),
            ("words", report.word_count.to_string()),
            (
                "certified",
                format!("{}/{}", report.certified_confirmed, report.certified_checked),
            ),
        ]),
        trials: e.trials,
        successes: e.successes,
        p_hat: float_field(e.p_hat),
        ci_low: float_field(e.ci_low),
        ci_high: float_field(e.ci_high),
        bound_or_series: float_field(report.bound),
        seed: Some(e.seed),
    }]
}

/// Exact enumerations have no sampling: the interval degenerates to the
/// exact value and the seed field stays empty.
pub fn exact_generation_rows(report: &ExactGenerationReport, series_order: usize) -> Vec<CsvRow> {
    let series = series_value(report.degree, series_order).ok();
    let decimal = report.probability.decimal_string();
    let total: u64 = report.histogram.total();
    vec![CsvRow {
        experiment: "exact-generate",
        n: report.degree,
        parameters: join_params(&[("series_order", series_order.to_string())]),
        trials: total,
        successes: report.histogram.at_least_alternating(),
        p_hat: decimal.clone(),
        ci_low: decimal.clone(),
        ci_high: decimal,
        bound_or_series: series.map(float_field).unwrap_or_default(),
        seed: None,
    }]
}

pub fn exact_word_rows(report: &ExactWordReport) -> Vec<CsvRow> {
    let decimal = report.probability.decimal_string();
    vec![CsvRow {
        experiment: "exact-word",
        n: report.degree,
        parameters: join_params(&[
            ("u", report.u.clone()),
            ("v", report.v.clone()),
            ("ell", report.ell.to_string()),
        ]),
        trials: report.probability.total_count(),
        successes: report.probability.success_count(),
        p_hat: decimal.clone(),
        ci_low: decimal.clone(),
        ci_high: decimal,
        bound_or_series: float_field(report.bound),
        seed: None,
    }]
}

/// Generation JSON: the report plus the series value it is compared to.
pub fn generation_json(report: &GenerationReport, series_order: usize) -> serde_json::Value {
    let series = series_value(report.degree, series_order).ok();
    serde_json::json!({
        "report": report,
        "series": series,
        "series_order": series_order,
    })
}

/// {n, transitive, primitive, order, verdict}; order is a decimal string
/// or null, primitive is null when transitivity already failed.
pub fn classification_json(c: &GroupClassification) -> serde_json::Value {
    serde_json::json!({
        "n": c.degree,
        "transitive": c.transitive,
        "primitive": c.primitive,
        "order": c.order.as_ref().map(|o| o.to_string()),
        "verdict": c.verdict,
    })
}

/// One JSONL line per query of every trajectory in the chain, points
/// 1-based.
pub fn chain_trace_lines(trial: u64, run: &ChainRun) -> Vec<String> {
    let mut out = Vec::new();
    for (ci, step) in run.steps.iter().enumerate() {
        for q in &step.trajectory.steps {
            let value = serde_json::json!({
                "trial": trial,
                "i": ci + 1,
                "letter": q.letter.to_char().to_string(),
                "from": q.from + 1,
                "to": q.result.value + 1,
                "kind": match q.result.kind {
                    ChoiceKind::Forced => "forced",
                    ChoiceKind::Free => "free",
                },
                "coincidence": q.result.coincidence,
            });
            out.push(value.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::classify_with_order;
    use crate::estimate::{
        estimate_generation, estimate_word_identity, order_growth_experiment,
        run_event_chain_experiment, trace_event_chains,
    };
    use crate::exact::{exact_generation_probability, exact_unimodal_identity_probability};
    use crate::perm::Permutation;
    use crate::words::UnimodalWord;

    #[test]
    fn header_matches_the_documented_schema() {
        assert_eq!(
            CSV_HEADER,
            "experiment,n,parameters,trials,successes,p_hat,ci_low,ci_high,bound_or_series,seed"
        );
        assert_eq!(CSV_HEADER.split(',').count(), 10);
    }

    #[test]
    fn rows_have_exactly_ten_fields() {
        let w = UnimodalWord::parse("xy", "yx").unwrap();
        let report = estimate_word_identity(&w, 10, 200, 5, 1).unwrap();
        let rows = word_rows(&report);
        assert_eq!(rows.len(), 1);
        let line = rows[0].line();
        assert_eq!(line.split(',').count(), 10);
        assert!(line.starts_with("word,10,u=xy;v=yx;ell=4,200,"));
        assert!(line.ends_with(",5"));
    }

    #[test]
    fn float_fields_round_trip() {
        assert_eq!(float_field(0.25), "0.25");
        assert_eq!(float_field(1.0 / 3.0), "0.3333333333333333");
        let x = 0.123_456_789_012_345_68;
        let back: f64 = float_field(x).parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn csv_is_deterministic_per_seed() {
        let a = estimate_generation(4, 300, 9, 1).unwrap();
        let b = estimate_generation(4, 300, 9, 1).unwrap();
        assert_eq!(
            render_csv(&generation_rows(&a, 5)),
            render_csv(&generation_rows(&b, 5))
        );
    }

    #[test]
    fn chain_rows_cover_steps_and_total() {
        let w = UnimodalWord::parse("x", "y").unwrap();
        let report = run_event_chain_experiment(12, &w, 3, 200, 2, 1).unwrap();
        let rows = chain_rows(&report);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].experiment, "chain-step");
        assert!(rows[0].parameters.ends_with(";i=1"));
        assert_eq!(rows[3].experiment, "chain");
        let csv = render_csv(&rows);
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn orders_row_reports_certification() {
        let report = order_growth_experiment(6, 2, 100, 4, 1, 8).unwrap();
        let rows = orders_rows(&report);
        assert!(rows[0].parameters.starts_with("r=2;words=3;certified="));
    }

    #[test]
    fn exact_rows_degenerate_the_interval() {
        let report = exact_generation_probability(3, false, 1).unwrap();
        let rows = exact_generation_rows(&report, 5);
        let line = rows[0].line();
        assert!(line.starts_with("exact-generate,3,series_order=5,36,26,0.722222222222,0.722222222222,0.722222222222,"));
        assert!(line.ends_with(","), "seed field is empty");

        let w = UnimodalWord::parse("x", "y").unwrap();
        let wr = exact_unimodal_identity_probability(&w, 4).unwrap();
        let wrows = exact_word_rows(&wr);
        assert!(wrows[0].line().starts_with("exact-word,4,u=x;v=y;ell=2,576,24,"));
    }

    #[test]
    fn classification_json_shape() {
        let x = Permutation::parse("(1 2 3)").unwrap();
        let y = Permutation::parse_with_degree("(1 2)", 3).unwrap();
        let c = classify_with_order(&x, &y).unwrap();
        let v = classification_json(&c);
        assert_eq!(v["n"], 3);
        assert_eq!(v["transitive"], true);
        assert_eq!(v["primitive"], true);
        assert_eq!(v["order"], "6");
        assert_eq!(v["verdict"], "symmetric");

        let id = Permutation::identity(4);
        let c = crate::analysis::classify(&id, &id).unwrap();
        let v = classification_json(&c);
        assert_eq!(v["order"], serde_json::Value::Null);
        assert_eq!(v["verdict"], "intransitive");
    }

    #[test]
    fn trace_lines_are_json_with_one_based_points() {
        let w = UnimodalWord::parse("xy", "yx").unwrap();
        let runs = trace_event_chains(16, &w, 2, 3, 77).unwrap();
        let mut lines = Vec::new();
        for (t, run) in runs.iter().enumerate() {
            lines.extend(chain_trace_lines(t as u64, run));
        }
        assert!(!lines.is_empty());
        for line in &lines {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["from"].as_u64().unwrap() >= 1);
            assert!(v["to"].as_u64().unwrap() >= 1);
            assert!(v["from"].as_u64().unwrap() <= 16);
            let kind = v["kind"].as_str().unwrap();
            assert!(kind == "forced" || kind == "free");
            let letter = v["letter"].as_str().unwrap();
            assert!(["x", "y", "X", "Y"].contains(&letter));
        }
        let first: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
        assert_eq!(first["trial"], 0);
        assert_eq!(first["i"], 1);
    }
}
