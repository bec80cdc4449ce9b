use super::{Column, Frame};

pub const DESCRIBE_HEADER: [&str; 9] = ["variable", "count", "mean", "std", "min", "25%", "50%", "75%", "max"];

#[derive(Debug, Clone, PartialEq)]
pub struct Descriptives {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

impl Descriptives {
    pub fn row(&self) -> [String; 9] {
        let f = |v: f64| if v.is_nan() { "NA".to_string() } else { format!("{v:.6}") };
        [
            self.name.clone(),
            self.count.to_string(),
            f(self.mean),
            f(self.std),
            f(self.min),
            f(self.p25),
            f(self.p50),
            f(self.p75),
            f(self.max),
        ]
    }
}

/// Percentile `q` in `[0, 1]` of already sorted values, linearly
/// interpolating between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Summary of one variable. NaN entries are ignored.
pub fn describe(name: &str, values: &[f64]) -> Descriptives {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mean = if n == 0 { f64::NAN } else { v.iter().sum::<f64>() / n as f64 };
    let std =
        if n < 2 { f64::NAN } else { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() };
    Descriptives {
        name: name.to_string(),
        count: n,
        mean,
        std,
        min: v.first().copied().unwrap_or(f64::NAN),
        p25: percentile(&v, 0.25),
        p50: percentile(&v, 0.5),
        p75: percentile(&v, 0.75),
        max: v.last().copied().unwrap_or(f64::NAN),
    }
}

/// Describes each named numeric column, skipping missing values. Categorical
/// and unknown columns are skipped.
pub fn describe_frame(frame: &Frame, columns: &[&str]) -> Vec<Descriptives> {
    columns
        .iter()
        .filter_map(|&c| match frame.column(c) {
            Some(Column::Numeric(vals)) => {
                let present: Vec<f64> = vals.iter().flatten().copied().collect();
                Some(describe(c, &present))
            }
            _ => None,
        })
        .collect()
}
