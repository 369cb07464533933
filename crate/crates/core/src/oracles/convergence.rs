use std::fmt::Write as _;

use num_complex::Complex64;

use super::OracleError;

/// Result of one discretisation run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub far_field: Vec<Complex64>,
    pub iterations: Option<usize>,
}

/// Reference used to measure errors.
#[derive(Clone, Debug)]
pub enum Truth {
    /// Far field of an exact solution at the same directions.
    Exact(Vec<Complex64>),
    /// Each level is compared with the next finer level at the same `N`.
    NextRefinement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub n: usize,
    pub error: f64,
    pub iterations: Option<usize>,
    /// `log₂(e_{L−1}/e_L)` against the previous level with the same `N`.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

/// Maximum relative error `max_j |u_j − v_j| / max_j |v_j|`.
pub fn max_relative_error(u: &[Complex64], truth: &[Complex64]) -> f64 {
    let scale = truth.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = u.iter().zip(truth).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if scale == 0.0 { diff } else { diff / scale }
}

/// Runs `run(level, N)` over the grid of levels and `N` values and tabulates
/// far-field errors against `truth`.
pub fn convergence_study<R>(mut run: R, levels: &[usize], ns: &[usize], truth: &Truth) -> Result<ConvergenceTable, OracleError>
where
    R: FnMut(usize, usize) -> Result<RunOutcome, OracleError>,
{
    if levels.is_empty() || ns.is_empty() {
        return Err(OracleError::InvalidParameter("need at least one level and one N".into()));
    }
    let mut rows = Vec::new();
    for &n in ns {
        let mut prev: Option<f64> = None;
        let mut finer: Option<RunOutcome> = None;
        let mut outcomes = Vec::new();
        for &level in levels {
            outcomes.push(run(level, n)?);
        }
        if matches!(truth, Truth::NextRefinement) {
            finer = Some(run(levels[levels.len() - 1] + 1, n)?);
        }
        for (idx, (&level, out)) in levels.iter().zip(&outcomes).enumerate() {
            let error = match truth {
                Truth::Exact(v) => max_relative_error(&out.far_field, v),
                Truth::NextRefinement => {
                    let reference = outcomes.get(idx + 1).or(finer.as_ref()).expect("finer run exists");
                    max_relative_error(&out.far_field, &reference.far_field)
                }
            };
            let order = prev.map(|p| (p / error).log2());
            rows.push(ConvergenceRow { level, n, error, iterations: out.iterations, order });
            prev = Some(error);
        }
    }
    Ok(ConvergenceTable { rows })
}

impl ConvergenceTable {
    pub fn to_text(&self) -> String {
        let mut s = format!("{:>5} {:>5} {:>12} {:>6} {:>7}\n", "level", "N", "error", "iters", "order");
        for r in &self.rows {
            let it = r.iterations.map_or("-".into(), |i| i.to_string());
            let ord = r.order.map_or("-".into(), |o| format!("{o:.2}"));
            writeln!(s, "{:>5} {:>5} {:>12.4e} {:>6} {:>7}", r.level, r.n, r.error, it, ord).unwrap();
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,N,error,iterations,order\n");
        for r in &self.rows {
            let it = r.iterations.map_or(String::new(), |i| i.to_string());
            let ord = r.order.map_or(String::new(), |o| format!("{o}"));
            writeln!(s, "{},{},{:e},{},{}", r.level, r.n, r.error, it, ord).unwrap();
        }
        s
    }

    /// Rows with the given `N`, in level order.
    pub fn column(&self, n: usize) -> Vec<&ConvergenceRow> {
        self.rows.iter().filter(|r| r.n == n).collect()
    }
}
