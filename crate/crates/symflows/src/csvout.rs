//! The metrics CSV stream. One row per optimizer step; the evaluation
//! columns are empty except at eval steps (or when not applicable to the
//! environment).

use std::io::{self, Write};

pub const METRICS_HEADER: &str = "step,states_visited,loss,aux,l1,jsd,avg_reward";

pub struct MetricsCsv<W: Write> {
    w: W,
}

impl<W: Write> MetricsCsv<W> {
    pub fn new(mut w: W) -> io::Result<Self> {
        writeln!(w, "{METRICS_HEADER}")?;
        Ok(MetricsCsv { w })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn row(
        &mut self,
        step: usize,
        states_visited: u64,
        loss: f64,
        aux: f64,
        l1: Option<f64>,
        jsd: Option<f64>,
        avg_reward: Option<f64>,
    ) -> io::Result<()> {
        writeln!(
            self.w,
            "{step},{states_visited},{loss},{aux},{},{},{}",
            opt(l1),
            opt(jsd),
            opt(avg_reward)
        )
    }

    pub fn into_inner(self) -> W {
        self.w
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The PE benchmark report, mirroring the paper's table columns.
pub const BENCH_HEADER: &str = "config,pairs,errors,error_rate,elapsed_ms";

pub fn bench_rows(rows: &[crate::graphsym::BenchReport]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.config,
            r.pairs,
            r.errors,
            r.error_rate(),
            r.elapsed_ms
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_format() {
        let mut csv = MetricsCsv::new(Vec::new()).unwrap();
        csv.row(0, 12, 0.5, -1.0, Some(0.25), None, None).unwrap();
        csv.row(1, 24, 0.25, -0.9, None, None, None).unwrap();
        let text = String::from_utf8(csv.into_inner()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), METRICS_HEADER);
        assert_eq!(lines.next().unwrap(), "0,12,0.5,-1,0.25,,");
        assert_eq!(lines.next().unwrap(), "1,24,0.25,-0.9,,,");
    }
}
