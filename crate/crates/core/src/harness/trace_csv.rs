//! `trace.csv`: one row per population plus a `pop=all` row per record point.

use std::io::Write;

use super::config::Method;
use super::HarnessError;
use crate::solvers::SolveTrace;

pub const HEADER: &str = "method,iteration,pop,regret,total_regret,br_count,elapsed_s";

/// A parsed row; `pop` is `None` for the `all` row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub method: String,
    pub iteration: usize,
    pub pop: Option<usize>,
    pub regret: f64,
    pub total_regret: f64,
    pub br_count: usize,
    pub elapsed_s: f64,
}

fn fmt9(v: f64) -> String {
    format!("{v:.9}")
}

/// Appends the rows of one method's trace. Single-population traces only get
/// the `all` row, which would otherwise be duplicated.
pub fn write_trace<W: Write>(out: &mut W, method: Method, trace: &SolveTrace<f64>) -> std::io::Result<()> {
    for r in &trace.records {
        let tail = format!(
            "{},{},{:.6}",
            fmt9(r.total),
            r.br_count,
            r.elapsed.as_secs_f64()
        );
        if r.regrets.len() > 1 {
            for (pop, regret) in r.regrets.iter().enumerate() {
                writeln!(out, "{method},{},{pop},{},{tail}", r.iteration, fmt9(*regret))?;
            }
        }
        writeln!(out, "{method},{},all,{},{tail}", r.iteration, fmt9(r.total))?;
    }
    Ok(())
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRow>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| HarnessError::Input(format!("trace header: {e}")))?
        .clone();
    let expected: Vec<&str> = HEADER.split(',').collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(HarnessError::Input(format!(
            "trace header must be `{HEADER}`, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| HarnessError::Input(format!("trace row {}: {e}", line + 2)))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64, HarnessError> {
            field(i).trim().parse::<f64>().map_err(|_| {
                HarnessError::Input(format!(
                    "trace row {}: column `{}` is not a number: {:?}",
                    line + 2,
                    expected[i],
                    field(i)
                ))
            })
        };
        let int = |i: usize| -> Result<usize, HarnessError> {
            field(i).trim().parse::<usize>().map_err(|_| {
                HarnessError::Input(format!(
                    "trace row {}: column `{}` is not an integer: {:?}",
                    line + 2,
                    expected[i],
                    field(i)
                ))
            })
        };
        let pop = match field(2).trim() {
            "all" => None,
            _ => Some(int(2)?),
        };
        rows.push(TraceRow {
            method: field(0).to_string(),
            iteration: int(1)?,
            pop,
            regret: num(3)?,
            total_regret: num(4)?,
            br_count: int(5)?,
            elapsed_s: num(6)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::TraceRecord;
    use std::time::Duration;

    fn trace(regrets: Vec<f64>) -> SolveTrace<f64> {
        let total = regrets.iter().sum();
        SolveTrace {
            records: vec![TraceRecord {
                iteration: 1,
                regrets,
                total,
                br_count: 1,
                elapsed: Duration::from_millis(1500),
                inner_iterations: 0,
            }],
        }
    }

    #[test]
    fn single_population_writes_total_row_only() {
        let mut buf = Vec::new();
        write_trace(&mut buf, Method::Egta, &trace(vec![0.25])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "egta,1,all,0.250000000,0.250000000,1,1.500000\n");
    }

    #[test]
    fn multi_population_rows_sum() {
        let mut buf = HEADER.as_bytes().to_vec();
        buf.push(b'\n');
        write_trace(&mut buf, Method::Fp, &trace(vec![0.1, 0.2, 0.3])).unwrap();
        let rows = read_trace(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(rows.len(), 4);
        let sum: f64 = rows.iter().filter(|r| r.pop.is_some()).map(|r| r.regret).sum();
        assert!((sum - rows[3].total_regret).abs() < 1e-9);
        assert_eq!(rows[3].pop, None);
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(read_trace("a,b\n1,2\n").is_err());
        let bad = format!("{HEADER}\nfp,x,all,1,1,1,0\n");
        assert!(read_trace(&bad).is_err());
    }
}
