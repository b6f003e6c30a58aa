use std::io::{self, BufRead, BufWriter, Write};
use std::time::Instant;

use persprox::SolverConfig;
use rayon::prelude::*;

use crate::records::{ErrorRecord, QueryRecord, ResultRecord};
use crate::{EXIT_OK, EXIT_PARTIAL};

/// Lines evaluated concurrently before their output is flushed in order.
const CHUNK: usize = 256;

fn handle(line_no: usize, line: &str, solver: &SolverConfig) -> std::result::Result<ResultRecord, ErrorRecord> {
    let fail = |message: String| ErrorRecord { line: line_no, message };
    let record: QueryRecord = serde_json::from_str(line).map_err(|e| fail(format!("parse error: {e}")))?;
    let start = Instant::now();
    let result = record.evaluate(solver).map_err(|e| fail(e.to_string()))?;
    Ok(ResultRecord::new(result, start.elapsed().as_micros() as u64))
}

fn flush(chunk: &mut Vec<(usize, String)>, solver: &SolverConfig, out: &mut impl Write) -> io::Result<bool> {
    let results: Vec<_> = chunk.par_iter().map(|(k, line)| handle(*k, line, solver)).collect();
    chunk.clear();
    let mut all_ok = true;
    for r in results {
        let text = match r {
            Ok(rec) => serde_json::to_string(&rec),
            Err(err) => {
                all_ok = false;
                serde_json::to_string(&err)
            }
        }
        .map_err(io::Error::other)?;
        writeln!(out, "{text}")?;
    }
    out.flush()?;
    Ok(all_ok)
}

fn stream(solver: &SolverConfig) -> io::Result<bool> {
    let stdin = io::stdin().lock();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut chunk = Vec::with_capacity(CHUNK);
    let mut all_ok = true;
    for (idx, line) in stdin.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        chunk.push((idx + 1, line));
        if chunk.len() == CHUNK {
            all_ok &= flush(&mut chunk, solver, &mut out)?;
        }
    }
    if !chunk.is_empty() {
        all_ok &= flush(&mut chunk, solver, &mut out)?;
    }
    Ok(all_ok)
}

pub fn run(solver: &SolverConfig) -> u8 {
    if let Err(e) = solver.validate() {
        eprintln!("error: {e}");
        return crate::EXIT_USAGE;
    }
    match stream(solver) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_PARTIAL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PARTIAL
        }
    }
}
