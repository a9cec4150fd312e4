//! Text formats: sweep CSV, gnuplot tables and scripts, Taylor error tables,
//! and the two-column tabulated-potential input.
//!
//! Numbers are written with `{:.12e}` except η, which uses the shortest
//! round-trip form. Output depends only on the values, so identical runs
//! produce identical bytes.

use crate::error::{Error, Result};
use crate::experiments::{SweepResult, TaylorStudy};
use cqed_core::particle1d::Potential;
use std::fmt::Write as _;

pub const UNITS_LINE: &str = "# units: energies in units of hbar*omega_c; t_n = E_n - E_0";

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Header line `model,eta,cutoff,converged,t1,…,tK`.
pub fn csv_header(levels: usize) -> String {
    let mut h = String::from("model,eta,cutoff,converged");
    for k in 1..=levels {
        write!(h, ",t{k}").unwrap();
    }
    h
}

/// One comment line with units and run metadata, the header, then one row
/// per `(model, η)`.
pub fn sweep_csv(result: &SweepResult, context: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{UNITS_LINE}; detuning = {}; {context}", result.detuning).unwrap();
    writeln!(out, "{}", csv_header(result.levels)).unwrap();
    for r in &result.rows {
        write!(out, "{},{},{},{}", r.model, r.eta, r.cutoff, r.converged).unwrap();
        for t in &r.transitions {
            write!(out, ",{}", num(*t)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Whitespace table with one gnuplot data block per model, blocks separated
/// by two blank lines so `index i` selects model `i`.
pub fn sweep_table(result: &SweepResult) -> String {
    let mut out = String::new();
    writeln!(out, "{UNITS_LINE}").unwrap();
    let mut models: Vec<&str> = Vec::new();
    for r in &result.rows {
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    for (i, m) in models.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# model {m}").unwrap();
        write!(out, "# eta cutoff converged").unwrap();
        for k in 1..=result.levels {
            write!(out, " t{k}").unwrap();
        }
        out.push('\n');
        for r in result.rows_for(m) {
            write!(out, "{} {} {}", r.eta, r.cutoff, u8::from(r.converged)).unwrap();
            for t in &r.transitions {
                write!(out, " {}", num(*t)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Gnuplot script plotting every level of every block in `data_file`.
pub fn sweep_script(data_file: &str, blocks: usize, levels: usize, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "set title '{title}'").unwrap();
    writeln!(out, "set xlabel 'eta'").unwrap();
    writeln!(out, "set ylabel '(E_n - E_0) / omega_c'").unwrap();
    writeln!(out, "set key off").unwrap();
    writeln!(
        out,
        "plot for [b=0:{}] for [c=4:{}] '{data_file}' index b using 1:c with lines lc b+1",
        blocks.saturating_sub(1),
        3 + levels
    )
    .unwrap();
    out
}

/// `order,eta,error` rows with the error metric stated in the first line.
pub fn taylor_csv(study: &TaylorStudy) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# error = max_n |t_n - t_n(exact)| / max(t_n(exact), omega_c) over the lowest levels; cutoff = {}",
        study.cutoff
    )
    .unwrap();
    writeln!(out, "order,eta,error").unwrap();
    for c in &study.curves {
        for (eta, e) in study.eta_grid.iter().zip(&c.errors) {
            writeln!(out, "{},{},{}", c.order, eta, num(*e)).unwrap();
        }
    }
    out
}

pub fn taylor_table(study: &TaylorStudy) -> String {
    let mut out = String::new();
    for (i, c) in study.curves.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# order {}\n# eta error", c.order).unwrap();
        for (eta, e) in study.eta_grid.iter().zip(&c.errors) {
            writeln!(out, "{} {}", eta, num(*e)).unwrap();
        }
    }
    out
}

pub fn taylor_script(data_file: &str, blocks: usize) -> String {
    format!(
        "set xlabel 'eta'\nset ylabel 'relative error'\nset logscale y\nplot for [b=0:{}] '{data_file}' index b using 1:2 with lines lc b+1 title columnheader(1)\n",
        blocks.saturating_sub(1)
    )
}

/// Parses `x v` pairs, one per line, `#` starting a comment. The abscissae
/// must increase strictly.
pub fn parse_tabulated_potential(text: &str) -> Result<Potential> {
    let mut x = Vec::new();
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let parsed: Option<(f64, f64)> = match fields.as_slice() {
            [a, b] => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        let (xi, vi) = parsed.ok_or_else(|| Error::Validation(format!("potential line {}: expected `x v`", i + 1)))?;
        x.push(xi);
        v.push(vi);
    }
    let p = Potential::Tabulated { x, v };
    p.validate()?;
    Ok(p)
}
