//! Free-format MPS export and import.
//!
//! The writer emits deterministic output: columns in declaration order with
//! `INTORG`/`INTEND` markers around integer runs, explicit bounds for every
//! column, and the objective constant encoded as a negated RHS entry on the
//! objective row. Floats are printed with Rust's shortest round-trip
//! formatting, so write → read reproduces the problem bit-exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::milp::{MilpError, MilpProblem, RowSense, VarKey};

const OBJ_ROW: &str = "OBJ";

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("model error: {0}")]
    Model(#[from] MilpError),
}

/// Render a problem as free-format MPS.
pub fn write_mps(p: &MilpProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!("NAME {}\n", if p.name.is_empty() { "MODEL" } else { &p.name }));
    out.push_str("ROWS\n");
    out.push_str(&format!(" N {OBJ_ROW}\n"));
    for row in p.rows() {
        let s = match row.sense {
            RowSense::Le => 'L',
            RowSense::Ge => 'G',
            RowSense::Eq => 'E',
        };
        out.push_str(&format!(" {s} {}\n", row.name));
    }

    // Row entries per column, in row order within each column.
    let mut per_col: Vec<Vec<(&str, f64)>> = vec![Vec::new(); p.num_cols()];
    for row in p.rows() {
        for &(c, a) in &row.coeffs {
            per_col[c].push((row.name.as_str(), a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0usize;
    for (c, col) in p.cols().iter().enumerate() {
        if col.integer != in_int {
            let kind = if col.integer { "INTORG" } else { "INTEND" };
            out.push_str(&format!(" MARKER{marker} 'MARKER' '{kind}'\n"));
            marker += 1;
            in_int = col.integer;
        }
        let name = col.key.to_string();
        if col.objective != 0.0 {
            out.push_str(&format!(" {name} {OBJ_ROW} {}\n", col.objective));
        }
        for (row, a) in &per_col[c] {
            out.push_str(&format!(" {name} {row} {a}\n"));
        }
    }
    if in_int {
        out.push_str(&format!(" MARKER{marker} 'MARKER' 'INTEND'\n"));
    }

    out.push_str("RHS\n");
    if p.objective_offset != 0.0 {
        out.push_str(&format!(" RHS {OBJ_ROW} {}\n", -p.objective_offset));
    }
    for row in p.rows() {
        if row.rhs != 0.0 {
            out.push_str(&format!(" RHS {} {}\n", row.name, row.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for col in p.cols() {
        let name = col.key.to_string();
        let (lo, hi) = (col.lower, col.upper);
        if lo == hi {
            out.push_str(&format!(" FX BND {name} {lo}\n"));
        } else {
            if lo.is_finite() {
                out.push_str(&format!(" LO BND {name} {lo}\n"));
            } else {
                out.push_str(&format!(" MI BND {name}\n"));
            }
            if hi.is_finite() {
                out.push_str(&format!(" UP BND {name} {hi}\n"));
            } else {
                out.push_str(&format!(" PL BND {name}\n"));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

pub fn write_mps_file(p: &MilpProblem, path: &Path) -> Result<(), MpsError> {
    fs::write(path, write_mps(p))?;
    Ok(())
}

/// Parse free-format MPS into a problem with [`VarKey::Named`] columns.
pub fn read_mps(text: &str) -> Result<MilpProblem, MpsError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Ranges,
        Bounds,
        Done,
    }
    struct ColAcc {
        integer: bool,
        obj: f64,
        entries: Vec<(usize, f64)>, // (row index, coeff)
        lower: f64,
        upper: f64,
        bounded: bool,
    }

    let mut name = String::from("MODEL");
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<(String, RowSense)> = Vec::new();
    let mut row_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut cols: Vec<(String, ColAcc)> = Vec::new();
    let mut col_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut rhs: BTreeMap<usize, f64> = BTreeMap::new();
    let mut offset = 0.0f64;
    let mut in_int = false;

    let err = |ln: usize, m: &str| MpsError::Parse(ln, m.to_string());
    let num = |ln: usize, s: &str| -> Result<f64, MpsError> {
        s.parse::<f64>()
            .map_err(|_| MpsError::Parse(ln, format!("bad number {s}")))
    };

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let first = fields[0].to_ascii_uppercase();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            match first.as_str() {
                "NAME" => {
                    if fields.len() > 1 {
                        name = fields[1].to_string();
                    }
                    continue;
                }
                "ROWS" => {
                    section = Section::Rows;
                    continue;
                }
                "COLUMNS" => {
                    section = Section::Columns;
                    continue;
                }
                "RHS" => {
                    section = Section::Rhs;
                    continue;
                }
                "RANGES" => {
                    section = Section::Ranges;
                    continue;
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                    continue;
                }
                "ENDATA" => {
                    section = Section::Done;
                    break;
                }
                other => return Err(err(ln, &format!("unknown section {other}"))),
            }
        }
        match section {
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(err(ln, "expected <sense> <row>"));
                }
                let rname = fields[1].to_string();
                match first.as_str() {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(rname);
                        }
                    }
                    s => {
                        let sense = match s {
                            "L" => RowSense::Le,
                            "G" => RowSense::Ge,
                            "E" => RowSense::Eq,
                            _ => return Err(err(ln, &format!("bad row sense {s}"))),
                        };
                        if row_idx.contains_key(&rname) {
                            return Err(err(ln, &format!("duplicate row {rname}")));
                        }
                        row_idx.insert(rname.clone(), rows.len());
                        rows.push((rname, sense));
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        m => return Err(err(ln, &format!("bad marker {m}"))),
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(ln, "expected <col> (<row> <val>)+"));
                }
                let cname = fields[0];
                let c = *col_idx.entry(cname.to_string()).or_insert_with(|| {
                    cols.push((
                        cname.to_string(),
                        ColAcc {
                            integer: in_int,
                            obj: 0.0,
                            entries: Vec::new(),
                            lower: 0.0,
                            upper: f64::INFINITY,
                            bounded: false,
                        },
                    ));
                    cols.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let v = num(ln, pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        cols[c].1.obj += v;
                    } else {
                        let r = *row_idx
                            .get(pair[0])
                            .ok_or_else(|| err(ln, &format!("unknown row {}", pair[0])))?;
                        cols[c].1.entries.push((r, v));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(ln, "expected <set> (<row> <val>)+"));
                }
                for pair in fields[1..].chunks(2) {
                    let v = num(ln, pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        offset = -v;
                    } else {
                        let r = *row_idx
                            .get(pair[0])
                            .ok_or_else(|| err(ln, &format!("unknown row {}", pair[0])))?;
                        rhs.insert(r, v);
                    }
                }
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(err(ln, "expected <type> <set> <col> [<val>]"));
                }
                let cname = fields[2];
                let c = *col_idx
                    .get(cname)
                    .ok_or_else(|| err(ln, &format!("unknown column {cname}")))?;
                let acc = &mut cols[c].1;
                acc.bounded = true;
                match first.as_str() {
                    "LO" | "LI" => acc.lower = num(ln, fields[3])?,
                    "UP" | "UI" => acc.upper = num(ln, fields[3])?,
                    "FX" => {
                        let v = num(ln, fields[3])?;
                        acc.lower = v;
                        acc.upper = v;
                    }
                    "FR" => {
                        acc.lower = f64::NEG_INFINITY;
                        acc.upper = f64::INFINITY;
                    }
                    "MI" => acc.lower = f64::NEG_INFINITY,
                    "PL" => acc.upper = f64::INFINITY,
                    "BV" => {
                        acc.integer = true;
                        acc.lower = 0.0;
                        acc.upper = 1.0;
                    }
                    t => return Err(err(ln, &format!("bad bound type {t}"))),
                }
            }
            Section::Ranges => return Err(err(ln, "RANGES section is not supported")),
            Section::None | Section::Done => return Err(err(ln, "data outside a section")),
        }
    }
    if section != Section::Done {
        return Err(MpsError::Parse(text.lines().count(), "missing ENDATA".into()));
    }

    let mut p = MilpProblem::new(name);
    p.objective_offset = offset;
    for (cname, acc) in &cols {
        // Integer columns default to [0, 1] unless explicitly bounded.
        let (lo, hi) = if acc.integer && !acc.bounded {
            (0.0, 1.0)
        } else {
            (acc.lower, acc.upper)
        };
        p.add_variable(VarKey::Named(cname.clone()), lo, hi, acc.obj, acc.integer)?;
    }
    for (r, (rname, sense)) in rows.iter().enumerate() {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for (c, (_, acc)) in cols.iter().enumerate() {
            for &(ri, v) in &acc.entries {
                if ri == r {
                    coeffs.push((c, v));
                }
            }
        }
        p.add_row(rname.clone(), coeffs, *sense, rhs.get(&r).copied().unwrap_or(0.0))?;
    }
    Ok(p)
}

pub fn read_mps_file(path: &Path) -> Result<MilpProblem, MpsError> {
    read_mps(&fs::read_to_string(path)?)
}
